"""Corrected estimators against analytic values and the Fock oracle."""
import math

import numpy as np
import pytest

from sqmzi.errors import NumericalFailure, ValidationError
from sqmzi.estimators import (
    Moment,
    corrected_j_moments,
    corrected_number_moments,
    mean_with_stderr,
    scheme2_sensitivity_from_moments,
    sensitivity_from_sweep,
    signal_statistics,
)
from sqmzi.oracle import FockState, prepare_gaussian_fock, product_state
from sqmzi.sampler import (
    SqueezeSpec,
    TrajectoryEnsemble,
    complex_noise,
    sample_coherent,
    sample_single_mode_squeezed,
    sample_two_mode_squeezed,
)

SEED = 77


def make_ensemble(**modes):
    return TrajectoryEnsemble(modes, seed=SEED)


def test_vacuum_moments_zero():
    ens = make_ensemble(v=sample_coherent(0.0, 200_000, SEED))
    ms = corrected_number_moments(ens)
    assert abs(ms.n["v"].value) < 5 * ms.n["v"].stderr
    assert abs(ms.n2["v"].value) < 5 * ms.n2["v"].stderr
    ms.check_invariants()


def test_coherent_number_variance():
    # frozen Poisson oracle value: V(N) = 100 for mean 100
    ens = make_ensemble(c=sample_coherent(100.0, 200_000, SEED))
    ms = corrected_number_moments(ens)
    var = ms.n2["c"].value - ms.n["c"].value ** 2
    se = math.hypot(ms.n2["c"].stderr, 2 * ms.n["c"].value * ms.n["c"].stderr)
    assert abs(var - 100.0) < 5 * se


def test_squeezed_mean_number():
    ens = make_ensemble(s=sample_single_mode_squeezed(SqueezeSpec(3.8), 400_000, SEED))
    ms = corrected_number_moments(ens)
    assert abs(ms.n["s"].value - math.sinh(3.8) ** 2) < 5 * ms.n["s"].stderr


def test_cross_moment_vs_fock_oracle():
    # independent coherent states: <N1 N2> = N1*N2; oracle cross-check at
    # tiny occupation where the Fock state is exactly computable.
    fock = product_state([
        (("m1",), prepare_gaussian_fock("coherent", 1.2, 30).amps),
        (("m2",), prepare_gaussian_fock("coherent", 0.7, 30).amps),
    ])
    exact = fock.number_cross("m1", "m2")
    assert exact == pytest.approx(1.2**2 * 0.7**2, rel=1e-10)

    noise = complex_noise(SEED, 400_000, ("m1", "m2"))
    ens = make_ensemble(
        m1=1.2 + noise["m1"],
        m2=0.7 + noise["m2"],
    )
    ms = corrected_number_moments(ens)
    got = ms.cross[("m1", "m2")]
    assert abs(got.value - exact) < 5 * got.stderr


def test_j_moments_vacuum():
    noise = complex_noise(SEED, 300_000, ("p", "m"))
    ens = make_ensemble(**{"a+": noise["p"], "a-": noise["m"]})
    ms = corrected_j_moments(ens)
    for key in ("jx2", "jz2", "jx4", "jz4", "jx2jz2_sym", "jxjz_anti2"):
        mom = getattr(ms, key)
        assert abs(mom.value) < 5 * mom.stderr, key


def test_j_moments_match_fock_oracle_tmsv():
    # TMSV at r=0.6 mapped straight onto the atomic modes (perfect transfer):
    # compare all seven corrected moments against the exact oracle.
    r = 0.6
    fock = prepare_gaussian_fock("two_mode_squeezed", SqueezeSpec(r), cutoff=40)
    exact = FockState(("plus", "minus"), fock.amps).j_moments("plus", "minus")

    bp, bm = sample_two_mode_squeezed(SqueezeSpec(r), 600_000, SEED)
    ens = make_ensemble(**{"a+": -1j * bp, "a-": -1j * bm})
    ms = corrected_j_moments(ens)
    for key, attr in [("jx2", "jx2"), ("jz2", "jz2"), ("jx4", "jx4"), ("jz4", "jz4"),
                      ("jx2jz2_sym", "jx2jz2_sym"), ("jxjz_anti2", "jxjz_anti2")]:
        mom = getattr(ms, attr)
        assert abs(mom.value - exact[key]) < 5 * mom.stderr, (key, mom.value, exact[key])
    got_np = ms.cross[("a+", "a-")]
    assert abs(got_np.value - exact["npnm"]) < 5 * got_np.stderr


def test_j_moments_tmsv_known_values():
    r = 1.0
    nt = 2 * math.sinh(r) ** 2
    bp, bm = sample_two_mode_squeezed(SqueezeSpec(r), 600_000, SEED)
    ens = make_ensemble(**{"a+": -1j * bp, "a-": -1j * bm})
    ms = corrected_j_moments(ens)
    assert abs(ms.jz2.value) < 5 * ms.jz2.stderr
    assert abs(4 * ms.jx2.value - nt * (nt + 2)) < 5 * 4 * ms.jx2.stderr


def test_signal_statistics_corrections():
    # S = N1 - N2 on two vacua: corrected mean and variance both vanish
    noise = complex_noise(SEED, 200_000, ("x", "y"))
    s = np.abs(noise["x"]) ** 2 - np.abs(noise["y"]) ** 2
    mean, var = signal_statistics(s, ordering_weight=2.0)
    assert abs(mean.value) < 5 * mean.stderr
    assert abs(var.value) < 5 * var.stderr


def test_stderr_scaling_with_ensemble_size():
    big = np.abs(sample_coherent(50.0, 400_000, SEED)) ** 2
    small = big[:200_000]
    se_big = mean_with_stderr(big).stderr
    se_small = mean_with_stderr(small).stderr
    ratio = se_small / se_big
    assert ratio == pytest.approx(math.sqrt(2), rel=0.2)


def test_sweep_sensitivity_sql():
    # <S> = N cos(phi), V = N: delta_phi = 1/sqrt(N) at phi = pi/2
    n = 1e6
    step = 1e-3
    phis = np.array([math.pi / 2 - step, math.pi / 2, math.pi / 2 + step])
    means = [Moment(n * math.cos(p), 0.0) for p in phis]
    variances = [Moment(n, 0.0) for p in phis]
    res = sensitivity_from_sweep(phis, means, variances, math.pi / 2, step)
    assert res.delta_phi == pytest.approx(1 / math.sqrt(n), rel=1e-5)
    assert res.stderr == 0.0


def test_sweep_constant_signal_indeterminate():
    phis = np.array([1.569, 1.5707963, 1.5727963])
    step = 1e-3
    phis = np.array([math.pi / 2 - step, math.pi / 2, math.pi / 2 + step])
    means = [Moment(5.0, 0.1)] * 3
    variances = [Moment(2.0, 0.05)] * 3
    with pytest.raises(NumericalFailure):
        sensitivity_from_sweep(phis, means, variances, math.pi / 2, step)


def test_sweep_finite_difference_accuracy():
    # noise-free curve: finite-difference slope error < 1e-5 relative
    n = 1234.0
    step = 1e-3
    phi0 = 1.1
    phis = np.array([phi0 - step, phi0, phi0 + step])
    means = [Moment(n * math.cos(p), 0.0) for p in phis]
    variances = [Moment(n, 0.0)] * 3
    res = sensitivity_from_sweep(phis, means, variances, phi0, step)
    exact = math.sqrt(n) / (n * abs(math.sin(phi0)))
    assert abs(res.delta_phi - exact) / exact < 1e-5


def test_scheme2_moment_sensitivity_heisenberg():
    r = 1.0
    nt = 2 * math.sinh(r) ** 2
    bp, bm = sample_two_mode_squeezed(SqueezeSpec(r), 400_000, SEED)
    ens = make_ensemble(**{"a+": -1j * bp, "a-": -1j * bm})
    ms = corrected_j_moments(ens)
    res = scheme2_sensitivity_from_moments(ms, recycled=True)
    expected = 1 / math.sqrt(nt * (nt + 2))
    assert abs(res.delta_phi - expected) < 3 * res.stderr

    res_nr = scheme2_sensitivity_from_moments(ms, recycled=False)
    assert res_nr.delta_phi == pytest.approx(expected, rel=0.05)


def test_scheme2_requires_j_moments():
    ens = make_ensemble(**{"a+": sample_coherent(1.0, 1000, SEED)}, **{"a-": sample_coherent(1.0, 1000, SEED + 1)})
    ms = corrected_number_moments(ens)
    with pytest.raises(ValidationError):
        scheme2_sensitivity_from_moments(ms, recycled=True)
