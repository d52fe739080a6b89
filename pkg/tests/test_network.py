"""Linear network: beamsplitter algebra, the MZ signal identity, losses,
homodyne quadrature convergence."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sqmzi.errors import ValidationError
from sqmzi.estimators import corrected_number_moments, signal_statistics
from sqmzi.network import (
    LocalOscillator,
    LossSpec,
    beamsplitter,
    homodyne_mix,
    loss_channel,
    mach_zehnder,
    mz_signal,
    phase_shift,
)
from sqmzi.oracle import FockState, product_state, prepare_gaussian_fock
from sqmzi.sampler import (
    SqueezeSpec,
    TrajectoryEnsemble,
    complex_noise,
    coherent_from_noise,
    sample_coherent,
    sample_single_mode_squeezed,
    squeezed_from_noise,
)

SEED = 8080


def random_pair(n=1000, seed=3):
    rng = np.random.default_rng(seed)
    return (rng.normal(size=n) + 1j * rng.normal(size=n),
            rng.normal(size=n) + 1j * rng.normal(size=n))


def test_beamsplitter_identity_mirror_and_half():
    a, b = random_pair(8)
    oa, ob = beamsplitter(a, b, 0.0)
    assert np.allclose(oa, a) and np.allclose(ob, b)
    oa, ob = beamsplitter(a, b, math.pi)
    assert np.allclose(oa, -1j * b) and np.allclose(ob, -1j * a)
    oa, ob = beamsplitter(np.array([1.0 + 0j]), np.array([0j]), math.pi / 2)
    assert np.allclose(oa, 1 / math.sqrt(2)) and np.allclose(ob, -1j / math.sqrt(2))


@given(theta=st.floats(0, 2 * math.pi))
@settings(max_examples=50, deadline=None)
def test_beamsplitter_unitary(theta):
    a, b = random_pair(64, seed=11)
    oa, ob = beamsplitter(a, b, theta)
    before = np.abs(a) ** 2 + np.abs(b) ** 2
    after = np.abs(oa) ** 2 + np.abs(ob) ** 2
    assert np.max(np.abs(after - before) / before) < 1e-12


@given(phi=st.floats(-7, 7))
@settings(max_examples=50, deadline=None)
def test_mz_signal_identity_per_trajectory(phi):
    # N1(tf) - N2(tf) = cos(phi)(N2 - N1) + sin(phi)(a1* a2 + a2* a1), exactly
    a1, a2 = random_pair(256, seed=5)
    lhs = mz_signal(a1, a2, phi)
    rhs = (math.cos(phi) * (np.abs(a2) ** 2 - np.abs(a1) ** 2)
           + math.sin(phi) * 2 * np.real(np.conj(a1) * a2))
    assert np.allclose(lhs, rhs, atol=1e-10)


def test_mz_phi_zero_preserves_numbers():
    a1, a2 = random_pair(100, seed=6)
    f1, f2 = mach_zehnder(a1, a2, 0.0)
    # phi = 0: outputs are a relabeling with phases; numbers swap
    assert np.allclose(np.abs(f1) ** 2, np.abs(a2) ** 2, atol=1e-12)
    assert np.allclose(np.abs(f2) ** 2, np.abs(a1) ** 2, atol=1e-12)
    total0 = np.abs(a1) ** 2 + np.abs(a2) ** 2
    total1 = np.abs(f1) ** 2 + np.abs(f2) ** 2
    assert np.allclose(total0, total1)


def test_mz_coherent_fringe_vs_fock_oracle():
    # vacuum + coherent N in the second input: <N1 - N2> = N cos(phi).
    # Oracle: by the signal identity the exact mean is
    # cos(phi)(<N2> - <N1>) + sin(phi) <a1+ a2 + a2+ a1>, and the cross term
    # vanishes for a vacuum x coherent product, leaving N cos(phi) at N = 4.
    n_mean = 4.0
    st4 = product_state([
        (("a1",), {(0,): 1.0}),
        (("a2",), prepare_gaussian_fock("coherent", math.sqrt(n_mean), 40).amps),
    ])
    cross = st4.apply("+-", "a1", "a2")
    from sqmzi.oracle import inner

    assert abs(inner(st4.amps, cross)) < 1e-12
    for phi in (0.0, 0.7, 2.0):
        exact = math.cos(phi) * (st4.number_mean("a2") - st4.number_mean("a1"))
        assert exact == pytest.approx(n_mean * math.cos(phi), abs=1e-10)

    noise = complex_noise(SEED, 400_000, ("a1", "a2"))
    a1 = noise["a1"]
    a2 = coherent_from_noise(n_mean, noise["a2"])
    for phi in (0.3, 1.2):
        s = mz_signal(a1, a2, phi)
        mean, _ = signal_statistics(s, 2.0)
        assert abs(mean.value - n_mean * math.cos(phi)) < 5 * mean.stderr


def test_mz_scheme1_mean_signal_at_half_pi():
    # complete QST: <S_a> = (N_t - 2 sinh^2 r) cos(phi) -> 0 at phi = pi/2
    n_t, r = 1e4, 1.0
    noise = complex_noise(SEED, 100_000, ("a1", "b"))
    a1 = coherent_from_noise(n_t, noise["a1"])
    a2 = -1j * squeezed_from_noise(SqueezeSpec(r), noise["b"])
    s = mz_signal(a1, a2, math.pi / 2)
    mean, _ = signal_statistics(s, 2.0)
    assert abs(mean.value) < 5 * mean.stderr
    s = mz_signal(a1, a2, 0.6)
    mean, _ = signal_statistics(s, 2.0)
    # identity: <N1f - N2f> = cos(phi)(<N2> - <N1>) with <N2> = sinh^2 r here
    expected = (math.sinh(r) ** 2 - n_t) * math.cos(0.6)
    assert abs(mean.value - expected) < 5 * mean.stderr


def test_loss_channel_endpoints_and_scaling():
    noise = complex_noise(SEED, 200_000, ("c", "v"))
    c = coherent_from_noise(1e6, noise["c"])
    out_id = loss_channel(c, 1.0, noise["v"])
    assert np.array_equal(out_id, c)
    out0 = loss_channel(c, 0.0, noise["v"])
    assert np.array_equal(out0, noise["v"])
    out = loss_channel(c, 0.95, noise["v"])
    ens = TrajectoryEnsemble({"m": out}, SEED)
    ms = corrected_number_moments(ens)
    assert abs(ms.n["m"].value - 0.95e6) < 5 * ms.n["m"].stderr


def test_loss_channel_linearity_with_fixed_noise():
    noise = complex_noise(SEED, 1000, ("v",))["v"]
    x, y = random_pair(1000, seed=9)
    # the map with the same vacuum draw is affine; subtracting the pure-noise
    # part leaves a linear map
    f = lambda z: loss_channel(z, 0.7, noise) - loss_channel(np.zeros_like(z), 0.7, noise)
    assert np.allclose(f(x + y), f(x) + f(y))


def test_network_ops_linear():
    x1, x2 = random_pair(500, seed=13)
    y1, y2 = random_pair(500, seed=14)
    for op in (lambda u, v: beamsplitter(u, v, 1.3), lambda u, v: mach_zehnder(u, v, 0.8)):
        s1, s2 = op(x1 + y1, x2 + y2)
        a1, a2 = op(x1, x2)
        b1, b2 = op(y1, y2)
        assert np.allclose(s1, a1 + b1) and np.allclose(s2, a2 + b2)
    assert np.allclose(phase_shift(x1 + y1, 0.4), phase_shift(x1, 0.4) + phase_shift(y1, 0.4))


def test_lossless_network_preserves_total_number():
    noise = complex_noise(SEED, 100_000, ("a1", "a2"))
    a1 = coherent_from_noise(500.0, noise["a1"])
    a2 = noise["a2"]
    f1, f2 = mach_zehnder(a1, a2, 1.1)
    total = np.abs(f1) ** 2 + np.abs(f2) ** 2 - 1.0
    mean, _ = signal_statistics(total - 500.0, 2.0)
    assert abs(mean.value) < 5 * mean.stderr


def test_homodyne_vacuum_quadrature_unit_variance():
    lo = LocalOscillator(1e8, math.pi / 2)
    noise = complex_noise(SEED, 200_000, ("b", "lo"))
    _, _, s_b = homodyne_mix(noise["b"], lo.amplitude(noise["lo"]))
    _, var = signal_statistics(s_b, 2.0)
    assert abs(var.value / lo.n_mean - 1.0) < 5 * var.stderr / lo.n_mean


def test_homodyne_squeezed_phase_quadrature():
    lo = LocalOscillator(1e8, math.pi / 2)
    noise = complex_noise(SEED, 200_000, ("b", "lo"))
    b = squeezed_from_noise(SqueezeSpec(1.0, math.pi / 2), noise["b"])
    _, _, s_b = homodyne_mix(b, lo.amplitude(noise["lo"]))
    _, var = signal_statistics(s_b, 2.0)
    assert abs(var.value / lo.n_mean - math.e**-2) < 5 * var.stderr / lo.n_mean


def test_homodyne_amplitude_quadrature_antisqueezed():
    lo = LocalOscillator(1e8, 0.0)
    noise = complex_noise(SEED, 200_000, ("b", "lo"))
    b = squeezed_from_noise(SqueezeSpec(1.0, math.pi / 2), noise["b"])
    _, _, s_b = homodyne_mix(b, lo.amplitude(noise["lo"]))
    _, var = signal_statistics(s_b, 2.0)
    assert abs(var.value / lo.n_mean - math.e**2) < 5 * var.stderr / lo.n_mean


def test_homodyne_mean_tracks_displacement():
    # displaced signal: S_b/sqrt(N_lo) -> X^{theta_lo}(b) = 2 Re(e^{i theta} beta)
    lo = LocalOscillator(1e8, 0.3)
    noise = complex_noise(SEED, 50_000, ("b", "lo"))
    beta0 = 2.0 - 0.5j
    b = beta0 + noise["b"]
    _, _, s_b = homodyne_mix(b, lo.amplitude(noise["lo"]))
    mean, _ = signal_statistics(s_b, 2.0)
    expected = math.sqrt(lo.n_mean) * 2 * np.real(np.exp(1j * 0.3) * beta0)
    assert abs(mean.value - expected) < 5 * mean.stderr


def test_homodyne_detector_swap_negates():
    noise = complex_noise(SEED, 1000, ("b", "lo"))
    lo = LocalOscillator(1e6, math.pi / 2).amplitude(noise["lo"])
    b_f, lo_f, s_b = homodyne_mix(noise["b"], lo)
    # swapping the detector labels means reading N_b(tf) - N_lo(tf)
    assert np.allclose(np.abs(b_f) ** 2 - np.abs(lo_f) ** 2, -s_b)


def test_homodyne_identity_2im():
    noise = complex_noise(SEED, 1000, ("b", "lo"))
    lo = LocalOscillator(100.0, 1.0).amplitude(noise["lo"])
    _, _, s_b = homodyne_mix(noise["b"], lo)
    assert np.allclose(s_b, 2 * np.imag(np.conj(lo) * noise["b"]), atol=1e-9)


def test_specs_validated():
    with pytest.raises(ValidationError):
        LossSpec("nowhere", 0.5)
    with pytest.raises(ValidationError):
        LossSpec("pre_qst_optical", 1.5)
    with pytest.raises(ValidationError):
        LocalOscillator(0.0)
    with pytest.raises(ValidationError):
        beamsplitter(np.zeros(2, complex), np.zeros(2, complex), 7.0)
