"""Sampler statistics against analytic and Fock-oracle expectations."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sqmzi.errors import ValidationError
from sqmzi.sampler import (
    SqueezeSpec,
    TrajectoryEnsemble,
    complex_noise,
    philox4x64,
    sample_coherent,
    sample_single_mode_squeezed,
    sample_two_mode_squeezed,
)

SEED = 20240811


def corrected_mean_number(alpha):
    return np.mean(np.abs(alpha) ** 2) - 0.5


def stderr_of_mean(x):
    return np.std(x, ddof=1) / math.sqrt(len(x))


def test_noise_normalization():
    # mean(eta) -> 0 and mean(|eta|^2) -> 1/2 at one million draws, 5 s.e.
    eta = complex_noise(SEED, 1_000_000, ("m",))["m"]
    n2 = np.abs(eta) ** 2
    assert abs(np.mean(n2) - 0.5) < 5 * stderr_of_mean(n2)
    assert abs(np.mean(eta.real)) < 5 * stderr_of_mean(eta.real)
    assert abs(np.mean(eta.imag)) < 5 * stderr_of_mean(eta.imag)


def test_vacuum_case():
    alpha = sample_coherent(0.0, 200_000, seed=SEED)
    n2 = np.abs(alpha) ** 2
    assert abs(np.mean(n2) - 0.5) < 5 * stderr_of_mean(n2)
    assert abs(corrected_mean_number(alpha)) < 5 * stderr_of_mean(n2)


def test_coherent_large_mean():
    alpha = sample_coherent(1e6, 10_000, seed=SEED)
    n2 = np.abs(alpha) ** 2
    assert abs(corrected_mean_number(alpha) - 1e6) < 5 * stderr_of_mean(n2)


def test_coherent_number_variance_poissonian():
    # V(N) for a coherent state equals its mean.  Expected value 100 frozen
    # from the Fock-basis oracle (Poisson weights): sum n^2 p_n - (sum n p_n)^2.
    mean_n = 100.0
    n = np.arange(0, 301)
    logp = -mean_n + n * math.log(mean_n) - [math.lgamma(k + 1) for k in n]
    p = np.exp(logp)
    fock_var = float(np.sum(n**2 * p) - np.sum(n * p) ** 2)
    assert abs(fock_var - 100.0) < 1e-9

    alpha = sample_coherent(mean_n, 100_000, seed=SEED)
    n2 = np.abs(alpha) ** 2
    # corrected <N^2> = mean|a|^4 - mean|a|^2
    second = np.mean(n2**2) - np.mean(n2)
    var = second - corrected_mean_number(alpha) ** 2
    # se of the variance estimate via batching
    batches = n2.reshape(100, -1)
    bvals = np.mean(batches**2, axis=1) - np.mean(batches, axis=1) - (np.mean(batches, axis=1) - 0.5) ** 2
    se = np.std(bvals, ddof=1) / 10
    assert abs(var - fock_var) < 5 * se


def test_squeezed_r0_is_vacuum():
    beta = sample_single_mode_squeezed(SqueezeSpec(0.0), 200_000, seed=SEED)
    n2 = np.abs(beta) ** 2
    assert abs(np.mean(n2) - 0.5) < 5 * stderr_of_mean(n2)


def test_squeezed_mean_number_ropt():
    # sinh^2(3.8) ~ 500 input photons at the optimum of the headline scheme
    beta = sample_single_mode_squeezed(SqueezeSpec(3.8), 400_000, seed=SEED)
    n2 = np.abs(beta) ** 2
    expected = math.sinh(3.8) ** 2
    assert abs(expected - 499.04) < 0.01
    assert abs(corrected_mean_number(beta) - expected) < 5 * stderr_of_mean(n2)


@pytest.mark.parametrize("r", [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0])
def test_squeezed_mean_number_grid(r):
    count = 400_000
    beta = sample_single_mode_squeezed(SqueezeSpec(r), count, seed=SEED + int(2 * r))
    n2 = np.abs(beta) ** 2
    assert abs(corrected_mean_number(beta) - math.sinh(r) ** 2) < 5 * stderr_of_mean(n2)


def test_squeezed_quadrature_variances():
    # X^theta = e^{i theta} b + e^{-i theta} b*; at theta_sq = pi/2 the
    # amplitude quadrature is anti-squeezed (e^2) and the phase quadrature
    # squeezed (e^-2).  Values follow from the sampling map covariance and
    # were cross-checked against the truncated-Fock oracle.
    beta = sample_single_mode_squeezed(SqueezeSpec(1.0, math.pi / 2), 400_000, seed=SEED)
    x0 = 2 * beta.real
    xp = 2 * np.real(np.exp(1j * math.pi / 2) * beta)
    for values, expected in [(x0, math.e**2), (xp, math.e**-2)]:
        sq = values**2
        assert abs(np.var(values) - expected) < 5 * stderr_of_mean(sq)


def test_two_mode_r0_independent_vacua():
    bp, bm = sample_two_mode_squeezed(SqueezeSpec(0.0), 200_000, seed=SEED)
    assert abs(corrected_mean_number(bp)) < 5 * stderr_of_mean(np.abs(bp) ** 2)
    corr = np.mean(bp * np.conj(bm))
    assert abs(corr) < 5 * stderr_of_mean(np.real(bp * np.conj(bm)))


def test_two_mode_total_number_r61():
    # r ~ 6.1 gives ~1e5 photons across the pair
    r = 6.1
    bp, bm = sample_two_mode_squeezed(SqueezeSpec(r), 200_000, seed=SEED)
    total = np.abs(bp) ** 2 + np.abs(bm) ** 2 - 1.0
    expected = 2 * math.sinh(r) ** 2
    assert expected == pytest.approx(1.0e5, rel=0.1)
    assert abs(np.mean(total) - expected) < 5 * stderr_of_mean(total)


@pytest.mark.parametrize("r", [0.3, 1.0, 2.0])
def test_two_mode_number_difference_zero_variance(r):
    # Pair correlation of the two-mode squeezed vacuum: corrected mean and
    # corrected variance of N+ - N- both vanish identically.
    bp, bm = sample_two_mode_squeezed(SqueezeSpec(r), 400_000, seed=SEED)
    diff = np.abs(bp) ** 2 - np.abs(bm) ** 2
    assert abs(np.mean(diff)) < 5 * stderr_of_mean(diff)
    # corrected V(N+ - N-) = raw variance - 1/2
    batches = diff.reshape(100, -1)
    bvar = np.var(batches, axis=1, ddof=1) - 0.5
    se = np.std(bvar, ddof=1) / 10
    assert abs(np.var(diff, ddof=1) - 0.5) < 5 * se


@pytest.mark.parametrize("r", [0.5, 1.5, 3.0])
def test_two_mode_cross_moment(r):
    bp, bm = sample_two_mode_squeezed(SqueezeSpec(r), 400_000, seed=SEED)
    cross = bp * bm
    expected = math.cosh(r) * math.sinh(r)
    se = math.hypot(stderr_of_mean(cross.real), stderr_of_mean(cross.imag))
    assert abs(np.abs(np.mean(cross)) - expected) < 5 * se


@given(k0=st.integers(0, 2**64 - 1), k1=st.integers(0, 2**64 - 1))
@settings(max_examples=20, deadline=None)
def test_philox_matches_numpy(k0, k1):
    # Our vectorized block function must be bit-compatible with numpy's
    # Philox: numpy's n-th buffered block equals counter = n + 1 here.
    key_arr = np.array([k0, k1], dtype=np.uint64)
    ref = np.random.Philox(key=key_arr).random_raw(12)
    counters = np.zeros((3, 4), dtype=np.uint64)
    counters[:, 0] = [1, 2, 3]
    mine = philox4x64(counters, np.broadcast_to(key_arr, (3, 2))).ravel()
    assert np.array_equal(mine, np.asarray(ref, dtype=np.uint64))


def test_determinism_bit_identical():
    a = sample_coherent(10.0, 5000, seed=123)
    b = sample_coherent(10.0, 5000, seed=123)
    assert np.array_equal(a, b)
    c = sample_coherent(10.0, 5000, seed=124)
    assert not np.array_equal(a, c)


def test_substreams_are_prefix_stable():
    # Extending the ensemble must not change earlier trajectories.
    small = sample_coherent(4.0, 1000, seed=9)
    big = sample_coherent(4.0, 2000, seed=9)
    assert np.array_equal(small, big[:1000])


def test_invalid_inputs_rejected():
    with pytest.raises(ValidationError):
        sample_coherent(-1.0, 100)
    with pytest.raises(ValidationError):
        sample_coherent(math.nan, 100)
    with pytest.raises(ValidationError):
        SqueezeSpec(-0.5)
    with pytest.raises(ValidationError):
        complex_noise(0, 1, ("m",))


def test_ensemble_invariants():
    modes = {"a": np.zeros(10, dtype=complex), "b": np.ones(10, dtype=complex)}
    ens = TrajectoryEnsemble(modes, seed=1)
    assert ens.count == 10 and ens.labels == ("a", "b")
    with pytest.raises(ValidationError):
        TrajectoryEnsemble({"a": np.zeros(10), "b": np.zeros(9)}, seed=1)
    bad = {"a": np.array([np.nan + 0j, 0j])}
    with pytest.raises(ValidationError):
        TrajectoryEnsemble(bad, seed=1)


@given(theta=st.floats(-20, 20, allow_nan=False))
@settings(max_examples=25, deadline=None)
def test_squeeze_angle_reduced(theta):
    spec = SqueezeSpec(1.0, theta)
    assert 0 <= spec.theta_sq < 2 * math.pi


@given(r=st.floats(0, 3), theta=st.floats(0, 6.2))
@settings(max_examples=15, deadline=None)
def test_two_mode_map_symmetry(r, theta):
    # swapping the two noise inputs swaps the outputs
    spec = SqueezeSpec(r, theta)
    noise = complex_noise(SEED, 100, ("p", "m"))
    from sqmzi.sampler import two_mode_squeezed_from_noise

    bp, bm = two_mode_squeezed_from_noise(spec, noise["p"], noise["m"])
    bm2, bp2 = two_mode_squeezed_from_noise(spec, noise["m"], noise["p"])
    assert np.allclose(bp, bp2) and np.allclose(bm, bm2)
