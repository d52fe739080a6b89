"""Exact Fock-basis oracle: preparation, conservation, known transfer physics."""
import math

import numpy as np
import pytest

from sqmzi.errors import ValidationError
from sqmzi.oracle import (
    FIVE_MODE,
    THREE_MODE,
    FockState,
    exact_evolve,
    prepare_gaussian_fock,
    product_state,
)
from sqmzi.sampler import SqueezeSpec


def vacuum_part():
    return (("v",), {(0,): 1.0})


def test_coherent_poisson_weights():
    state = prepare_gaussian_fock("coherent", 1.0, cutoff=25)
    for n in range(6):
        expected = math.exp(-1.0) / math.factorial(n)
        assert abs(state.amps[(n,)]) ** 2 == pytest.approx(expected, rel=1e-10)


def test_squeezed_parity():
    state = prepare_gaussian_fock("squeezed", SqueezeSpec(0.5), cutoff=40)
    odd = [occ for occ in state.amps if occ[0] % 2 == 1]
    assert odd == []
    assert state.number_mean("mode") == pytest.approx(math.sinh(0.5) ** 2, rel=1e-10)


def test_two_mode_pair_structure():
    state = prepare_gaussian_fock("two_mode_squeezed", SqueezeSpec(0.5), cutoff=40)
    assert all(occ[0] == occ[1] for occ in state.amps)
    assert state.number_mean("plus") == pytest.approx(math.sinh(0.5) ** 2, rel=1e-10)
    # photon-number difference is exactly zero
    diffs = {occ[0] - occ[1] for occ in state.amps}
    assert diffs == {0}


def test_cutoff_tail_detected():
    with pytest.raises(ValidationError):
        prepare_gaussian_fock("squeezed", SqueezeSpec(1.2), cutoff=6)
    with pytest.raises(ValidationError):
        prepare_gaussian_fock("squeezed", SqueezeSpec(2.2), cutoff=400)


def three_mode_state(n_photons_state, n_a1):
    a1 = (("a1",), {(n_a1,): 1.0})
    a2 = (("a2",), {(0,): 1.0})
    b = (("b",), n_photons_state)
    parts = [a1, a2, b]
    state = product_state(parts)
    return FockState(THREE_MODE, state.amps)


def test_vacuum_probe_is_dark():
    state = three_mode_state({(0,): 1.0}, n_a1=3)
    out = exact_evolve(state, pulse_area=0.7)
    assert out.amps.keys() == state.amps.keys()
    assert out.number_mean("a2") == pytest.approx(0.0, abs=1e-12)


def test_single_excitation_rabi():
    # |1,0,1> with theta_qst = pi transfers completely to |0,1,0> up to phase.
    # In the single-excitation sector the Rabi angle is pulse_area * sqrt(n1),
    # and theta_qst = 2 * pulse_area * sqrt(n1).
    state = three_mode_state({(1,): 1.0}, n_a1=1)
    out = exact_evolve(state, pulse_area=math.pi / 2)
    assert out.number_mean("a2") == pytest.approx(1.0, abs=1e-12)
    amp = out.amps[(0, 1, 0)]
    assert abs(amp) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("area_frac", [0.25, 0.5, 0.75])
def test_single_photon_transfer_probability(area_frac):
    # One photon on n1 condensate atoms: exact transition probability is
    # sin^2(theta/2) with theta = 2 * pulse_area * sqrt(n1).
    n1 = 7
    area = area_frac * math.pi / (2 * math.sqrt(n1))
    state = three_mode_state({(1,): 1.0}, n_a1=n1)
    out = exact_evolve(state, area)
    theta = 2 * area * math.sqrt(n1)
    assert out.number_mean("a2") == pytest.approx(math.sin(theta / 2) ** 2, abs=1e-12)


def test_undepleted_limit_matches_sin2():
    # N_a1 = 50 with a one-photon probe: transfer probability within 2 percent
    # of the undepleted-reservoir sin^2(theta/2) for a partial pulse.
    n1 = 50
    theta = 3 * math.pi / 10
    area = theta / (2 * math.sqrt(n1))
    state = three_mode_state({(1,): 1.0}, n_a1=n1)
    out = exact_evolve(state, area)
    q = out.number_mean("a2") / 1.0
    assert q == pytest.approx(math.sin(theta / 2) ** 2, rel=0.02)


def test_squeezed_probe_small_system_norm_and_conservation():
    sq = prepare_gaussian_fock("squeezed", SqueezeSpec(0.8), cutoff=64)
    state = product_state([(("a1",), {(2,): 1.0}), (("a2",), {(0,): 1.0}),
                           (("b",), sq.amps)])
    state = FockState(THREE_MODE, state.amps)
    n_total_0 = state.number_mean("a1") + state.number_mean("a2")
    nb_0 = state.number_mean("b")
    out = exact_evolve(state, pulse_area=0.3, steps=4)
    assert abs(out.norm() - 1.0) < 1e-12
    assert out.number_mean("a1") + out.number_mean("a2") == pytest.approx(n_total_0, abs=1e-10)
    assert out.number_mean("a2") + out.number_mean("b") == pytest.approx(nb_0, abs=1e-10)


def test_five_mode_decoupled_pairs_match_three_mode():
    # With only the + input occupied, the five-mode evolution reduces to the
    # three-mode one on (a1, a+, b+).
    sq = prepare_gaussian_fock("squeezed", SqueezeSpec(0.5), cutoff=40)
    st3 = product_state([(("a1",), {(3,): 1.0}), (("a2",), {(0,): 1.0}), (("b",), sq.amps)])
    st3 = FockState(THREE_MODE, st3.amps)
    out3 = exact_evolve(st3, 0.4)

    st5 = product_state([
        (("a1",), {(3,): 1.0}), (("a+",), {(0,): 1.0}), (("a-",), {(0,): 1.0}),
        (("b+",), sq.amps), (("b-",), {(0,): 1.0}),
    ])
    st5 = FockState(FIVE_MODE, st5.amps)
    out5 = exact_evolve(st5, 0.4)
    assert out5.number_mean("a+") == pytest.approx(out3.number_mean("a2"), abs=1e-10)
    assert out5.number_mean("b+") == pytest.approx(out3.number_mean("b"), abs=1e-10)
    assert out5.number_mean("a-") == pytest.approx(0.0, abs=1e-12)


def test_tmsv_jz_number_conservation():
    tm = prepare_gaussian_fock("two_mode_squeezed", SqueezeSpec(0.6), cutoff=25)
    state = product_state([
        (("a1",), {(4,): 1.0}), (("a+",), {(0,): 1.0}), (("a-",), {(0,): 1.0}),
        (("b+", "b-"), tm.amps),
    ])
    state = FockState(FIVE_MODE, state.amps)
    mom0 = state.j_moments("b+", "b-")
    assert mom0["jz2"] == pytest.approx(0.0, abs=1e-12)
    out = exact_evolve(state, 0.2, steps=2)
    total = out.number_mean("a1") + out.number_mean("a+") + out.number_mean("a-")
    assert total == pytest.approx(4.0, abs=1e-10)
