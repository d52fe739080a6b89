"""Exact truncated-Fock evolution of the trilinear atom-light Hamiltonians.

Serves as brute-force ground truth for the phase-space machinery at tiny
particle numbers.  States are sparse dictionaries occupation-tuple -> complex
amplitude.  Evolution is exact: the Hamiltonian conserves
    three-mode: n1 + n2        and  n2 + nb
    five-mode:  n1 + np + nm,  np + nbp,  nm + nbm
so the reachable basis decomposes into small sectors that are exponentiated
densely.  Only the *initial* Gaussian states are truncated, with a checked
tail bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import ValidationError
from .sampler import SqueezeSpec

TAIL_BOUND = 1e-10
NORM_TOL = 1e-12

THREE_MODE = ("a1", "a2", "b")
FIVE_MODE = ("a1", "a+", "a-", "b+", "b-")


# ---------------------------------------------------------------------------
# sparse dict-state algebra
# ---------------------------------------------------------------------------

def lower(amps: dict, mode: int) -> dict:
    out = {}
    for occ, amp in amps.items():
        n = occ[mode]
        if n:
            new = occ[:mode] + (n - 1,) + occ[mode + 1:]
            out[new] = out.get(new, 0.0) + amp * math.sqrt(n)
    return out


def raise_(amps: dict, mode: int) -> dict:
    out = {}
    for occ, amp in amps.items():
        n = occ[mode]
        new = occ[:mode] + (n + 1,) + occ[mode + 1:]
        out[new] = out.get(new, 0.0) + amp * math.sqrt(n + 1)
    return out


def add(*states: dict) -> dict:
    out = {}
    for s in states:
        for k, v in s.items():
            out[k] = out.get(k, 0.0) + v
    return out


def scale(amps: dict, c: complex) -> dict:
    return {k: c * v for k, v in amps.items()}


def inner(s1: dict, s2: dict) -> complex:
    if len(s2) < len(s1):
        return complex(np.conj(inner(s2, s1)))
    return sum(np.conj(v) * s2.get(k, 0.0) for k, v in s1.items())


@dataclass
class FockState:
    """Truncated pure state over labeled bosonic modes."""

    labels: tuple[str, ...]
    amps: dict[tuple[int, ...], complex]

    def __post_init__(self):
        norm = self.norm()
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"state norm {norm} deviates from 1 beyond {NORM_TOL}")

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def norm(self) -> float:
        return math.sqrt(sum(abs(v) ** 2 for v in self.amps.values()))

    def apply(self, ops: str, *labels: str) -> dict:
        """Apply a ladder-operator string, rightmost first; '-'=lower, '+'=raise."""
        out = self.amps
        for op, label in reversed(list(zip(ops, labels))):
            mode = self.index(label)
            out = lower(out, mode) if op == "-" else raise_(out, mode)
        return out

    # ---- corrected-physics observables (normally ordered, exact) ----
    def number_mean(self, label: str) -> float:
        low = lower(self.amps, self.index(label))
        return float(np.real(inner(low, low)))

    def number_sq(self, label: str) -> float:
        m = self.index(label)
        nn = {occ: occ[m] ** 2 * amp for occ, amp in self.amps.items()}
        return float(np.real(inner(self.amps, nn)))

    def number_cross(self, l1: str, l2: str) -> float:
        m1, m2 = self.index(l1), self.index(l2)
        nn = {occ: occ[m1] * occ[m2] * amp for occ, amp in self.amps.items()}
        return float(np.real(inner(self.amps, nn)))

    def apply_jx(self, plus: str, minus: str) -> dict:
        p, m = self.index(plus), self.index(minus)
        t1 = raise_(lower(self.amps, m), p)
        t2 = raise_(lower(self.amps, p), m)
        return scale(add(t1, t2), 0.5)

    def apply_jz(self, plus: str, minus: str) -> dict:
        p, m = self.index(plus), self.index(minus)
        return {occ: 0.5 * (occ[p] - occ[m]) * amp for occ, amp in self.amps.items()}

    def j_moments(self, plus: str, minus: str) -> dict[str, float]:
        """The seven pseudo-spin moments used by the two-mode scheme."""
        jx_psi = self.apply_jx(plus, minus)
        jz_psi = self.apply_jz(plus, minus)
        jx2_psi = _apply_jx_raw(jx_psi, self.labels, plus, minus)
        jz2_psi = _apply_jz_raw(jz_psi, self.labels, plus, minus)
        anti = add(_apply_jx_raw(jz_psi, self.labels, plus, minus),
                   _apply_jz_raw(jx_psi, self.labels, plus, minus))
        out = {
            "jx2": float(np.real(inner(jx_psi, jx_psi))),
            "jz2": float(np.real(inner(jz_psi, jz_psi))),
            "jx4": float(np.real(inner(jx2_psi, jx2_psi))),
            "jz4": float(np.real(inner(jz2_psi, jz2_psi))),
            "jx2jz2_sym": float(2 * np.real(inner(jx2_psi, jz2_psi))),
            "jxjz_anti2": float(np.real(inner(anti, anti))),
            "npnm": self.number_cross(plus, minus),
        }
        return out


def _apply_jx_raw(amps: dict, labels, plus, minus) -> dict:
    p, m = labels.index(plus), labels.index(minus)
    return scale(add(raise_(lower(amps, m), p), raise_(lower(amps, p), m)), 0.5)


def _apply_jz_raw(amps: dict, labels, plus, minus) -> dict:
    p, m = labels.index(plus), labels.index(minus)
    return {occ: 0.5 * (occ[p] - occ[m]) * amp for occ, amp in amps.items()}


# ---------------------------------------------------------------------------
# Gaussian states in the Fock basis
# ---------------------------------------------------------------------------

def coherent_coefficients(alpha: complex, cutoff: int) -> np.ndarray:
    n = np.arange(cutoff + 1)
    log_mag = -abs(alpha) ** 2 / 2 + n * math.log(abs(alpha)) if alpha != 0 else None
    if alpha == 0:
        coeff = np.zeros(cutoff + 1, dtype=complex)
        coeff[0] = 1.0
        return coeff
    log_fact = np.array([math.lgamma(k + 1) for k in n])
    coeff = np.exp(log_mag - log_fact / 2) * np.exp(1j * n * np.angle(complex(alpha)))
    return coeff.astype(complex)


def squeezed_coefficients(spec: SqueezeSpec, cutoff: int) -> np.ndarray:
    """Single-mode squeezed vacuum; even occupations only.

    Phase convention matches the sampling map beta = eta cosh r
    - i e^{i theta_sq} eta* sinh r, i.e. squeeze phase phi = theta_sq + pi/2.
    """
    if spec.r > 1.5:
        raise ValidationError("squeezed-state preparation limited to r <= 1.5 for tail control")
    coeff = np.zeros(cutoff + 1, dtype=complex)
    phase = -np.exp(1j * (spec.theta_sq + math.pi / 2)) * math.tanh(spec.r)
    for m in range(cutoff // 2 + 1):
        log_mag = 0.5 * (math.lgamma(2 * m + 1)) - m * math.log(2.0) - math.lgamma(m + 1)
        coeff[2 * m] = phase ** m * math.exp(log_mag) / math.sqrt(math.cosh(spec.r))
    return coeff


def two_mode_squeezed_coefficients(spec: SqueezeSpec, cutoff: int) -> np.ndarray:
    """Pair amplitudes c_n for sum_n c_n |n, n>."""
    if spec.r > 1.5:
        raise ValidationError("two-mode squeezed preparation limited to r <= 1.5 for tail control")
    n = np.arange(cutoff + 1)
    phase = -np.exp(1j * (spec.theta_sq + math.pi / 2)) * math.tanh(spec.r)
    return (phase ** n / math.cosh(spec.r)).astype(complex)


def _check_tail(prob_kept: float):
    if 1.0 - prob_kept > TAIL_BOUND:
        raise ValidationError(
            f"Fock cutoff too small: tail probability {1.0 - prob_kept:.3e} > {TAIL_BOUND}")


def prepare_gaussian_fock(kind: str, params, cutoff: int) -> FockState:
    """Single- or two-mode Gaussian state as a FockState.

    kind: 'coherent' (params = complex alpha), 'squeezed' or
    'two_mode_squeezed' (params = SqueezeSpec).
    """
    if kind == "coherent":
        coeff = coherent_coefficients(params, cutoff)
        _check_tail(float(np.sum(np.abs(coeff) ** 2)))
        amps = {(n,): c for n, c in enumerate(coeff) if abs(c) > 1e-300}
        labels = ("mode",)
    elif kind == "squeezed":
        coeff = squeezed_coefficients(params, cutoff)
        _check_tail(float(np.sum(np.abs(coeff) ** 2)))
        amps = {(n,): c for n, c in enumerate(coeff) if c != 0}
        labels = ("mode",)
    elif kind == "two_mode_squeezed":
        coeff = two_mode_squeezed_coefficients(params, cutoff)
        _check_tail(float(np.sum(np.abs(coeff) ** 2)))
        amps = {(n, n): c for n, c in enumerate(coeff)}
        labels = ("plus", "minus")
    else:
        raise ValidationError(f"unknown Gaussian kind {kind!r}")
    total = math.sqrt(sum(abs(v) ** 2 for v in amps.values()))
    amps = {k: v / total for k, v in amps.items()}
    return FockState(labels, amps)


def product_state(parts: list[tuple[tuple[str, ...], dict]]) -> FockState:
    """Tensor product of dict-states given as (labels, amps) pairs."""
    labels: tuple[str, ...] = ()
    amps: dict[tuple[int, ...], complex] = {(): 1.0}
    for part_labels, part_amps in parts:
        new = {}
        for occ, amp in amps.items():
            for pocc, pamp in part_amps.items():
                new[occ + pocc] = amp * pamp
        labels = labels + part_labels
        amps = new
    return FockState(labels, amps)


# ---------------------------------------------------------------------------
# exact evolution on conserved sectors
# ---------------------------------------------------------------------------

def _three_mode_charges(occ):
    n1, n2, nb = occ
    return (n1 + n2, n2 + nb)


def _three_mode_sector(charges):
    a, b = charges
    return [(a - k, k, b - k) for k in range(min(a, b) + 1)]


def _five_mode_charges(occ):
    n1, np_, nm, nbp, nbm = occ
    return (n1 + np_ + nm, np_ + nbp, nm + nbm)


def _five_mode_sector(charges):
    a, bp, bm = charges
    basis = []
    for i in range(min(a, bp) + 1):
        for j in range(min(a - i, bm) + 1):
            basis.append((a - i - j, i, j, bp - i, bm - j))
    return basis


def _apply_trilinear(amps: dict, triples) -> dict:
    """H = sum over (donor, acceptor, photon): a_d a_ac^dag a_ph + h.c."""
    out: dict = {}
    for (d, ac, ph) in triples:
        term = raise_(lower(lower(amps, d), ph), ac)
        for k, v in term.items():
            out[k] = out.get(k, 0.0) + v
        term = raise_(raise_(lower(amps, ac), ph), d)
        for k, v in term.items():
            out[k] = out.get(k, 0.0) + v
    return out


def _coupling_triples(labels):
    if labels == THREE_MODE:
        return [(0, 1, 2)]
    if labels == FIVE_MODE:
        return [(0, 1, 3), (0, 2, 4)]
    raise ValidationError(f"no trilinear coupling defined for labels {labels}")


def exact_evolve(state: FockState, pulse_area: float, steps: int = 1,
                 observer=None) -> FockState:
    """Evolve under H = pulse_area * (trilinear coupling) in `steps` slices.

    pulse_area is g * integral f dt.  observer(fraction, state) is called
    after each slice.  Norm and the conserved charges are asserted.
    """
    labels = state.labels
    triples = _coupling_triples(labels)
    charge_fn = _three_mode_charges if labels == THREE_MODE else _five_mode_charges
    sector_fn = _three_mode_sector if labels == THREE_MODE else _five_mode_sector

    # group initial amplitudes by conserved charges
    sectors: dict[tuple, dict] = {}
    for occ, amp in state.amps.items():
        sectors.setdefault(charge_fn(occ), {})[occ] = amp

    charge_means_0 = _charge_expectations(state.amps, charge_fn)

    evolved_sectors = {}
    for charges, initial in sectors.items():
        basis = sector_fn(charges)
        index = {occ: i for i, occ in enumerate(basis)}
        dim = len(basis)
        h = np.zeros((dim, dim), dtype=complex)
        for occ, i in index.items():
            row = _apply_trilinear({occ: 1.0}, triples)
            for occ2, v in row.items():
                h[index[occ2], i] += v
        psi0 = np.zeros(dim, dtype=complex)
        for occ, amp in initial.items():
            psi0[index[occ]] = amp
        evolved_sectors[charges] = (basis, h, psi0)

    result = state
    for step in range(1, steps + 1):
        amps: dict[tuple[int, ...], complex] = {}
        area = pulse_area * step / steps
        for charges, (basis, h, psi0) in evolved_sectors.items():
            psi = expm(-1j * area * h) @ psi0 if h.size else psi0
            for occ, i in zip(basis, range(len(basis))):
                if psi[i] != 0:
                    amps[occ] = amps.get(occ, 0.0) + psi[i]
        result = FockState(labels, amps)  # norm asserted here
        charge_means = _charge_expectations(result.amps, charge_fn)
        for c0, c1 in zip(charge_means_0, charge_means):
            if abs(c0 - c1) > 1e-10:
                raise ValidationError(f"conserved charge drifted: {c0} -> {c1}")
        if observer is not None:
            observer(step / steps, result)
    return result


def _charge_expectations(amps: dict, charge_fn) -> tuple[float, ...]:
    charges0 = None
    acc = None
    for occ, amp in amps.items():
        c = charge_fn(occ)
        p = abs(amp) ** 2
        if acc is None:
            acc = [ci * p for ci in c]
        else:
            for i, ci in enumerate(c):
                acc[i] += ci * p
        charges0 = c
    return tuple(acc)
