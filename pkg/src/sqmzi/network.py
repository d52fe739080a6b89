"""Linear transformations after the atom-light coupling.

All operations act trajectory-wise on complex amplitudes and are linear, so
they apply equally to operator expressions and Wigner samples.

Beamsplitter convention (same as the coherent Raman solution):

    a' = a cos(theta/2) - i b sin(theta/2)
    b' = b cos(theta/2) - i a sin(theta/2)

The Mach-Zehnder sequence BS(pi/2) -> phase e^{i phi} on arm 2 -> BS(pi/2)
yields the exact per-trajectory identity

    N1(tf) - N2(tf) = cos(phi) (N2 - N1) + sin(phi) (a1* a2 + a2* a1)

with the right side evaluated at the interferometer input.

Homodyne: the local oscillator parameter theta_lo names the measured
quadrature; its phase-space amplitude carries the fixed offset
exp(-i(theta_lo + pi/2)) so that the mixing relations
b_f = (b - i b_lo)/sqrt(2), lo_f = (b_lo - i b)/sqrt(2) give a difference
signal S_b -> sqrt(N_lo) X^{theta_lo}(b) for a bright oscillator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

LOSS_SITES = (
    "pre_qst_optical",
    "post_qst_atomic",
    "transmitted_optical",
    "symmetric_interferometer",
)


@dataclass(frozen=True)
class LossSpec:
    site: str
    eta: float

    def __post_init__(self):
        if self.site not in LOSS_SITES:
            raise ValidationError(f"unknown loss site {self.site!r}; expected one of {LOSS_SITES}")
        if not (0.0 <= self.eta <= 1.0):
            raise ValidationError(f"transmission must lie in [0, 1], got {self.eta}")


@dataclass(frozen=True)
class LocalOscillator:
    n_mean: float
    theta_lo: float = math.pi / 2

    def __post_init__(self):
        if not (math.isfinite(self.n_mean) and self.n_mean > 0):
            raise ValidationError(f"local oscillator needs n_mean > 0, got {self.n_mean}")

    def amplitude(self, eta: np.ndarray) -> np.ndarray:
        """Phase-space amplitude including Wigner noise (see module docstring)."""
        phase = np.exp(-1j * (self.theta_lo + math.pi / 2))
        return math.sqrt(self.n_mean) * phase + eta


def beamsplitter(a: np.ndarray, b: np.ndarray, theta_bs: float):
    if not (0.0 <= theta_bs <= 2 * math.pi):
        raise ValidationError(f"beamsplitter angle must lie in [0, 2pi], got {theta_bs}")
    c, s = math.cos(theta_bs / 2), math.sin(theta_bs / 2)
    return a * c - 1j * b * s, b * c - 1j * a * s


def phase_shift(a: np.ndarray, phi: float) -> np.ndarray:
    return a * np.exp(1j * phi)


def loss_channel(mode: np.ndarray, eta: float, vacuum_noise: np.ndarray) -> np.ndarray:
    """Virtual beamsplitter: sqrt(eta) c + sqrt(1-eta) vacuum."""
    if not (0.0 <= eta <= 1.0):
        raise ValidationError(f"transmission must lie in [0, 1], got {eta}")
    return math.sqrt(eta) * mode + math.sqrt(1.0 - eta) * vacuum_noise


def mach_zehnder(a1: np.ndarray, a2: np.ndarray, phi: float,
                 sym_eta: float | None = None,
                 sym_noise: tuple[np.ndarray, np.ndarray] | None = None):
    """Full Mach-Zehnder pass; optional symmetric loss after the first splitter.

    Returns (a1_f, a2_f).  The symmetric loss uses one vacuum draw per arm; the
    same draws must be reused when sweeping phi so the phase sweep is analysis,
    not new physics.
    """
    u1, u2 = beamsplitter(a1, a2, math.pi / 2)
    if sym_eta is not None:
        if sym_noise is None:
            raise ValidationError("symmetric loss requires vacuum noise for both arms")
        u1 = loss_channel(u1, sym_eta, sym_noise[0])
        u2 = loss_channel(u2, sym_eta, sym_noise[1])
    u2 = phase_shift(u2, phi)
    return beamsplitter(u1, u2, math.pi / 2)


def mz_signal(a1: np.ndarray, a2: np.ndarray, phi: float, **kwargs) -> np.ndarray:
    """Per-trajectory number-difference symbol N1(tf) - N2(tf)."""
    f1, f2 = mach_zehnder(a1, a2, phi, **kwargs)
    return np.abs(f1) ** 2 - np.abs(f2) ** 2


def homodyne_mix(b: np.ndarray, lo_amplitude: np.ndarray):
    """50/50 mix of signal and local oscillator.

    Returns (b_f, lo_f, s_b) with s_b the per-trajectory difference symbol
    N_lo(tf) - N_b(tf) = 2 Im(conj(b_lo) b); the 1/2 corrections cancel.
    """
    b_f = (b - 1j * lo_amplitude) / math.sqrt(2)
    lo_f = (lo_amplitude - 1j * b) / math.sqrt(2)
    s_b = np.abs(lo_f) ** 2 - np.abs(b_f) ** 2
    return b_f, lo_f, s_b
