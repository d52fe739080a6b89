"""Initial-condition sampling from Wigner distributions.

Coherent, vacuum, single-mode squeezed and two-mode squeezed states are
sampled as complex phase-space amplitudes.  The elementary noise eta is a
complex Gaussian with mean 0 and total complex variance 1/2
(Var Re = Var Im = 1/4), which is the normalization that makes the
symmetric-ordering correction <N> = mean(|alpha|^2) - 1/2 exact.

Reproducibility: every trajectory draws from its own counter-based Philox
substream keyed on (seed, trajectory index); within a substream the noise
fields are consumed in a fixed caller-supplied order.  Ensembles are
therefore bit-identical for a given seed regardless of how generation is
partitioned across workers.  The philox4x64-10 block function is evaluated
vectorized over trajectories and is bit-compatible with numpy's Philox
(block k here equals numpy's k-th buffered block for the same key).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError

TWO_PI = 2.0 * math.pi

_PHILOX_M0 = np.uint64(0xD2E7470EE14C6C93)
_PHILOX_M1 = np.uint64(0xCA5A826395121157)
_WEYL_0 = np.uint64(0x9E3779B97F4A7C15)
_WEYL_1 = np.uint64(0xBB67AE8584CAA73B)
_U32 = np.uint64(0xFFFFFFFF)
_SH32 = np.uint64(32)


def _mulhilo(a, b):
    """Vectorized 64x64 -> (hi, lo) 128-bit product via 32-bit limbs."""
    a_lo = a & _U32
    a_hi = a >> _SH32
    b_lo = b & _U32
    b_hi = b >> _SH32
    lo_lo = a_lo * b_lo
    hi_lo = a_hi * b_lo
    lo_hi = a_lo * b_hi
    cross = (lo_lo >> _SH32) + (hi_lo & _U32) + lo_hi
    hi = a_hi * b_hi + (hi_lo >> _SH32) + (cross >> _SH32)
    lo = (cross << _SH32) | (lo_lo & _U32)
    return hi, lo


def philox4x64(counter: np.ndarray, key: np.ndarray, rounds: int = 10) -> np.ndarray:
    """philox4x64 block function; counter (..., 4) and key (..., 2) uint64."""
    x0, x1, x2, x3 = (counter[..., i].copy() for i in range(4))
    k0 = key[..., 0].copy()
    k1 = key[..., 1].copy()
    m0 = np.broadcast_to(_PHILOX_M0, x0.shape)
    m1 = np.broadcast_to(_PHILOX_M1, x0.shape)
    for _ in range(rounds):
        hi0, lo0 = _mulhilo(m0, x0)
        hi1, lo1 = _mulhilo(m1, x2)
        x0, x1, x2, x3 = hi1 ^ x1 ^ k0, lo1, hi0 ^ x3 ^ k1, lo0
        k0 = k0 + _WEYL_0
        k1 = k1 + _WEYL_1
    return np.stack([x0, x1, x2, x3], axis=-1)


def _standard_normals(seed: int, count: int, n: int) -> np.ndarray:
    """(count, n) standard normals; row i comes from substream key (seed, i)."""
    keys = np.empty((count, 2), dtype=np.uint64)
    keys[:, 0] = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    keys[:, 1] = np.arange(count, dtype=np.uint64)
    # Box-Muller consumes uniforms in pairs, so round the draw up to a
    # multiple of 4 (one philox block) per trajectory.
    n_pairs = (n + 1) // 2
    n_blocks = (2 * n_pairs + 3) // 4
    raw = np.empty((count, 4 * n_blocks), dtype=np.uint64)
    counter = np.zeros((count, 4), dtype=np.uint64)
    for b in range(n_blocks):
        counter[:, 0] = np.uint64(b + 1)
        raw[:, 4 * b: 4 * b + 4] = philox4x64(counter, keys)
    # strictly inside (0, 1) so the Box-Muller log is finite
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53
    u1 = u[:, 0::2]
    u2 = u[:, 1::2]
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = TWO_PI * u2
    z = np.empty_like(u)
    z[:, 0::2] = radius * np.cos(angle)
    z[:, 1::2] = radius * np.sin(angle)
    return z[:, :n]


@dataclass(frozen=True)
class SqueezeSpec:
    """Squeezing parameter r >= 0 and angle theta_sq reduced to [0, 2pi)."""

    r: float
    theta_sq: float = math.pi / 2

    def __post_init__(self):
        if not math.isfinite(self.r) or self.r < 0:
            raise ValidationError(f"squeezing parameter must be finite and >= 0, got {self.r}")
        if not math.isfinite(self.theta_sq):
            raise ValidationError("squeezing angle must be finite")
        reduced = self.theta_sq % TWO_PI
        if reduced >= TWO_PI:  # fmod of a tiny negative rounds up to 2pi
            reduced = 0.0
        object.__setattr__(self, "theta_sq", reduced)

    @property
    def mean_photons(self) -> float:
        return math.sinh(self.r) ** 2


class TrajectoryEnsemble:
    """A batch of phase-space trajectories, one complex amplitude per mode.

    modes maps label -> complex128 array of shape (count,).  All statistics
    downstream are trajectory averages over this batch.
    """

    def __init__(self, modes: dict[str, np.ndarray], seed: int):
        if not modes:
            raise ValidationError("ensemble needs at least one mode")
        counts = {label: len(arr) for label, arr in modes.items()}
        count = next(iter(counts.values()))
        if any(c != count for c in counts.values()):
            raise ValidationError(f"mode arrays have inconsistent lengths: {counts}")
        if count < 2:
            raise ValidationError(f"ensemble needs at least 2 trajectories, got {count}")
        self.modes = {label: np.asarray(arr, dtype=np.complex128) for label, arr in modes.items()}
        for label, arr in self.modes.items():
            if not np.all(np.isfinite(arr.view(np.float64))):
                raise ValidationError(f"non-finite amplitudes in mode {label!r}")
        self.seed = int(seed)
        self.count = count

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.modes)

    def mode(self, label: str) -> np.ndarray:
        return self.modes[label]

    def with_mode(self, label: str, values: np.ndarray) -> "TrajectoryEnsemble":
        new = dict(self.modes)
        new[label] = values
        return TrajectoryEnsemble(new, self.seed)

    def copy(self) -> "TrajectoryEnsemble":
        return TrajectoryEnsemble({k: v.copy() for k, v in self.modes.items()}, self.seed)


def complex_noise(seed: int, count: int, fields: Sequence[str]) -> dict[str, np.ndarray]:
    """Draw one eta per (trajectory, field); fields consumed in given order."""
    if count < 2:
        raise ValidationError(f"count must be >= 2, got {count}")
    z = _standard_normals(seed, count, 2 * len(fields))
    z *= 0.5  # Var(Re) = Var(Im) = 1/4
    return {
        field: z[:, 2 * k] + 1j * z[:, 2 * k + 1]
        for k, field in enumerate(fields)
    }


def coherent_from_noise(mean_number: float, eta: np.ndarray) -> np.ndarray:
    if not (math.isfinite(mean_number) and mean_number >= 0):
        raise ValidationError(f"coherent mean number must be finite and >= 0, got {mean_number}")
    return math.sqrt(mean_number) + eta


def squeezed_from_noise(spec: SqueezeSpec, eta: np.ndarray) -> np.ndarray:
    # beta = eta cosh r - i e^{i theta_sq} eta* sinh r
    return eta * math.cosh(spec.r) - 1j * np.exp(1j * spec.theta_sq) * np.conj(eta) * math.sinh(spec.r)


def two_mode_squeezed_from_noise(
    spec: SqueezeSpec, eta_plus: np.ndarray, eta_minus: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    # beta_pm = eta_pm cosh r - i e^{i theta_sq} eta_mp* sinh r
    c, s = math.cosh(spec.r), math.sinh(spec.r)
    phase = 1j * np.exp(1j * spec.theta_sq) * s
    return eta_plus * c - phase * np.conj(eta_minus), eta_minus * c - phase * np.conj(eta_plus)


def sample_coherent(mean_number: float, count: int, seed: int = 0, field: str = "coherent") -> np.ndarray:
    eta = complex_noise(seed, count, (field,))[field]
    return coherent_from_noise(mean_number, eta)


def sample_vacuum(count: int, seed: int = 0, field: str = "vacuum") -> np.ndarray:
    return sample_coherent(0.0, count, seed, field)


def sample_single_mode_squeezed(spec: SqueezeSpec, count: int, seed: int = 0, field: str = "squeezed") -> np.ndarray:
    eta = complex_noise(seed, count, (field,))[field]
    return squeezed_from_noise(spec, eta)


def sample_two_mode_squeezed(
    spec: SqueezeSpec, count: int, seed: int = 0, fields: tuple[str, str] = ("sq_plus", "sq_minus")
) -> tuple[np.ndarray, np.ndarray]:
    noise = complex_noise(seed, count, fields)
    return two_mode_squeezed_from_noise(spec, noise[fields[0]], noise[fields[1]])
