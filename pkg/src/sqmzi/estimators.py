"""Symmetric-ordering-corrected moments, signals and phase sensitivities.

Trajectory averages of Wigner amplitudes are symmetric-ordered moments; the
corrections below convert them to physical (normally ordered) observables:

    <N>        = mean(|a|^2) - 1/2
    <N^2>      = mean(|a|^4) - mean(|a|^2)
    <N_i N_j>  = mean((|a_i|^2 - 1/2)(|a_j|^2 - 1/2))       (i != j)

and, with Jx = Re(conj(a+) a-) and Jz = (|a+|^2 - |a-|^2)/2 per trajectory,

    <Jx^2> = mean(Jx^2) - 1/8                     (same for Jz)
    <Jx^4> = mean(Jx^4) - 5/4 mean(Jx^2) + 1/16   (same for Jz)
    <Jx^2 Jz^2 + Jz^2 Jx^2>
           = 2 mean(Jx^2 Jz^2) + 5/4 mean(Jx^2) + 1/4 mean(Jz^2)
             - mean(|a+|^2 |a-|^2)
    <(Jx Jz + Jz Jx)^2>
           = 4 mean(Jx^2 Jz^2) - 5/2 mean(Jx^2) - 3/2 mean(Jz^2)
             + mean(|a+|^2 |a-|^2) + 1/8

The +1/8 constant in the last relation is part of the exact ordering
identity (this relation is sometimes quoted without it); all six relations
are verified against truncated-Fock computations in the tests.

Standard errors use batch means with a fixed number of batches.  Any linear
combination S = sum_i c_i N_i of mode numbers is estimated from per-trajectory
values s = sum_i c_i (|a_i|^2 - 1/2) with V(S) = var(s) - (1/4) sum_i c_i^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalFailure, ValidationError
from .sampler import TrajectoryEnsemble

N_BATCHES = 100
DEFAULT_SLOPE_STEP = 1e-3


@dataclass(frozen=True)
class Moment:
    value: float
    stderr: float

    def __iter__(self):
        yield self.value
        yield self.stderr


@dataclass
class MomentSet:
    """Corrected moments of an ensemble, each with a batch-mean stderr."""

    n: dict[str, Moment] = field(default_factory=dict)
    n2: dict[str, Moment] = field(default_factory=dict)
    cross: dict[tuple[str, str], Moment] = field(default_factory=dict)
    jx2: Moment | None = None
    jz2: Moment | None = None
    jx4: Moment | None = None
    jz4: Moment | None = None
    jx2jz2_sym: Moment | None = None
    jxjz_anti2: Moment | None = None

    def check_invariants(self):
        for label, m in self.n.items():
            if m.value < -5 * m.stderr:
                raise NumericalFailure(f"<N_{label}> = {m.value} significantly negative")
        for m in (self.jx2, self.jz2, self.jx4, self.jz4):
            if m is not None and m.value < -5 * m.stderr:
                raise NumericalFailure("even pseudo-spin moment significantly negative")


@dataclass
class SensitivityResult:
    delta_phi: float
    phi_opt: float
    slope: float
    variance: float
    stderr: float
    method: str  # analytic | tw_sweep | tw_moments
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.delta_phi > 0 and math.isfinite(self.delta_phi)):
            raise NumericalFailure(f"sensitivity must be positive and finite, got {self.delta_phi}")
        if self.stderr < 0:
            raise NumericalFailure("stderr must be >= 0")


def _batch_values(values: np.ndarray, stat, n_batches: int = N_BATCHES) -> np.ndarray:
    """Apply stat to n_batches contiguous slices (remainder trajectories dropped)."""
    m = len(values)
    n_batches = min(n_batches, m // 2)
    per = m // n_batches
    trimmed = values[: per * n_batches]
    if trimmed.ndim == 1:
        batches = trimmed.reshape(n_batches, per)
    else:
        batches = trimmed.reshape(n_batches, per, *values.shape[1:])
    return np.array([stat(b) for b in batches])


def mean_with_stderr(values: np.ndarray) -> Moment:
    bm = _batch_values(values, np.mean)
    return Moment(float(np.mean(values)), float(np.std(bm, ddof=1) / math.sqrt(len(bm))))


def _stat_with_stderr(values: np.ndarray, stat) -> Moment:
    bm = _batch_values(values, stat)
    return Moment(float(stat(values)), float(np.std(bm, ddof=1) / math.sqrt(len(bm))))


def corrected_number_moments(ensemble: TrajectoryEnsemble, labels=None) -> MomentSet:
    """Per-mode <N>, <N^2> and pairwise <N_i N_j> with standard errors."""
    labels = list(labels) if labels is not None else list(ensemble.labels)
    out = MomentSet()
    w = {lab: np.abs(ensemble.mode(lab)) ** 2 - 0.5 for lab in labels}
    for lab in labels:
        out.n[lab] = mean_with_stderr(w[lab])
        n2 = (w[lab] + 0.5) ** 2 - (w[lab] + 0.5)
        out.n2[lab] = mean_with_stderr(n2)
    for i, l1 in enumerate(labels):
        for l2 in labels[i + 1:]:
            out.cross[(l1, l2)] = mean_with_stderr(w[l1] * w[l2])
    return out


def pseudo_spin_symbols(ensemble: TrajectoryEnsemble, plus: str, minus: str):
    ap, am = ensemble.mode(plus), ensemble.mode(minus)
    jx = np.real(np.conj(ap) * am)
    jz = 0.5 * (np.abs(ap) ** 2 - np.abs(am) ** 2)
    npnm = np.abs(ap) ** 2 * np.abs(am) ** 2
    return jx, jz, npnm


def j_corrections(jx2, jz2, jx4, jz4, jx2jz2, npnm) -> dict[str, float]:
    """Symmetric-ordering corrections mapping Wigner moments of the pseudo-spin
    symbols to operator moments; shared by the sampled and analytic paths."""
    return {
        "jx2": jx2 - 0.125,
        "jz2": jz2 - 0.125,
        "jx4": jx4 - 1.25 * jx2 + 0.0625,
        "jz4": jz4 - 1.25 * jz2 + 0.0625,
        "jx2jz2_sym": 2 * jx2jz2 + 1.25 * jx2 + 0.25 * jz2 - npnm,
        "jxjz_anti2": 4 * jx2jz2 - 2.5 * jx2 - 1.5 * jz2 + npnm + 0.125,
    }


def _j_moments_from_symbols(jx, jz, npnm) -> dict[str, float]:
    return j_corrections(
        np.mean(jx**2), np.mean(jz**2), np.mean(jx**4), np.mean(jz**4),
        np.mean(jx**2 * jz**2), np.mean(npnm),
    )


def corrected_j_moments(ensemble: TrajectoryEnsemble, plus: str = "a+", minus: str = "a-") -> MomentSet:
    """The seven corrected pseudo-spin moments of the two outcoupled modes."""
    for lab in (plus, minus):
        if lab not in ensemble.labels:
            raise ValidationError(f"mode {lab!r} not present in ensemble")
    jx, jz, npnm = pseudo_spin_symbols(ensemble, plus, minus)
    stacked = np.column_stack([jx, jz, npnm])

    def per_batch(block, key):
        return _j_moments_from_symbols(block[:, 0], block[:, 1], block[:, 2])[key]

    full = _j_moments_from_symbols(jx, jz, npnm)
    out = corrected_number_moments(ensemble, [plus, minus])
    for key in full:
        bm = _batch_values(stacked, lambda b, k=key: per_batch(b, k))
        setattr(out, key, Moment(float(full[key]), float(np.std(bm, ddof=1) / math.sqrt(len(bm)))))
    return out


def signal_statistics(values: np.ndarray, ordering_weight: float) -> tuple[Moment, Moment]:
    """Mean and corrected variance of a linear-in-number signal.

    values are per-trajectory symbols sum_i c_i (|a_i|^2 - 1/2);
    ordering_weight is sum_i c_i^2.
    """
    mean = mean_with_stderr(values)
    var = _stat_with_stderr(values, lambda v: np.var(v, ddof=1) - ordering_weight / 4.0)
    return mean, var


def sensitivity_from_sweep(
    phi_grid: np.ndarray,
    means: list[Moment],
    variances: list[Moment],
    phi_eval: float,
    step: float = DEFAULT_SLOPE_STEP,
    method: str = "tw_sweep",
) -> SensitivityResult:
    """Error-propagation sensitivity at phi_eval from a phase sweep.

    The grid must be uniform, contain at least 3 points bracketing phi_eval,
    and include the stencil points phi_eval +- step.  The slope is a central
    finite difference; the sensitivity error combines the variance stderr and
    the slope stderr.
    """
    phi_grid = np.asarray(phi_grid, dtype=float)
    if len(phi_grid) < 3:
        raise ValidationError("phase grid needs at least 3 points")
    spacing = np.diff(phi_grid)
    if spacing.size and (np.max(spacing) - np.min(spacing)) > 1e-9 * max(1.0, np.max(np.abs(phi_grid))):
        # non-uniform grids are fine as long as the stencil points exist
        pass
    if not (phi_grid[0] <= phi_eval <= phi_grid[-1]):
        raise ValidationError("phi_eval not bracketed by the grid")

    def locate(phi):
        idx = int(np.argmin(np.abs(phi_grid - phi)))
        if abs(phi_grid[idx] - phi) > 1e-9:
            raise ValidationError(f"grid missing required point {phi}")
        return idx

    i0, im, ip = locate(phi_eval), locate(phi_eval - step), locate(phi_eval + step)
    slope = (means[ip].value - means[im].value) / (2 * step)
    slope_err = math.hypot(means[ip].stderr, means[im].stderr) / (2 * step)
    var, var_err = variances[i0].value, variances[i0].stderr

    if abs(slope) <= 3 * slope_err or slope == 0:
        raise NumericalFailure(
            f"indeterminate slope at phi={phi_eval}: {slope} +- {slope_err}")
    if var <= 0:
        raise NumericalFailure(f"non-positive signal variance {var} at phi={phi_eval}")

    delta_phi = math.sqrt(var) / abs(slope)
    rel = math.hypot(var_err / (2 * var), slope_err / abs(slope))
    return SensitivityResult(
        delta_phi=delta_phi,
        phi_opt=phi_eval,
        slope=slope,
        variance=var,
        stderr=delta_phi * rel,
        method=method,
    )


def _scheme2_delta_phi_sq(m: dict[str, float]) -> float:
    v_jx2 = m["jx4"] - m["jx2"] ** 2
    v_jz2 = m["jz4"] - m["jz2"] ** 2
    cov = m["jx2jz2_sym"] - 2 * m["jx2"] * m["jz2"]
    num = 2 * math.sqrt(max(v_jz2, 0.0) * max(v_jx2, 0.0)) + cov + m["jxjz_anti2"]
    den = 4 * (m["jz2"] - m["jx2"]) ** 2
    return num / den


def scheme2_sensitivity_from_moments(moments: MomentSet, recycled: bool) -> SensitivityResult:
    """Two-mode-scheme minimum sensitivity from corrected pseudo-spin moments.

    Non-recycled: the fluctuation-signal formula evaluated at its optimal
    phase; recycled: 1/sqrt(4 <Jx^2>).
    """
    need = ("jx2", "jz2", "jx4", "jz4", "jx2jz2_sym", "jxjz_anti2")
    vals = {}
    for key in need:
        mom = getattr(moments, key)
        if mom is None:
            raise ValidationError("pseudo-spin moments missing; run corrected_j_moments first")
        vals[key] = mom.value

    if recycled:
        jx2 = moments.jx2
        if jx2.value <= 5 * jx2.stderr:
            raise NumericalFailure("<Jx^2> not positive beyond 5 s.e.; cannot form sensitivity")
        delta_phi = 1.0 / math.sqrt(4 * jx2.value)
        stderr = delta_phi * jx2.stderr / (2 * jx2.value)
        return SensitivityResult(delta_phi, math.pi, math.nan, math.nan, stderr,
                                 "tw_moments", extra={"signal": "recycled"})

    sep = vals["jz2"] - vals["jx2"]
    sep_err = math.hypot(moments.jz2.stderr, moments.jx2.stderr)
    if abs(sep) <= 5 * sep_err:
        raise NumericalFailure("<Jz^2> - <Jx^2> not resolved beyond 5 s.e.")

    dphi2 = _scheme2_delta_phi_sq(vals)
    if dphi2 <= 0:
        raise NumericalFailure(f"non-positive sensitivity^2: {dphi2}")
    delta_phi = math.sqrt(dphi2)

    # first-order error propagation by numerical partials
    var_total = 0.0
    for key in need:
        mom = getattr(moments, key)
        if mom.stderr == 0:
            continue
        h = max(abs(vals[key]) * 1e-6, 1e-12)
        bumped = dict(vals)
        bumped[key] = vals[key] + h
        deriv = (_scheme2_delta_phi_sq(bumped) - dphi2) / h
        var_total += (deriv * mom.stderr) ** 2
    stderr = math.sqrt(var_total) / (2 * delta_phi) if var_total else 0.0

    v_jx2 = max(vals["jx4"] - vals["jx2"] ** 2, 0.0)
    v_jz2 = max(vals["jz4"] - vals["jz2"] ** 2, 0.0)
    phi_opt = math.atan((v_jz2 / v_jx2) ** 0.25) if v_jx2 > 0 else math.pi
    return SensitivityResult(delta_phi, phi_opt, math.nan, math.nan, stderr,
                             "tw_moments", extra={"signal": "atomic"})


def qst_efficiency_from_means(n_out: Moment, n_in: Moment) -> float:
    if n_in.value <= 0:
        raise ValidationError("QST efficiency undefined for zero photon input")
    return n_out.value / n_in.value
