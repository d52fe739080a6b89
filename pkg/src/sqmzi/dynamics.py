"""Atom-light quantum state transfer: analytic beamsplitter limit and
trajectory-wise integration of the phase-space equations with depletion.

The coupling pulse is uniform, f(t) = 1 on t in [0, 1], so pulse_area
(= g * integral f dt) is the only physical knob; the undepleted-reservoir
transfer angle is theta_qst = 2 * pulse_area * sqrt(N_a1).

Three-mode equations (condensate a1, outcoupled a2, probe b):

    i da1/dt = g a2 conj(b)
    i da2/dt = g a1 b
    i db/dt  = g a2 conj(a1)

Five-mode equations couple a1 to two independent (a+, b+), (a-, b-) pairs.
Per-trajectory conserved sums gauge the integration accuracy; their relative
drift must stay below DRIFT_BOUND or the evolution raises NumericalFailure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .errors import NumericalFailure, ValidationError
from .sampler import TrajectoryEnsemble

DRIFT_BOUND = 1e-8
DEFAULT_STEPS = 400
SPEED_OF_LIGHT = 299_792_458.0
HBAR = 1.054_571_817e-34
EPSILON_0 = 8.854_187_8128e-12


@dataclass(frozen=True)
class CouplingSchedule:
    """Either an analytic transfer angle or a pulse area to integrate."""

    mode: Literal["analytic", "integrate"]
    theta_qst: float | None = None
    pulse_area: float | None = None
    steps: int = DEFAULT_STEPS

    def __post_init__(self):
        if self.mode == "analytic":
            if self.theta_qst is None or self.pulse_area is not None:
                raise ValidationError("analytic schedule takes theta_qst only")
            if not (0.0 <= self.theta_qst <= math.pi):
                raise ValidationError(f"theta_qst must lie in [0, pi], got {self.theta_qst}")
        elif self.mode == "integrate":
            if self.pulse_area is None or self.theta_qst is not None:
                raise ValidationError("integrate schedule takes pulse_area only")
            if not math.isfinite(self.pulse_area) or self.pulse_area < 0:
                raise ValidationError("pulse_area must be finite and >= 0")
        else:
            raise ValidationError(f"unknown schedule mode {self.mode!r}")
        if self.steps < 1:
            raise ValidationError("steps must be >= 1")

    @staticmethod
    def for_theta(theta_qst: float, n_a1: float, steps: int = DEFAULT_STEPS) -> "CouplingSchedule":
        """Integrate schedule whose undepleted transfer angle is theta_qst."""
        return CouplingSchedule("integrate", pulse_area=theta_qst / (2 * math.sqrt(n_a1)), steps=steps)


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory numbers behind the effective coupling (SI units)."""

    d12: float        # dipole moment, C m
    omega_p: float    # probe angular frequency, rad/s
    rabi: float       # control Rabi frequency (same convention as detuning)
    delta_p: float    # one-photon detuning
    gamma: float      # natural linewidth (same convention as detuning)
    n_atoms: float
    duration: float   # pulse duration, s
    r_perp: float     # transverse radius, m

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"physical parameter {name} must be positive, got {value}")


def analytic_qst(a2, b, theta_qst: float):
    """Undepleted-reservoir transfer: unitary two-mode mixing by theta_qst/2."""
    if not (0.0 <= theta_qst <= math.pi):
        raise ValidationError(f"theta_qst must lie in [0, pi], got {theta_qst}")
    c, s = math.cos(theta_qst / 2), math.sin(theta_qst / 2)
    return a2 * c - 1j * b * s, b * c - 1j * a2 * s


@dataclass
class EvolutionResult:
    final: TrajectoryEnsemble
    q_times: np.ndarray | None = None
    q_values: np.ndarray | None = None
    at_max_q: TrajectoryEnsemble | None = None
    drift: float = 0.0

    @property
    def q_max(self) -> float:
        return float(np.max(self.q_values)) if self.q_values is not None else math.nan


def _rk4(state: np.ndarray, rhs: Callable, n_steps: int, dt: float) -> np.ndarray:
    y = state
    for _ in range(n_steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * dt * k1)
        k3 = rhs(y + 0.5 * dt * k2)
        k4 = rhs(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def _auto_steps(base_steps: int, pulse_area: float, scale_number: float) -> int:
    """Scale step count so the RK4 error stays flat as the Rabi rate grows."""
    theta = pulse_area * math.sqrt(max(scale_number, 1.0))
    factor = max(1.0, theta / (math.pi / 2)) ** 1.25
    return int(math.ceil(base_steps * factor))


def _checked_drift(conserved_0: list[np.ndarray], conserved_1: list[np.ndarray]) -> float:
    worst = 0.0
    for c0, c1 in zip(conserved_0, conserved_1):
        scale = np.maximum(np.abs(c0), 1.0)
        worst = max(worst, float(np.max(np.abs(c1 - c0) / scale)))
    if worst > DRIFT_BOUND:
        raise NumericalFailure(
            f"conserved-sum drift {worst:.3e} exceeds bound {DRIFT_BOUND:.1e}; increase steps")
    return worst


def _evolve(ensemble, labels, rhs_factory, conserved_fn, schedule, track_q, q_in_label):
    if schedule.mode != "integrate":
        raise ValidationError("evolution requires an integrate schedule")
    for lab in labels:
        if lab not in ensemble.labels:
            raise ValidationError(f"ensemble missing mode {lab!r}")
    state = np.stack([ensemble.mode(lab) for lab in labels])
    area = schedule.pulse_area
    mean_total = float(np.mean(np.sum(np.abs(state) ** 2, axis=0)))
    n_steps = _auto_steps(schedule.steps, area, mean_total)
    rhs = rhs_factory(area)

    conserved_0 = conserved_fn(state)
    n_b0 = None
    q_times = q_values = None
    best = None
    if track_q:
        in_idx = labels.index(q_in_label)
        n_b0 = float(np.mean(np.abs(state[in_idx]) ** 2) - 0.5)
        checkpoints = min(n_steps, 64)
        bounds = np.linspace(0, n_steps, checkpoints + 1).astype(int)
        q_times, q_values = [0.0], [_q_of(state, labels, n_b0)]
        best = (q_values[0], state.copy(), 0.0)
        y = state
        for k in range(checkpoints):
            sub = bounds[k + 1] - bounds[k]
            if sub == 0:
                continue
            y = _rk4(y, rhs, sub, 1.0 / n_steps)
            t = bounds[k + 1] / n_steps
            q = _q_of(y, labels, n_b0)
            q_times.append(t)
            q_values.append(q)
            if q > best[0]:
                best = (q, y.copy(), t)
        final_state = y
        q_times, q_values = np.array(q_times), np.array(q_values)
    else:
        final_state = _rk4(state, rhs, n_steps, 1.0 / n_steps)

    drift = _checked_drift(conserved_0, conserved_fn(final_state))

    def wrap(arr):
        return TrajectoryEnsemble(
            {**ensemble.modes, **{lab: arr[i] for i, lab in enumerate(labels)}},
            ensemble.seed,
        )

    return EvolutionResult(
        final=wrap(final_state),
        q_times=q_times,
        q_values=q_values,
        at_max_q=wrap(best[1]) if best is not None else None,
        drift=drift,
    )


def _q_of(state, labels, n_b0):
    out_idx = 1  # a2 or a+ slot by construction below
    n_out = float(np.mean(np.abs(state[out_idx]) ** 2) - 0.5)
    if len(labels) == 5:
        n_out += float(np.mean(np.abs(state[2]) ** 2) - 0.5)
    return n_out / n_b0 if n_b0 > 0 else math.nan


def evolve_three_mode(ensemble: TrajectoryEnsemble, schedule: CouplingSchedule,
                      labels=("a1", "a2", "b"), track_q: bool = False) -> EvolutionResult:
    """Integrate the three-mode equations over the uniform pulse."""

    def rhs_factory(g):
        def rhs(y):
            a1, a2, b = y
            return np.stack([
                -1j * g * a2 * np.conj(b),
                -1j * g * a1 * b,
                -1j * g * a2 * np.conj(a1),
            ])
        return rhs

    def conserved(y):
        a1, a2, b = (np.abs(y[i]) ** 2 for i in range(3))
        return [a1 + a2, a2 + b]

    return _evolve(ensemble, tuple(labels), rhs_factory, conserved, schedule, track_q, labels[2])


def evolve_five_mode(ensemble: TrajectoryEnsemble, schedule: CouplingSchedule,
                     labels=("a1", "a+", "a-", "b+", "b-"), track_q: bool = False) -> EvolutionResult:
    """Integrate the five-mode equations (two probe sidebands) over the pulse."""

    def rhs_factory(g):
        def rhs(y):
            a1, ap, am, bp, bm = y
            return np.stack([
                -1j * g * (ap * np.conj(bp) + am * np.conj(bm)),
                -1j * g * a1 * bp,
                -1j * g * a1 * bm,
                -1j * g * np.conj(a1) * ap,
                -1j * g * np.conj(a1) * am,
            ])
        return rhs

    def conserved(y):
        a1, ap, am, bp, bm = (np.abs(y[i]) ** 2 for i in range(5))
        return [a1 + ap + am, ap + bp, am + bm]

    if track_q:
        # Q for the five-mode scheme counts both outcoupled modes against both inputs
        if schedule.mode != "integrate":
            raise ValidationError("evolution requires an integrate schedule")
        return _evolve_five_track(ensemble, schedule, tuple(labels), rhs_factory, conserved)
    return _evolve(ensemble, tuple(labels), rhs_factory, conserved, schedule, False, labels[3])


def _evolve_five_track(ensemble, schedule, labels, rhs_factory, conserved):
    # track combined Q(t) = <N_a+ + N_a->/<N_b+ + N_b->(t0)
    state = np.stack([ensemble.mode(lab) for lab in labels])
    area = schedule.pulse_area
    mean_total = float(np.mean(np.sum(np.abs(state) ** 2, axis=0)))
    n_steps = _auto_steps(schedule.steps, area, mean_total)
    rhs = rhs_factory(area)
    conserved_0 = conserved(state)
    n_b0 = float(np.mean(np.abs(state[3]) ** 2) + np.mean(np.abs(state[4]) ** 2) - 1.0)

    def q_of(y):
        n_out = float(np.mean(np.abs(y[1]) ** 2) + np.mean(np.abs(y[2]) ** 2) - 1.0)
        return n_out / n_b0 if n_b0 > 0 else math.nan

    checkpoints = min(n_steps, 64)
    bounds = np.linspace(0, n_steps, checkpoints + 1).astype(int)
    q_times, q_values = [0.0], [q_of(state)]
    best = (q_values[0], state.copy(), 0.0)
    y = state
    for k in range(checkpoints):
        sub = bounds[k + 1] - bounds[k]
        if sub == 0:
            continue
        y = _rk4(y, rhs, sub, 1.0 / n_steps)
        q = q_of(y)
        q_times.append(bounds[k + 1] / n_steps)
        q_values.append(q)
        if q > best[0]:
            best = (q, y.copy(), bounds[k + 1] / n_steps)
    drift = _checked_drift(conserved_0, conserved(y))

    def wrap(arr):
        return TrajectoryEnsemble(
            {**ensemble.modes, **{lab: arr[i] for i, lab in enumerate(labels)}},
            ensemble.seed,
        )

    return EvolutionResult(wrap(y), np.array(q_times), np.array(q_values), wrap(best[1]), drift)


def qst_efficiency(ensemble_out: TrajectoryEnsemble, ensemble_in: TrajectoryEnsemble,
                   out_labels=("a2",), in_labels=("b",)) -> float:
    """Ratio of outcoupled atoms to input photons (corrected means)."""
    n_out = sum(float(np.mean(np.abs(ensemble_out.mode(l)) ** 2) - 0.5) for l in out_labels)
    n_in = sum(float(np.mean(np.abs(ensemble_in.mode(l)) ** 2) - 0.5) for l in in_labels)
    if n_in <= 0:
        raise ValidationError("QST efficiency undefined for zero photon input")
    return n_out / n_in


def coupling_from_physical(p: PhysicalParams, mean_photons: float | None = None,
                           n_t: float | None = None):
    """Effective coupling g, transfer angle theta_qst and spontaneous-emission
    loss fraction from laboratory parameters.

    g      = d12 sqrt(omega_p / (2 hbar eps0)) * rabi / delta_p
    theta  = (4/3) (2 pi)^(1/4) g sqrt(N T / (c A_perp)),  A_perp = pi R_perp^2
    loss   = (gamma / delta_p) arccos sqrt(1 - (N_b/N_t) sin^2(theta/2))

    The loss fraction is returned only when mean_photons (and optionally n_t,
    defaulting to n_atoms) is given.
    """
    g = p.d12 * math.sqrt(p.omega_p / (2 * HBAR * EPSILON_0)) * p.rabi / p.delta_p
    a_perp = math.pi * p.r_perp ** 2
    theta = (4.0 / 3.0) * (2 * math.pi) ** 0.25 * g * math.sqrt(
        p.n_atoms * p.duration / (SPEED_OF_LIGHT * a_perp))
    loss = None
    if mean_photons is not None:
        n_t = p.n_atoms if n_t is None else n_t
        arg = 1.0 - (mean_photons / n_t) * math.sin(theta / 2) ** 2
        if not (0.0 <= arg <= 1.0):
            raise ValidationError(
                f"over-depleted input: arccos argument {arg} outside [0, 1]")
        loss = (p.gamma / p.delta_p) * math.acos(math.sqrt(arg))
    return g, theta, loss
