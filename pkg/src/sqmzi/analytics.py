"""Closed-form and Gaussian-algebra sensitivities in the undepleted regime.

Scheme identifiers:
    single_mode            one squeezed vacuum outcoupled into one MZ input
    two_mode_double_input  two-mode squeezed vacuum driving both MZ inputs
    two_mode_single_input  one arm of a two-mode squeezed vacuum outcoupled,
                           the idler arm measured directly

Schemes with known closed forms use them directly; the single-mode recycled
signal and all of scheme 3 have no closed form, so their slope and variance
are computed exactly from the Gaussian covariance of the linear network,
keeping every finite-N_a1 and finite-N_LO term.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ValidationError
from .estimators import SensitivityResult, _scheme2_delta_phi_sq, j_corrections
from .gaussian import GaussianState, quadform_product_moment, quadform_terms
from .network import LossSpec
from .sampler import SqueezeSpec

SCHEME_IDS = ("single_mode", "two_mode_double_input", "two_mode_single_input")
DEFAULT_N_LO = 1e8
HALF_PI = math.pi / 2


@dataclass(frozen=True)
class AnalyticInput:
    """Closed-form inputs: detected atoms, squeezing, transfer efficiency."""

    n_t: float
    r: float
    q: float = 1.0
    recycled: bool = False

    def __post_init__(self):
        if not (self.n_t > 0 and math.isfinite(self.n_t)):
            raise ValidationError(f"N_t must be positive, got {self.n_t}")
        if not (0.0 <= self.q <= 1.0):
            raise ValidationError(f"Q must lie in [0, 1], got {self.q}")
        if self.r < 0:
            raise ValidationError("squeezing parameter must be >= 0")


def sql(n_t: float) -> float:
    return 1.0 / math.sqrt(n_t)


def heisenberg(n_t: float) -> float:
    return 1.0 / n_t


def theta_from_q(q: float) -> float:
    return 2.0 * math.asin(math.sqrt(q))


# ===================================================================== scheme 1

def _scheme1_closed_form(n_t: float, r: float, q: float):
    """Slope magnitude and variance of S_a at phi = theta_sq = pi/2."""
    sh, ex = math.sinh(r), math.exp(-r)
    slope = n_t - 2 * q * sh**2
    if slope <= 0:
        raise ValidationError(
            f"depleted denominator: N_t - 2 Q sinh^2 r = {slope} is not positive")
    variance = n_t * (1 - 2 * q * ex * sh) + 2 * q**2 * ex * sh**3
    return slope, variance


def scheme1_sensitivity(inp: AnalyticInput, n_lo: float = DEFAULT_N_LO,
                        losses: tuple[LossSpec, ...] = ()) -> SensitivityResult:
    """Single-mode scheme at the optimum phi = theta_sq = pi/2.

    Non-recycled lossless input uses the printed closed form; recycling and
    losses go through the exact Gaussian network.
    """
    if not inp.recycled and not losses:
        slope, variance = _scheme1_closed_form(inp.n_t, inp.r, inp.q)
        return SensitivityResult(
            delta_phi=math.sqrt(variance) / slope,
            phi_opt=HALF_PI, slope=-slope, variance=variance, stderr=0.0,
            method="analytic",
        )
    return _scheme1_gaussian(inp, n_lo, losses)


def scheme1_optimal_r(n_t: float):
    """Numeric argmin of the complete-QST closed form over r, plus the
    large-N asymptotics (ln(4 N_t)/4, N_t^{-3/4}) for comparison."""
    if n_t < 100:
        warnings.warn("optimal-r asymptotics assume N_t >> 1", stacklevel=2)

    def objective(r):
        slope, variance = _scheme1_closed_form(n_t, r, 1.0)
        return math.sqrt(variance) / slope

    r_hi = math.asinh(math.sqrt(n_t / 2.0)) - 1e-6  # denominator positivity edge
    res = minimize_scalar(objective, bounds=(1e-6, r_hi), method="bounded",
                          options={"xatol": 1e-10})
    r_asym = math.log(4 * n_t) / 4
    return {
        "r_opt": float(res.x),
        "delta_phi_min": float(res.fun),
        "r_opt_asymptotic": r_asym,
        "delta_phi_asymptotic": n_t ** -0.75,
    }


def _loss_map(losses) -> dict[str, float]:
    table: dict[str, float] = {}
    for spec in losses:
        if spec.site in table:
            raise ValidationError(f"duplicate loss site {spec.site!r}")
        table[spec.site] = spec.eta
    return table


def _lo_displacement(n_lo: float, theta_lo: float) -> complex:
    return math.sqrt(n_lo) * np.exp(-1j * (theta_lo + HALF_PI))


def _mz_signal_stats(state: GaussianState, phi: float, coeffs, sym_eta: float | None,
                     homodyne_pairs) -> tuple[float, float]:
    s = state.copy()
    s.beamsplitter("a1", "a2", math.pi / 2)
    if sym_eta is not None:
        s.loss("a1", sym_eta)
        s.loss("a2", sym_eta)
    s.phase("a2", phi)
    s.beamsplitter("a1", "a2", math.pi / 2)
    for sig, lo in homodyne_pairs:
        s.beamsplitter(sig, lo, math.pi / 2)
    form = s.number_form(*coeffs)
    return s.op_mean(form), s.op_var(form)


def _gaussian_sensitivity(state, coeffs, sym_eta, homodyne_pairs,
                          phi_eval: float = HALF_PI, h: float = 1e-3) -> SensitivityResult:
    # five-point stencil: slope error O(h^4), negligible against the trig scale
    phis = [phi_eval + k * h for k in (-2, -1, 0, 1, 2)]
    stats = [_mz_signal_stats(state, p, coeffs, sym_eta, homodyne_pairs) for p in phis]
    slope = (-stats[4][0] + 8 * stats[3][0] - 8 * stats[1][0] + stats[0][0]) / (12 * h)
    variance = stats[2][1]
    if variance <= 0 or slope == 0:
        raise ValidationError("degenerate Gaussian network signal")
    return SensitivityResult(
        delta_phi=math.sqrt(variance) / abs(slope),
        phi_opt=phi_eval, slope=slope, variance=variance, stderr=0.0,
        method="analytic",
    )


def _scheme1_gaussian(inp: AnalyticInput, n_lo: float, losses,
                      theta_sq: float = HALF_PI, theta_lo: float = HALF_PI) -> SensitivityResult:
    eta = _loss_map(losses)
    labels = ("a1", "a2", "b") + (("lo",) if inp.recycled else ())
    st = GaussianState(labels)
    st.squeeze("b", SqueezeSpec(inp.r, theta_sq))
    if "pre_qst_optical" in eta:
        st.loss("b", eta["pre_qst_optical"])
    theta = theta_from_q(inp.q)
    st.beamsplitter("a2", "b", theta)
    n_a2 = st.op_mean(st.number_form(("a2", 1.0)))
    if "post_qst_atomic" in eta:
        st.loss("a2", eta["post_qst_atomic"])
    if "transmitted_optical" in eta:
        st.loss("b", eta["transmitted_optical"])
    n_a1_t1 = inp.n_t - n_a2
    if n_a1_t1 <= 0:
        raise ValidationError("condensate fully depleted in undepleted model")
    st.displace("a1", math.sqrt(n_a1_t1))

    coeffs = [("a1", 1.0), ("a2", -1.0)]
    homodyne_pairs = []
    if inp.recycled:
        if inp.q == 0:
            raise ValidationError("recycling gain diverges at Q = 0")
        st.displace("lo", _lo_displacement(n_lo, theta_lo))
        gain = math.sqrt(n_a1_t1 / n_lo) / math.tan(theta / 2)
        coeffs += [("lo", -gain), ("b", gain)]
        homodyne_pairs = [("b", "lo")]
    res = _gaussian_sensitivity(st, coeffs, eta.get("symmetric_interferometer"), homodyne_pairs)
    res.extra["n_a2_t1"] = n_a2
    return res


# ===================================================================== scheme 2

def _scheme2_params(inp: AnalyticInput):
    """Enforce N_t = 2 Q sinh^2 r; derive r from (N_t, Q) when r is nan."""
    if inp.q <= 0:
        raise ValidationError("two-mode double-input scheme needs Q > 0")
    if math.isnan(inp.r):
        r = math.asinh(math.sqrt(inp.n_t / (2 * inp.q)))
    else:
        r = inp.r
        implied = 2 * inp.q * math.sinh(r) ** 2
        if abs(implied - inp.n_t) > 1e-6 * max(inp.n_t, 1.0):
            raise ValidationError(
                f"inconsistent inputs: 2 Q sinh^2 r = {implied} but N_t = {inp.n_t}")
    return r, inp.q, inp.n_t


def scheme2_closed_form_incomplete(q: float, n_t: float) -> float:
    """Printed incomplete-transfer sensitivity (delta phi, not squared)."""
    term1 = math.sqrt(
        (1 - q) * (1 + 5 * (1 - q) * n_t)
        * (4 + 2 * (n_t - 2 * q)
           + (n_t * (9 - q * (42 - 37 * q)) - 64 * q**2 * (1 - q) + 7 * q + 1)
           / (4 * (n_t + 2 * q) ** 2))
    ) / (n_t * (n_t + 2 * q))
    term2 = ((1 + (1 - q) / (2 * (n_t + 2 * q)))
             + n_t * (1 - q) * (3 + (2 * n_t + 5 - q) / (2 * (n_t + 2 * q)))) \
        / (n_t * (n_t + 2 * q))
    return math.sqrt(term1 + term2)


def scheme2_asymptote(q: float, n_t: float) -> float:
    return math.sqrt((1 - q) * (4 + math.sqrt(10)) / n_t)


def scheme2_sql_crossing() -> float:
    """Transfer efficiency where the asymptote meets the SQL."""
    return 1.0 - 1.0 / (4 + math.sqrt(10))


def scheme2_analytic_j_moments(r: float, q: float, theta_sq: float = HALF_PI) -> dict[str, float]:
    """Exact operator pseudo-spin moments of the post-transfer atomic pair."""
    st = GaussianState(("a+", "a-", "b+", "b-"))
    st.two_mode_squeeze("b+", "b-", SqueezeSpec(r, theta_sq))
    theta = theta_from_q(q)
    st.beamsplitter("a+", "b+", theta)
    st.beamsplitter("a-", "b-", theta)
    cov = st.marginal_cov(("a+", "a-"))
    # symbols over (x+, y+, x-, y-): Jx = x+x- + y+y-; Jz = (n+ - n-)/2
    jx = [(0, 2, 1.0), (1, 3, 1.0)]
    jz = [(0, 0, 0.5), (1, 1, 0.5), (2, 2, -0.5), (3, 3, -0.5)]
    npl = [(0, 0, 1.0), (1, 1, 1.0)]
    nmi = [(2, 2, 1.0), (3, 3, 1.0)]
    mom = quadform_product_moment
    return j_corrections(
        jx2=mom(cov, [jx, jx]),
        jz2=mom(cov, [jz, jz]),
        jx4=mom(cov, [jx, jx, jx, jx]),
        jz4=mom(cov, [jz, jz, jz, jz]),
        jx2jz2=mom(cov, [jx, jx, jz, jz]),
        npnm=mom(cov, [npl, nmi]),
    )


def scheme2_moment_formula(moments: dict[str, float]) -> float:
    """Minimum sensitivity from the moment formula (shared with the
    trajectory estimator); returns delta phi."""
    return math.sqrt(_scheme2_delta_phi_sq(moments))


def scheme2_moment_formula_mp(q: float, n_t: float, dps: int = 60) -> float:
    """Moment-formula sensitivity in extended precision.

    At large N_t the moment formula subtracts nearly equal eighth-order
    moments; float64 keeps only ~1e-5 relative accuracy there, so the
    closed-form identity check runs through mpmath.
    """
    import mpmath as mp

    with mp.workdps(dps):
        qm, ntm = mp.mpf(q), mp.mpf(n_t)
        r = mp.asinh(mp.sqrt(ntm / (2 * qm)))
        c, s = mp.cosh(r), mp.sinh(r)
        ct = mp.sqrt(1 - qm)
        st = mp.sqrt(qm)
        # real 4x8 map from (e+, e-, v+, v-) quadrature noise to (a+, a-);
        # theta_sq = pi/2 makes the squeeze phase factor real.
        t = mp.zeros(4, 8)
        def put_complex(row, col, z):
            t[row, col] += mp.re(z); t[row, col + 1] += -mp.im(z)
            t[row + 1, col] += mp.im(z); t[row + 1, col + 1] += mp.re(z)
        def put_conj(row, col, z):
            t[row, col] += mp.re(z); t[row, col + 1] += mp.im(z)
            t[row + 1, col] += mp.im(z); t[row + 1, col + 1] += -mp.re(z)
        put_complex(0, 4, ct)
        put_complex(0, 0, -1j * st * c)
        put_conj(0, 2, -1j * st * s)
        put_complex(2, 6, ct)
        put_complex(2, 2, -1j * st * c)
        put_conj(2, 0, -1j * st * s)
        cov = (t * t.T) / 4

        def isserlis(idx):
            if len(idx) == 0:
                return mp.mpf(1)
            i0 = idx[0]
            total = mp.mpf(0)
            for k in range(1, len(idx)):
                rest = idx[1:k] + idx[k + 1:]
                total += cov[i0, idx[k]] * isserlis(rest)
            return total

        def product_moment(forms):
            import itertools as it
            total = mp.mpf(0)
            for combo in it.product(*forms):
                coeff = mp.mpf(1)
                idx = []
                for (i, j, cc) in combo:
                    coeff *= cc
                    idx.extend((i, j))
                total += coeff * isserlis(tuple(idx))
            return total

        half = mp.mpf(1) / 2
        jx = [(0, 2, mp.mpf(1)), (1, 3, mp.mpf(1))]
        jz = [(0, 0, half), (1, 1, half), (2, 2, -half), (3, 3, -half)]
        npl = [(0, 0, mp.mpf(1)), (1, 1, mp.mpf(1))]
        nmi = [(2, 2, mp.mpf(1)), (3, 3, mp.mpf(1))]
        w_jx2 = product_moment([jx, jx])
        w_jz2 = product_moment([jz, jz])
        w_jx4 = product_moment([jx, jx, jx, jx])
        w_jz4 = product_moment([jz, jz, jz, jz])
        w_mix = product_moment([jx, jx, jz, jz])
        w_np = product_moment([npl, nmi])
        e = {
            "jx2": w_jx2 - mp.mpf(1) / 8,
            "jz2": w_jz2 - mp.mpf(1) / 8,
            "jx4": w_jx4 - mp.mpf(5) / 4 * w_jx2 + mp.mpf(1) / 16,
            "jz4": w_jz4 - mp.mpf(5) / 4 * w_jz2 + mp.mpf(1) / 16,
            "mix": 2 * w_mix + mp.mpf(5) / 4 * w_jx2 + mp.mpf(1) / 4 * w_jz2 - w_np,
            "anti": 4 * w_mix - mp.mpf(5) / 2 * w_jx2 - mp.mpf(3) / 2 * w_jz2 + w_np + mp.mpf(1) / 8,
        }
        v_jx2 = e["jx4"] - e["jx2"] ** 2
        v_jz2 = e["jz4"] - e["jz2"] ** 2
        cov_xz = e["mix"] - 2 * e["jx2"] * e["jz2"]
        num = 2 * mp.sqrt(v_jz2 * v_jx2) + cov_xz + e["anti"]
        den = 4 * (e["jz2"] - e["jx2"]) ** 2
        return float(mp.sqrt(num / den))


def scheme2_sensitivity(inp: AnalyticInput) -> SensitivityResult:
    """Two-mode double-input sensitivities.

    recycled: 1/sqrt(N_t (N_t + 1 + Q)); complete transfer:
    1/sqrt(N_t (N_t + 2)); otherwise the printed incomplete closed form,
    cross-checkable against the moment formula (extra['moment_formula']).
    """
    r, q, n_t = _scheme2_params(inp)
    extra = {"asymptote": scheme2_asymptote(q, n_t) if q < 1 else 0.0}
    if inp.recycled:
        value = 1.0 / math.sqrt(n_t * (n_t + 1 + q))
        return SensitivityResult(value, math.pi, math.nan, math.nan, 0.0,
                                 "analytic", extra=extra)
    if q == 1.0:
        value = 1.0 / math.sqrt(n_t * (n_t + 2))
        return SensitivityResult(value, math.pi, math.nan, math.nan, 0.0,
                                 "analytic", extra=extra)
    value = scheme2_closed_form_incomplete(q, n_t)
    moments = scheme2_analytic_j_moments(r, q)
    extra["moment_formula"] = scheme2_moment_formula(moments)
    v_jx2 = moments["jx4"] - moments["jx2"] ** 2
    v_jz2 = moments["jz4"] - moments["jz2"] ** 2
    phi_opt = math.atan((v_jz2 / v_jx2) ** 0.25) if v_jx2 > 0 else math.pi
    return SensitivityResult(value, phi_opt, math.nan, math.nan, 0.0,
                             "analytic", extra=extra)


# ===================================================================== scheme 3

def scheme3_sensitivity(inp: AnalyticInput, n_lo: float = DEFAULT_N_LO,
                        signal: str | None = None,
                        losses: tuple[LossSpec, ...] = ()) -> SensitivityResult:
    """Single-input two-mode-squeezing scheme at phi = theta_sq = pi/2.

    signal: 'atomic' (S_a), 'partial' (S_a with only the idler homodyne
    recycled), or 'full'.  Defaults to 'full' when recycled else 'atomic'.
    No closed form is printed for this scheme; everything is exact Gaussian
    algebra.  The idler-gain sign is chosen to minimize the signal variance
    (the gain is a tunable parameter) and recorded in extra['idler_sign'].
    """
    if signal is None:
        signal = "full" if inp.recycled else "atomic"
    if signal not in ("atomic", "partial", "full"):
        raise ValidationError(f"unknown scheme-3 signal {signal!r}")
    if signal != "atomic" and inp.q == 0:
        raise ValidationError("recycled scheme-3 signals need Q > 0")

    eta = _loss_map(losses)
    theta_lo = HALF_PI
    st = GaussianState(("a1", "a2", "b+", "b-", "lo+", "lo-"))
    st.two_mode_squeeze("b+", "b-", SqueezeSpec(inp.r, HALF_PI))
    if "pre_qst_optical" in eta:
        st.loss("b+", eta["pre_qst_optical"])
        st.loss("b-", eta["pre_qst_optical"])
    theta = theta_from_q(inp.q)
    st.beamsplitter("a2", "b+", theta)
    n_a2 = st.op_mean(st.number_form(("a2", 1.0)))
    if "post_qst_atomic" in eta:
        st.loss("a2", eta["post_qst_atomic"])
    if "transmitted_optical" in eta:
        st.loss("b+", eta["transmitted_optical"])
        st.loss("b-", eta["transmitted_optical"])
    n_a1_t1 = inp.n_t - n_a2
    st.displace("a1", math.sqrt(n_a1_t1))
    st.displace("lo+", _lo_displacement(n_lo, theta_lo))
    st.displace("lo-", _lo_displacement(n_lo, theta_lo))

    g_plus = math.sqrt(n_a1_t1 / n_lo)
    g_minus = math.sqrt(n_a1_t1 / n_lo)
    sym_eta = eta.get("symmetric_interferometer")

    def build(sign):
        if signal == "atomic":
            coeffs = [("a1", 1.0), ("a2", -1.0)]
            pairs = []
        elif signal == "partial":
            coeffs = [("a1", 1.0), ("a2", -1.0),
                      ("lo-", -sign * g_minus), ("b-", sign * g_minus)]
            pairs = [("b-", "lo-")]
        else:
            rq, rc = math.sqrt(inp.q), math.sqrt(1 - inp.q)
            coeffs = [("a1", rq), ("a2", -rq),
                      ("lo+", -g_plus * rc), ("b+", g_plus * rc),
                      ("lo-", sign * g_minus), ("b-", -sign * g_minus)]
            pairs = [("b+", "lo+"), ("b-", "lo-")]
        return coeffs, pairs

    if signal == "atomic":
        coeffs, pairs = build(+1)
        res = _gaussian_sensitivity(st, coeffs, sym_eta, pairs)
        res.extra["n_a2_t1"] = n_a2
        return res

    candidates = []
    for sign in (+1.0, -1.0):
        coeffs, pairs = build(sign)
        candidates.append((sign, _gaussian_sensitivity(st, coeffs, sym_eta, pairs)))
    sign, res = min(candidates, key=lambda kv: kv[1].variance)
    res.extra["idler_sign"] = sign
    res.extra["n_a2_t1"] = n_a2
    return res


def scheme3_all_signals(inp: AnalyticInput, n_lo: float = DEFAULT_N_LO,
                        losses: tuple[LossSpec, ...] = ()) -> dict[str, SensitivityResult]:
    return {name: scheme3_sensitivity(inp, n_lo, name, losses)
            for name in ("atomic", "partial", "full")}
