"""Exact Gaussian (Wigner-covariance) state engine.

Every pre-measurement state in the undepleted-reservoir model is Gaussian, so
means and variances of the number-type signals follow exactly from a mean
vector and a real covariance matrix.  The covariance convention matches the
sampler: a vacuum mode has Var(x) = Var(y) = 1/4 with z = x + iy.

Observables are Hermitian quadratic forms sum_ij M_ij a_i^dag a_j.  With the
Weyl symbol s(z) = z^dag M z - tr(M)/2 and g the real (x, y) vector,

    <Q>          = E[s] = tr(A Sigma) + m^T A m - tr(M)/2
    V(Q)         = Var[s] - tr(M^2)/4
    Cov(Q1, Q2)  = Cov[s1, s2] - tr(M1 M2)/4        (symmetrized covariance)

where A is the real quadratic form equivalent to z^dag M z.  The ordering
corrections -tr(M^2)/4 are the matrix generalization of the -1/4-per-mode
number corrections; they are validated against the exact Fock oracle in the
tests.  Higher moments of zero-mean quadratic forms (needed for the pseudo-
spin moment formula) are evaluated exactly by Isserlis pairing.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .sampler import SqueezeSpec

VACUUM_QUAD_VAR = 0.25


def _complex_block(z: complex) -> np.ndarray:
    """Real 2x2 block of w -> z*w acting on (x, y)."""
    return np.array([[z.real, -z.imag], [z.imag, z.real]])


def _conj_block(z: complex) -> np.ndarray:
    """Real 2x2 block of w -> z*conj(w)."""
    return np.array([[z.real, z.imag], [z.imag, -z.real]])


class GaussianState:
    """Mean vector and Wigner covariance over labeled modes."""

    def __init__(self, labels):
        self.labels = tuple(labels)
        k = len(self.labels)
        self.mean = np.zeros(k, dtype=complex)
        self.cov = np.eye(2 * k) * VACUUM_QUAD_VAR

    def copy(self) -> "GaussianState":
        new = GaussianState(self.labels)
        new.mean = self.mean.copy()
        new.cov = self.cov.copy()
        return new

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValidationError(f"no mode {label!r} in state {self.labels}") from None

    # -------------------------------------------------- linear operations
    def _apply_real(self, t: np.ndarray, mean_map):
        self.cov = t @ self.cov @ t.T
        self.mean = mean_map(self.mean)

    def displace(self, label: str, alpha: complex):
        self.mean[self.index(label)] += alpha

    def phase(self, label: str, phi: float):
        i = self.index(label)
        t = np.eye(2 * len(self.labels))
        t[2 * i: 2 * i + 2, 2 * i: 2 * i + 2] = _complex_block(np.exp(1j * phi))
        u = np.exp(1j * phi)

        def mean_map(m):
            m = m.copy()
            m[i] *= u
            return m

        self._apply_real(t, mean_map)

    def squeeze(self, label: str, spec: SqueezeSpec):
        # z' = z cosh r + e^{i(theta_sq - pi/2)} conj(z) sinh r
        i = self.index(label)
        u = np.exp(1j * (spec.theta_sq - math.pi / 2)) * math.sinh(spec.r)
        c = math.cosh(spec.r)
        t = np.eye(2 * len(self.labels))
        t[2 * i: 2 * i + 2, 2 * i: 2 * i + 2] = c * np.eye(2) + _conj_block(u)

        def mean_map(m):
            m = m.copy()
            m[i] = c * m[i] + u * np.conj(m[i])
            return m

        self._apply_real(t, mean_map)

    def two_mode_squeeze(self, l1: str, l2: str, spec: SqueezeSpec):
        i, j = self.index(l1), self.index(l2)
        u = np.exp(1j * (spec.theta_sq - math.pi / 2)) * math.sinh(spec.r)
        c = math.cosh(spec.r)
        t = np.eye(2 * len(self.labels))
        bi, bj = slice(2 * i, 2 * i + 2), slice(2 * j, 2 * j + 2)
        t[bi, bi] = c * np.eye(2)
        t[bj, bj] = c * np.eye(2)
        t[bi, bj] = _conj_block(u)
        t[bj, bi] = _conj_block(u)

        def mean_map(m):
            m = m.copy()
            m[i], m[j] = c * m[i] + u * np.conj(m[j]), c * m[j] + u * np.conj(m[i])
            return m

        self._apply_real(t, mean_map)

    def beamsplitter(self, l1: str, l2: str, theta: float):
        i, j = self.index(l1), self.index(l2)
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        t = np.eye(2 * len(self.labels))
        bi, bj = slice(2 * i, 2 * i + 2), slice(2 * j, 2 * j + 2)
        t[bi, bi] = c * np.eye(2)
        t[bj, bj] = c * np.eye(2)
        t[bi, bj] = _complex_block(-1j * s)
        t[bj, bi] = _complex_block(-1j * s)

        def mean_map(m):
            m = m.copy()
            m[i], m[j] = c * m[i] - 1j * s * m[j], c * m[j] - 1j * s * m[i]
            return m

        self._apply_real(t, mean_map)

    def loss(self, label: str, eta: float):
        if not (0.0 <= eta <= 1.0):
            raise ValidationError(f"transmission must lie in [0, 1], got {eta}")
        i = self.index(label)
        root = math.sqrt(eta)
        k = len(self.labels)
        scale = np.ones(2 * k)
        scale[2 * i: 2 * i + 2] = root
        self.cov = self.cov * np.outer(scale, scale)
        self.cov[2 * i, 2 * i] += (1 - eta) * VACUUM_QUAD_VAR
        self.cov[2 * i + 1, 2 * i + 1] += (1 - eta) * VACUUM_QUAD_VAR
        self.mean[i] *= root

    # -------------------------------------------------- quadratic observables
    def real_mean(self) -> np.ndarray:
        m = np.empty(2 * len(self.labels))
        m[0::2] = self.mean.real
        m[1::2] = self.mean.imag
        return m

    def real_form(self, m_complex: np.ndarray) -> np.ndarray:
        """Real symmetric A with g^T A g = z^dag M z for Hermitian M."""
        k = len(self.labels)
        a = np.zeros((2 * k, 2 * k))
        for i in range(k):
            mii = m_complex[i, i].real
            a[2 * i, 2 * i] += mii
            a[2 * i + 1, 2 * i + 1] += mii
            for j in range(i + 1, k):
                mr, mi = m_complex[i, j].real, m_complex[i, j].imag
                xi, yi, xj, yj = 2 * i, 2 * i + 1, 2 * j, 2 * j + 1
                a[xi, xj] += mr
                a[xj, xi] += mr
                a[yi, yj] += mr
                a[yj, yi] += mr
                a[xi, yj] += -mi
                a[yj, xi] += -mi
                a[yi, xj] += mi
                a[xj, yi] += mi
        return a

    def op_mean(self, m_complex: np.ndarray) -> float:
        a = self.real_form(m_complex)
        g = self.real_mean()
        return float(np.trace(a @ self.cov) + g @ a @ g - np.trace(m_complex).real / 2)

    def op_cov(self, m1: np.ndarray, m2: np.ndarray) -> float:
        a1, a2 = self.real_form(m1), self.real_form(m2)
        g = self.real_mean()
        raw = 2 * np.trace(a1 @ self.cov @ a2 @ self.cov) + 4 * g @ a1 @ self.cov @ a2 @ g
        return float(raw - np.trace(m1 @ m2).real / 4)

    def op_var(self, m_complex: np.ndarray) -> float:
        return self.op_cov(m_complex, m_complex)

    def number_form(self, *labels_and_coeffs) -> np.ndarray:
        """Diagonal form sum c_i N_i given as (label, c) pairs."""
        k = len(self.labels)
        m = np.zeros((k, k), dtype=complex)
        for label, c in labels_and_coeffs:
            m[self.index(label), self.index(label)] = c
        return m

    def marginal_cov(self, labels) -> np.ndarray:
        idx = []
        for label in labels:
            i = self.index(label)
            idx.extend((2 * i, 2 * i + 1))
        return self.cov[np.ix_(idx, idx)]


# ------------------------------------------------------------------ Isserlis

def isserlis_moment(cov: np.ndarray, idx: tuple[int, ...]) -> float:
    """E[g_i1 ... g_in] for a zero-mean Gaussian."""
    n = len(idx)
    if n % 2:
        return 0.0
    if n == 0:
        return 1.0
    i0 = idx[0]
    total = 0.0
    for k in range(1, n):
        rest = idx[1:k] + idx[k + 1:]
        total += cov[i0, idx[k]] * isserlis_moment(cov, rest)
    return total


def quadform_terms(a: np.ndarray) -> list[tuple[int, int, float]]:
    """Sparse (i, j, c) terms with g^T A g = sum c * g_i * g_j (i <= j)."""
    terms = []
    n = a.shape[0]
    for i in range(n):
        if a[i, i] != 0:
            terms.append((i, i, float(a[i, i])))
        for j in range(i + 1, n):
            c = a[i, j] + a[j, i]
            if c != 0:
                terms.append((i, j, float(c)))
    return terms


def quadform_product_moment(cov: np.ndarray, forms: list[list[tuple[int, int, float]]]) -> float:
    """E[prod_k (g^T A_k g)] for zero-mean Gaussian, exact."""
    total = 0.0
    for combo in itertools.product(*forms):
        coeff = 1.0
        idx: list[int] = []
        for (i, j, c) in combo:
            coeff *= c
            idx.extend((i, j))
        total += coeff * isserlis_moment(cov, tuple(idx))
    return total
