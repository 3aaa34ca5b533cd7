"""
Type (L, M) Pade approximants built from Taylor coefficients, their error
coefficient e0 and the distance to the nearest pole.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.linalg import toeplitz

from app.algebra import poly_roots
from app.errors import InvalidArgumentError, PoleEvaluationError
from app.series import SeriesVector, order_threshold

logger = logging.getLogger(__name__)

RANK_RTOL = 1e-10
POLE_CUTOFF = 1e6
DENOMINATOR_FLOOR = 1e-300


@dataclass(frozen=True, eq=False)
class PadeApproximant:
    numerator: np.ndarray  # a_0 .. a_L
    denominator: np.ndarray  # 1, b_1 .. b_M (zero padded when the fit was reduced)
    L: int
    M: int

    @property
    def effective_m(self) -> int:
        nz = np.flatnonzero(self.denominator)
        return int(nz[-1])

    def poles(self) -> List[complex]:
        return poly_roots(self.denominator)


@dataclass(frozen=True, eq=False)
class PadeBundle:
    approximants: Tuple[PadeApproximant, ...]
    e0: np.ndarray
    pole_distance: float
    k: int

    def evaluate(self, dt: complex) -> np.ndarray:
        return np.array([pade_eval(P, dt) for P in self.approximants], dtype=complex)


def _coeff(c: np.ndarray, i: int) -> complex:
    return c[i] if 0 <= i < c.size else 0j


def _numerator(c: np.ndarray, b: np.ndarray, L: int) -> np.ndarray:
    a = np.zeros(L + 1, dtype=complex)
    for ell in range(L + 1):
        for j in range(min(ell, b.size - 1) + 1):
            a[ell] += b[j] * c[ell - j]
    return a


def _denominator(c: np.ndarray, L: int, M: int) -> np.ndarray:
    """
    Solve sum_j b_j c_{L+i-j} = -c_{L+i}, i = 1..M, through the SVD, reducing M
    while the Toeplitz block is numerically rank deficient.
    """
    tau = order_threshold(c)
    scale = float(np.max(np.abs(c[: L + M + 1])))
    while M > 0:
        if M == 1 and abs(c[L]) > tau:
            return np.array([1.0, -c[L + 1] / c[L]], dtype=complex)
        col = np.array([_coeff(c, L + i) for i in range(M)], dtype=complex)
        row = np.array([_coeff(c, L - j) for j in range(M)], dtype=complex)
        T = toeplitz(col, row)
        rhs = -np.array([_coeff(c, L + i) for i in range(1, M + 1)], dtype=complex)
        U, s, Vh = np.linalg.svd(T)
        if s[-1] > RANK_RTOL * max(s[0], scale) and s[-1] > 0:
            sol = Vh.conj().T @ ((U.conj().T @ rhs) / s)
            return np.concatenate(([1.0 + 0j], sol))
        logger.debug(f"Toeplitz block rank deficient at M={M}, reducing")
        M -= 1
    return np.array([1.0 + 0j])


def pade_fit(c: Sequence[complex], L: int, M: int) -> PadeApproximant:
    """
    Type (L, M) Pade approximant of the series with coefficients c_0 .. c_{L+M}.

    Never raises on degenerate input: rank deficiency lowers the denominator
    degree down to M = 0 (the truncated Taylor polynomial).
    """
    coeffs = np.asarray(c, dtype=complex).ravel()
    if L < 0 or M < 0:
        raise InvalidArgumentError("Pade degrees must be non-negative")
    if coeffs.size < L + M + 1:
        raise InvalidArgumentError(f"need {L + M + 1} coefficients, got {coeffs.size}")
    b = _denominator(coeffs, L, M)
    denominator = np.zeros(M + 1, dtype=complex)
    denominator[: b.size] = b
    return PadeApproximant(_numerator(coeffs, denominator, L), denominator, L, M)


def error_coefficient(c: Sequence[complex], P: PadeApproximant) -> complex:
    """
    Coefficient of t^k, k = L+M+1, in p(t) - q(t) x(t):
    e0 = a_k - (c_k + b_1 c_{k-1} + ... + b_M c_{k-M}).
    """
    coeffs = np.asarray(c, dtype=complex).ravel()
    k = P.L + P.M + 1
    if coeffs.size < k + 1:
        raise InvalidArgumentError(f"need {k + 1} coefficients for the error coefficient")
    a_k = P.numerator[k] if k <= P.L else 0j
    return complex(a_k - sum(P.denominator[j] * _coeff(coeffs, k - j) for j in range(P.M + 1)))


def pole_distance(approximants: Sequence[PadeApproximant]) -> float:
    """Smallest pole modulus over all coordinates; poles beyond 1e6 do not count."""
    D = math.inf
    for P in approximants:
        for z in P.poles():
            if abs(z) <= POLE_CUTOFF:
                D = min(D, abs(z))
    return D


def pade_eval(P: PadeApproximant, dt: complex) -> complex:
    num = np.polynomial.polynomial.polyval(dt, P.numerator)
    den = np.polynomial.polynomial.polyval(dt, P.denominator)
    if abs(den) < DENOMINATOR_FLOOR:
        raise PoleEvaluationError(f"denominator vanishes at dt={dt}")
    return complex(num / den)


def fit_bundle(xs: SeriesVector, L: int, M: int) -> PadeBundle:
    """Per-coordinate fits of a vector series with at least L+M+2 coefficients."""
    approximants = []
    e0 = np.zeros(xs.shape[0], dtype=complex)
    for j in range(xs.shape[0]):
        c = xs.coeffs[:, j]
        P = pade_fit(c, L, M)
        approximants.append(P)
        e0[j] = error_coefficient(c, P)
    bundle = tuple(approximants)
    return PadeBundle(bundle, e0, pole_distance(bundle), L + M + 1)
