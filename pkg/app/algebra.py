"""
Dense complex linear algebra kernels: singular values, LU solves and the
small-degree root finder used for Pade denominators.

All functions are pure; matrices are numpy arrays of complex128.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
import scipy.linalg
from numpy.polynomial import polynomial as P

from app.errors import InvalidArgumentError, SingularMatrixError

PIVOT_FLOOR = 1e-300


def as_matrix(A) -> np.ndarray:
    M = np.atleast_2d(np.asarray(A, dtype=complex))
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise InvalidArgumentError(f"expected a non-empty matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidArgumentError("matrix has non-finite entries")
    return M


def singular_values(A) -> np.ndarray:
    """Descending singular values of a square complex matrix."""
    M = as_matrix(A)
    if M.shape[0] != M.shape[1]:
        raise InvalidArgumentError(f"singular_values needs a square matrix, got {M.shape}")
    return np.linalg.svd(M, compute_uv=False)


@dataclass(frozen=True)
class LUFactorization:
    lu: np.ndarray
    piv: np.ndarray

    def solve(self, B) -> np.ndarray:
        return scipy.linalg.lu_solve((self.lu, self.piv), np.asarray(B, dtype=complex), check_finite=False)

    def determinant(self) -> complex:
        sign = (-1) ** int(np.count_nonzero(self.piv != np.arange(self.piv.size)))
        return complex(sign * np.prod(np.diag(self.lu)))


def lu_factor(A) -> LUFactorization:
    """Partial-pivoting LU; raises SingularMatrixError on a vanishing pivot."""
    M = as_matrix(A)
    if M.shape[0] != M.shape[1]:
        raise InvalidArgumentError(f"lu_factor needs a square matrix, got {M.shape}")
    with warnings.catch_warnings():
        # exactly singular input is reported below through the pivot check
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=False)
    if np.min(np.abs(np.diag(lu))) < PIVOT_FLOOR:
        raise SingularMatrixError("matrix is numerically singular")
    return LUFactorization(lu, piv)


def lu_solve(A, B) -> np.ndarray:
    return lu_factor(A).solve(B)


def poly_roots(q: Sequence[complex]) -> List[complex]:
    """
    Roots of q0 + q1 t + ... + qM t^M with q0 = 1.

    Trailing exact zeros are stripped first. Degrees 1 and 2 use closed
    forms, higher degrees the companion-matrix eigenvalues.
    """
    c = np.asarray(q, dtype=complex).ravel()
    if c.size == 0 or c[0] != 1:
        raise InvalidArgumentError("poly_roots expects q0 == 1")
    nz = np.flatnonzero(c)
    d = int(nz[-1])
    if d == 0:
        return []
    if d == 1:
        return [complex(-1.0 / c[1])]
    if d == 2:
        q1, q2 = complex(c[1]), complex(c[2])
        disc = np.sqrt(q1 * q1 - 4.0 * q2)
        if (q1.conjugate() * disc).real < 0:
            disc = -disc
        w = -0.5 * (q1 + disc)
        return [complex(w / q2), complex(1.0 / w)]
    return [complex(r) for r in P.polyroots(c[: d + 1])]
