"""
Constructors for the benchmark systems and homotopies the harness and the
tests share.
"""
from __future__ import annotations

import itertools
import math
from typing import List, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from app.polysys import Homotopy, blend

UNIT_ROUNDOFF = 2.0 ** -52


def hyperbola_homotopy(p: float) -> Homotopy:
    """x^2 - (t - 1/2)^2 - p^2, whose two paths pass within 2|p| of each other at t = 1/2."""
    return Homotopy.from_terms(
        1,
        [[(1.0, [2], 0), (-1.0, [0], 2), (1.0, [0], 1), (-(0.25 + p * p), [0], 0)]],
    )


def hyperbola_branch(p: float, t: complex) -> complex:
    """The branch of sqrt((t - 1/2)^2 + p^2) through +sqrt(1/4 + p^2) at t = 0, for real t."""
    return complex(np.sqrt((t - 0.5) ** 2 + p * p))


def univariate_system(coeffs: Sequence[complex]) -> Homotopy:
    """Target system sum c_k x^k from ascending coefficients."""
    return Homotopy.from_terms(1, [[(c, [k], 0) for k, c in enumerate(coeffs) if c != 0]])


def wilkinson_coefficients(d: int) -> List[float]:
    """Ascending coefficients of prod_{i=1..d} (x - i), rounded once from exact integers."""
    c = [1]
    for i in range(1, d + 1):
        nxt = [0] * (len(c) + 1)
        for k, ck in enumerate(c):
            nxt[k + 1] += ck
            nxt[k] -= i * ck
        c = nxt
    return [float(v) for v in c]


def wilkinson_system(d: int) -> Homotopy:
    return univariate_system(wilkinson_coefficients(d))


def random_dense_system(n: int, d: int, rng: np.random.Generator) -> Homotopy:
    """n equations of degree d with every monomial |q| <= d and standard normal complex coefficients."""
    support = [q for q in itertools.product(range(d + 1), repeat=n) if sum(q) <= d]
    polys = []
    for _ in range(n):
        coeffs = rng.standard_normal(len(support)) + 1j * rng.standard_normal(len(support))
        polys.append([(c, q, 0) for c, q in zip(coeffs, support)])
    return Homotopy.from_terms(n, polys)


def cluster_roots(n_c: int, cluster_size: int, alpha: float) -> np.ndarray:
    """z_ij = c_i + alpha u^(1/CS) e^(2 pi i (j-1)/CS) around the n_c-th roots of unity c_i."""
    centers = np.exp(2j * np.pi * np.arange(n_c) / n_c)
    radius = alpha * UNIT_ROUNDOFF ** (1.0 / cluster_size)
    offsets = radius * np.exp(2j * np.pi * np.arange(cluster_size) / cluster_size)
    return (centers[:, None] + offsets[None, :]).ravel()


def cluster_homotopy(
    n_c: int, cluster_size: int, alpha: float, rng: np.random.Generator
) -> Tuple[Homotopy, Homotopy, List[np.ndarray]]:
    """
    (1-t)(1/2-t) G + g1 t(1-t) E + g2 t(1/2-t) F with G = x^d - 1, E the
    clustered polynomial and F a random degree-d target. Returns the
    homotopy, F and the start solutions (d-th roots of unity).
    """
    d = n_c * cluster_size
    E = univariate_system(P.polyfromroots(cluster_roots(n_c, cluster_size, alpha)))
    F = univariate_system(rng.standard_normal(d + 1) + 1j * rng.standard_normal(d + 1))
    g1, g2 = np.exp(2j * np.pi * rng.random(2))
    G = Homotopy.from_terms(1, [[(1.0, [d], 0), (-1.0, [0], 0)]])
    H = blend([((0.5, -1.5, 1.0), G), ((0.0, g1, -g1), E), ((0.0, 0.5 * g2, -g2), F)])
    starts = [np.array([z]) for z in np.exp(2j * np.pi * np.arange(d) / d)]
    return H, F, starts


def katsura_system(n: int) -> Homotopy:
    """katsura-n in the n+1 unknowns x_0..x_n; Bezout number 2^n."""
    nv = n + 1

    def e(*idx: int) -> List[int]:
        q = [0] * nv
        for i in idx:
            q[i] += 1
        return q

    polys = []
    for m in range(n):
        terms = []
        for ell in range(-n, n + 1):
            a, b = abs(ell), abs(m - ell)
            if b <= n:
                terms.append((1.0, e(a, b), 0))
        terms.append((-1.0, e(m), 0))
        polys.append(terms)
    polys.append([(1.0, e(0), 0)] + [(2.0, e(i), 0) for i in range(1, nv)] + [(-1.0, e(), 0)])
    return Homotopy.from_terms(nv, polys)


def gamma3(s: float) -> complex:
    """Smooth parameter path s + 0.2 sin(pi s) i bending around the upper branch point."""
    return complex(s, 0.2 * math.sin(math.pi * s))


def gamma1(s: float) -> complex:
    """Straight parameter path s -> s along the real axis."""
    return complex(s, 0.0)


PARAMETER_PATHS = {"gamma1": gamma1, "gamma3": gamma3}

# (t + 1.01)(t^2 - t + 37/4), ascending powers of t
RADICAND = (9.3425, 8.24, 0.01, 1.0)
RADICAND_BRANCH_POINT = -1.01


def radical_homotopy() -> Homotopy:
    """x^2 - f(t) for the cubic radicand f; its solution through sqrt(f(0)) branches at t = -1.01."""
    return Homotopy.from_terms(1, [[(1.0, [2], 0)] + [(-c, [0], k) for k, c in enumerate(RADICAND)]])


def radical_value(t: complex) -> complex:
    """sqrt(f(t)) on the principal branch, the right one for |t| < 1."""
    return complex(np.sqrt(complex(P.polyval(t, RADICAND))))
