"""
Square Laurent polynomial homotopies H(x, t).

Each equation is a sparse list of monomials c * x^q * t^k with exact integer
exponents; derivatives are taken symbolically on the exponents and cached on
the (immutable) homotopy. Evaluation is available at complex points and at
truncated power series arguments.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from app.errors import DomainError, InvalidArgumentError
from app.series import SeriesMatrix, SeriesVector, TruncatedSeries, cauchy

TermKey = Tuple[Tuple[int, ...], int]


@dataclass(frozen=True)
class HMonomial:
    coefficient: complex
    x_exponents: Tuple[int, ...]
    t_degree: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficient", complex(self.coefficient))
        object.__setattr__(self, "x_exponents", tuple(int(e) for e in self.x_exponents))
        if self.coefficient == 0:
            raise InvalidArgumentError("monomial coefficient must be non-zero")
        if self.t_degree < 0:
            raise InvalidArgumentError("t degree must be non-negative")

    @property
    def key(self) -> TermKey:
        return (self.x_exponents, self.t_degree)


@dataclass(frozen=True)
class HomotopyPoly:
    n: int
    monomials: Tuple[HMonomial, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "monomials", tuple(self.monomials))
        keys = set()
        for mono in self.monomials:
            if len(mono.x_exponents) != self.n:
                raise InvalidArgumentError(
                    f"exponent vector {mono.x_exponents} does not match {self.n} variables"
                )
            if mono.key in keys:
                raise InvalidArgumentError(f"duplicate monomial key {mono.key}")
            keys.add(mono.key)

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[Tuple[complex, Sequence[int], int]]) -> "HomotopyPoly":
        """Build from (coefficient, exponents, t_degree) triples, merging equal keys."""
        acc: Dict[TermKey, complex] = defaultdict(complex)
        for coeff, exps, k in terms:
            acc[(tuple(int(e) for e in exps), int(k))] += complex(coeff)
        monos = [HMonomial(c, q, k) for (q, k), c in acc.items() if c != 0]
        return cls(n, tuple(monos))

    @cached_property
    def coeffs(self) -> np.ndarray:
        return np.array([m.coefficient for m in self.monomials], dtype=complex)

    @cached_property
    def exps(self) -> np.ndarray:
        return np.array([m.x_exponents for m in self.monomials], dtype=int).reshape(len(self.monomials), self.n)

    @cached_property
    def tdeg(self) -> np.ndarray:
        return np.array([m.t_degree for m in self.monomials], dtype=int)

    @property
    def is_zero(self) -> bool:
        return not self.monomials

    def degree(self) -> int:
        return int(self.exps.sum(axis=1).max()) if self.monomials else 0

    def t_degree(self) -> int:
        return int(self.tdeg.max()) if self.monomials else 0

    def diff(self, j: int) -> "HomotopyPoly":
        """Symbolic partial derivative with respect to x_j."""
        terms = []
        for m in self.monomials:
            e = m.x_exponents[j]
            if e != 0:
                q = list(m.x_exponents)
                q[j] -= 1
                terms.append((m.coefficient * e, q, m.t_degree))
        return HomotopyPoly.from_terms(self.n, terms)

    def evaluate(self, x: np.ndarray, t: complex) -> complex:
        if self.is_zero:
            return 0j
        mons = np.prod(np.power(x[None, :], self.exps), axis=1) * np.power(complex(t), self.tdeg)
        return complex(np.dot(self.coeffs, mons))

    def evaluate_abs(self, xa: np.ndarray, ta: float) -> float:
        """The polynomial with coefficient moduli, at coordinate moduli."""
        if self.is_zero:
            return 0.0
        mons = np.prod(np.power(xa[None, :], self.exps), axis=1) * np.power(ta, self.tdeg)
        return float(np.dot(np.abs(self.coeffs), mons))

    def evaluate_series(self, table: "PowerTable") -> np.ndarray:
        w = table.w
        out = np.zeros(w, dtype=complex)
        if self.is_zero:
            return out
        prod = np.zeros((w, len(self.monomials)), dtype=complex)
        prod[0] = self.coeffs
        for j in range(self.n):
            col = self.exps[:, j]
            if np.any(col != 0):
                prod = cauchy(prod, table.column(j, col))
        for k in np.unique(self.tdeg):
            part = prod[:, self.tdeg == k].sum(axis=1)
            if table.tpow is not None:
                out += cauchy(part, table.tpow[:, k])
            elif k < w:
                out[k:] += part[: w - k]
        return out


class PowerTable:
    """
    Series powers x_j^e for the exponent ranges one evaluation needs, and
    the powers (t_star + t)^k when the series is expanded at t_star != 0.
    """

    def __init__(self, xs: SeriesVector, polys: Sequence[HomotopyPoly], t_star: complex = 0.0):
        self.w = xs.w
        n = xs.shape[0]
        self.tpow = None
        if t_star != 0:
            kmax = max([0] + [p.t_degree() for p in polys])
            base = np.zeros(self.w, dtype=complex)
            base[0] = t_star
            if self.w > 1:
                base[1] = 1.0
            self.tpow = np.zeros((self.w, kmax + 1), dtype=complex)
            self.tpow[0, 0] = 1.0
            for k in range(1, kmax + 1):
                self.tpow[:, k] = cauchy(self.tpow[:, k - 1], base)
        self._lo: List[int] = []
        self._tables: List[np.ndarray] = []
        for j in range(n):
            used = [p.exps[:, j] for p in polys if not p.is_zero]
            lo = min([0] + [int(u.min()) for u in used])
            hi = max([0] + [int(u.max()) for u in used])
            base = xs.coeffs[:, j]
            table = np.zeros((self.w, hi - lo + 1), dtype=complex)
            one = np.zeros(self.w, dtype=complex)
            one[0] = 1.0
            table[:, -lo] = one
            power = one
            for e in range(1, hi + 1):
                power = cauchy(power, base)
                table[:, e - lo] = power
            if lo < 0:
                inv = _reciprocal(base)
                power = one
                for e in range(1, -lo + 1):
                    power = cauchy(power, inv)
                    table[:, -e - lo] = power
            self._lo.append(lo)
            self._tables.append(table)

    def column(self, j: int, exponents: np.ndarray) -> np.ndarray:
        return self._tables[j][:, exponents - self._lo[j]]


def _reciprocal(c: np.ndarray) -> np.ndarray:
    if c[0] == 0:
        raise DomainError("negative power of a series with zero constant term")
    inv = np.zeros_like(c)
    inv[0] = 1.0 / c[0]
    for k in range(1, c.size):
        inv[k] = -np.dot(c[1 : k + 1], inv[k - 1 :: -1][:k]) / c[0]
    return inv


@dataclass(frozen=True)
class Homotopy:
    n: int
    polys: Tuple[HomotopyPoly, ...]
    toric: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "polys", tuple(self.polys))
        if self.n < 1:
            raise InvalidArgumentError("need at least one variable")
        if len(self.polys) != self.n:
            raise InvalidArgumentError(f"system is not square: {len(self.polys)} equations in {self.n} variables")
        for p in self.polys:
            if p.n != self.n:
                raise InvalidArgumentError("polynomial variable count mismatch")
            if not self.toric and p.monomials and int(p.exps.min()) < 0:
                raise InvalidArgumentError("negative exponents require a toric system")

    @classmethod
    def from_terms(
        cls,
        n: int,
        polys_terms: Sequence[Iterable[Tuple[complex, Sequence[int], int]]],
        toric: bool = False,
    ) -> "Homotopy":
        return cls(n, tuple(HomotopyPoly.from_terms(n, terms) for terms in polys_terms), toric)

    @cached_property
    def gradient_polys(self) -> Tuple[Tuple[HomotopyPoly, ...], ...]:
        return tuple(tuple(p.diff(j) for j in range(self.n)) for p in self.polys)

    @cached_property
    def hessian_polys(self) -> Tuple[Tuple[Tuple[HomotopyPoly, ...], ...], ...]:
        out = []
        for grads in self.gradient_polys:
            rows: List[List[HomotopyPoly]] = [[None] * self.n for _ in range(self.n)]  # type: ignore[list-item]
            for j in range(self.n):
                for k in range(j, self.n):
                    rows[j][k] = grads[j].diff(k)
                    rows[k][j] = rows[j][k]
            out.append(tuple(tuple(r) for r in rows))
        return tuple(out)

    @property
    def is_homotopy(self) -> bool:
        """True when some coefficient depends on t."""
        return any(p.t_degree() > 0 for p in self.polys)

    def degrees(self) -> List[int]:
        return [p.degree() for p in self.polys]


def _point(H: Homotopy, x) -> np.ndarray:
    z = np.asarray(x, dtype=complex).ravel()
    if z.size != H.n:
        raise InvalidArgumentError(f"point has {z.size} coordinates, system has {H.n} variables")
    if H.toric and np.any(z == 0):
        raise DomainError("toric system evaluated with a zero coordinate")
    return z


def evaluate(H: Homotopy, x, t: complex) -> np.ndarray:
    z = _point(H, x)
    return np.array([p.evaluate(z, t) for p in H.polys], dtype=complex)


def jacobian(H: Homotopy, x, t: complex) -> np.ndarray:
    z = _point(H, x)
    return np.array([[g.evaluate(z, t) for g in row] for row in H.gradient_polys], dtype=complex)


def hessians(H: Homotopy, x, t: complex) -> List[np.ndarray]:
    z = _point(H, x)
    out = []
    for rows in H.hessian_polys:
        Hi = np.zeros((H.n, H.n), dtype=complex)
        for j in range(H.n):
            for k in range(j, H.n):
                Hi[j, k] = rows[j][k].evaluate(z, t)
                Hi[k, j] = Hi[j, k]
        out.append(Hi)
    return out


def _shift_poly(p: HomotopyPoly, a: complex) -> HomotopyPoly:
    terms = []
    for m in p.monomials:
        k = m.t_degree
        for r in range(k + 1):
            terms.append((m.coefficient * math.comb(k, r) * a ** (k - r), m.x_exponents, r))
    return HomotopyPoly.from_terms(p.n, terms)


def shift(H: Homotopy, t_star: complex) -> Homotopy:
    """The homotopy G with G(x, t) = H(x, t + t_star)."""
    if t_star == 0:
        return H
    return Homotopy(H.n, tuple(_shift_poly(p, complex(t_star)) for p in H.polys), H.toric)


def specialize(H: Homotopy, t: complex) -> Homotopy:
    """The t-free system x -> H(x, t) for a fixed t."""
    t = complex(t)
    polys = [[(m.coefficient * t**m.t_degree, m.x_exponents, 0) for m in p.monomials] for p in H.polys]
    return Homotopy.from_terms(H.n, polys, toric=H.toric)


def _series_arg(H: Homotopy, xs: SeriesVector, w: int) -> SeriesVector:
    if xs.shape != (H.n,):
        raise InvalidArgumentError(f"series argument has shape {xs.shape}, expected ({H.n},)")
    if xs.w < w:
        raise InvalidArgumentError(f"series argument truncated at {xs.w} < {w}")
    return TruncatedSeries(xs.coeffs[:w])


def evaluate_series(H: Homotopy, xs: SeriesVector, w: int, t_star: complex = 0.0) -> SeriesVector:
    """
    H(xs(t), t_star + t) modulo t^w. Equal to evaluating shift(H, t_star)
    at t, without building the shifted homotopy.
    """
    arg = _series_arg(H, xs, w)
    table = PowerTable(arg, H.polys, t_star)
    return TruncatedSeries(np.stack([p.evaluate_series(table) for p in H.polys], axis=1))


def jacobian_series(H: Homotopy, xs: SeriesVector, w: int, t_star: complex = 0.0) -> SeriesMatrix:
    """J_H(xs(t), t_star + t) modulo t^w, shape (w, n, n)."""
    arg = _series_arg(H, xs, w)
    grads = [g for row in H.gradient_polys for g in row]
    table = PowerTable(arg, grads, t_star)
    flat = np.stack([g.evaluate_series(table) for g in grads], axis=1)
    return TruncatedSeries(flat.reshape(w, H.n, H.n))


def relative_residual(H: Homotopy, x, t: complex = 0.0) -> float:
    """
    Scale-invariant backward error: mean over equations of
    |h_i(x, t)| / (h_i,abs(|x|, |t|) + 1).
    """
    z = _point(H, x)
    za = np.abs(z)
    ta = abs(t)
    r = [abs(p.evaluate(z, t)) / (p.evaluate_abs(za, ta) + 1.0) for p in H.polys]
    return float(np.mean(r))


def row_scales(H: Homotopy, x, t: complex = 0.0) -> np.ndarray:
    """1 / (h_i,abs(|x|, |t|) + 1) per equation."""
    z = _point(H, x)
    za = np.abs(z)
    return np.array([1.0 / (p.evaluate_abs(za, abs(t)) + 1.0) for p in H.polys])


def blend(pieces: Sequence[Tuple[Sequence[complex], Homotopy]]) -> Homotopy:
    """
    Sum of p_k(t) * S_k(x, t) where p_k is given by its coefficients in
    increasing powers of t. All systems must share n.
    """
    if not pieces:
        raise InvalidArgumentError("blend needs at least one piece")
    n = pieces[0][1].n
    toric = any(S.toric for _, S in pieces)
    polys_terms: List[List[Tuple[complex, Tuple[int, ...], int]]] = [[] for _ in range(n)]
    for tpoly, S in pieces:
        if S.n != n:
            raise InvalidArgumentError("blended systems must have the same number of variables")
        for i, p in enumerate(S.polys):
            for r, a in enumerate(tpoly):
                if a == 0:
                    continue
                for m in p.monomials:
                    polys_terms[i].append((a * m.coefficient, m.x_exponents, m.t_degree + r))
    return Homotopy.from_terms(n, polys_terms, toric)
