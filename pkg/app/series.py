"""
Truncated power series over the complex numbers, i.e. the ring C[[t]]/t^w.

A TruncatedSeries stores its coefficients with the power of t on the first
axis, so one type covers scalar (w,), vector (w, n) and matrix (w, n, n)
series. Values are immutable; every operation returns a new series.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from app.errors import InvalidArgumentError

ORDER_RTOL = 1e-14


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim == 0 or c.shape[0] < 1:
            raise InvalidArgumentError("a series needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise InvalidArgumentError("series coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def constant(cls, value, w: int) -> "TruncatedSeries":
        v = np.asarray(value, dtype=complex)
        c = np.zeros((w,) + v.shape, dtype=complex)
        c[0] = v
        return cls(c)

    @classmethod
    def zeros(cls, w: int, shape=()) -> "TruncatedSeries":
        return cls(np.zeros((w,) + tuple(shape), dtype=complex))

    @property
    def w(self) -> int:
        return self.coeffs.shape[0]

    @property
    def shape(self) -> tuple:
        return self.coeffs.shape[1:]

    def __getitem__(self, index) -> "TruncatedSeries":
        """Component access; index addresses the value shape, not the powers of t."""
        if not isinstance(index, tuple):
            index = (index,)
        return TruncatedSeries(self.coeffs[(slice(None),) + index])

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return add(self, other)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return sub(self, other)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return mul(self, other)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(-self.coeffs)

    def __repr__(self) -> str:
        return f"TruncatedSeries(w={self.w}, shape={self.shape})"

    def evaluate(self, dt: complex) -> Union[complex, np.ndarray]:
        """Horner evaluation of the truncated sum at t = dt."""
        acc = np.zeros(self.shape, dtype=complex)
        for c in self.coeffs[::-1]:
            acc = acc * dt + c
        return acc if self.shape else complex(acc)


SeriesVector = TruncatedSeries
SeriesMatrix = TruncatedSeries


def _check_w(a: TruncatedSeries, b: TruncatedSeries) -> None:
    if a.w != b.w:
        raise InvalidArgumentError(f"truncation orders differ: {a.w} != {b.w}")


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    _check_w(a, b)
    return TruncatedSeries(a.coeffs + b.coeffs)


def sub(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    _check_w(a, b)
    return TruncatedSeries(a.coeffs - b.coeffs)


def scale(a: TruncatedSeries, lam: complex) -> TruncatedSeries:
    return TruncatedSeries(a.coeffs * lam)


def cauchy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Schoolbook Cauchy product of coefficient arrays of equal length (broadcasting)."""
    w = a.shape[0]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
    for i in range(w):
        out[i:] += a[i] * b[: w - i]
    return out


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Coefficient-wise (entrywise) product modulo t^w."""
    _check_w(a, b)
    return TruncatedSeries(cauchy(a.coeffs, b.coeffs))


def order_threshold(coeffs: np.ndarray) -> float:
    return ORDER_RTOL * (1.0 + float(np.max(np.abs(coeffs))))


def order(v: TruncatedSeries) -> Union[int, float]:
    """
    Smallest power of t carrying a coefficient above the order threshold.

    For vectors and matrices the minimum over components. Returns math.inf
    for the (numerically) zero series.
    """
    c = v.coeffs.reshape(v.w, -1)
    tau = order_threshold(c)
    big = np.flatnonzero(np.any(np.abs(c) > tau, axis=1))
    if big.size == 0:
        return math.inf
    return int(big[0])


def truncate(a: TruncatedSeries, w_new: int) -> TruncatedSeries:
    if w_new > a.w or w_new < 1:
        raise InvalidArgumentError(f"cannot truncate order {a.w} series to {w_new}")
    return TruncatedSeries(a.coeffs[:w_new])


def extend(a: TruncatedSeries, w_new: int) -> TruncatedSeries:
    """Pad with zero coefficients up to order w_new."""
    if w_new < a.w:
        raise InvalidArgumentError(f"cannot extend order {a.w} series to {w_new}")
    out = np.zeros((w_new,) + a.shape, dtype=complex)
    out[: a.w] = a.coeffs
    return TruncatedSeries(out)
