"""
Newton's method on power series (local series solution of H(x, t) = 0
around t = t*) and the point-valued Newton corrector.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Tuple, Union

import numpy as np

from app.algebra import lu_factor
from app.errors import InvalidStartError, SingularJacobianError, SingularMatrixError
from app.polysys import Homotopy, evaluate, evaluate_series, jacobian, jacobian_series, relative_residual
from app.series import SeriesVector, TruncatedSeries, extend, order, truncate

logger = logging.getLogger(__name__)

START_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class SeriesSolveReport:
    series: SeriesVector
    iterations: int
    update_orders: List[Union[int, float]] = field(default_factory=list)
    schedule: List[int] = field(default_factory=list)
    achieved_order: int = 1


@dataclass(frozen=True)
class CorrectorReport:
    point: np.ndarray
    converged: bool
    iterations: int
    update_norm: float
    residual: float
    singular: bool = False
    diverged: bool = False


def newton_series_step(
    H: Homotopy, xs: SeriesVector, w_next: int, t_star: complex = 0.0
) -> Tuple[SeriesVector, Union[int, float]]:
    """
    One Newton step on series for H expanded at t_star, i.e. for the shifted
    homotopy G(x, t) = H(x, t_star + t).

    Solves J0 d_l + J1 d_{l-1} + ... + J_l d_0 = -H_l for l = 0 .. w_next-1
    by back substitution with a single LU factorisation of J0. Returns the
    updated series (order w_next) and the order of the update.
    """
    x = truncate(xs, w_next) if xs.w >= w_next else extend(xs, w_next)
    Hs = evaluate_series(H, x, w_next, t_star).coeffs
    Js = jacobian_series(H, x, w_next, t_star).coeffs
    try:
        lu = lu_factor(Js[0])
    except SingularMatrixError as e:
        raise SingularJacobianError("Jacobian is singular at the expansion point") from e
    d = np.zeros_like(x.coeffs)
    for ell in range(w_next):
        rhs = -Hs[ell]
        for i in range(1, ell + 1):
            rhs = rhs - Js[i] @ d[ell - i]
        d[ell] = lu.solve(rhs)
    update = TruncatedSeries(d)
    return TruncatedSeries(x.coeffs + d), order(update)


def compute_series(H: Homotopy, t_star: complex, w: int, z0) -> SeriesSolveReport:
    """
    Power series solution through z0 at t = t_star, truncated at order w.

    Starts from the constant series z0 (correct to order 1) and doubles the
    truncation each iteration, w_k = min(2^k, w), until it reaches w.
    """
    z = np.asarray(z0, dtype=complex).ravel()
    res = relative_residual(H, z, t_star)
    if res > START_RESIDUAL_TOL:
        raise InvalidStartError(f"start point residual {res:.3e} exceeds {START_RESIDUAL_TOL:.0e}")
    xs = TruncatedSeries.constant(z, 1)
    r = 1
    update_orders: List[Union[int, float]] = []
    schedule: List[int] = []
    while r < w:
        w_next = min(2 * r, w)
        xs, ord_update = newton_series_step(H, xs, w_next, t_star)
        update_orders.append(ord_update)
        schedule.append(w_next)
        r = w_next
    if xs.w < w:
        xs = extend(xs, w)
    logger.debug(f"series at t*={t_star}: w={w}, iterations={len(schedule)}, update orders={update_orders}")
    return SeriesSolveReport(xs, len(schedule), update_orders, schedule, r)


def correct(H: Homotopy, z_tilde, t: complex, tol: float = 1e-12, max_iters: int = 4) -> CorrectorReport:
    """
    Plain Newton iteration z <- z - J^{-1} H at fixed t.

    Converged once the relative residual is at most tol or the update norm
    is at most tol * (1 + |z|). Two successive tenfold growths of the update
    norm count as divergence.
    """
    z = np.array(z_tilde, dtype=complex).ravel()
    prev = None
    growth = 0
    upd = float("inf")
    converged = singular = diverged = False
    iterations = 0
    for _ in range(max_iters):
        F = evaluate(H, z, t)
        try:
            lu = lu_factor(jacobian(H, z, t))
        except SingularMatrixError:
            singular = True
            break
        dz = lu.solve(-F)
        z = z + dz
        iterations += 1
        upd = float(np.linalg.norm(dz))
        if not np.all(np.isfinite(z)):
            diverged = True
            break
        if relative_residual(H, z, t) <= tol or upd <= tol * (1.0 + float(np.linalg.norm(z))):
            converged = True
            break
        if prev is not None and upd > 10.0 * prev:
            growth += 1
            if growth >= 2:
                diverged = True
                break
        else:
            growth = 0
        prev = upd
    residual = relative_residual(H, z, t) if np.all(np.isfinite(z)) else float("inf")
    if singular and residual <= tol:
        converged, singular = True, False
    return CorrectorReport(z, converged, iterations, upd, residual, singular, diverged)
