"""
A-priori adaptive step path tracker.

Each step fits Pade approximants to the local power series solution and
takes the step

    dt = min(dt1, dt2, t_end_game - t*)

where dt1 keeps the predicted error ||e0|| dt^k a small fraction beta1 of
the estimated distance eta to the nearest other path, and dt2 = beta2 * D
stays inside the trust region given by the nearest Pade pole D. The
predicted point is then corrected with a few Newton steps.
"""
from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from app.algebra import singular_values
from app.config import TrackerConfig
from app.errors import InvalidArgumentError, PadetrackError, StepUnderflowError
from app.newton import correct, compute_series
from app.pade import PadeBundle, fit_bundle
from app.polysys import Homotopy, blend, hessians, jacobian, relative_residual, row_scales, specialize

logger = logging.getLogger(__name__)

PROGRESS_EVERY = 100

# everything a single path may raise; converted into a PathStatus
NUMERIC_ERRORS = (PadetrackError, np.linalg.LinAlgError, ArithmeticError)


class PathStatus(str, Enum):
    SUCCESS = "success"
    CORRECTOR_FAILURE = "corrector-failure"
    STEP_UNDERFLOW = "step-underflow"
    STEP_BUDGET_EXHAUSTED = "step-budget-exhausted"
    SINGULAR_ENDPOINT = "singular-endpoint"


@dataclass(frozen=True, eq=False)
class StepDiagnostics:
    dt1: float
    dt2: float
    eta: float
    e0_norm: float
    pole_distance: float
    dt1_binding: bool
    bundle: PadeBundle


class Prediction(NamedTuple):
    z_tilde: np.ndarray
    dt: float
    diagnostics: StepDiagnostics


@dataclass(frozen=True, eq=False)
class StepRecord:
    t: float
    dt: float
    z_tilde: np.ndarray
    z: np.ndarray
    eta: float
    halvings: int


@dataclass(eq=False)
class PathResult:
    endpoint: np.ndarray
    status: PathStatus
    steps: int
    residual: float
    min_dt: float = math.inf
    max_dt: float = 0.0
    dt1_steps: int = 0
    halvings: int = 0
    t_reached: float = 0.0
    step_log: List[StepRecord] = field(default_factory=list)

    @property
    def succeeded(self) -> bool:
        return self.status is PathStatus.SUCCESS

    @property
    def dt1_fraction(self) -> float:
        return self.dt1_steps / self.steps if self.steps else 0.0


@dataclass(eq=False)
class SolveSet:
    homotopy: Homotopy
    starts: List[np.ndarray]
    gamma: complex
    target: Optional[Homotopy] = None
    results: List[PathResult] = field(default_factory=list)

    def track(self, cfg: TrackerConfig, worker_count: int = 1) -> List[PathResult]:
        self.results = track_all(self.homotopy, self.starts, cfg, worker_count, target=self.target)
        return self.results


def _eta_from(J: np.ndarray, hess: Sequence[np.ndarray]) -> float:
    tops = np.array([singular_values(Hk)[0] for Hk in hess])
    peak = float(np.max(tops))
    if peak == 0.0:
        return math.inf
    # scaled by the largest value so squaring cannot overflow
    curvature = peak * float(np.linalg.norm(tops / peak))
    if not math.isfinite(curvature):
        return 0.0
    return 2.0 * float(singular_values(J)[-1]) / curvature


def eta(H: Homotopy, z, t: complex) -> float:
    """Estimated distance to the nearest different path: 2 s_n(J) / sqrt(sum_k s_1(H_k)^2)."""
    return _eta_from(jacobian(H, z, t), hessians(H, z, t))


def condition_estimate(H: Homotopy, z, t: complex) -> float:
    """
    (1 + |z|) / eta on the row-normalised system; large when another
    solution is relatively close, i.e. when the solution is nearly singular.
    """
    d = row_scales(H, z, t)
    J = d[:, None] * jacobian(H, z, t)
    hess = [di * Hk for di, Hk in zip(d, hessians(H, z, t))]
    e = _eta_from(J, hess)
    if math.isinf(e):
        s = singular_values(J)
        return math.inf if s[-1] == 0 else float(s[0] / s[-1])
    if e == 0.0:
        return math.inf
    return (1.0 + float(np.linalg.norm(z))) / e


def step_floor(t_star: float, cfg: TrackerConfig) -> float:
    """Smallest admissible step at t_star: min_step relative to t_star."""
    return cfg.min_step * abs(t_star)


def underflows(dt: float, t_star: float, cfg: TrackerConfig) -> bool:
    """
    True when dt is not a usable step at t_star: not positive, below the
    relative floor, or too small to move t_star in floating point.
    """
    if not dt > 0.0:
        return True
    return dt < step_floor(t_star, cfg) or t_star + dt == t_star


def predict(H: Homotopy, z, t_star: float, cfg: TrackerConfig) -> Prediction:
    report = compute_series(H, t_star, cfg.series_order, z)
    bundle = fit_bundle(report.series, cfg.L, cfg.M)
    k = cfg.defect_order
    e0_norm = float(np.linalg.norm(bundle.e0))
    est = eta(H, z, t_star)
    if e0_norm < cfg.eta_floor or math.isinf(est):
        dt1 = 1.0
    else:
        dt1 = (cfg.beta1 * est / e0_norm) ** (1.0 / k)
    dt2 = cfg.beta2 * bundle.pole_distance
    remaining = cfg.t_end_game - t_star
    step = min(dt1, dt2, cfg.max_step)
    if underflows(step, t_star, cfg):
        raise StepUnderflowError(step, step_floor(t_star, cfg))
    dt = min(step, remaining)
    diagnostics = StepDiagnostics(
        dt1=dt1,
        dt2=dt2,
        eta=est,
        e0_norm=e0_norm,
        pole_distance=bundle.pole_distance,
        dt1_binding=dt1 <= min(dt2, cfg.max_step, remaining),
        bundle=bundle,
    )
    return Prediction(bundle.evaluate(dt), dt, diagnostics)


def residual(F: Homotopy, z) -> float:
    """Relative backward error of z for the target system F."""
    return relative_residual(F, z, 0.0)


def target_of(H: Homotopy, target: Optional[Homotopy] = None) -> Homotopy:
    """The system endpoints are judged on: target, or H with t fixed at 1."""
    return target if target is not None else specialize(H, 1.0)


def refine_endpoint(
    H: Homotopy, z, cfg: TrackerConfig, target: Optional[Homotopy] = None
) -> Tuple[np.ndarray, PathStatus]:
    """
    Newton polish at t = 1, then classify the endpoint as regular or singular.
    Residual and condition are those of the target system (H at t = 1
    when no target is given).
    """
    z = np.asarray(z, dtype=complex)
    F = target_of(H, target)
    try:
        rep = correct(H, z, 1.0, cfg.corrector_tol, cfg.refine_max_iters)
        before = residual(F, z)
        polished = residual(F, rep.point) if np.all(np.isfinite(rep.point)) else math.inf
        best = rep.point if polished <= before else z
        res = min(polished, before)
        cond = condition_estimate(F, best, 0.0)
    except NUMERIC_ERRORS as e:
        logger.debug(f"endpoint refinement failed: {e}")
        return z, PathStatus.SINGULAR_ENDPOINT
    if res <= cfg.endpoint_residual_tol and cond < cfg.endpoint_condition_limit:
        return best, PathStatus.SUCCESS
    logger.debug(f"singular endpoint: residual={res:.2e}, condition={cond:.2e}")
    return best, PathStatus.SINGULAR_ENDPOINT


def _failed(H: Homotopy, z: np.ndarray, t: float, status: PathStatus, **stats) -> PathResult:
    try:
        res = relative_residual(H, z, t)
    except NUMERIC_ERRORS:
        res = math.inf
    return PathResult(z, status, residual=res, t_reached=t, **stats)


def track_path(
    H: Homotopy,
    z0,
    cfg: TrackerConfig,
    record_steps: bool = False,
    path_index: int = 0,
    target: Optional[Homotopy] = None,
) -> PathResult:
    """
    Track one path from t = 0 to t_end_game and refine the endpoint.

    A failing corrector halves the step and re-evaluates the same Pade
    bundle, at most cfg.max_halvings times. Failures end up in the status;
    this never raises. The endpoint residual is residual(target, z), with
    target defaulting to H at t = 1.
    """
    target = target_of(H, target)
    z = np.array(z0, dtype=complex).ravel()
    t = 0.0
    steps = dt1_steps = halvings = 0
    min_dt, max_dt = math.inf, 0.0
    log: List[StepRecord] = []

    def stats() -> dict:
        return dict(steps=steps, min_dt=min_dt, max_dt=max_dt, dt1_steps=dt1_steps, halvings=halvings, step_log=log)

    while t < cfg.t_end_game:
        if steps >= cfg.max_steps_per_path:
            logger.warning(f"path={path_index}: step budget exhausted at t={t:.6g}")
            return _failed(H, z, t, PathStatus.STEP_BUDGET_EXHAUSTED, **stats())
        try:
            pred = predict(H, z, t, cfg)
        except StepUnderflowError as e:
            logger.warning(f"path={path_index}: {e} at t={t:.6g}")
            return _failed(H, z, t, PathStatus.STEP_UNDERFLOW, **stats())
        except NUMERIC_ERRORS as e:
            logger.warning(f"path={path_index}: prediction failed at t={t:.6g}: {e}")
            return _failed(H, z, t, PathStatus.CORRECTOR_FAILURE, **stats())

        dt, z_tilde = pred.dt, pred.z_tilde
        remaining = cfg.t_end_game - t
        accepted = None
        for attempt in range(cfg.max_halvings + 1):
            if attempt:
                dt *= 0.5
                halvings += 1
                if underflows(dt, t, cfg):
                    logger.warning(f"path={path_index}: step underflow while halving at t={t:.6g}")
                    return _failed(H, z, t, PathStatus.STEP_UNDERFLOW, **stats())
                try:
                    z_tilde = pred.diagnostics.bundle.evaluate(dt)
                except NUMERIC_ERRORS:
                    continue
            t_next = cfg.t_end_game if dt >= remaining else t + dt
            try:
                rep = correct(H, z_tilde, t_next, cfg.corrector_tol, cfg.corrector_max_iters)
            except NUMERIC_ERRORS:
                continue
            if rep.converged:
                accepted = (t_next, rep.point, attempt)
                break
        if accepted is None:
            logger.warning(f"path={path_index}: corrector failed at t={t:.6g}")
            return _failed(H, z, t, PathStatus.CORRECTOR_FAILURE, **stats())

        t_next, z_next, attempts = accepted
        taken = t_next - t
        steps += 1
        min_dt, max_dt = min(min_dt, taken), max(max_dt, taken)
        if attempts == 0 and pred.diagnostics.dt1_binding:
            dt1_steps += 1
        if record_steps:
            log.append(StepRecord(t, taken, z_tilde, z_next, pred.diagnostics.eta, attempts))
        t, z = t_next, z_next

    z_final, status = refine_endpoint(H, z, cfg, target)
    try:
        res = residual(target, z_final)
    except NUMERIC_ERRORS:
        res = math.inf
    if status is not PathStatus.SUCCESS:
        logger.warning(f"path={path_index}: {status.value} (residual={res:.2e})")
    return PathResult(z_final, status, residual=res, t_reached=t, **stats())


def _track_block(args) -> List[PathResult]:
    H, block, cfg, offset, target = args
    out = []
    for i, z0 in enumerate(block):
        out.append(track_path(H, z0, cfg, path_index=offset + i, target=target))
        if (offset + i + 1) % PROGRESS_EVERY == 0:
            logger.info(f"tracked {offset + i + 1} paths")
    return out


def track_all(
    H: Homotopy,
    starts: Sequence,
    cfg: TrackerConfig,
    worker_count: int = 1,
    target: Optional[Homotopy] = None,
) -> List[PathResult]:
    """
    Track every start. Starts are split into contiguous blocks, one per
    worker; results come back in start order and do not depend on the
    number of workers.
    """
    starts = [np.asarray(s, dtype=complex).ravel() for s in starts]
    if not starts:
        return []
    workers = max(1, min(int(worker_count), len(starts)))
    size = math.ceil(len(starts) / workers)
    target = target_of(H, target)
    jobs = [(H, starts[i : i + size], cfg, i, target) for i in range(0, len(starts), size)]
    logger.info(f"tracking {len(starts)} paths with {workers} worker(s)")
    if workers == 1:
        blocks = [_track_block(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_track_block, jobs))
    results = [r for block in blocks for r in block]
    ok = sum(r.succeeded for r in results)
    logger.info(f"finished: {ok}/{len(results)} paths succeeded")
    return results


def total_degree_homotopy(F: Homotopy, seed: Optional[int] = None) -> SolveSet:
    """
    H(x, t) = G(x)(1 - t) + gamma F(x) t with G_i = x_i^{d_i} - 1 and
    gamma a random point on the unit circle drawn from the seeded generator.
    """
    if F.is_homotopy:
        raise InvalidArgumentError("target system must not depend on t")
    if F.toric:
        raise InvalidArgumentError("total degree homotopies need a polynomial (non-toric) target")
    degrees = F.degrees()
    for i, (p, d) in enumerate(zip(F.polys, degrees)):
        if p.is_zero:
            raise InvalidArgumentError(f"equation {i} is the zero polynomial")
        if d < 1:
            raise InvalidArgumentError(f"equation {i} is constant")
    rng = np.random.default_rng(seed)
    gamma = complex(np.exp(2j * np.pi * rng.random()))
    n = F.n
    start_terms = []
    for i, d in enumerate(degrees):
        e = [0] * n
        e[i] = d
        start_terms.append([(1.0, e, 0), (-1.0, [0] * n, 0)])
    G = Homotopy.from_terms(n, start_terms)
    H = blend([((1.0, -1.0), G), ((0.0, gamma), F)])
    roots = [np.exp(2j * np.pi * np.arange(d) / d) for d in degrees]
    starts = [np.array(combo, dtype=complex) for combo in itertools.product(*roots)]
    return SolveSet(H, starts, gamma, target=F)


def same_solution(a, b, tol: float = 1e-6) -> bool:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return bool(np.max(np.abs(a - b)) < tol * (1.0 + np.max(np.abs(a))))


def distinct_points(points: Sequence, tol: float = 1e-6) -> List[np.ndarray]:
    reps: List[np.ndarray] = []
    for p in points:
        if not any(same_solution(p, r, tol) for r in reps):
            reps.append(np.asarray(p, dtype=complex))
    return reps


def distinct_count(points: Sequence, tol: float = 1e-6) -> int:
    return len(distinct_points(points, tol))


def failure_count(results: Sequence[PathResult], expected: int, cfg: TrackerConfig) -> int:
    """Expected count minus the distinct successful endpoints."""
    good = [r.endpoint for r in results if r.succeeded and r.residual < cfg.endpoint_residual_tol]
    return expected - distinct_count(good, cfg.duplicate_tol)
