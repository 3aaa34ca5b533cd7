"""
Desk-scale experiment harness: hyperbola family, Wilkinson polynomials,
generic dense systems, clustered roots, Pade pole trajectories, the
near-diagonal against near-polynomial comparison and katsura.

Every experiment returns an ExperimentReport; render_table turns one into
the text table the CLI prints.
"""
from __future__ import annotations

import logging
import math
import time
from typing import Callable, Dict, List, Sequence

import numpy as np

from app.config import TrackerConfig
from app.errors import InvalidArgumentError, PoleEvaluationError
from app.newton import compute_series
from app.pade import pade_eval, pade_fit
from app.schemas import ExperimentReport
from app.systems import (
    PARAMETER_PATHS,
    RADICAND_BRANCH_POINT,
    cluster_homotopy,
    gamma3,
    hyperbola_homotopy,
    katsura_system,
    radical_homotopy,
    radical_value,
    random_dense_system,
    wilkinson_system,
)
from app.tracker import PathResult, distinct_points, failure_count, same_solution, total_degree_homotopy, track_all, track_path

logger = logging.getLogger(__name__)


def _step_range(results: Sequence[PathResult]) -> str:
    steps = [r.steps for r in results]
    return f"{min(steps)}-{max(steps)}" if steps else "-"


def _h_ratio(results: Sequence[PathResult]) -> float:
    total = sum(r.steps for r in results)
    return sum(r.dt1_steps for r in results) / total if total else 0.0


def hyperbola_experiment(ks: Sequence[int], cfg: TrackerConfig) -> ExperimentReport:
    if not ks or any(k < 1 for k in ks):
        raise InvalidArgumentError("hyperbola needs k >= 1")
    rows = []
    for k in ks:
        p = 10.0 ** (-k)
        H = hyperbola_homotopy(p)
        root = math.sqrt(0.25 + p * p)
        results, jumps, errors = [], 0, []
        for sign in (1.0, -1.0):
            r = track_path(H, [sign * root], cfg)
            results.append(r)
            end = r.endpoint[0]
            if np.sign(end.real) != sign:
                jumps += 1
            errors.append(abs(end - sign * root))
        rows.append(
            {
                "k": k,
                "p": p,
                "jumped": jumps,
                "max_error": max(errors),
                "steps": _step_range(results),
                "status": ",".join(r.status.value for r in results),
            }
        )
    summary = {"cases": len(rows), "no_jump": sum(1 for r in rows if r["jumped"] == 0)}
    return ExperimentReport(
        experiment="hyperbola",
        parameters={"k": list(ks), "L": cfg.L, "M": cfg.M},
        columns=["k", "p", "jumped", "max_error", "steps", "status"],
        rows=rows,
        summary=summary,
    )


def wilkinson_experiment(ds: Sequence[int], cfg: TrackerConfig, seed: int = 0, workers: int = 1) -> ExperimentReport:
    if not ds or any(d < 1 for d in ds):
        raise InvalidArgumentError("wilkinson needs d >= 1")
    rows = []
    for d in ds:
        started = time.perf_counter()
        solve_set = total_degree_homotopy(wilkinson_system(d), seed)
        results = solve_set.track(cfg, workers)
        elapsed = time.perf_counter() - started
        e = failure_count(results, d, cfg)
        worst = max(min(abs(r.endpoint[0] - i) for i in range(1, d + 1)) for r in results)
        rows.append(
            {
                "d": d,
                "e": e,
                "T": elapsed,
                "steps": _step_range(results),
                "h": _h_ratio(results),
                "max_root_error": worst,
            }
        )
    return ExperimentReport(
        experiment="wilkinson",
        parameters={"d": list(ds), "seed": seed, "L": cfg.L, "M": cfg.M},
        columns=["d", "e", "T", "steps", "h", "max_root_error"],
        rows=rows,
        summary={"failures": sum(r["e"] for r in rows)},
    )


def generic_experiment(
    n: int, d: int, trials: int, cfg: TrackerConfig, seed: int = 0, workers: int = 1
) -> ExperimentReport:
    if n < 1 or d < 1 or trials < 1:
        raise InvalidArgumentError("generic needs n, d, trials >= 1")
    rows = []
    for trial in range(trials):
        rng = np.random.default_rng(seed + trial)
        started = time.perf_counter()
        solve_set = total_degree_homotopy(random_dense_system(n, d, rng), seed + trial)
        results = solve_set.track(cfg, workers)
        rows.append(
            {
                "trial": trial,
                "n": n,
                "d": d,
                "paths": len(results),
                "e": failure_count(results, d**n, cfg),
                "T": time.perf_counter() - started,
                "steps": _step_range(results),
                "h": _h_ratio(results),
            }
        )
    return ExperimentReport(
        experiment="generic",
        parameters={"n": n, "d": d, "trials": trials, "seed": seed, "L": cfg.L, "M": cfg.M, "max_step": cfg.max_step},
        columns=["trial", "n", "d", "paths", "e", "T", "steps", "h"],
        rows=rows,
        summary={"failures": sum(r["e"] for r in rows)},
    )


def cluster_experiment(
    n_c: int,
    cluster_size: int,
    alpha: float,
    trials: int,
    cfg: TrackerConfig,
    seed: int = 0,
    workers: int = 1,
    match_tol: float = 1e-6,
) -> ExperimentReport:
    """
    Success rate of tracking through a fibre with clustered roots: the share of
    the roots of the random target F (found by a separate reference run with
    max_step 0.1) that an endpoint of the clustered homotopy reproduces.
    """
    if n_c < 1 or cluster_size < 1 or alpha <= 0 or trials < 1:
        raise InvalidArgumentError("cluster needs n_c, cs, trials >= 1 and alpha > 0")
    d = n_c * cluster_size
    ref_cfg = cfg.model_copy(update={"L": 5, "M": 1, "max_step": 0.1})
    rows = []
    for trial in range(trials):
        rng = np.random.default_rng(seed + trial)
        H, F, starts = cluster_homotopy(n_c, cluster_size, alpha, rng)
        results = track_all(H, starts, cfg, workers, target=F)
        reference = total_degree_homotopy(F, seed + trial)
        reference.track(ref_cfg, workers)
        roots = distinct_points([r.endpoint for r in reference.results if r.succeeded], match_tol)
        found = [r.endpoint for r in results if r.succeeded]
        matched = sum(1 for z in roots if any(same_solution(z, y, match_tol) for y in found))
        rows.append(
            {
                "trial": trial,
                "reference_roots": len(roots),
                "matched": matched,
                "success_rate": matched / d,
                "steps": _step_range(results),
            }
        )
    mean_sr = float(np.mean([r["success_rate"] for r in rows]))
    return ExperimentReport(
        experiment="cluster",
        parameters={"n_c": n_c, "cs": cluster_size, "alpha": alpha, "trials": trials, "seed": seed, "match_tol": match_tol},
        columns=["trial", "reference_roots", "matched", "success_rate", "steps"],
        rows=rows,
        summary={"mean_success_rate": mean_sr},
    )


def continue_branch(p: float, s: float, substeps: int = 2000, path: Callable[[float], complex] = gamma3) -> complex:
    """Value at path(s) of the hyperbola branch that starts at +sqrt(1/4 + p^2)."""
    z = complex(math.sqrt(0.25 + p * p))
    for u in np.linspace(0.0, s, substeps + 1)[1:]:
        t = path(float(u))
        w = complex(np.sqrt((t - 0.5) ** 2 + p * p))
        z = w if abs(w - z) <= abs(w + z) else -w
    return z


def pole_trajectory(
    p: float, L: int, s_values: Sequence[float], M: int = 1, path: Callable[[float], complex] = gamma3
) -> List[Dict[str, float]]:
    """
    Poles of the type (L, M) approximant expanded at path(s), next to the
    branch points 1/2 +- p i. pole_* is the pole nearest to path(s); with
    M >= 2 the second nearest is reported as pole2_*.
    """
    H = hyperbola_homotopy(p)
    upper = complex(0.5, p)
    rows = []
    for s in s_values:
        t_star = path(s)
        z = continue_branch(p, s, path=path)
        coeffs = compute_series(H, t_star, L + M + 2, [z]).series.coeffs[:, 0]
        fit = pade_fit(coeffs, L, M)
        poles = sorted(fit.poles(), key=abs)
        nearest_singularity = min(abs(t_star - upper), abs(t_star - upper.conjugate()))
        row = {
            "s": s,
            "t_re": t_star.real,
            "t_im": t_star.imag,
            "effective_m": fit.effective_m,
        }
        located = [t_star + u for u in poles[:2]]
        located += [complex(math.nan, math.nan)] * (2 - len(located))
        row["pole_re"], row["pole_im"] = located[0].real, located[0].imag
        if M >= 2:
            row["pole2_re"], row["pole2_im"] = located[1].real, located[1].imag
        distance = abs(poles[0]) if poles else math.inf
        row["pole_distance"] = distance
        row["singularity_distance"] = nearest_singularity
        row["ratio"] = distance / nearest_singularity
        rows.append(row)
    return rows


def poles_experiment(p: float, L: int, samples: int, M: int = 1, path: str = "gamma3") -> ExperimentReport:
    if samples < 2 or L < 0 or M < 1:
        raise InvalidArgumentError("poles needs samples >= 2, L >= 0 and M >= 1")
    if path not in PARAMETER_PATHS:
        raise InvalidArgumentError(f"unknown parameter path {path!r}, expected one of {sorted(PARAMETER_PATHS)}")
    s_values = [float(s) for s in np.linspace(0.0, 1.0, samples)]
    rows = pole_trajectory(p, L, s_values, M, PARAMETER_PATHS[path])
    columns = ["s", "t_re", "t_im", "effective_m", "pole_re", "pole_im"]
    if M >= 2:
        columns += ["pole2_re", "pole2_im"]
    columns += ["pole_distance", "singularity_distance", "ratio"]
    return ExperimentReport(
        experiment="poles",
        parameters={"p": p, "L": L, "M": M, "path": path, "samples": samples},
        columns=columns,
        rows=rows,
    )


def _disk_samples(radius: float, rings: int = 5, angles: int = 64) -> np.ndarray:
    r = np.linspace(0.0, radius, rings)[1:, None]
    theta = 2.0 * np.pi * np.arange(angles)[None, :] / angles
    return np.concatenate(([0j], (r * np.exp(1j * theta)).ravel()))


def pade_comparison_experiment(ells: Sequence[int], radius: float = 0.5) -> ExperimentReport:
    """
    Near-diagonal (l, l) against near-polynomial (2l-1, 1) approximants of
    sqrt((t + 1.01)(t^2 - t + 37/4)) at t = 0. Both use the same 2l+1 Taylor
    coefficients. Reports how close the poles come to the branch point -1.01,
    how far the smallest pole modulus is from the radius of convergence and
    the largest error on the disk |t| <= radius.
    """
    if not ells or any(ell < 1 for ell in ells):
        raise InvalidArgumentError("pade-compare needs l >= 1")
    w = 2 * max(ells) + 1
    H = radical_homotopy()
    coeffs = compute_series(H, 0.0, w, [radical_value(0.0)]).series.coeffs[:, 0]
    grid = _disk_samples(radius)
    exact = np.array([radical_value(t) for t in grid])
    branch = RADICAND_BRANCH_POINT
    rows = []
    for ell in ells:
        for kind, L, M in (("near-diagonal", ell, ell), ("near-polynomial", 2 * ell - 1, 1)):
            fit = pade_fit(coeffs[: L + M + 1], L, M)
            poles = fit.poles()
            try:
                approx = np.array([pade_eval(fit, t) for t in grid])
                error = float(np.max(np.abs(approx - exact)))
            except PoleEvaluationError:
                error = math.inf
            rows.append(
                {
                    "ell": ell,
                    "type": kind,
                    "L": L,
                    "M": M,
                    "effective_m": fit.effective_m,
                    "branch_distance": min((abs(z - branch) for z in poles), default=math.inf),
                    "pole_gap": abs(min(abs(z) for z in poles) - abs(branch)) if poles else math.inf,
                    "max_error": error,
                }
            )
    logger.info(f"pade comparison: {len(rows)} approximants, disk radius {radius}")
    return ExperimentReport(
        experiment="pade-compare",
        parameters={"ells": list(ells), "radius": radius, "branch_point": branch},
        columns=["ell", "type", "L", "M", "effective_m", "branch_distance", "pole_gap", "max_error"],
        rows=rows,
    )


def katsura_experiment(n: int, cfg: TrackerConfig, seed: int = 0, workers: int = 1) -> ExperimentReport:
    if n < 1:
        raise InvalidArgumentError("katsura needs n >= 1")
    started = time.perf_counter()
    solve_set = total_degree_homotopy(katsura_system(n), seed)
    results = solve_set.track(cfg, workers)
    row = {
        "n": n,
        "paths": len(results),
        "e": failure_count(results, 2**n, cfg),
        "T": time.perf_counter() - started,
        "steps": _step_range(results),
        "h": _h_ratio(results),
    }
    return ExperimentReport(
        experiment="katsura",
        parameters={"n": n, "seed": seed},
        columns=["n", "paths", "e", "T", "steps", "h"],
        rows=[row],
        summary={"failures": row["e"]},
    )


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.3g}" if (v == 0 or 1e-3 <= abs(v) < 1e4) else f"{v:.2e}"
    return str(v)


def render_table(report: ExperimentReport) -> str:
    cells = [[_fmt(row.get(c, "")) for c in report.columns] for row in report.rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(report.columns)]
    lines = [" | ".join(c.rjust(w) for c, w in zip(report.columns, widths))]
    lines.append("-+-".join("-" * w for w in widths))
    lines.extend(" | ".join(v.rjust(w) for v, w in zip(r, widths)) for r in cells)
    if report.summary:
        lines.append("")
        lines.extend(f"{k}: {_fmt(v)}" for k, v in report.summary.items())
    return "\n".join(lines)
