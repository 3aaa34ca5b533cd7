"""
Command line surface:

    padetrack solve SYSTEM.json [--out solution.json] [tracker flags]
    padetrack experiment {hyperbola,wilkinson,generic,cluster,poles,katsura} [...]

Exit codes: 0 every path succeeded, 2 parse or usage error, 3 some path
failed, 4 numerical failure outside a path.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from typing import Any, Dict, Optional, Sequence

from pydantic import ValidationError

from app import experiments
from app.config import DEFAULT_WORKERS, LOG_LEVEL, TrackerConfig
from app.errors import InvalidArgumentError, ParseError
from app.schemas import ExperimentReport, PathRecord, SolutionDocument, SystemDocument, pair
from app.tracker import NUMERIC_ERRORS, PathStatus, total_degree_homotopy, track_all

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PATH_FAILED = 3
EXIT_NUMERIC = 4

EXPERIMENTS = ("hyperbola", "wilkinson", "generic", "cluster", "poles", "pade-compare", "katsura")

# flag dest -> TrackerConfig field
CONFIG_FLAGS = {
    "L": "L",
    "M": "M",
    "beta1": "beta1",
    "beta2": "beta2",
    "max_step": "max_step",
    "min_step": "min_step",
    "tol": "corrector_tol",
    "max_steps": "max_steps_per_path",
}


def parse_system(source: str) -> SystemDocument:
    """Parse a system document from a file path, '-' for stdin, or the JSON text itself."""
    if source == "-":
        text = sys.stdin.read()
    elif os.path.isfile(source):
        with open(source, "r", encoding="utf-8") as f:
            text = f.read()
    else:
        text = source
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON: {e.msg}", e.lineno, e.colno) from e
    try:
        return SystemDocument.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"])
        raise ParseError(f"invalid system document at {where or '<root>'}: {first['msg']}") from e


def solve_command(
    doc: SystemDocument, cfg: TrackerConfig, seed: Optional[int] = None, workers: int = 1
) -> SolutionDocument:
    started = time.perf_counter()
    H = doc.to_homotopy()
    gamma = None
    if doc.is_homotopy:
        if not doc.starts:
            raise InvalidArgumentError("a homotopy document needs explicit start points")
        results = track_all(H, doc.start_points(), cfg, workers)
    else:
        if doc.starts:
            logger.info("target system given: ignoring starts, using the total degree start system")
        solve_set = total_degree_homotopy(H, seed)
        gamma = pair(solve_set.gamma)
        results = solve_set.track(cfg, workers)
    summary = {status.value: 0 for status in PathStatus}
    for r in results:
        summary[r.status.value] += 1
    return SolutionDocument(
        paths=[PathRecord.from_result(i, r) for i, r in enumerate(results)],
        gamma=gamma,
        seed=seed,
        config=cfg.model_dump(),
        summary=summary,
        wall_time=time.perf_counter() - started,
    )


def experiment_command(
    name: str, params: Dict[str, Any], cfg: TrackerConfig, seed: int = 0, workers: int = 1
) -> ExperimentReport:
    if name == "hyperbola":
        return experiments.hyperbola_experiment(params.get("k") or list(range(1, 8)), cfg)
    if name == "wilkinson":
        return experiments.wilkinson_experiment(params.get("d") or list(range(10, 20)), cfg, seed, workers)
    if name == "generic":
        return experiments.generic_experiment(
            params.get("n") or 2, params.get("degree") or 3, params.get("trials") or 1, cfg, seed, workers
        )
    if name == "cluster":
        return experiments.cluster_experiment(
            params.get("nc") or 5,
            params.get("cs") or 1,
            params.get("alpha") or 10.0,
            params.get("trials") or 1,
            cfg,
            seed,
            workers,
            params.get("match_tol") or 1e-6,
        )
    if name == "poles":
        return experiments.poles_experiment(
            params.get("p") or 0.1, cfg.L, params.get("samples") or 11, cfg.M, params.get("path") or "gamma3"
        )
    if name == "pade-compare":
        return experiments.pade_comparison_experiment(params.get("ell") or list(range(1, 14)), params.get("radius") or 0.5)
    if name == "katsura":
        return experiments.katsura_experiment(params.get("n") or 8, cfg, seed, workers)
    raise InvalidArgumentError(f"unknown experiment {name!r}")


def _tracker_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--L", type=int, help="Pade numerator degree (default 5)")
    p.add_argument("--M", type=int, help="Pade denominator degree (default 1)")
    p.add_argument("--beta1", type=float)
    p.add_argument("--beta2", type=float)
    p.add_argument("--max-step", dest="max_step", type=float)
    p.add_argument("--min-step", dest="min_step", type=float)
    p.add_argument("--tol", type=float, help="corrector tolerance")
    p.add_argument("--max-steps", dest="max_steps", type=int, help="step budget per path")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=DEFAULT_WORKERS)
    p.add_argument("--out", help="write the JSON document here instead of stdout")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _tracker_flags()
    parser = argparse.ArgumentParser(prog="padetrack", description="Polynomial homotopy continuation with Pade step control.")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", parents=[common], help="solve a system or track an explicit homotopy")
    solve.add_argument("system", help="system document: path, '-' for stdin, or inline JSON")

    exp = sub.add_parser("experiment", parents=[common], help="run one of the benchmark experiments")
    exp.add_argument("name", choices=EXPERIMENTS)
    exp.add_argument("--k", type=int, nargs="+", help="hyperbola: p = 10^-k")
    exp.add_argument("--d", type=int, nargs="+", help="wilkinson: degrees")
    exp.add_argument("--n", type=int, help="generic: variables; katsura: index")
    exp.add_argument("--degree", type=int, help="generic: degree of each equation")
    exp.add_argument("--trials", type=int)
    exp.add_argument("--nc", type=int, help="cluster: number of clusters")
    exp.add_argument("--cs", type=int, help="cluster: cluster size")
    exp.add_argument("--alpha", type=float, help="cluster: spread factor")
    exp.add_argument("--match-tol", dest="match_tol", type=float)
    exp.add_argument("--p", type=float, help="poles: hyperbola parameter")
    exp.add_argument("--samples", type=int, help="poles: number of points on the parameter path")
    exp.add_argument("--path", choices=("gamma1", "gamma3"), help="poles: parameter path (default gamma3)")
    exp.add_argument("--ell", type=int, nargs="+", help="pade-compare: l values, comparing (l, l) with (2l-1, 1)")
    exp.add_argument("--radius", type=float, help="pade-compare: disk on which the error is measured")
    exp.add_argument("--json", action="store_true", help="print the report as JSON instead of a table")
    return parser


def config_from_args(args: argparse.Namespace) -> TrackerConfig:
    overrides = {field: getattr(args, flag) for flag, field in CONFIG_FLAGS.items() if getattr(args, flag) is not None}
    return TrackerConfig(**overrides)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else LOG_LEVEL,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        cfg = config_from_args(args)
    except ValidationError as e:
        logger.error(f"invalid tracker configuration: {e}")
        return EXIT_USAGE
    if args.workers < 1:
        logger.error("--workers must be at least 1")
        return EXIT_USAGE

    try:
        if args.command == "solve":
            doc = parse_system(args.system)
            solution = solve_command(doc, cfg, args.seed, args.workers)
            _emit(solution.model_dump_json(indent=2), args.out)
            return EXIT_OK if solution.all_succeeded else EXIT_PATH_FAILED
        params = {k: v for k, v in vars(args).items() if v is not None}
        report = experiment_command(args.name, params, cfg, args.seed or 0, args.workers)
        if args.out:
            _emit(report.model_dump_json(indent=2), args.out)
        if args.json:
            _emit(report.model_dump_json(indent=2), None)
        else:
            _emit(experiments.render_table(report), None)
        return EXIT_OK
    except ParseError as e:
        logger.error(str(e))
        return EXIT_USAGE
    except InvalidArgumentError as e:
        logger.error(f"invalid arguments: {e}")
        return EXIT_USAGE
    except NUMERIC_ERRORS as e:
        logger.error(f"numerical failure: {e}")
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
