import sys
import argparse
import logging
import time
from pathlib import Path
from typing import Callable, Optional

import numpy as np

# Import SETTINGS to force-load and validate env on startup
from .utils.config import SETTINGS  # noqa: F401
from .utils.constants import (
    DEFAULT_REFINE_ITERS,
    DEFAULT_SEED,
    DEFAULT_TERMS,
    PPT_TOL,
)
from .utils.discord import closest_cq, conjecture_gap, geometric_discord
from .utils.errors import (
    BadAxis,
    DomainError,
    InvalidParams,
    NoRealSolution,
    NotUnitary,
    ParamOutOfRange,
    SamplerExhausted,
    StateSpecError,
    StateValidationError,
)
from .utils.lu import lu_fingerprint
from .utils.models import AnalyzeReport, DensityMatrix
from .utils.qstate import numerical_rank, rho_epsilon, to_bloch, werner, x_state
from .utils.reproduce import render_csv, render_json, render_table, run_reproduce
from .utils.search import campaign, write_records_csv, write_records_json
from .utils.separability import chsh_M, min_pt_eigenvalue, t_trace_norm
from .utils.state_io import dumps, format_float, load_ensemble, load_state
from .utils.xmax import solve_constraints

logger = logging.getLogger("src.main")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_IO = 4
EXIT_COUNTEREXAMPLE = 10

VALIDATION_ERRORS = (
    StateValidationError,
    InvalidParams,
    ParamOutOfRange,
    DomainError,
    NoRealSolution,
    BadAxis,
    NotUnitary,
    SamplerExhausted,
)

SWEEP_DEFAULT_RANGES = {
    "werner": (0.0, 1.0),
    "rho_epsilon": (0.0, 0.75),
    "appendix_k": (0.1, 10.0),
}
SWEEP_COLUMNS = ("param", "discord", "gap", "separable", "rank")


def analyze_state(rho: DensityMatrix, tol: float = PPT_TOL) -> AnalyzeReport:
    bf = to_bloch(rho)
    cq, _ = closest_cq(rho)
    lam_min = min_pt_eigenvalue(rho)
    return AnalyzeReport(
        discord=geometric_discord(rho),
        gap=conjecture_gap(rho),
        closest_cq_axis=cq.axis.tolist(),
        separable=lam_min >= -tol,
        min_pt_eigenvalue=lam_min,
        t_trace_norm=t_trace_norm(bf),
        chsh_M=chsh_M(bf),
        rank=numerical_rank(rho),
        fingerprint=lu_fingerprint(rho),
    )


def _flatten(report: AnalyzeReport) -> dict:
    flat = report.model_dump(mode="json")
    fp = flat.pop("fingerprint")
    flat["closest_cq_axis"] = " ".join(format_float(v) for v in flat["closest_cq_axis"])
    flat.update({f"fingerprint_{k}": v for k, v in fp.items()})
    flat["fingerprint_t_singulars"] = " ".join(
        format_float(v) for v in flat["fingerprint_t_singulars"]
    )
    return flat


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def cmd_analyze(args: argparse.Namespace) -> int:
    report = analyze_state(load_state(args.infile), args.tol)
    fmt = args.format or "json"
    if fmt == "json":
        print(dumps(report.model_dump(mode="json")))
    elif fmt == "csv":
        flat = _flatten(report)
        print(",".join(flat))
        print(",".join(_cell(v) for v in flat.values()))
    else:
        for key, value in _flatten(report).items():
            print(f"{key:<26} {_cell(value)}")
    return EXIT_OK


def _sweep_states(family: str, lo: float, hi: float, steps: int):
    if steps < 2:
        raise DomainError(f"--steps must be >= 2, got {steps}")
    if family == "appendix_k":
        if lo <= 0 or hi <= 0:
            raise DomainError(f"appendix_k needs a positive range, got [{lo}, {hi}]")
        params = np.logspace(np.log10(lo), np.log10(hi), steps)
        return [(k, x_state(solve_constraints(k, "plus").params)) for k in params]
    build: Callable[[float], DensityMatrix] = werner if family == "werner" else rho_epsilon
    return [(p, build(p)) for p in np.linspace(lo, hi, steps)]


def sweep_rows(family: str, lo: float, hi: float, steps: int, tol: float = PPT_TOL) -> list[list[str]]:
    rows = []
    for param, rho in _sweep_states(family, lo, hi, steps):
        rows.append(
            [
                format_float(param),
                format_float(geometric_discord(rho)),
                format_float(conjecture_gap(rho)),
                _cell(bool(min_pt_eigenvalue(rho) >= -tol)),
                str(numerical_rank(rho)),
            ]
        )
    return rows


def cmd_sweep(args: argparse.Namespace) -> int:
    lo, hi = args.range if args.range else SWEEP_DEFAULT_RANGES[args.family]
    rows = sweep_rows(args.family, lo, hi, args.steps, args.tol)
    text = "\n".join(",".join(r) for r in [list(SWEEP_COLUMNS), *rows]) + "\n"
    if args.out:
        Path(args.out).write_bytes(text.encode("utf-8"))
        logger.info("wrote %d rows to %s", len(rows), args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_search(args: argparse.Namespace) -> int:
    if args.seeds < 1:
        raise DomainError(f"--seeds must be >= 1, got {args.seeds}")
    warm = load_ensemble(args.warm_start) if args.warm_start else None

    start_time = time.time()
    records = campaign(
        range(args.seed, args.seed + args.seeds),
        K=args.terms,
        refine_iters=args.iters,
        sampler=args.sampler,
        warm_start=warm,
        workers=args.workers,
    )
    elapsed = time.time() - start_time

    if args.out:
        base = Path(args.out)
        write_records_csv(records, base.with_suffix(".csv"))
        write_records_json(records, base.with_suffix(".json"))

    best = records[0]
    worst_gap = min(r.gap for r in records)
    candidates = [r for r in records if r.counterexample_candidate]
    print(f"records: {len(records)}")
    print(f"best discord: {format_float(best.discord)} (seed {best.seed})")
    print(f"worst gap: {format_float(worst_gap)}")
    print(f"counterexample candidates: {len(candidates)}")
    logger.info("search took %.2fs", elapsed)
    return EXIT_COUNTEREXAMPLE if candidates else EXIT_OK


def cmd_reproduce(args: argparse.Namespace) -> int:
    rows = run_reproduce()
    fmt = args.format or "table"
    if fmt == "json":
        print(render_json(rows))
    elif fmt == "csv":
        sys.stdout.write(render_csv(rows))
    else:
        print(render_table(rows))
    return EXIT_OK if all(r.passed for r in rows) else EXIT_FAILED


def cmd_schema(args: argparse.Namespace) -> int:
    print(dumps(AnalyzeReport.model_json_schema()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Geometric discord of two-qubit states and the separable-state bound."
    )
    parser.add_argument("--tol", type=float, default=PPT_TOL, help="PPT tolerance")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="First seed")
    parser.add_argument("--format", choices=("json", "csv", "table"), default=None)
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="Discord, separability and invariants of one state")
    p.add_argument("--in", dest="infile", default=None, help="StateSpec JSON (default stdin)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="Discord along a one-parameter family")
    p.add_argument("family", choices=tuple(SWEEP_DEFAULT_RANGES))
    p.add_argument("--range", nargs=2, type=float, metavar=("LO", "HI"), default=None)
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("search", help="Random and refined search over separable states")
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--terms", type=int, default=DEFAULT_TERMS)
    p.add_argument("--iters", type=int, default=DEFAULT_REFINE_ITERS)
    p.add_argument("--out", default=None, help="Output prefix for .csv and .json")
    p.add_argument("--warm-start", default=None, help="ProductEnsemble JSON")
    p.add_argument("--sampler", choices=("product", "ppt"), default="product")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("reproduce", help="Recompute every published claim")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("schema", help="JSON schema of the analyze report")
    p.set_defaults(func=cmd_schema)
    return parser


def _attach_stderr_handler(verbose: bool) -> logging.Handler:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("[%(levelname)s] %(message)s"))
    package_logger = logging.getLogger("src")
    package_logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    package_logger.addHandler(handler)
    return handler


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    handler = _attach_stderr_handler(args.verbose)
    try:
        return args.func(args)
    except StateSpecError as e:
        logger.error("parse error: %s", e)
        return EXIT_PARSE
    except VALIDATION_ERRORS as e:
        logger.error("validation error: %s", e)
        return EXIT_VALIDATION
    except OSError as e:
        logger.error("I/O error: %s", e)
        return EXIT_IO
    finally:
        logging.getLogger("src").removeHandler(handler)


if __name__ == "__main__":
    sys.exit(main())
