"""Regression table of the published claims, recomputed from scratch."""

from __future__ import annotations

import csv
import io
import logging
from typing import Callable, Literal

import numpy as np

from .constants import PRINTED_U, PRINTED_V, PROP2_GRID_N, RHO_STAR
from .discord import geometric_discord
from .lu import conjugate, verify_rho_sigma_equivalence
from .models import ClaimCheck
from .qstate import make_named, numerical_rank, rho_epsilon, werner, x_state
from .search import prop2_objective, prop2_simplex_oracle
from .separability import is_separable
from .state_io import dumps, format_float
from .xmax import (
    f_fourth_derivative,
    grid_certify,
    max_separable_x_discord,
    maximize_f,
    minus_branch_lu_witness,
)

logger = logging.getLogger(__name__)

Comparison = Literal["eq", "le", "ge"]

REPRODUCE_GRID_N = 20


def _check(
    claim_id: str,
    expected: float,
    computed: float,
    tolerance: float,
    comparison: Comparison = "eq",
    note: str = "",
) -> ClaimCheck:
    error = abs(computed - expected)
    if comparison == "eq":
        passed = error <= tolerance
    elif comparison == "le":
        passed = computed <= expected + tolerance
    else:
        passed = computed >= expected - tolerance
    return ClaimCheck(
        claim_id=claim_id,
        expected=float(expected),
        computed=float(computed),
        error=float(error),
        passed=bool(passed),
        comparison=comparison,
        tolerance=tolerance,
        note=note,
    )


def _prop1() -> list[ClaimCheck]:
    rho = make_named("rho_star")
    value, branches = max_separable_x_discord()
    plus = x_state(branches[0].params)
    return [
        _check("prop1_max", 0.25, geometric_discord(rho), 1e-12),
        _check("prop1_rank", 2, numerical_rank(rho), 0.0),
        _check("prop1_separable", 1.0, float(is_separable(rho)), 0.0),
        _check(
            "rho_star_matrix", 0.0, float(np.max(np.abs(plus.entries - RHO_STAR))), 1e-12,
            note=f"plus branch at k*, discord {value:.17g}",
        ),
    ]


def _appendix() -> list[ClaimCheck]:
    k_star, f_star = maximize_f()
    return [
        _check("appendix_kstar", 1.0, k_star, 1e-8),
        _check("appendix_fmax", 0.125, f_star, 1e-12),
        _check("appendix_f4", -3.0 / 16.0, f_fourth_derivative(1.0), 1e-5),
    ]


def _lu() -> list[ClaimCheck]:
    _, residual = verify_rho_sigma_equivalence()
    _, printed = verify_rho_sigma_equivalence(PRINTED_U, PRINTED_V)
    _, branches = max_separable_x_discord()
    u, v = minus_branch_lu_witness()
    plus, minus = x_state(branches[0].params), x_state(branches[1].params)
    flipped = conjugate(plus.entries, u, v)
    return [
        _check("lu_equiv", 0.0, residual, 1e-12, note="U = printed U composed with sigma_z"),
        _check(
            "lu_equiv_printed", 0.5, printed, 0.0, "ge",
            note="informational: the printed U alone misses sigma",
        ),
        _check("sigma_discord", 0.25, geometric_discord(make_named("sigma_star")), 1e-12),
        _check(
            "minus_branch_lu", 0.0, float(np.linalg.norm(flipped - minus.entries)), 1e-12,
            note="sigma_x (x) sigma_x",
        ),
    ]


def _prop2() -> list[ClaimCheck]:
    oracle = prop2_simplex_oracle(PROP2_GRID_N)
    ps = np.linspace(0.0, 1.0, 101)
    werner_err = max(abs(geometric_discord(werner(p)) - p * p) for p in ps)
    separable = [geometric_discord(werner(p)) for p in ps if is_separable(werner(p))]
    return [
        _check(
            "prop2_bound", 0.25, oracle, 2e-3,
            note="max of a^2+b^2+c^2-max{...} is 1/4 at (1/2,1/2,0)",
        ),
        _check("prop2_symmetric", 2.0 / 9.0, prop2_objective(1 / 3, 1 / 3, 1 / 3), 1e-15),
        _check("prop2_below_half", 0.5, oracle, 0.0, "le"),
        _check("werner_discord", 0.0, werner_err, 1e-12, note="D = p^2 on 101 points"),
        _check("werner_separable_bound", 1.0 / 9.0, max(separable), 1e-12, "le"),
    ]


def _prop3() -> list[ClaimCheck]:
    eps = np.linspace(0.0, 0.75, 76)
    err = max(abs(geometric_discord(rho_epsilon(e)) - (1.0 - e)) for e in eps)
    shift = 0.1
    quarter = rho_epsilon(0.75 - shift)
    return [
        _check("rho_epsilon_discord", 0.0, err, 1e-10, note="D = 1 - eps on 76 points"),
        _check(
            "prop3_quarter_plus_shift", 0.25 + shift, geometric_discord(quarter), 1e-10,
            note=f"rank {numerical_rank(quarter)}",
        ),
    ]


def _grid() -> list[ClaimCheck]:
    best, _ = grid_certify(n=REPRODUCE_GRID_N)
    return [
        _check(
            "grid_oracle", 0.25, best, 1e-12, "le",
            note=f"lattice n={REPRODUCE_GRID_N}",
        )
    ]


SECTIONS: tuple[Callable[[], list[ClaimCheck]], ...] = (_prop1, _appendix, _lu, _prop2, _prop3, _grid)


def run_reproduce() -> list[ClaimCheck]:
    rows: list[ClaimCheck] = []
    for section in SECTIONS:
        rows.extend(section())
    failed = [r.claim_id for r in rows if not r.passed]
    if failed:
        logger.error("claims failed: %s", ", ".join(failed))
    return rows


def render_table(rows: list[ClaimCheck]) -> str:
    header = f"{'claim':<24} {'expected':>24} {'computed':>24} {'|error|':>10}  result"
    lines = [header, "-" * len(header)]
    for r in rows:
        op = {"eq": "", "le": "<=", "ge": ">="}[r.comparison]
        lines.append(
            f"{r.claim_id:<24} {op + format_float(r.expected):>24} "
            f"{format_float(r.computed):>24} {r.error:>10.2e}  {'pass' if r.passed else 'FAIL'}"
        )
    return "\n".join(lines)


def render_csv(rows: list[ClaimCheck]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["claim_id", "expected", "computed", "error", "passed"])
    for r in rows:
        writer.writerow(
            [r.claim_id, format_float(r.expected), format_float(r.computed),
             format_float(r.error), "true" if r.passed else "false"]
        )
    return buf.getvalue()


def render_json(rows: list[ClaimCheck]) -> str:
    return dumps([r.model_dump(mode="json") for r in rows])
