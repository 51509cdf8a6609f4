"""Exploration of separable two-qubit states.

Separable states are sampled as product ensembles sum_k w_k rho_k^A (x) rho_k^B
(pure local factors) or by PPT rejection, then locally refined by coordinate
ascent of the discord. Every record carries the conjecture gap
1/2 - (lambda_2 + lambda_3)(G); a negative gap is a counterexample candidate
and is logged, never dropped.
"""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path
from typing import Iterable, Literal, Optional

import numpy as np

from .config import SETTINGS
from .constants import (
    DEFAULT_REFINE_ITERS,
    DEFAULT_STEP0,
    DEFAULT_TERMS,
    DEGENERACY_TOL,
    FLOAT_FORMAT,
    MIN_STEP,
    PPT_MAX_ATTEMPTS,
    PROP2_GRID_N,
    SQRT2,
)
from .discord import (
    bloch_discord_many,
    conjecture_gap,
    eig3_sym,
    fibonacci_sphere,
    g_matrix,
    geometric_discord,
)
from .errors import DomainError, SamplerExhausted
from .models import (
    DensityMatrix,
    ProductEnsemble,
    ProductTerm,
    SearchRecord,
    StationarityResidual,
)
from .qstate import bloch_matrix, numerical_rank, random_state, to_bloch
from .separability import is_separable

logger = logging.getLogger(__name__)

Sampler = Literal["product", "ppt"]

WARM_START_SEED = -1
CSV_COLUMNS = ("seed", "method", "discord", "gap", "separable", "rank", "iterations")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _unit_rows(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _ensemble(weights: np.ndarray, a_vecs: np.ndarray, b_vecs: np.ndarray) -> ProductEnsemble:
    weights = np.abs(weights) / np.sum(np.abs(weights))
    return ProductEnsemble(
        terms=[
            ProductTerm(weight=float(w), a_vec=a, b_vec=b)
            for w, a, b in zip(weights, _unit_rows(a_vecs), _unit_rows(b_vecs))
        ]
    )


def random_product_ensemble(seed: int, K: int = DEFAULT_TERMS) -> ProductEnsemble:
    """Flat-Dirichlet weights, Bloch vectors uniform on the sphere."""
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K}")
    rng = _rng(seed)
    weights = rng.dirichlet(np.ones(K))
    a_vecs = rng.standard_normal((K, 3))
    b_vecs = rng.standard_normal((K, 3))
    return _ensemble(weights, a_vecs, b_vecs)


def random_ppt_state(seed: int, max_attempts: int = PPT_MAX_ATTEMPTS) -> DensityMatrix:
    rng = _rng(seed)
    for attempt in range(1, max_attempts + 1):
        rho = random_state(rng)
        if is_separable(rho):
            logger.debug("seed %d: PPT state accepted after %d draws", seed, attempt)
            return rho
    raise SamplerExhausted(f"no PPT state in {max_attempts} draws for seed {seed}")


def ensemble_bloch(ensemble: ProductEnsemble) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """x = sum w a, y = sum w b, T = sum w a b^t."""
    w, a, b = ensemble.weights, ensemble.a_vecs, ensemble.b_vecs
    return w @ a, w @ b, np.einsum("k,ki,kj->ij", w, a, b)


def ensemble_to_state(ensemble: ProductEnsemble) -> DensityMatrix:
    return DensityMatrix(entries=bloch_matrix(*ensemble_bloch(ensemble)))


def rho_star_ensemble() -> ProductEnsemble:
    """rho* = 1/2 [ |a+><a+| (x) |+><+| + |a-><a-| (x) |-><-| ], a(+/-) = (+/-x + z)/sqrt2."""
    a_vecs = np.array([[1.0, 0.0, 1.0], [-1.0, 0.0, 1.0]]) / SQRT2
    b_vecs = np.array([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
    return ProductEnsemble(
        terms=[ProductTerm(weight=0.5, a_vec=a, b_vec=b) for a, b in zip(a_vecs, b_vecs)]
    )


# -------------------------
# Refinement
# -------------------------


def _angles(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    theta = np.arccos(np.clip(v[:, 2], -1.0, 1.0))
    phi = np.arctan2(v[:, 1], v[:, 0])
    return theta, phi


def _vectors(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    s = np.sin(theta)
    return np.stack([s * np.cos(phi), s * np.sin(phi), np.cos(theta)], axis=-1)


def _pack(ensemble: ProductEnsemble) -> np.ndarray:
    ta, pa = _angles(ensemble.a_vecs)
    tb, pb = _angles(ensemble.b_vecs)
    return np.concatenate([np.sqrt(ensemble.weights), ta, pa, tb, pb])


def _unpack(z: np.ndarray, K: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    s, ta, pa, tb, pb = (z[i * K : (i + 1) * K] for i in range(5))
    w = s * s
    return w / np.sum(w), _vectors(ta, pa), _vectors(tb, pb)


def _objectives(Z: np.ndarray, K: int) -> np.ndarray:
    """Discord of every packed ensemble in the rows of Z; -inf when all weights vanish."""
    w = Z[:, :K] ** 2
    total = np.sum(w, axis=1)
    empty = total == 0.0
    w = w / np.where(empty, 1.0, total)[:, None]
    a = _vectors(Z[:, K : 2 * K], Z[:, 2 * K : 3 * K])
    b = _vectors(Z[:, 3 * K : 4 * K], Z[:, 4 * K :])
    x = np.einsum("mk,mki->mi", w, a)
    T = np.einsum("mk,mki,mkj->mij", w, a, b)
    return np.where(empty, -np.inf, bloch_discord_many(x, T))


def _trials(z: np.ndarray, start: int, step: float) -> np.ndarray:
    """z with +step then -step on each coordinate from start on, in coordinate order."""
    coords = np.repeat(np.arange(start, z.size), 2)
    trials = np.repeat(z[None, :], coords.size, axis=0)
    trials[np.arange(coords.size), coords] += np.tile([step, -step], z.size - start)
    return trials


def _record(
    ensemble: Optional[ProductEnsemble],
    state: DensityMatrix,
    seed: int,
    method: str,
    iterations: int = 0,
    trace: Optional[list[float]] = None,
) -> SearchRecord:
    return SearchRecord(
        state=state,
        discord=geometric_discord(state),
        gap=conjecture_gap(state),
        seed=seed,
        method=method,
        iterations=iterations,
        separable=is_separable(state),
        rank=numerical_rank(state),
        trace=trace or [],
        ensemble=ensemble,
    )


def refine(
    start: ProductEnsemble,
    max_iters: int = DEFAULT_REFINE_ITERS,
    step0: float = DEFAULT_STEP0,
    seed: int = 0,
) -> SearchRecord:
    """Cyclic coordinate ascent of the discord over a product ensemble.

    Coordinates are square-root weights (w = s^2 / sum s^2) and the polar
    angles of every Bloch vector, so each trial point is again a product
    ensemble. A sweep tries +/- step on each coordinate and keeps strict
    improvements; a sweep without one halves the step. Stops after max_iters
    sweeps or once the step falls below MIN_STEP.
    """
    K = len(start.terms)
    z = _pack(start)
    best = float(_objectives(z[None, :], K)[0])
    trace = [best]
    step = float(step0)
    iterations = 0
    while iterations < max_iters and step >= MIN_STEP:
        iterations += 1
        improved = False
        j = 0
        while j < z.size:
            trials = _trials(z, j, step)
            values = _objectives(trials, K)
            hits = np.flatnonzero(values > best)
            if hits.size == 0:
                break
            first = int(hits[0])
            z, best = trials[first], float(values[first])
            trace.append(best)
            improved = True
            j += first // 2 + 1
        if not improved:
            step *= 0.5
    w, a, b = _unpack(z, K)
    ensemble = _ensemble(w, a, b)
    logger.debug("refine seed=%d: %d sweeps, discord %.17g", seed, iterations, best)
    return _record(ensemble, ensemble_to_state(ensemble), seed, "refined", iterations, trace)


# -------------------------
# Diagnostics
# -------------------------


def _residuals(x: np.ndarray, T: np.ndarray, axes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ex = axes @ x
    r_x = np.linalg.norm(x[None, :] - ex[:, None] * axes, axis=1)
    eT = axes @ T
    r_T = np.linalg.norm(T[None, :, :] - axes[:, :, None] * eT[:, None, :], axis=(1, 2))
    return r_x, r_T


def stationarity_residual(rho: DensityMatrix, tol: float = DEGENERACY_TOL) -> StationarityResidual:
    """r_x = |x - (e.x) e|, r_T = |T - e e^t T| at a lambda_max eigenvector e.

    On a degenerate lambda_max the pair minimizing r_x + r_T over a
    discretization of the eigenspace is reported. This is a diagnostic only:
    vanishing residuals do not certify a maximum.
    """
    bf = to_bloch(rho)
    basis = eig3_sym(g_matrix(bf)).max_eigenspace(tol)
    if len(basis) == 1:
        axes = basis
    elif len(basis) == 2:
        theta = np.linspace(0.0, np.pi, 721)
        axes = np.cos(theta)[:, None] * basis[0] + np.sin(theta)[:, None] * basis[1]
    else:
        axes = np.vstack([np.eye(3), fibonacci_sphere(4000)])
    r_x, r_T = _residuals(bf.x, bf.T, axes)
    best = int(np.argmin(r_x + r_T))
    return StationarityResidual(
        r_x=float(r_x[best]), r_T=float(r_T[best]), axis=axes[best].tolist()
    )


def prop2_objective(a: float, b: float, c: float) -> float:
    sq = (a * a, b * b, c * c)
    return sum(sq) - max(sq)


def prop2_simplex_oracle(n: int = PROP2_GRID_N) -> float:
    """Grid maximum of a^2+b^2+c^2 - max{a^2,b^2,c^2} on a, b, c >= 0, a+b+c <= 1.

    The supremum is 1/4 at (1/2, 1/2, 0); the grid approaches it from below.
    """
    if n < 100:
        raise DomainError(f"prop2_simplex_oracle needs n >= 100, got {n}")
    t = np.linspace(0.0, 1.0, n)
    B, C = np.meshgrid(t, t, indexing="ij")
    best = 0.0
    for a in t:
        feasible = a + B + C <= 1.0 + 1e-12
        sq = np.stack([np.full(B.shape, a * a), B * B, C * C])
        values = np.sum(sq, axis=0) - np.max(sq, axis=0)
        best = max(best, float(np.max(np.where(feasible, values, 0.0))))
    return best


# -------------------------
# Campaign
# -------------------------


def _campaign_task(
    seed: int, K: int, refine_iters: int, sampler: Sampler, step0: float
) -> SearchRecord:
    if sampler == "ppt":
        return _record(None, random_ppt_state(seed), seed, "random")
    ensemble = random_product_ensemble(seed, K)
    if refine_iters > 0:
        return refine(ensemble, refine_iters, step0, seed=seed)
    return _record(ensemble, ensemble_to_state(ensemble), seed, "random")


def campaign(
    seeds: Iterable[int],
    K: int = DEFAULT_TERMS,
    refine_iters: int = DEFAULT_REFINE_ITERS,
    sampler: Sampler = "product",
    warm_start: Optional[ProductEnsemble] = None,
    workers: Optional[int] = None,
    step0: float = DEFAULT_STEP0,
) -> list[SearchRecord]:
    """One record per seed, plus one for the warm start (seed -1) if given.

    Sorted by discord descending, then seed; the order does not depend on
    which worker finished first.
    """
    if sampler not in ("product", "ppt"):
        raise DomainError(f"unknown sampler {sampler!r}")
    seeds = list(seeds)
    n_workers = SETTINGS.worker_count(workers)
    logger.info(
        "campaign: %d seeds, sampler=%s, K=%d, %d refine iters, %d workers",
        len(seeds), sampler, K, refine_iters, n_workers,
    )

    records: list[SearchRecord] = []
    if n_workers == 1 or len(seeds) <= 1:
        records = [_campaign_task(s, K, refine_iters, sampler, step0) for s in seeds]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as executor:
            future_to_seed = {
                executor.submit(_campaign_task, s, K, refine_iters, sampler, step0): s
                for s in seeds
            }
            for future in as_completed(future_to_seed):
                records.append(future.result())

    if warm_start is not None:
        records.append(refine(warm_start, refine_iters, step0, seed=WARM_START_SEED))

    for r in records:
        if r.counterexample_candidate:
            logger.warning(
                "counterexample candidate: seed=%d discord=%.17g gap=%.17g",
                r.seed, r.discord, r.gap,
            )
    records.sort(key=lambda r: (-r.discord, r.seed))
    if records:
        logger.info(
            "campaign done: best discord %.17g, worst gap %.17g",
            records[0].discord, min(r.gap for r in records),
        )
    return records


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, FLOAT_FORMAT)
    return str(value)


def write_records_csv(records: list[SearchRecord], path: Path | str) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([_fmt(getattr(r, col)) for col in CSV_COLUMNS])
    return path


def write_records_json(records: list[SearchRecord], path: Path | str) -> Path:
    path = Path(path)
    payload = [r.model_dump(mode="json") for r in records]
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path
