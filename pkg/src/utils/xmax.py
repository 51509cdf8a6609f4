"""Maximal discord over separable X states.

The maximum is reached when ad = bc = [(a-c)^2 + (b-d)^2] / 8 and
p = q = sqrt(ad). Writing a = bk, c = dk reduces it to maximizing

    f(k) = k (k^2 + 1) / (k + 1)^4,   k > 0,

whose unique maximum f(1) = 1/8 gives D = 2 f(1) = 1/4.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Literal, Optional

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from .config import SETTINGS
from .constants import FOURTH_DERIVATIVE_STEP, GRID_CERTIFY_N, K_MAX, K_MIN, PAULI
from .discord import g_matrix, eig3_sym, geometric_discord
from .errors import DomainError, NoRealSolution
from .models import AppendixSolution, Branch, DerivationChain, XStateParams
from .qstate import to_bloch, x_state

logger = logging.getLogger(__name__)

GridMode = Literal["full", "reduced"]


def _check_k(k: float) -> float:
    k = float(k)
    if not math.isfinite(k) or k <= 0:
        raise DomainError(f"k must be a positive finite number, got {k}")
    return k


def f_appendix(k: float) -> float:
    k = _check_k(k)
    return k * (k * k + 1.0) / (k + 1.0) ** 4


def f_prime(k: float) -> float:
    k = _check_k(k)
    return (1.0 - k) ** 3 / (k + 1.0) ** 5


def f_fourth_derivative(k: float = 1.0, h: float = FOURTH_DERIVATIVE_STEP) -> float:
    """Seven-point central difference, O(h^4)."""
    if k - 3 * h <= 0:
        raise DomainError(f"stencil leaves the domain: k - 3h = {k - 3 * h}")
    coeffs = (-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0)
    total = sum(c * f_appendix(k + (j - 3) * h) for j, c in enumerate(coeffs))
    return total / (6.0 * h**4)


def maximize_f(
    tol: float = 1e-10, method: Literal["bracket", "golden", "grid"] = "bracket"
) -> tuple[float, float]:
    """Maximize f on (0, K_MAX].

    "bracket" bisects the sign change of f' = (1-k)^3/(k+1)^5. "golden" and
    "grid" compare values of f and locate k* only to about 1e-3.
    """
    if method == "bracket":
        k_star = bisect(f_prime, K_MIN, K_MAX, xtol=tol)
    elif method == "golden":
        res = minimize_scalar(
            lambda k: -f_appendix(k),
            bounds=(K_MIN, K_MAX),
            method="bounded",
            options={"xatol": tol},
        )
        k_star = float(res.x)
    elif method == "grid":
        # f(k) = f(1/k): (0, 1] suffices
        ks = np.logspace(-3.0, 0.0, 200_001)
        values = ks * (ks**2 + 1.0) / (ks + 1.0) ** 4
        k_star = float(ks[int(np.argmax(values))])
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(k_star), f_appendix(k_star)


def solve_constraints(k: float, branch: Branch = "plus") -> AppendixSolution:
    """Populations from b + d = 1/(k+1), 4bd = (k^2+1)/(k+1)^4, a = bk, c = dk.

    "plus" takes the larger root for b, so a >= c.
    """
    k = _check_k(k)
    total = 1.0 / (k + 1.0)
    product = (k * k + 1.0) / (4.0 * (k + 1.0) ** 4)
    disc = total * total - 4.0 * product
    if disc < 0:
        if disc < -1e-15:
            raise NoRealSolution(f"discriminant {disc:.3e} < 0 at k = {k}")
        disc = 0.0
    root = math.sqrt(disc)
    hi, lo = (total + root) / 2.0, (total - root) / 2.0
    b, d = (hi, lo) if branch == "plus" else (lo, hi)
    a, c = b * k, d * k
    coherence = math.sqrt(a * d)
    params = XStateParams(a=a, b=b, c=c, d=d, p=coherence, q=coherence)
    return AppendixSolution(
        k=k, branch=branch, params=params, discord=geometric_discord(x_state(params))
    )


def constraint_residuals(solution: AppendixSolution) -> dict[str, float]:
    p = solution.params
    return {
        "boundary": abs(p.a * p.d - p.b * p.c),
        "balance": abs(p.a * p.d - ((p.a - p.c) ** 2 + (p.b - p.d) ** 2) / 8.0),
        "trace": abs(p.a + p.b + p.c + p.d - 1.0),
        "coherence": max(abs(p.p - math.sqrt(p.a * p.d)), abs(p.q - math.sqrt(p.b * p.c)), abs(p.p - p.q)),
    }


def max_separable_x_discord() -> tuple[float, list[AppendixSolution]]:
    k_star, _ = maximize_f(tol=1e-15)
    states = [solve_constraints(k_star, "plus"), solve_constraints(k_star, "minus")]
    value = max(s.discord for s in states)
    logger.debug("maximal separable X discord %.17g at k = %.17g", value, k_star)
    return value, states


def minus_branch_lu_witness() -> tuple[np.ndarray, np.ndarray]:
    """sigma_x (x) sigma_x maps the k = 1 plus branch onto the minus branch."""
    return PAULI[1].copy(), PAULI[1].copy()


def derivation_chain(params: XStateParams) -> DerivationChain:
    """Sum of the two smallest eigenvalues of G against 8(p^2+q^2) and 16 min{ad, bc}."""
    up = eig3_sym(g_matrix(to_bloch(x_state(params)))).ascending
    p = params
    return DerivationChain(
        sum_smallest=float(up[0] + up[1]),
        pq_bound=8.0 * (p.p**2 + p.q**2),
        population_bound=16.0 * min(p.a * p.d, p.b * p.c),
        first_equality_expected=4.0 * (p.p + p.q) ** 2
        <= 2.0 * (p.a - p.c) ** 2 + 2.0 * (p.b - p.d) ** 2,
    )


def _x_discord(a, b, c, d, p, q):
    """Vectorized discord of X states: G = diag(4(p+q)^2, 4(p-q)^2, 2(a-c)^2 + 2(b-d)^2)."""
    e1 = 4.0 * (p + q) ** 2
    e2 = 4.0 * (p - q) ** 2
    e3 = np.broadcast_to(2.0 * (a - c) ** 2 + 2.0 * (b - d) ** 2, e1.shape)
    return 0.5 * (e1 + e2 + e3 - np.maximum(np.maximum(e1, e2), e3))


def _grid_chunk(i: int, n: int, mode: GridMode) -> tuple[float, Optional[tuple[float, ...]]]:
    """Best point for a = i/n over the rest of the lattice."""
    rest = n - i
    jl = [(j, l) for j in range(rest + 1) for l in range(rest - j + 1)]
    if not jl:
        return -1.0, None
    j, l = np.array(jl).T
    a = np.full(j.shape, i / n)
    b, c = j / n, l / n
    d = (rest - j - l) / n
    pmax = np.sqrt(np.minimum(a * d, b * c))
    a, b, c, d, pmax = (v[:, None, None] for v in (a, b, c, d, pmax))
    if mode == "reduced":
        p = q = pmax
    else:
        t = np.linspace(0.0, 1.0, n + 1)
        p = pmax * t[None, :, None]
        q = pmax * t[None, None, :]
    values = _x_discord(a, b, c, d, p, q)
    flat = int(np.argmax(values))
    idx = np.unravel_index(flat, values.shape)
    pp = np.broadcast_to(p, values.shape)[idx]
    qq = np.broadcast_to(q, values.shape)[idx]
    m = idx[0]
    point = (float(a[m, 0, 0]), float(b[m, 0, 0]), float(c[m, 0, 0]), float(d[m, 0, 0]), float(pp), float(qq))
    return float(values[idx]), point


def grid_certify(
    n: int = GRID_CERTIFY_N, mode: GridMode = "full", workers: Optional[int] = None
) -> tuple[float, XStateParams]:
    """Exhaustive lattice search over separable X states (a, b, c on the 1/n lattice,
    p and q on n+1 points of [0, min{sqrt(ad), sqrt(bc)}]).

    "reduced" pins p = q to the upper end of that box.
    """
    if n < 10:
        raise DomainError(f"grid_certify needs n >= 10, got {n}")
    results: dict[int, tuple[float, Optional[tuple[float, ...]]]] = {}
    with ThreadPoolExecutor(max_workers=SETTINGS.worker_count(workers)) as executor:
        future_to_i = {executor.submit(_grid_chunk, i, n, mode): i for i in range(n + 1)}
        for future in as_completed(future_to_i):
            results[future_to_i[future]] = future.result()

    best_value, best_point = -1.0, None
    for i in sorted(results):
        value, point = results[i]
        if point is not None and value > best_value:
            best_value, best_point = value, point
    a, b, c, d, p, q = best_point
    logger.info("grid_certify n=%d mode=%s max %.17g", n, mode, best_value)
    params = XStateParams(a=a, b=b, c=c, d=d, p=p, q=q)
    return best_value, params
