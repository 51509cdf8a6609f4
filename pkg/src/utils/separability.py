"""PPT certification (exact for two qubits), the X-state closed form, and the
trace-norm / CHSH diagnostics of the correlation matrix."""

from __future__ import annotations

import numpy as np

from .constants import PPT_TOL, SINGULAR_CLAMP
from .models import BlochForm, DensityMatrix, SeparabilityReport, XStateParams
from .qstate import to_bloch

_X_MASK = np.array(
    [
        [1, 0, 0, 1],
        [0, 1, 1, 0],
        [0, 1, 1, 0],
        [1, 0, 0, 1],
    ],
    dtype=bool,
)


def partial_transpose(rho: DensityMatrix | np.ndarray) -> np.ndarray:
    """Transpose on qubit B."""
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return m.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def min_pt_eigenvalue(rho: DensityMatrix | np.ndarray) -> float:
    pt = partial_transpose(rho)
    return float(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))[0])


def is_separable(rho: DensityMatrix, tol: float = PPT_TOL) -> bool:
    return min_pt_eigenvalue(rho) >= -tol


def x_state_min_pt_eigenvalue(params: XStateParams) -> float:
    """Smaller eigenvalue of the two 2x2 blocks of the partial transpose.

    The transpose on B moves q into the (a, d) block and p into the (b, c) block.
    """
    p = params
    outer = 0.5 * (p.a + p.d) - np.hypot(0.5 * (p.a - p.d), p.q)
    inner = 0.5 * (p.b + p.c) - np.hypot(0.5 * (p.b - p.c), p.p)
    return float(min(outer, inner))


def x_state_separable(params: XStateParams, tol: float = PPT_TOL) -> bool:
    """p <= sqrt(bc) and q <= sqrt(ad), judged on the PT eigenvalue like is_separable."""
    return bool(x_state_min_pt_eigenvalue(params) >= -tol)


def _singular_squares(T: np.ndarray) -> np.ndarray:
    lam = np.linalg.eigvalsh(T @ T.T)[::-1]
    return np.where((lam < 0) & (lam >= -SINGULAR_CLAMP), 0.0, lam)


def t_trace_norm(bf: BlochForm) -> float:
    """Sum of singular values of T; at most 1 for separable states."""
    return float(np.sum(np.sqrt(np.clip(_singular_squares(bf.T), 0.0, None))))


def chsh_M(bf: BlochForm) -> float:
    """Sum of the two largest eigenvalues of T T^t; CHSH holds when <= 1."""
    lam = _singular_squares(bf.T)
    return float(lam[0] + lam[1])


def is_x_shaped(rho: DensityMatrix, tol: float = 1e-14) -> bool:
    return bool(np.all(np.abs(rho.entries[~_X_MASK]) <= tol))


def x_params_of(rho: DensityMatrix) -> XStateParams:
    """Populations and coherence moduli of an X-shaped state."""
    m = rho.entries
    return XStateParams(
        a=m[0, 0].real,
        b=m[1, 1].real,
        c=m[2, 2].real,
        d=m[3, 3].real,
        p=abs(m[0, 3]),
        q=abs(m[1, 2]),
    )


def separability_report(rho: DensityMatrix, tol: float = PPT_TOL) -> SeparabilityReport:
    bf = to_bloch(rho)
    lam_min = min_pt_eigenvalue(rho)
    x_condition = x_state_separable(x_params_of(rho), tol) if is_x_shaped(rho) else None
    return SeparabilityReport(
        is_ppt=lam_min >= -tol,
        min_pt_eigenvalue=lam_min,
        t_trace_norm=t_trace_norm(bf),
        chsh_M=chsh_M(bf),
        x_condition=x_condition,
    )
