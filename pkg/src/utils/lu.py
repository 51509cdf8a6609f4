"""Local unitaries U (x) V: application, the rho*/sigma witness, invariants, and a
bounded heuristic equivalence search."""

from __future__ import annotations

import itertools
import logging
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .constants import (
    LU_EQUIV_TOL,
    LU_SEARCH_TOL,
    RHO_STAR,
    SIGMA_STAR,
    UNITARY_TOL,
    WITNESS_U,
    WITNESS_V,
)
from .errors import NotUnitary
from .models import DensityMatrix, LUFingerprint, LUSearchResult
from .qstate import to_bloch

logger = logging.getLogger(__name__)


def _check_unitary(name: str, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (2, 2):
        raise NotUnitary(f"{name} must be 2x2, got {u.shape}")
    err = float(np.max(np.abs(u.conj().T @ u - np.eye(2))))
    if err > UNITARY_TOL:
        raise NotUnitary(f"{name}^dagger {name} deviates from I by {err:.3e}")
    return u


def conjugate(m: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    w = np.kron(u, v)
    return w @ m @ w.conj().T


def apply_local_unitary(rho: DensityMatrix, U: np.ndarray, V: np.ndarray) -> DensityMatrix:
    U = _check_unitary("U", U)
    V = _check_unitary("V", V)
    return DensityMatrix(entries=conjugate(rho.entries, U, V))


def verify_rho_sigma_equivalence(
    U: Optional[np.ndarray] = None, V: Optional[np.ndarray] = None
) -> tuple[bool, float]:
    """Frobenius residual |(U(x)V) rho* (U(x)V)^dagger - sigma|.

    Defaults to the working witness (printed U composed with sigma_z).
    """
    U = WITNESS_U if U is None else _check_unitary("U", U)
    V = WITNESS_V if V is None else _check_unitary("V", V)
    residual = float(np.linalg.norm(conjugate(RHO_STAR, U, V) - SIGMA_STAR))
    return residual <= LU_EQUIV_TOL, residual


def lu_fingerprint(rho: DensityMatrix, tol: float = 1e-12) -> LUFingerprint:
    """|x|, |y|, singular values of T and sign(det T): necessary LU invariants."""
    bf = to_bloch(rho)
    sv = np.linalg.svd(bf.T, compute_uv=False)
    det = float(np.linalg.det(bf.T))
    sign = 0 if abs(det) <= tol else int(np.sign(det))
    return LUFingerprint(
        x_norm=float(np.linalg.norm(bf.x)),
        y_norm=float(np.linalg.norm(bf.y)),
        t_singulars=tuple(float(s) for s in sv),
        t_det_sign=sign,
    )


def haar_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    """Haar-random unitary: QR of a complex Gaussian with the phases of R divided out."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def su2(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Rz(alpha) Ry(beta) Rz(gamma)."""
    return np.array(
        [
            [
                np.exp(-0.5j * (alpha + gamma)) * np.cos(beta / 2),
                -np.exp(-0.5j * (alpha - gamma)) * np.sin(beta / 2),
            ],
            [
                np.exp(0.5j * (alpha - gamma)) * np.sin(beta / 2),
                np.exp(0.5j * (alpha + gamma)) * np.cos(beta / 2),
            ],
        ],
        dtype=np.complex128,
    )


def lu_search(
    rho: DensityMatrix,
    target: DensityMatrix,
    grid: int = 4,
    tol: float = LU_SEARCH_TOL,
    n_starts: int = 8,
) -> LUSearchResult:
    """Heuristic search for U, V with (U(x)V) rho (U(x)V)^dagger = target.

    A grid over the six Euler angles seeds Nelder-Mead refinements. A miss is
    not a proof of inequivalence; compare lu_fingerprint for that.
    """
    m, t = rho.entries, target.entries

    # squared Frobenius residual: smooth at the solution
    def objective(angles: np.ndarray) -> float:
        u, v = su2(*angles[:3]), su2(*angles[3:])
        return float(np.sum(np.abs(conjugate(m, u, v) - t) ** 2))

    axis = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    polar = np.linspace(0.0, np.pi, grid)
    points = [
        np.array(a) for a in itertools.product(axis, polar, axis, axis, polar, axis)
    ]
    scored = sorted(points, key=objective)[:n_starts]

    best_x, best_f = scored[0], objective(scored[0])
    for start in scored:
        res = minimize(
            objective,
            start,
            method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": 1e-20, "maxiter": 20_000, "maxfev": 40_000},
        )
        if res.fun < best_f:
            best_x, best_f = res.x, float(res.fun)
        if np.sqrt(best_f) <= tol:
            break
    residual = float(np.sqrt(best_f))
    logger.debug("lu_search residual %.3e after %d starts", residual, len(scored))
    return LUSearchResult(
        found=residual <= tol,
        residual=residual,
        U=su2(*best_x[:3]),
        V=su2(*best_x[3:]),
    )
