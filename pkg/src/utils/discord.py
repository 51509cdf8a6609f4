"""Geometric discord in closed form, the G matrix and the closest classical-quantum state.

For a state (x, y, T) the normalized geometric discord is

    D = 1/2 [ |x|^2 + |T|^2 - lambda_max(G) ],   G = x x^t + T T^t,

and the closest classical-quantum state is (e^t x e, y, e e^t T) with e a
lambda_max eigenvector of G. Measurements are always on qubit A.
"""

from __future__ import annotations

import numpy as np

from .constants import AXIS_GRID_POINTS, AXIS_NORM_TOL, DEGENERACY_TOL
from .errors import BadAxis
from .models import BlochForm, CQState, DensityMatrix, GMatrix, GSpectrum
from .qstate import bloch_correlations, from_bloch, to_bloch


def g_matrix(bf: BlochForm) -> GMatrix:
    g = np.outer(bf.x, bf.x) + bf.T @ bf.T.T
    return GMatrix(entries=0.5 * (g + g.T))


def _sign_normalize(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > 1e-15)
    if nz.size and v[nz[0]] < 0:
        return -v
    return v


def eig3_sym(G: GMatrix | np.ndarray) -> GSpectrum:
    """Eigenvalues non-increasing, vectors as rows with first nonzero component positive."""
    g = G.entries if isinstance(G, GMatrix) else np.asarray(G, dtype=float)
    lam, vec = np.linalg.eigh(g)
    order = np.argsort(-lam, kind="stable")
    vectors = np.array([_sign_normalize(vec[:, i]) for i in order])
    return GSpectrum(lambdas=lam[order], vectors=vectors)


def optimal_axis(spectrum: GSpectrum, tol: float = DEGENERACY_TOL) -> np.ndarray:
    """lambda_max eigenvector; on degeneracy the lexicographically largest |components|.

    The closest CQ state is not unique in that case; all eigenvectors remain
    available on the spectrum.
    """
    candidates = spectrum.max_eigenspace(tol)
    if len(candidates) == 1:
        return candidates[0]
    best = max(range(len(candidates)), key=lambda i: tuple(np.round(np.abs(candidates[i]), 12)))
    return candidates[best]


def bloch_discord(x: np.ndarray, T: np.ndarray) -> float:
    g = np.outer(x, x) + T @ T.T
    lam_max = np.linalg.eigvalsh(0.5 * (g + g.T))[-1]
    return max(0.5 * (float(np.trace(g)) - float(lam_max)), 0.0)


def bloch_discord_many(x: np.ndarray, T: np.ndarray) -> np.ndarray:
    """bloch_discord over stacks: x of shape (m, 3), T of shape (m, 3, 3)."""
    g = x[:, :, None] * x[:, None, :] + T @ np.swapaxes(T, 1, 2)
    lam_max = np.linalg.eigvalsh(0.5 * (g + np.swapaxes(g, 1, 2)))[:, -1]
    return np.maximum(0.5 * (np.trace(g, axis1=1, axis2=2) - lam_max), 0.0)


def geometric_discord(rho: DensityMatrix) -> float:
    r = bloch_correlations(rho)
    return bloch_discord(r[1:, 0], r[1:, 1:])


def discord_from_spectrum(rho: DensityMatrix) -> float:
    """1/2 (lambda_1 + lambda_2) of G in ascending order."""
    up = eig3_sym(g_matrix(to_bloch(rho))).ascending
    return max(0.5 * float(up[0] + up[1]), 0.0)


def _projected(bf: BlochForm, axis: np.ndarray) -> BlochForm:
    e = np.asarray(axis, dtype=float)
    return BlochForm(x=float(e @ bf.x) * e, y=bf.y, T=np.outer(e, e) @ bf.T)


def closest_cq(rho: DensityMatrix) -> tuple[CQState, float]:
    bf = to_bloch(rho)
    axis = optimal_axis(eig3_sym(g_matrix(bf)))
    chi = from_bloch(_projected(bf, axis))
    distance2 = float(np.sum(np.abs(rho.entries - chi.entries) ** 2))
    return CQState(axis=axis, state=chi), distance2


def measured_discord(rho: DensityMatrix, axis) -> float:
    """2 |rho - chi_e|^2 for the projective measurement along a fixed axis e."""
    e = np.asarray(axis, dtype=float)
    if e.shape != (3,) or abs(np.linalg.norm(e) - 1.0) > AXIS_NORM_TOL:
        raise BadAxis(f"axis must be a unit 3-vector, got {axis!r}")
    chi = from_bloch(_projected(to_bloch(rho), e))
    return 2.0 * float(np.sum(np.abs(rho.entries - chi.entries) ** 2))


def conjecture_gap(rho: DensityMatrix) -> float:
    """1/2 - (lambda_2 + lambda_3) of G in descending order; negative marks a candidate."""
    lam = eig3_sym(g_matrix(to_bloch(rho))).lambdas
    return 0.5 - float(lam[1] + lam[2])


def fibonacci_sphere(n: int) -> np.ndarray:
    """n deterministic, near-uniform unit vectors."""
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = np.pi * (3.0 - np.sqrt(5.0)) * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def axis_grid_discord(rho: DensityMatrix, n_points: int = AXIS_GRID_POINTS) -> float:
    """Minimum over a sphere grid of the axis-projected discord.

    Uses 2|rho - chi_e|^2 = 1/2 (|x|^2 - (e.x)^2 + |T|^2 - |e^t T|^2), which
    follows from orthogonality of the Pauli products; no eigensolve involved.
    """
    r = bloch_correlations(rho)
    x, T = r[1:, 0], r[1:, 1:]
    axes = fibonacci_sphere(n_points)
    ex = axes @ x
    et = axes @ T
    values = 0.5 * (x @ x - ex**2 + np.sum(T * T) - np.sum(et * et, axis=1))
    return float(values.min())
