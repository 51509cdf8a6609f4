"""Two-qubit states: validation, Bloch and X-state conversions, named states."""

from __future__ import annotations

from typing import Any, Literal, Optional, Sequence

import numpy as np

from .constants import PAULI, PAULI_PRODUCTS, RANK_TOL, RHO_STAR, SIGMA_STAR
from .errors import ParamOutOfRange
from .models import BlochForm, DensityMatrix, XStateParams

EntangledComponent = Literal["psi_plus", "phi_plus"]

KET_00 = np.array([1, 0, 0, 0], dtype=np.complex128)
PHI_PLUS = np.array([1, 0, 0, 1], dtype=np.complex128) / np.sqrt(2.0)
PSI_PLUS = np.array([0, 1, 1, 0], dtype=np.complex128) / np.sqrt(2.0)
PSI_MINUS = np.array([0, 1, -1, 0], dtype=np.complex128) / np.sqrt(2.0)

_COMPONENTS = {"psi_plus": PSI_PLUS, "phi_plus": PHI_PLUS}


def projector(ket: np.ndarray) -> np.ndarray:
    return np.outer(ket, ket.conj())


def from_matrix(entries: Any) -> DensityMatrix:
    return DensityMatrix(entries=entries)


def bloch_correlations(rho: DensityMatrix | np.ndarray) -> np.ndarray:
    """R[a, b] = Tr(rho sigma_a (x) sigma_b) with sigma_0 = I."""
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return np.einsum("abij,ji->ab", PAULI_PRODUCTS, m).real


def to_bloch(rho: DensityMatrix) -> BlochForm:
    r = bloch_correlations(rho)
    return BlochForm(x=r[1:, 0], y=r[0, 1:], T=r[1:, 1:])


def bloch_matrix(x: np.ndarray, y: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Unvalidated 4x4 matrix for (x, y, T)."""
    r = np.empty((4, 4))
    r[0, 0] = 1.0
    r[1:, 0] = x
    r[0, 1:] = y
    r[1:, 1:] = T
    return 0.25 * np.einsum("ab,abij->ij", r, PAULI_PRODUCTS)


def from_bloch(bf: BlochForm) -> DensityMatrix:
    return DensityMatrix(entries=bloch_matrix(bf.x, bf.y, bf.T))


def x_state_matrix(a: float, b: float, c: float, d: float, p: complex, q: complex) -> np.ndarray:
    """The X-shaped matrix with (possibly complex) coherences p, q."""
    return np.array(
        [
            [a, 0, 0, p],
            [0, b, q, 0],
            [0, np.conj(q), c, 0],
            [np.conj(p), 0, 0, d],
        ],
        dtype=np.complex128,
    )


def x_state(params: XStateParams | dict) -> DensityMatrix:
    if not isinstance(params, XStateParams):
        params = XStateParams(**params)
    p = params
    return DensityMatrix(entries=x_state_matrix(p.a, p.b, p.c, p.d, p.p, p.q))


def phase_gauge(a: float, b: float, c: float, d: float, p: complex, q: complex) -> XStateParams:
    """Drop the coherence phases; the result is LU-equivalent to the input."""
    return XStateParams(a=a, b=b, c=c, d=d, p=abs(p), q=abs(q))


def phase_gauge_unitaries(p: complex, q: complex) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal U (qubit A), V (qubit B) with (U(x)V) rho(p,q) (U(x)V)^dagger real.

    |0>_k -> exp(i(-theta_p + (-1)^k theta_q)/2) |0>_k for k = 1, 2.
    """
    theta_p = np.angle(p) if p != 0 else 0.0
    theta_q = np.angle(q) if q != 0 else 0.0
    phi_a = (-theta_p - theta_q) / 2.0
    phi_b = (-theta_p + theta_q) / 2.0
    u = np.diag([np.exp(1j * phi_a), 1.0]).astype(np.complex128)
    v = np.diag([np.exp(1j * phi_b), 1.0]).astype(np.complex128)
    return u, v


def product_state(a_vec: Sequence[float], b_vec: Sequence[float]) -> DensityMatrix:
    a_vec = np.asarray(a_vec, dtype=float)
    b_vec = np.asarray(b_vec, dtype=float)
    for name, v in (("a", a_vec), ("b", b_vec)):
        if v.shape != (3,):
            raise ParamOutOfRange(f"{name} must be a 3-vector")
        if np.linalg.norm(v) > 1.0 + 1e-12:
            raise ParamOutOfRange(f"|{name}| = {np.linalg.norm(v):.6g} exceeds 1")
    rho_a = 0.5 * (PAULI[0] + np.einsum("i,ijk->jk", a_vec, PAULI[1:]))
    rho_b = 0.5 * (PAULI[0] + np.einsum("i,ijk->jk", b_vec, PAULI[1:]))
    return DensityMatrix(entries=np.kron(rho_a, rho_b))


def bell_diagonal(t1: float, t2: float, t3: float) -> DensityMatrix:
    """x = y = 0, T = diag(t1, t2, t3); raises NotPSD outside the tetrahedron."""
    return from_bloch(BlochForm(x=np.zeros(3), y=np.zeros(3), T=np.diag([t1, t2, t3])))


def werner(p: float) -> DensityMatrix:
    if not 0.0 <= p <= 1.0:
        raise ParamOutOfRange(f"werner p = {p} outside [0, 1]")
    return DensityMatrix(entries=p * projector(PSI_MINUS) + (1.0 - p) / 4.0 * np.eye(4))


def rho_epsilon(eps: float, component: EntangledComponent = "psi_plus") -> DensityMatrix:
    """Rank-two mixture of an entangled pure state with |00>, discord 1 - eps for psi_plus."""
    if not 0.0 <= eps <= 0.75:
        raise ParamOutOfRange(f"epsilon = {eps} outside [0, 3/4]")
    if component not in _COMPONENTS:
        raise ParamOutOfRange(f"unknown entangled component {component!r}")
    root = np.sqrt(max(0.25 - eps / 3.0, 0.0))
    lam_plus, lam_minus = 0.5 + root, 0.5 - root
    m = lam_plus * projector(_COMPONENTS[component]) + lam_minus * projector(KET_00)
    return DensityMatrix(entries=m)


def make_named(name: str, param: Optional[Any] = None, **kwargs: Any) -> DensityMatrix:
    """Factory for the named states: bell_phi_plus, bell_psi_minus, werner(p),
    rho_epsilon(eps), rho_star, sigma_star, product((a_vec, b_vec))."""
    if name == "bell_phi_plus":
        return DensityMatrix(entries=projector(PHI_PLUS))
    if name == "bell_psi_minus":
        return DensityMatrix(entries=projector(PSI_MINUS))
    if name == "rho_star":
        return DensityMatrix(entries=RHO_STAR)
    if name == "sigma_star":
        return DensityMatrix(entries=SIGMA_STAR)
    if name == "werner":
        return werner(_scalar_param(name, param))
    if name == "rho_epsilon":
        return rho_epsilon(_scalar_param(name, param), kwargs.get("component", "psi_plus"))
    if name == "product":
        a_vec, b_vec = _vector_pair(param)
        return product_state(a_vec, b_vec)
    raise ParamOutOfRange(f"unknown named state {name!r}")


def _scalar_param(name: str, param: Any) -> float:
    if param is None:
        raise ParamOutOfRange(f"{name} requires a numeric param")
    try:
        return float(param)
    except (TypeError, ValueError):
        raise ParamOutOfRange(f"{name} param must be a number, got {param!r}") from None


def _vector_pair(param: Any) -> tuple[np.ndarray, np.ndarray]:
    try:
        pair = np.asarray(param, dtype=float)
    except (TypeError, ValueError):
        raise ParamOutOfRange(f"product param must be [a_vec, b_vec] of numbers, got {param!r}") from None
    if pair.shape != (2, 3):
        raise ParamOutOfRange(f"product param must have shape (2, 3), got {pair.shape}")
    return pair[0], pair[1]


def numerical_rank(rho: DensityMatrix, tol: float = RANK_TOL) -> int:
    return int(np.sum(rho.eigenvalues() > tol))


def random_state(rng: np.random.Generator) -> DensityMatrix:
    """Full-rank state from a normalized complex Gaussian Gram matrix."""
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    m = g @ g.conj().T
    return DensityMatrix(entries=m / np.trace(m).real)

