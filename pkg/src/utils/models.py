from __future__ import annotations

from typing import Any, Literal, Optional

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    computed_field,
    field_serializer,
    field_validator,
    model_validator,
)

from .constants import (
    COUNTEREXAMPLE_GAP,
    HERMITIAN_TOL,
    PSD_TOL,
    TRACE_TOL,
    XPARAM_TOL,
)
from .errors import (
    InvalidParams,
    NotHermitian,
    NotPSD,
    NotUnitTrace,
    StateSpecError,
)

Branch = Literal["plus", "minus"]


def _frozen_array(value: Any, dtype, shape: tuple[int, ...], name: str) -> np.ndarray:
    arr = np.array(value, dtype=dtype, copy=True)
    if arr.shape != shape:
        raise InvalidParams(f"{name} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParams(f"{name} contains non-finite values")
    arr.flags.writeable = False
    return arr


def _complex_pairs_to_array(value: Any) -> Any:
    """Accept the JSON encoding [[[re, im], ...], ...] as well as arrays."""
    if isinstance(value, np.ndarray):
        return value
    arr = np.asarray(value)
    if arr.ndim == 3 and arr.shape[-1] == 2 and not np.iscomplexobj(arr):
        return arr[..., 0].astype(float) + 1j * arr[..., 1].astype(float)
    return arr


class _ArrayModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class DensityMatrix(_ArrayModel):
    """Validated 4x4 two-qubit state in the basis |00>, |01>, |10>, |11>."""

    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def _validate_entries(cls, value: Any) -> np.ndarray:
        m = np.array(_complex_pairs_to_array(value), dtype=np.complex128)
        if m.shape != (4, 4):
            raise InvalidParams(f"density matrix must be 4x4, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidParams("density matrix contains non-finite values")
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > HERMITIAN_TOL:
            raise NotHermitian(herm, "max |M - M^dagger|")
        tr = np.trace(m)
        tr_err = float(abs(tr - 1.0))
        if tr_err > TRACE_TOL:
            raise NotUnitTrace(tr_err, f"trace = {tr.real:.15g}")
        m = 0.5 * (m + m.conj().T)
        lam_min = float(np.linalg.eigvalsh(m)[0])
        if lam_min < -PSD_TOL:
            raise NotPSD(-lam_min, f"minimum eigenvalue {lam_min:.3e}")
        m.flags.writeable = False
        return m

    @field_serializer("entries")
    def _serialize_entries(self, entries: np.ndarray) -> list:
        return [[[float(z.real), float(z.imag)] for z in row] for row in entries]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


class BlochForm(_ArrayModel):
    """(x, y, T) with rho = 1/4 [I + x.sigma (x) I + I (x) y.sigma + T_ij sigma_i (x) sigma_j].

    Physicality is not checked here; from_bloch enforces it.
    """

    x: np.ndarray
    y: np.ndarray
    T: np.ndarray

    @field_validator("x", "y", mode="before")
    @classmethod
    def _vec(cls, value: Any, info) -> np.ndarray:
        return _frozen_array(value, float, (3,), info.field_name)

    @field_validator("T", mode="before")
    @classmethod
    def _mat(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, float, (3, 3), "T")

    @field_serializer("x", "y", "T")
    def _serialize(self, arr: np.ndarray) -> list:
        return arr.tolist()


class XStateParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    a: float
    b: float
    c: float
    d: float
    p: float
    q: float

    @model_validator(mode="after")
    def _check_feasible(self) -> "XStateParams":
        values = (self.a, self.b, self.c, self.d, self.p, self.q)
        if not all(np.isfinite(values)):
            raise InvalidParams("X-state parameters must be finite")
        if min(values) < 0:
            raise InvalidParams(f"X-state parameters must be nonnegative: {values}")
        total = self.a + self.b + self.c + self.d
        if abs(total - 1.0) > XPARAM_TOL:
            raise InvalidParams(f"a+b+c+d = {total:.15g}, expected 1")
        if self.p**2 > self.a * self.d + XPARAM_TOL:
            raise InvalidParams(f"p^2 = {self.p**2:.3e} exceeds ad = {self.a * self.d:.3e}")
        if self.q**2 > self.b * self.c + XPARAM_TOL:
            raise InvalidParams(f"q^2 = {self.q**2:.3e} exceeds bc = {self.b * self.c:.3e}")
        return self


class GMatrix(_ArrayModel):
    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def _sym(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, float, (3, 3), "G")

    @field_serializer("entries")
    def _serialize(self, arr: np.ndarray) -> list:
        return arr.tolist()


class GSpectrum(_ArrayModel):
    """Eigenvalues non-increasing; vectors[i] belongs to lambdas[i]."""

    lambdas: np.ndarray
    vectors: np.ndarray

    @field_validator("lambdas", mode="before")
    @classmethod
    def _lam(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, float, (3,), "lambdas")

    @field_validator("vectors", mode="before")
    @classmethod
    def _vecs(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, float, (3, 3), "vectors")

    @field_serializer("lambdas", "vectors")
    def _serialize(self, arr: np.ndarray) -> list:
        return arr.tolist()

    @property
    def ascending(self) -> np.ndarray:
        return self.lambdas[::-1]

    def max_eigenspace(self, tol: float) -> np.ndarray:
        """Rows spanning the eigenspace of the largest eigenvalue."""
        keep = self.lambdas >= self.lambdas[0] - tol
        return self.vectors[keep]


class CQState(_ArrayModel):
    axis: np.ndarray
    state: DensityMatrix

    @field_validator("axis", mode="before")
    @classmethod
    def _axis(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, float, (3,), "axis")

    @field_serializer("axis")
    def _serialize(self, arr: np.ndarray) -> list:
        return arr.tolist()


class SeparabilityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    is_ppt: bool
    min_pt_eigenvalue: float
    t_trace_norm: float
    chsh_M: float
    x_condition: Optional[bool] = None


class AppendixSolution(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: float = Field(gt=0)
    branch: Branch
    params: XStateParams
    discord: float


class DerivationChain(BaseModel):
    model_config = ConfigDict(frozen=True)

    sum_smallest: float
    pq_bound: float
    population_bound: float
    first_equality_expected: bool


class ProductTerm(_ArrayModel):
    weight: float = Field(ge=0)
    a_vec: np.ndarray
    b_vec: np.ndarray

    @field_validator("a_vec", "b_vec", mode="before")
    @classmethod
    def _unit(cls, value: Any, info) -> np.ndarray:
        arr = _frozen_array(value, float, (3,), info.field_name)
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > 1e-12:
            raise InvalidParams(f"{info.field_name} must be a unit vector, norm {norm:.15g}")
        return arr

    @field_serializer("a_vec", "b_vec")
    def _serialize(self, arr: np.ndarray) -> list:
        return arr.tolist()


class ProductEnsemble(BaseModel):
    model_config = ConfigDict(frozen=True)

    terms: list[ProductTerm] = Field(min_length=1)

    @model_validator(mode="after")
    def _weights(self) -> "ProductEnsemble":
        total = sum(t.weight for t in self.terms)
        if abs(total - 1.0) > 1e-12:
            raise InvalidParams(f"ensemble weights sum to {total:.15g}, expected 1")
        return self

    @property
    def weights(self) -> np.ndarray:
        return np.array([t.weight for t in self.terms])

    @property
    def a_vecs(self) -> np.ndarray:
        return np.array([t.a_vec for t in self.terms])

    @property
    def b_vecs(self) -> np.ndarray:
        return np.array([t.b_vec for t in self.terms])


class SearchRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    state: DensityMatrix
    discord: float
    gap: float
    seed: int
    method: Literal["random", "refined"]
    iterations: int = 0
    separable: bool
    rank: int
    trace: list[float] = Field(default_factory=list)
    ensemble: Optional[ProductEnsemble] = None

    @computed_field
    @property
    def counterexample_candidate(self) -> bool:
        return self.gap < COUNTEREXAMPLE_GAP


class StationarityResidual(BaseModel):
    model_config = ConfigDict(frozen=True)

    r_x: float = Field(ge=0)
    r_T: float = Field(ge=0)
    axis: list[float]

    @property
    def total(self) -> float:
        return float(np.hypot(self.r_x, self.r_T))


class LUFingerprint(BaseModel):
    model_config = ConfigDict(frozen=True)

    x_norm: float
    y_norm: float
    t_singulars: tuple[float, float, float]
    t_det_sign: Literal[-1, 0, 1]

    def matches(self, other: "LUFingerprint", tol: float = 1e-10) -> bool:
        return (
            abs(self.x_norm - other.x_norm) <= tol
            and abs(self.y_norm - other.y_norm) <= tol
            and all(abs(s - o) <= tol for s, o in zip(self.t_singulars, other.t_singulars))
            and self.t_det_sign == other.t_det_sign
        )


class LUSearchResult(_ArrayModel):
    found: bool
    residual: float
    U: np.ndarray
    V: np.ndarray
    heuristic: bool = True

    @field_serializer("U", "V")
    def _serialize(self, arr: np.ndarray) -> list:
        return [[[float(z.real), float(z.imag)] for z in row] for row in arr]


class AnalyzeReport(BaseModel):
    discord: float
    gap: float
    closest_cq_axis: list[float]
    separable: bool
    min_pt_eigenvalue: float
    t_trace_norm: float
    chsh_M: float
    rank: int
    fingerprint: LUFingerprint


class ClaimCheck(BaseModel):
    claim_id: str
    expected: float
    computed: float
    error: float
    passed: bool
    comparison: Literal["eq", "le", "ge"] = "eq"
    tolerance: float = 0.0
    note: str = ""


class NamedSpec(BaseModel):
    name: str
    param: Optional[Any] = None


class StateSpec(BaseModel):
    """Exactly one of the four state encodings."""

    model_config = ConfigDict(extra="forbid")

    matrix: Optional[list] = None
    x_state: Optional[dict[str, float]] = None
    bloch: Optional[dict[str, list]] = None
    named: Optional[NamedSpec] = None

    @model_validator(mode="after")
    def _exactly_one(self) -> "StateSpec":
        given = [k for k in ("matrix", "x_state", "bloch", "named") if getattr(self, k) is not None]
        if len(given) != 1:
            raise StateSpecError(
                "spec", f"exactly one of matrix, x_state, bloch, named required; got {given or 'none'}"
            )
        return self
