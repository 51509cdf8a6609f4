"""JSON state specifications in, JSON / CSV out."""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any, Optional, TextIO

import numpy as np
from pydantic import ValidationError

from .constants import FLOAT_FORMAT
from .errors import StateSpecError
from .models import BlochForm, DensityMatrix, ProductEnsemble, StateSpec
from .qstate import from_bloch, make_named, x_state


def _field_of(err: ValidationError, default: str) -> str:
    errors = err.errors()
    if errors and errors[0].get("loc"):
        return ".".join(str(part) for part in errors[0]["loc"])
    return default


def parse_state_spec(text: str) -> StateSpec:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise StateSpecError("json", f"invalid JSON: {e.msg} (line {e.lineno})") from None
    if not isinstance(payload, dict):
        raise StateSpecError("spec", "top level must be a JSON object")
    try:
        return StateSpec.model_validate(payload)
    except ValidationError as e:
        raise StateSpecError(_field_of(e, "spec"), e.errors()[0]["msg"]) from None


def _matrix_entries(raw: list) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        raise StateSpecError("matrix", "entries must be numbers or [re, im] pairs") from None
    if arr.shape == (4, 4, 2):
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.shape == (4, 4):
        return arr.astype(np.complex128)
    raise StateSpecError("matrix", f"expected 4x4 of [re, im] pairs, got shape {arr.shape}")


def state_from_spec(spec: StateSpec) -> DensityMatrix:
    if spec.matrix is not None:
        return DensityMatrix(entries=_matrix_entries(spec.matrix))
    if spec.x_state is not None:
        missing = sorted({"a", "b", "c", "d", "p", "q"} - set(spec.x_state))
        if missing:
            raise StateSpecError("x_state", f"missing keys {missing}")
        return x_state(spec.x_state)
    if spec.bloch is not None:
        missing = sorted({"x", "y", "T"} - set(spec.bloch))
        if missing:
            raise StateSpecError("bloch", f"missing keys {missing}")
        try:
            bf = BlochForm(**spec.bloch)
        except ValidationError as e:
            raise StateSpecError(f"bloch.{_field_of(e, 'bloch')}", e.errors()[0]["msg"]) from None
        return from_bloch(bf)
    return make_named(spec.named.name, spec.named.param)


def load_state(path: Optional[Path | str] = None, stream: Optional[TextIO] = None) -> DensityMatrix:
    """Read a StateSpec from a file, or from stdin when no path is given."""
    text = Path(path).read_text(encoding="utf-8") if path else (stream or sys.stdin).read()
    return state_from_spec(parse_state_spec(text))


def load_ensemble(path: Path | str) -> ProductEnsemble:
    text = Path(path).read_text(encoding="utf-8")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise StateSpecError("json", f"invalid JSON: {e.msg} (line {e.lineno})") from None
    try:
        return ProductEnsemble.model_validate(payload)
    except ValidationError as e:
        raise StateSpecError(_field_of(e, "warm_start"), e.errors()[0]["msg"]) from None


def format_float(value: float) -> str:
    return format(float(value), FLOAT_FORMAT)


def dumps(payload: Any) -> str:
    """JSON with shortest round-trip float repr (exact for doubles)."""
    return json.dumps(payload, indent=2, allow_nan=False)
