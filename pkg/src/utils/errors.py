"""Exception hierarchy for the workbench."""

from typing import Optional


class WorkbenchError(Exception):
    pass


class StateValidationError(WorkbenchError):
    """A matrix failed one of the density-matrix invariants."""

    invariant = "state"

    def __init__(self, magnitude: float, detail: Optional[str] = None):
        self.magnitude = float(magnitude)
        msg = f"{self.invariant} violated (magnitude {self.magnitude:.3e})"
        if detail:
            msg = f"{msg}: {detail}"
        super().__init__(msg)


class NotHermitian(StateValidationError):
    invariant = "hermiticity"


class NotUnitTrace(StateValidationError):
    invariant = "unit trace"


class NotPSD(StateValidationError):
    invariant = "positive semidefiniteness"


class InvalidParams(WorkbenchError):
    pass


class ParamOutOfRange(WorkbenchError):
    pass


class DomainError(WorkbenchError):
    pass


class NoRealSolution(WorkbenchError):
    pass


class BadAxis(WorkbenchError):
    pass


class NotUnitary(WorkbenchError):
    pass


class SamplerExhausted(WorkbenchError):
    pass


class StateSpecError(WorkbenchError):
    """Malformed state specification (CLI input)."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
