"""Exception types shared across heightlab."""

from __future__ import annotations


class GraphFormatError(ValueError):
    """Malformed line in a .bg (or zh/zl/quad) text file."""


class GraphValidationError(ValueError):
    """Graph content violates a structural invariant (range, duplicate, connectivity)."""


class BudgetExceeded(RuntimeError):
    """An exhaustive enumeration explored more nodes than allowed."""

    def __init__(self, what: str, budget: int):
        super().__init__(f"{what}: enumeration budget of {budget} nodes exceeded")
        self.what = what
        self.budget = budget


class NotConverged(RuntimeError):
    def __init__(self, msg: str, residual: float):
        super().__init__(f"{msg} (residual {residual:.3e})")
        self.residual = residual


class WitnessFailure(Exception):
    """The canonical level-witness chain could not be completed."""
