"""Exception types shared by every module.

All errors derive from :class:`HodgeLaguerreError`, itself a ``ValueError``,
so callers that only care about "bad input" can catch one thing.  Each class
carries a short ``code`` used by the command-line interface.
"""

from __future__ import annotations

__all__ = [
    "HodgeLaguerreError",
    "InvalidParameter",
    "InvalidDegree",
    "InvalidIndex",
    "InvalidArgument",
    "InvalidInput",
    "InvalidShift",
    "InvalidMultiplier",
    "InvalidConfig",
    "SingularInput",
    "NearSingular",
    "RangeError",
    "NumericalFailure",
    "InfeasibleInput",
]


class HodgeLaguerreError(ValueError):
    code = "error"


class InvalidParameter(HodgeLaguerreError):
    code = "invalid-parameter"


class InvalidDegree(HodgeLaguerreError):
    code = "invalid-degree"


class InvalidIndex(HodgeLaguerreError):
    code = "invalid-index"


class InvalidArgument(HodgeLaguerreError):
    code = "invalid-argument"


class InvalidInput(HodgeLaguerreError):
    code = "invalid-input"


class InvalidShift(HodgeLaguerreError):
    code = "invalid-shift"


class InvalidMultiplier(HodgeLaguerreError):
    code = "invalid-multiplier"


class InvalidConfig(HodgeLaguerreError):
    code = "invalid-config"


class SingularInput(HodgeLaguerreError):
    code = "singular-input"


class NearSingular(HodgeLaguerreError):
    code = "near-singular"


class RangeError(HodgeLaguerreError):
    code = "range-error"


class NumericalFailure(HodgeLaguerreError):
    code = "numerical-failure"


class InfeasibleInput(HodgeLaguerreError):
    """Raised by the solvers when a closedness constraint is violated.

    ``residual`` holds the offending norm so it can be reported.
    """

    code = "infeasible-input"

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual
