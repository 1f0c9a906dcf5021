"""Exception hierarchy shared by all pmc modules.

The CLI maps these onto exit codes: usage/parse problems -> 1,
precondition and admissibility-class violations -> 2, numerical
failures -> 3.
"""

from __future__ import annotations


class PmcError(Exception):
    """Base class for all library errors."""


class DomainError(PmcError, ValueError):
    """Input outside the geometric domain (bad curvature sign, bad point,
    chart bound exceeded)."""


class AxisSingularityError(DomainError):
    """Evaluation at or past the rotation axis (x <= 0), where the
    rotational reduction is singular."""


class UnsupportedChartError(DomainError):
    """Chart id not available for the requested curvature sign."""


class PrescriptionError(PmcError, ValueError):
    """Malformed prescription descriptor."""


class ClassViolationError(PmcError):
    """Prescription fails the admissibility-class precondition of the
    requested construction."""


class PreconditionError(PmcError):
    """A numeric precondition failed; the message names the inequality."""


class NoCylinderError(PreconditionError):
    """ct_kappa(rho) = 2H(0) has no root, so no vertical cylinder exists."""


class NumericalError(PmcError):
    """Base class for runtime numerical failures."""


class NonClosureError(NumericalError):
    """Profile did not meet the axis at the far pole within tolerance."""

    def __init__(self, message: str, x_at_closure: float | None = None):
        super().__init__(message)
        self.x_at_closure = x_at_closure


class VerticalPointError(NumericalError):
    """Radial graph became vertical before the requested radius.

    Carries the maximal graph radius ``r_star`` and the truncated graph
    solved up to it.
    """

    def __init__(self, message: str, r_star: float, graph=None):
        super().__init__(message)
        self.r_star = r_star
        self.graph = graph


class NonConvergenceError(NumericalError):
    """Nonlinear iteration did not reach tolerance; carries the residual
    history."""

    def __init__(self, message: str, history=None, residual: float | None = None):
        super().__init__(message)
        self.history = list(history) if history is not None else []
        self.residual = residual


class StepSizeError(NumericalError):
    """Local error estimate of the fixed-step integrator exceeded the
    acceptance threshold; rerun with a smaller step."""
