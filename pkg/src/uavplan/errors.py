"""Exception hierarchy shared across the planning toolkit."""


class PlanningError(Exception):
    """Base class for all toolkit errors."""


class DegenerateGeometryError(PlanningError):
    """Coincident or collinear points where distinct geometry is required."""


class InvalidConicError(PlanningError):
    """Conic coefficients do not describe a (non-degenerate) real ellipse."""


class DomainError(PlanningError):
    """Scalar argument outside its mathematical domain."""


class ConfigError(PlanningError):
    """Malformed or inconsistent configuration input."""


class InvalidThresholdError(PlanningError):
    """Localization accuracy threshold outside the admissible interval."""


class CommInfeasibleError(PlanningError):
    """No UAV position at the given altitude can meet a rate requirement."""


class GridTooCoarseError(PlanningError):
    """A feasible region contains no candidate grid point."""


class ScenarioInfeasibleError(PlanningError):
    """One or more users cannot be served; carries per-user diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d for d in self.diagnostics))
