class AnalysisError(RuntimeError):
    """Base class for failures of the numerical analysis (not of the input)."""


class SpectralError(AnalysisError):
    """Jordan structure could not be decided reliably at the given tolerances."""

    def __init__(self, message: str, tol: float | None = None):
        super().__init__(message if tol is None else f"{message} (tolerance {tol:g})")
        self.tol = tol


class LPError(AnalysisError):
    """The LP solver failed; distinct from a certified infeasibility."""


class OracleOverflowError(AnalysisError):
    """Propagation overflowed; shorten the horizon."""


class BudgetError(ValueError):
    """The requested number of input columns cannot be honoured."""
