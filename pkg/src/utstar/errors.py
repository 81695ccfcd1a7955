"""Shared exception types."""


class BudgetExceeded(RuntimeError):
    """A computation would exceed a configured row/tuple/step budget."""


class IncompatibleRequest(ValueError):
    """A mathematically invalid combination of parameters was requested."""


class GradingFileError(ValueError):
    """A grading description file failed to parse or validate."""
