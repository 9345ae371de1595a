"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class HybridSenseError(Exception):
    exit_code = 1


class ConfigError(HybridSenseError, ValueError):
    """Malformed or inconsistent scenario configuration."""

    exit_code = 2

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{loc}: {message}"
        super().__init__(message)


class SingularityError(HybridSenseError, ZeroDivisionError):
    """A pole, dead transduction point, or degenerate algebraic configuration."""

    exit_code = 3

    def __init__(self, message, omega=None, value=None):
        self.omega = omega
        self.value = value
        super().__init__(message)


class InfeasibleDesignError(HybridSenseError):
    """The design chain has no physical solution; ``recipe`` holds the partial audit trail."""

    exit_code = 3

    def __init__(self, message, recipe=None):
        self.recipe = recipe
        super().__init__(message)


class NumericError(HybridSenseError, ArithmeticError):
    exit_code = 4


class ConvergenceError(NumericError):
    """Self-consistent iteration did not settle."""
