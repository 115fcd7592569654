"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class StrongStabError(Exception):
    exit_code = 4


class InputError(StrongStabError, ValueError):
    """Malformed or out-of-domain input."""

    exit_code = 3


class InfeasibleError(StrongStabError):
    """The requested performance level or constraint cannot be met."""

    exit_code = 2


class NumericalError(StrongStabError, ArithmeticError):
    exit_code = 4


class PoleError(NumericalError, ZeroDivisionError):
    pass


class ConditionError(InputError):
    """A standing assumption on the plant class does not hold."""
