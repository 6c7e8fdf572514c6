"""Exception hierarchy shared by every module of the toolkit."""


class JetLegendreError(Exception):
    """Base class for all errors raised by the package."""


class ParseError(JetLegendreError, ValueError):
    """Malformed expression text.

    ``pos`` is the zero-based character offset of the offending token;
    ``line`` and ``column`` are one-based and filled in from the source text.
    """

    def __init__(self, message, text="", pos=0):
        self.text = text
        self.pos = pos
        self.line = text.count("\n", 0, pos) + 1
        self.column = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} (line {self.line}, column {self.column})")


class UndeclaredVariableError(ParseError):
    pass


class JetOrderError(ParseError):
    pass


class ValidationError(JetLegendreError, ValueError):
    """A manifest or a problem definition violates its invariants."""


class SymbolicZeroDivision(JetLegendreError, ZeroDivisionError):
    """Division by an expression that normalizes to zero."""


class NonlinearError(JetLegendreError, ValueError):
    """An unknown occurs nonlinearly where an affine dependence is required."""


class NotPolynomialError(JetLegendreError, ValueError):
    pass


class ObstructionError(JetLegendreError):
    """A mathematical obstruction: degeneracy, integrability, rank failure."""


class DegenerateError(ObstructionError):
    pass


class IntegrabilityError(ObstructionError):
    """The matrix [d2L/dA dQdot] is not symmetric.

    ``witness`` is ``(i, j, difference)`` for the first offending entry.
    """

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class ConditionError(ObstructionError):
    """An odd-order auxiliary function violates det[d2F/dQdot dr] != 0."""


class StageLimitError(JetLegendreError, RuntimeError):
    pass


class CyclicRuleError(JetLegendreError, RuntimeError):
    pass


class EvaluationError(JetLegendreError, ArithmeticError):
    """Numeric evaluation failed (division by zero, non-finite value)."""

    def __init__(self, message, time=None):
        self.time = time
        super().__init__(message if time is None else f"{message} at t={time!r}")
