"""Exception types shared across the toolbox."""


class ModelError(Exception):
    """Base class for model-text and model-structure errors.

    Carries an optional source location (1-based line/column of the
    offending token) so front ends can point at the input.
    """

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def location(self):
        if self.line is None:
            return None
        return {"line": self.line, "column": self.column}


class ModelSyntaxError(ModelError):
    """Malformed equation text."""


class NonRationalError(ModelError):
    """A right-hand side uses a non-rational construct (sin, exp, ...)."""


class UnknownSymbolUse(ModelError):
    """A symbol is used in a way its class forbids (derivative of an
    output, input written without its time argument, ...)."""


class DuplicateDefinition(ModelError):
    """Two defining equations for the same state or output."""


class AmbiguousSymbol(ModelError):
    """One name is used both as a constant and as a function of t."""


class DivisionNotExact(ArithmeticError):
    """Polynomial division requested where the quotient is not polynomial."""


class NotZeroDimensional(ValueError):
    """Operation requires an ideal with finitely many solutions."""


class DegeneratePoint(RuntimeError):
    """Random specialization kept hitting vanishing denominators."""


class ResourceLimit(RuntimeError):
    """A computation exceeded its step/degree/time budget.

    Surfaced as a distinct outcome; callers must never turn this into a
    silently wrong answer.
    """

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail or {}


class JobCancelled(RuntimeError):
    """Cooperative cancellation was requested for the running analysis."""
