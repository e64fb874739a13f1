"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class FinslerError(Exception):
    """Base class for all package errors."""


class DomainError(FinslerError, ArithmeticError):
    """A sub-expression is singular at the evaluation point (1/0, log 0, sqrt 0)."""

    def __init__(self, message: str, subexpr: str | None = None):
        self.subexpr = subexpr
        if subexpr is not None:
            message = f"{message} in sub-expression `{subexpr}`"
        super().__init__(message)


class OrderError(FinslerError, ValueError):
    """Requested derivative order exceeds the engine cap."""


class UnboundVariable(FinslerError, NameError):
    """An expression references a variable that has no value at the point."""


class ExprSyntaxError(FinslerError, SyntaxError):
    """Malformed expression text.

    ``offset`` is the 0-based byte offset of the offending token and
    ``expected`` the set of token kinds the parser would have accepted.
    """

    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset(), field: str | None = None):
        self.byte_offset = offset
        self.expected = frozenset(expected)
        self.field = field
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        if field is not None:
            detail = f"{field}: {detail}"
        super().__init__(detail)


class UnknownIdentifier(ExprSyntaxError):
    pass


class ArityError(ExprSyntaxError):
    pass


class SchemaError(FinslerError, ValueError):
    """Metric file does not match the metric-JSON schema."""


class ValidationError(FinslerError, ValueError):
    """A metric failed Hermitian symmetry, realness or positivity checks.

    ``witness`` carries the offending sample when one exists.
    """

    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class SingularMatrix(FinslerError, ArithmeticError):
    pass


class ShapeError(FinslerError, ValueError):
    pass


class KindError(FinslerError, TypeError):
    """Operation requires a metric of a different kind."""


class DegenerateDelta(FinslerError, ArithmeticError):
    """The Randers scalar delta vanishes, so the weak-Kähler criterion is undefined."""


class UnknownId(FinslerError, KeyError):
    pass
