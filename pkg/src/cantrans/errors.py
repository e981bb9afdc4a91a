"""Exception types shared across the toolkit."""


class CantransError(Exception):
    """Base class for all toolkit errors."""


class ExprSyntaxError(CantransError):
    """Malformed DSL source.

    Carries the 0-based character position of the offending token and the
    set of token kinds that would have been accepted there.
    """

    def __init__(self, message, position, expected=()):
        super().__init__(f"{message} (at position {position})")
        self.position = position
        self.expected = tuple(expected)


class UnknownIdentifier(CantransError):
    """Identifier is not a variable, declared parameter or function."""

    def __init__(self, name, position):
        super().__init__(f"unknown identifier {name!r} (at position {position})")
        self.name = name
        self.position = position


class IndexOutOfRange(CantransError):
    """Variable index outside 1..n."""

    def __init__(self, name, index, dimension, position):
        super().__init__(
            f"variable {name!r} has index {index}, outside 1..{dimension}"
            f" (at position {position})"
        )
        self.name = name
        self.index = index
        self.dimension = dimension
        self.position = position


class MissingBinding(CantransError):
    """Evaluation asked for a parameter or variable with no bound value."""


class DomainError(CantransError):
    """Evaluation left the domain (ln of nonpositive, division by zero,
    0 raised to a negative power, fractional power of a negative base)."""


class NonFinite(CantransError):
    """A numeric state overflowed or became NaN."""


class NotAGroupAtZero(CantransError):
    """Map family does not reduce to the identity at s = 0."""

    def __init__(self, defect, tol):
        super().__init__(
            f"family is not the identity at s=0 (defect {defect:.3e} > tol {tol:.3e})"
        )
        self.defect = defect
        self.tol = tol


class NotClosed(CantransError):
    """Contracted covector is not closed; no local generator exists."""

    def __init__(self, asymmetry, tol):
        super().__init__(
            f"covector is not closed (asymmetry {asymmetry:.3e} > tol {tol:.3e})"
        )
        self.asymmetry = asymmetry
        self.tol = tol


class NotCanonical(CantransError):
    """A map failed the canonicity precondition of the requested operation."""


class SingularJacobian(CantransError):
    """Nondegeneracy condition of a generating function failed."""


class NoConvergence(CantransError):
    """Newton iteration hit its iteration cap before meeting tolerance."""

    def __init__(self, residual, iterations):
        super().__init__(
            f"no convergence after {iterations} iterations"
            f" (residual {residual:.3e})"
        )
        self.residual = residual
        self.iterations = iterations


class ConfigError(CantransError):
    """Invalid job configuration; carries the offending field path."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
