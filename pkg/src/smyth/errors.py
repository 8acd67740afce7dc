"""Exception hierarchy shared across the package."""
from __future__ import annotations


class SmythError(Exception):
    """Base class for all library-specific errors."""


class ParseError(SmythError, ValueError):
    """Malformed textual input (polynomial, coefficient list, certificate)."""


class TupleArityError(SmythError, ValueError):
    """Coefficient tuples of length 2 are outside the supported theory."""


class NonUnitError(SmythError, ArithmeticError):
    """An inverse was requested for a non-invertible element.

    The offending gcd (or the element itself) is attached as ``witness``.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class BudgetExceededError(SmythError, RuntimeError):
    """A search or enumeration would exceed its explicit budget.

    ``required`` carries the number of candidates the call would need.
    """

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class NotSmythTupleError(SmythError, ValueError):
    """Balanced multisets were requested for a tuple failing the criteria."""


class RelationViolationError(SmythError, ValueError):
    """A multiset member does not satisfy the defining linear relation."""

    def __init__(self, message: str, member=None):
        super().__init__(message)
        self.member = member


class NoRelationError(SmythError, ValueError):
    """The given permutations admit no nonzero kernel vector."""


class EqualityHypothesisError(SmythError, ValueError):
    """Extraction requires an exact equality of place absolute values."""


class PrecisionError(SmythError, RuntimeError):
    """Interval refinement hit its precision ceiling without a decision."""


class BridgeError(SmythError, RuntimeError):
    """No doubly regular rebalancing was found; carries the input matrix."""

    def __init__(self, message: str, matrix=None):
        super().__init__(message)
        self.matrix = matrix
