"""Exception types shared across the package."""


class FiltrakitError(Exception):
    """Base class for every package-specific error."""


class ParseError(FiltrakitError):
    """Malformed formula, index term, or first-order sentence."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class UnknownIndexSymbol(ParseError):
    """Index atom outside the declared alphabet."""


class UninterpretedIndex(FiltrakitError):
    """Index term neither explicit in the frame nor computable from its atoms."""


class CapExceeded(FiltrakitError):
    """An enumeration would exceed the configured search cap."""


class SizeCap(FiltrakitError):
    """An index-alphabet expansion would exceed the configured term cap."""


class AlphabetClash(FiltrakitError):
    """Fusion inputs share atomic index symbols."""


class WorldCountMismatch(FiltrakitError):
    """Fusion inputs disagree on the underlying world set."""


class PartitionDoesNotRespectGamma(FiltrakitError):
    """Maximal filtered relation requested for a partition that mixes truth values."""


class RecipeViolation(FiltrakitError):
    """A filtration recipe produced a relation outside the [min, max] corridor."""


class PreconditionFailed(FiltrakitError):
    """Input fails a stated precondition of the construction."""


class EquivalenceMismatch(FiltrakitError):
    """Component-wise surrogate equivalences disagree with the full one."""


class RecipeMismatch(FiltrakitError):
    """Operation requires a minimal-recipe filtration."""


class UnsupportedLogic(FiltrakitError):
    """Logic outside the family supported by the operation."""


class UnboundVariable(FiltrakitError):
    """First-order evaluation hit a variable without an assignment."""


class UnknownRelationSymbol(FiltrakitError):
    """First-order relation symbol not interpreted by the frame."""
