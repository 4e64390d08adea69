"""Exception taxonomy shared by all posetsearch modules."""


class PosetSearchError(Exception):
    """Base class for every error raised by this package."""


class CycleError(PosetSearchError):
    """The supplied cover relation contains a directed cycle (or a self-pair)."""


class RedundantCoverError(PosetSearchError):
    """A cover pair is transitively implied, so the input is not a Hasse diagram."""


class RangeError(PosetSearchError):
    """An element id or parameter is outside its permitted range."""


class SizeError(PosetSearchError):
    """An instance exceeds the size limit of an exhaustive analysis."""


class UndefinedError(PosetSearchError):
    """The requested quantity is undefined for this instance (e.g. gamma on n < 2)."""


class EmptySetError(PosetSearchError):
    """An operation that needs a nonempty element set received an empty one."""


class NotForestError(PosetSearchError):
    """A forest-only operation was applied where the cover graph is not a forest."""


class InconsistentOracle(PosetSearchError):
    """Oracle answers eliminated every candidate; the session violated its promise."""


class PromiseViolation(PosetSearchError):
    """A uniqueness promise (single marked element / single zero block) was broken."""


class ConditionViolation(PosetSearchError):
    """A recursive-search divider violated one of its structural conditions."""

    def __init__(self, condition: str, message: str = ""):
        self.condition = condition
        super().__init__(f"{condition}: {message}" if message else condition)


class UnsortedInput(PosetSearchError):
    """An input list that must be ascending is not."""


class BudgetExceeded(PosetSearchError):
    """The configured global query budget was exhausted."""
