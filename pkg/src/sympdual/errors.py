"""Exception hierarchy shared by all modules."""


class SympdualError(Exception):
    """Base class for all library errors."""


class InvariantViolation(SympdualError):
    """A structural invariant failed at construction or verification time.

    ``invariant`` names the violated invariant so callers (notably the CLI)
    can report it without parsing the message.
    """

    def __init__(self, invariant: str, message: str):
        self.invariant = invariant
        super().__init__(f"{invariant}: {message}")


class DimensionMismatch(SympdualError):
    """Operands have incompatible shapes or live in different groups."""


class NoSolutionError(SympdualError):
    """A congruence system that was required to be solvable has no solution."""


class UnsupportedStructure(SympdualError):
    """Input is outside the supported scope (p = 2 cases, mixed even orders)."""


class EnumerationGuard(SympdualError):
    """An exhaustive enumeration would exceed the configured order cap."""
