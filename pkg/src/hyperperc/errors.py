"""Exception types shared across the package.

Exit-code mapping used by the CLI: usage errors exit 2 (argparse default),
ResourceBudgetError exits 3, InvariantViolation exits 4.
"""


class StructuralError(ValueError):
    """A graph or config violates a structural precondition (bad rotation
    system, asymmetric adjacency, non-simple cycle, ...)."""


class ResourceBudgetError(RuntimeError):
    """An operation would exceed a configured resource budget
    (vertex budget, exact-enumeration size cap, ...)."""


class InvariantViolation(RuntimeError):
    """A property that is mathematically guaranteed for valid inputs failed.

    This always indicates a bug in a generator or in the library itself,
    never a legitimate runtime condition.
    """


class PatchTooSmallError(ValueError):
    """A construction ran off the truncation boundary before it could
    establish its required initial structure."""
