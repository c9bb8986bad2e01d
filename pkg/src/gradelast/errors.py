"""Exception types shared across the package."""


class GradElastError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(GradElastError, ValueError):
    """Malformed input: rank/dimension mismatch, bad permutation, non-unit normal, ..."""


class SingularSystemError(GradElastError, RuntimeError):
    """A linear system is singular and no deflation basis was supplied."""


class FredholmIncompatibilityError(GradElastError, RuntimeError):
    """Right-hand side is not orthogonal to the nullspace of a deflated system."""


class CoercivityError(GradElastError, RuntimeError):
    """A constitutive parameter set fails the positivity requirement."""


class InternalConsistencyError(GradElastError, RuntimeError):
    """A constructed object violates one of its own invariants (a bug, not bad input)."""
