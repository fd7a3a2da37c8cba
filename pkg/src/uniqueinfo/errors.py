"""Exception hierarchy for the uniqueinfo package."""


class UniqueInfoError(Exception):
    """Base class for all errors raised by this package."""


class NegativeMass(UniqueInfoError):
    """A probability entry is negative beyond tolerance."""


class NotNormalized(UniqueInfoError):
    """Total probability mass deviates from 1 beyond tolerance."""


class DuplicateEntry(UniqueInfoError):
    """The same index tuple appears twice in a table definition."""


class UnknownVariable(UniqueInfoError):
    """A variable name does not exist in the distribution."""


class ShapeMismatch(UniqueInfoError):
    """Two distributions do not live on identical alphabets."""


class StepTooLarge(UniqueInfoError):
    """A step along a kernel direction would leave the polytope.

    Carries the maximal feasible step in ``max_step``.
    """

    def __init__(self, requested: float, max_step: float):
        self.requested = requested
        self.max_step = max_step
        super().__init__(
            f"step {requested!r} exceeds maximal feasible step {max_step!r}"
        )


class InfeasibleMarginals(UniqueInfoError):
    """Row and column sums of a transportation problem are inconsistent."""


class DimensionTooLarge(UniqueInfoError):
    """The feasible polytope has too many degrees of freedom for the oracle."""


class AlphabetTooLarge(UniqueInfoError):
    """A merged alphabet exceeds the solver guard."""


class NotConverged(UniqueInfoError):
    """The solver stopped before reaching the requested gap tolerance.

    The partial decomposition (with honest diagnostics) is attached as
    ``partial``.
    """

    def __init__(self, message: str, partial=None):
        self.partial = partial
        super().__init__(message)


class UnknownName(UniqueInfoError):
    """Not one of the canonical example names."""


class ParseError(UniqueInfoError):
    """Malformed distribution file."""
