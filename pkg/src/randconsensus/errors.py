"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class ConsensusError(Exception):
    """Base class for all package errors."""


class ValidationError(ConsensusError, ValueError):
    """Input failed validation."""


class DisconnectedGraph(ValidationError):
    pass


class InvalidProbability(ValidationError):
    pass


class SelfLoop(ValidationError):
    pass


class DuplicateEdge(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class ParseError(ConsensusError):
    """Scenario file could not be parsed; message carries the offending field."""


class BudgetExceeded(ConsensusError):
    """Kronecker-sized matrices would exceed the configured node cap."""


class TooLarge(ConsensusError):
    """Exhaustive enumeration would exceed the realization budget."""


class SingularChain(ConsensusError):
    """Stationary distribution is not unique (or the solve is numerically singular)."""


class EigensolveFailure(ConsensusError):
    pass


class DegenerateSpectrum(ConsensusError):
    """Some product of eigenvalues equals one, so the spectral bound diverges."""


class AllTrialsDiverged(ConsensusError):
    pass


class VerificationFailure(ConsensusError):
    """A closed form disagrees with the enumeration oracle.

    Attributes
    ----------
    check : str
        Name of the failing comparison.
    index : tuple
        Location of the worst entry.
    closed, exact : float
        The two disagreeing values.
    """

    def __init__(self, check: str, index: tuple, closed: float, exact: float, tol: float):
        self.check = check
        self.index = index
        self.closed = closed
        self.exact = exact
        self.tol = tol
        super().__init__(
            f"{check}: closed form {closed!r} vs enumerated {exact!r} at {index} "
            f"(|err|={abs(closed - exact):.3e} > tol={tol:.1e})"
        )
