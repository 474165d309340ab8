__all__ = (
    "OscilabError",
    "InvalidArgument",
    "HypothesisError",
    "InvalidNodesError",
    "EnclosureError",
    "SturmError",
    "CertificationError",
    "IntegrationError",
    "InvariantViolation",
)


class OscilabError(Exception):
    """Base exception for everything raised by this package."""

    pass


class InvalidArgument(OscilabError, ValueError):
    """A precondition of an operation does not hold."""

    pass


class HypothesisError(InvalidArgument):
    def __init__(self, C: float):
        super().__init__(f"C ≥ 1 required (Theorem 1 hypothesis), got C={C!r}.")
        self.C: float = C


class InvalidNodesError(InvalidArgument):
    """The node list cannot be used to build a counterexample."""

    pass


class EnclosureError(OscilabError):
    def __init__(self, cells: int):
        super().__init__(f"Enclosure did not reach the requested tolerance within {cells} cells.")
        self.cells: int = cells


class SturmError(OscilabError):
    """Root counting was asked for something it cannot count."""

    pass


class CertificationError(OscilabError):
    """A certificate that the construction guarantees turned out false."""

    pass


class IntegrationError(OscilabError):
    """The numerical integrator failed to cover the requested interval."""

    pass


class InvariantViolation(OscilabError):
    """An experiment row or report breaks one of its invariants."""

    pass
