"""Exception types shared across the package."""


class GalleryError(Exception):
    """Base class for all domain errors raised by this package."""


class ZeroLengthEdge(GalleryError):
    """An edge with coincident endpoints was supplied to an offset routine."""


class NonPythagoreanEdge(GalleryError):
    """Exact offset requested for an edge whose direction norm is irrational."""


class InvalidResult(GalleryError):
    """A perturbation produced a shape that fails polygon validation."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class OffsetTooLarge(GalleryError):
    """A vertex offset exceeds the allowed perturbation magnitude."""


class PointOutsidePolygon(GalleryError):
    """A visibility query point lies strictly outside the polygon."""


class GuardOutsidePolygon(GalleryError):
    """A guard submitted for verification lies strictly outside the polygon."""


class InfeasibleCandidates(GalleryError):
    """No candidate can see some witness point; the cover instance is infeasible."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class BudgetExceeded(GalleryError):
    """A solver exceeded its configured node or retry budget."""


class GenerationFailed(GalleryError):
    """The polygon generator gave up after its retry limit."""


class PolygonSyntaxError(GalleryError):
    """Polygon text is malformed.  Carries the 1-based offending line number."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ValidityError(GalleryError):
    """Polygon text parsed but the polygon violates a structural invariant."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
