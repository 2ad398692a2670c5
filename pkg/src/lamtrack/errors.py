"""Exception taxonomy for lamtrack.

Every failure mode raised by the library is a subclass of LamtrackError, so
callers can catch one base class at API boundaries (the CLI does exactly
that and maps them to exit codes).
"""


class LamtrackError(Exception):
    """Base class for all lamtrack errors."""


class Infeasible(LamtrackError):
    """A solver's feasibility precondition fails (no solution exists)."""


class DomainError(LamtrackError):
    """An input lies outside a function's mathematical domain."""


class DisconnectedError(LamtrackError):
    """The glued surface is not connected."""


class TangencyMismatch(LamtrackError):
    """The two sides of a glued cuff request opposite tangency directions."""


class MalformedTrack(LamtrackError):
    """A track's combinatorics violate a structural invariant."""


class UnknownEdge(LamtrackError):
    """An edge path mentions an edge id the track does not contain."""


class NotCarried(LamtrackError):
    """A multicurve cannot be carried by any standard track choice."""


class ParabolicOrElliptic(LamtrackError):
    """A closed path's holonomy has |trace| <= 2, so it has no axis."""


class DegenerateBox(LamtrackError):
    """A geodesic box has a shared or coincident corner."""


class NotSpanning(LamtrackError):
    """A path does not have the shape required for carrier-box construction."""


class SwitchViolation(LamtrackError):
    """An edge weight system fails a switch balance relation."""


class IrrationalWeight(LamtrackError):
    """A float weight admits no small rational representation."""


class BoundaryHit(LamtrackError):
    """A carried endpoint lies on a box boundary after the perturbation budget."""
