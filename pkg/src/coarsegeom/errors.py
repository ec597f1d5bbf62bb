"""Exception types shared across the toolkit."""


class CoarseGeomError(Exception):
    """Base class for all toolkit errors."""


class UnknownPointError(CoarseGeomError, KeyError):
    """A point id is not part of the space."""


class DisconnectedError(CoarseGeomError):
    """A graph-metric distance was queried between disconnected points."""


class SpaceKindError(CoarseGeomError):
    """Operation requires a different metric kind (graph vs explicit)."""


class ResolutionError(CoarseGeomError):
    """A net is too coarse for the requested operation or quality gate."""


class TriangleError(CoarseGeomError):
    """Three paths do not form a triangle with pairwise shared endpoints."""


class InadmissibleError(CoarseGeomError):
    """A gate (shortness budget, parameter range) is violated."""


class HorizonError(CoarseGeomError):
    """A construction ran out of indices before its thinning rules were met."""


class EquivalenceError(CoarseGeomError):
    """A precondition about (in)equivalence of the inputs failed."""


class InvalidBouquetError(CoarseGeomError):
    """A bouquet failed validation where a valid one is required."""
