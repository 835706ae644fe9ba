"""Exception hierarchy shared by all surfembed modules."""


class SurfembedError(Exception):
    """Base class for every error raised by this package."""


class NotInvertible(SurfembedError, ValueError):
    pass


class DegenerateSpec(SurfembedError, ValueError):
    pass


class UnsupportedVariant(SurfembedError, ValueError):
    pass


class NonIntegralGenus(SurfembedError, ValueError):
    pass


class IndexMismatch(SurfembedError, ValueError):
    pass


class InvalidFamily(SurfembedError, ValueError):
    pass


class MalformedComplex(SurfembedError):
    pass


class PoleSingularity(SurfembedError, ValueError):
    pass


class InvalidComponent(SurfembedError, ValueError):
    pass


class NoPlan(SurfembedError):
    pass


class MissingAction(SurfembedError):
    pass


class InvalidDatum(SurfembedError, ValueError):
    pass


class NotCovered(SurfembedError):
    pass


class OutOfRange(SurfembedError):
    pass


class Inconsistent(SurfembedError, AssertionError):
    pass
