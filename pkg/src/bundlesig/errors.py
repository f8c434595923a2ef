"""Exception hierarchy shared by all bundlesig modules."""


class BundleSigError(Exception):
    pass


class AmbiguousLift(BundleSigError, ArithmeticError):
    """The half-open lift condition cannot be certified numerically."""


class MixedExactnessError(BundleSigError, TypeError):
    """An exact circle map met a floating-point one inside a single product."""


class DimensionMismatch(BundleSigError, ValueError):
    pass


class InternalConsistency(BundleSigError, AssertionError):
    """A structural identity that must hold by construction failed."""


class RelatorViolation(BundleSigError, ValueError):
    """Generator images do not satisfy the surface relator."""


class NotHomogeneous(BundleSigError, ValueError):
    pass


class NotSurjective(BundleSigError, ValueError):
    pass


class DegenerateMap(BundleSigError, ValueError):
    pass


class NotValidated(BundleSigError, TypeError):
    pass


class NotOrientable(BundleSigError, ValueError):
    pass


class ZeroVector(BundleSigError, ValueError):
    pass
