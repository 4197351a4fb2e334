"""Exception types raised across the package."""


class CMCDError(Exception):
    """Base class for every error raised by this package."""


class InvalidDomain(CMCDError):
    """The disk configuration does not describe a circular domain."""

    def __init__(self, message, indices=()):
        super().__init__(message)
        self.indices = tuple(indices)


class DiskNotContained(InvalidDomain):
    pass


class DisksOverlap(InvalidDomain):
    pass


class CenterAtOrigin(CMCDError):
    """Critical points are undefined for a disk centred at the origin."""


class FamilyExplosion(CMCDError):
    pass


class TailTooLarge(CMCDError):
    pass


class PoleHit(CMCDError):
    pass


class IllConditioned(CMCDError):
    pass


class NotYetAsymptotic(CMCDError):
    """The requested degree is below the regime where the layer series is certified."""


class PointTooCloseToContour(CMCDError):
    pass


class AtPole(CMCDError):
    pass


class BranchGuard(CMCDError):
    pass


class InsideRhoX(CMCDError):
    pass


class OnContour(CMCDError):
    pass


class ThetaDomainError(CMCDError):
    """Theta is only defined on the open left half-plane."""


class TooCloseToAj(CMCDError):
    pass


class OnExceptionalPoint(CMCDError):
    pass


class NotTwoCircle(CMCDError):
    pass


class NonConvergence(CMCDError):
    pass


class ConfigError(CMCDError):
    pass
