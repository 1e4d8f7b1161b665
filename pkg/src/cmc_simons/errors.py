"""Exception hierarchy shared across the package."""


class CmcSimonsError(Exception):
    """Base class for all errors raised by this package."""


class InsufficientJetOrder(CmcSimonsError):
    pass


class JetDomainError(CmcSimonsError, ValueError):
    pass


class ChartDomainError(CmcSimonsError, ValueError):
    """A point lies outside the coordinate chart."""


class DegenerateParametrization(CmcSimonsError):
    pass


class AdaptedFrameUndefined(CmcSimonsError):
    """|cos(beta)| fell below the gate: the vertical field is (nearly) normal."""


class CmcRequired(CmcSimonsError):
    pass


class NonCompact(CmcSimonsError):
    pass


class VerticalPoint(CmcSimonsError, ValueError):
    """t = tan(beta/2) with t**2 == 1, i.e. cos(beta) == 0."""


class ZeroTau(CmcSimonsError, ValueError):
    pass


class NegativeDiscriminant(CmcSimonsError):
    pass


class WrongCurvatureRegime(CmcSimonsError, ValueError):
    pass


class ConfigError(CmcSimonsError, ValueError):
    pass
