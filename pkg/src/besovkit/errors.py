"""Exception hierarchy shared by all modules."""


class BesovKitError(Exception):
    """Base class for every error raised by the package."""


class DomainError(BesovKitError, ValueError):
    pass


class BranchError(BesovKitError, ValueError):
    pass


class PoleError(BesovKitError, ZeroDivisionError):
    pass


class CriticalPointError(PoleError):
    """Raised where F' vanishes and N_F = F''/F' is undefined."""


class UnknownName(BesovKitError, KeyError):
    pass


class KindDomainError(BesovKitError, ValueError):
    """A seminorm parameter (p or gamma) lies outside its admissible range."""


class FiberError(BesovKitError, ValueError):
    pass


class SupportError(BesovKitError, ValueError):
    pass


class HypothesisError(BesovKitError, ValueError):
    pass


class UsageError(BesovKitError, ValueError):
    pass
