"""
Exceptions raised by kneadlab.

Every error carries the exit code the command line reports for it.
"""


class KneadLabError(Exception):
    """Base class for all kneadlab errors."""

    exit_code = 1

    def __init__(self, message: str = "", **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def __str__(self):
        return self.message or self.__class__.__name__


class InvalidParameter(KneadLabError):
    """A parameter lies outside the window where the map is defined."""

    exit_code = 2


class NotSelfMap(InvalidParameter):
    """f_a does not map its core interval into itself (a > 2^{1/(r-1)})."""


class OrbitEscaped(KneadLabError):
    """The critical orbit left every candidate core interval."""

    exit_code = 3


class InadmissibleWord(KneadLabError):
    """No parameter realizes the requested kneading word."""

    exit_code = 4


class NoBracket(InadmissibleWord):
    pass


class PrefixMismatch(InadmissibleWord):
    pass


class BranchDomain(InadmissibleWord):
    """An argument of a 1/r-th root is not positive."""


class BranchDomainDuringIteration(BranchDomain):
    def __init__(self, message: str = "", iterate=None, iteration: int = 0):
        super().__init__(message, iterate=iterate, iteration=iteration)
        self.iterate = iterate
        self.iteration = iteration


class NoConvergence(InadmissibleWord):
    pass


class MonotonicityViolation(KneadLabError):
    exit_code = 5


class VerificationFailed(KneadLabError):
    exit_code = 6


class NearCriticalOrbit(KneadLabError):
    """The critical orbit passes too close to 0 for the requested identity."""


class NearCritical(NearCriticalOrbit):
    pass


class NotSuperstable(KneadLabError):
    pass


class DepthTooLarge(KneadLabError):
    """The preimage tree grew past the configured node budget."""
