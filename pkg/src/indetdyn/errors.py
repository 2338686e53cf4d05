"""Exception hierarchy shared by all modules."""


class IndetDynError(Exception):
    """Base class for every error raised by this package."""


class IllConditioned(IndetDynError):
    """Root clustering could not decide a multiplicity at the requested radius."""


class NonConvergence(IndetDynError):
    pass


class CoefficientOverflow(IndetDynError):
    pass


class DegenerateInput(IndetDynError):
    pass


class ConstantAtInfinity(IndetDynError):
    """The map sends the line at infinity to a single point."""


class NoIndeterminacy(IndetDynError):
    pass


class NotInClass(IndetDynError):
    """Input violates a normal-form invariant of the class of maps studied."""


class IndeterminateEvaluation(IndetDynError):
    pass


class CapExceeded(IndetDynError):
    pass


class TreeTooShallow(IndetDynError):
    pass


class OrbitHitsE(IndetDynError):
    pass


class WeightNotStabilized(IndetDynError):
    pass


class InadmissibleWord(IndetDynError):
    pass


class RestEntered(IndetDynError):
    pass


class InsufficientSamples(IndetDynError):
    pass


class NonIntegerExponent(IndetDynError):
    pass


class DegenerateTarget(IndetDynError):
    pass


class SeparationFailure(IndetDynError):
    pass


class CertificateFailure(IndetDynError):
    def __init__(self, message, sample=None):
        super().__init__(message)
        self.sample = sample


class OrbitLost(IndetDynError):
    pass


class ParseError(IndetDynError):
    pass


class HypothesisViolation(IndetDynError):
    """A standing hypothesis of the construction fails for this map."""
