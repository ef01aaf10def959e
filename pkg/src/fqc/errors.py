"""Exception hierarchy.

Every error carries a ``module`` tag so the command line can report where a
pipeline failed and map it onto an exit code.
"""


class FQCError(Exception):
    module = "fqc"
    exit_code = 3


class ConfigError(FQCError):
    module = "cli"
    exit_code = 1


class ValidationError(FQCError):
    exit_code = 2


class NumericError(FQCError):
    exit_code = 3


# varcomb

class NonPositiveMinor(ValidationError):
    module = "varcomb"

    def __init__(self, subset, value):
        self.subset = tuple(subset)
        self.value = value
        super().__init__(f"minor L_{self.subset} = {value!r} is not positive")


class RankDeficient(ValidationError):
    module = "varcomb"


class PrecisionTooLow(FQCError):
    module = "varcomb"
    exit_code = 1


# curve

class NonRealRoots(ValidationError):
    module = "curve"


class MultipleRoot(ValidationError):
    module = "curve"


class InterlacingViolation(ValidationError):
    module = "curve"

    def __init__(self, location, message=""):
        self.location = location
        super().__init__(message or f"zeros and poles do not interlace near t = {location!r}")


class InjectivityFailure(ValidationError):
    module = "curve"

    def __init__(self, t1, t2):
        self.t1, self.t2 = t1, t2
        super().__init__(f"parametrization is not injective on the real line: t = {t1!r} and t = {t2!r}")


class OffTorusVariationFailure(ValidationError):
    module = "curve"

    def __init__(self, t, observed):
        self.t, self.observed = t, observed
        super().__init__(f"var(log|psi(t)|) = {observed} at t = {t!r}")


class LiftDiscontinuity(NumericError):
    module = "curve"


# pointset / spectrum / fourier / diffraction

class ResidualFailure(NumericError):
    module = "pointset"


class WindowEmpty(NumericError):
    module = "pointset"


class TooFewPoints(NumericError):
    module = "pointset"


class QuadratureStall(NumericError):
    module = "fourier"


class UnsupportedDegree(FQCError):
    module = "fourier"


class TruncationInsufficient(NumericError):
    module = "fourier"


class WindowTooSmall(NumericError):
    module = "diffraction"
