"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Malformed or inconsistent input data."""


class SupportError(ValidationError):
    """Mass found outside the allowed region."""

    def __init__(self, message: str, leaked_mass: float = 0.0):
        super().__init__(message)
        self.leaked_mass = leaked_mass


class RangeError(ValueError):
    """Scalar argument outside the documented range of an operation."""


class SingularityError(ValueError):
    """Kernel evaluated at its singular point."""


class InfeasibilityError(ValueError):
    """Mass and first-moment data admit no two-block target."""


class AdmissibilityError(ValueError):
    """Density exceeds the unit bound or the support leaves the domain."""


class ParameterError(ValidationError):
    """Parameter set violates the constraints of a named family."""


class SamplingError(ValueError):
    """Sampling requested from a degenerate measure."""


class VerificationError(RuntimeError):
    """A construct-then-verify check failed; carries the certificate."""

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate
