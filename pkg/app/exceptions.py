class BatteryError(Exception):
    """
    Base error for the nonreciprocal battery toolkit.

    Every error carries a machine-readable ``code``, a human ``detail`` and the
    process ``exit_code`` the command line front end reports for it.
    """
    code = "BATTERY_ERROR"
    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def __str__(self) -> str:
        return f"{self.code}: {self.detail}"


# Configuration errors (exit 2)
class InvalidConfig(BatteryError):
    code = "INVALID_CONFIG"
    exit_code = 2


class NegativeRate(InvalidConfig):
    code = "NEGATIVE_RATE"


class FrequencyMismatch(InvalidConfig):
    code = "FREQUENCY_MISMATCH"


class ZeroSharedCoupling(InvalidConfig):
    code = "ZERO_SHARED_COUPLING"


class InvalidGrid(InvalidConfig):
    code = "INVALID_GRID"


class UnknownFigure(InvalidConfig):
    code = "UNKNOWN_FIGURE"


# Integration and solve guards (exit 3)
class IntegrationError(BatteryError):
    code = "INTEGRATION_ERROR"
    exit_code = 3


class StepTooLarge(IntegrationError):
    code = "STEP_TOO_LARGE"


class SingularSystem(IntegrationError):
    code = "SINGULAR_SYSTEM"


# Verification failures (exit 4)
class VerificationFailed(BatteryError):
    code = "VERIFICATION_FAILED"
    exit_code = 4


class ConsistencyError(VerificationFailed):
    code = "CONSISTENCY_ERROR"


# Closed-form preconditions (exit 5)
class EvaluationError(BatteryError):
    code = "EVALUATION_ERROR"
    exit_code = 5


class NotNonreciprocal(EvaluationError):
    code = "NOT_NONRECIPROCAL"


class NotResonant(EvaluationError):
    code = "NOT_RESONANT"


class AsymmetricRates(EvaluationError):
    code = "ASYMMETRIC_RATES"


class ZeroLocalDamping(EvaluationError):
    code = "ZERO_LOCAL_DAMPING"


class NotUnderdamped(EvaluationError):
    code = "NOT_UNDERDAMPED"


class DivisionByZero(EvaluationError):
    code = "DIVISION_BY_ZERO"


class NumericalResidue(EvaluationError):
    code = "NUMERICAL_RESIDUE"


class OutputError(InvalidConfig):
    code = "OUTPUT_ERROR"
