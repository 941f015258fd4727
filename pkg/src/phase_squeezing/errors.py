from typing import Optional


class SqueezingError(Exception):
    """Base class for every error raised by the package"""


class ParameterError(SqueezingError, ValueError):
    """Physical parameters violate the model conventions"""


class NumericalError(SqueezingError):
    """A numerical operation cannot produce a trustworthy result"""

    operation = 'numerics'

    def __init__(self, message: str, operation: Optional[str] = None):
        if operation is not None:
            self.operation = operation
        super().__init__(f"{self.operation}: {message}")


class SingularLiouvillian(NumericalError):
    operation = 'steady_state'


class StepSizeTooLarge(NumericalError):
    operation = 'evolve'


class NotHermitian(NumericalError):
    operation = 'to_density_matrix'


class ResolventSingular(NumericalError):
    operation = 'resolvent'


class HorizonTooShort(NumericalError):
    operation = 'time_domain_spectrum_oracle'


class DegenerateSpectrum(NumericalError):
    operation = 'diagonalize'


class OutsideAnalyticRegime(NumericalError):
    operation = 'squeezing_parameter_analytic'


class ConfigError(SqueezingError):
    """Run configuration could not be used"""


class ParseError(ConfigError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ValidationError(ConfigError):
    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")
