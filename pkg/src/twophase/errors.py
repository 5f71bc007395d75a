"""Exception hierarchy.

Two families: `ModelError` for inputs that violate the model's hypotheses,
and `NumericalError` for solver breakdowns. The CLI maps the first to exit
code 2 and the second to exit code 3.
"""


class TwoPhaseError(Exception):
    pass


class ModelError(TwoPhaseError, ValueError):
    pass


class NumericalError(TwoPhaseError, ArithmeticError):
    pass


class TemperatureOutOfRange(ModelError):
    pass


class NoZeroFound(ModelError):
    pass


class MultipleZeros(ModelError):
    pass


class EmptyPhase(ModelError):
    pass


class DegenerateConfiguration(ModelError):
    pass


class SingularSystem(ModelError):
    pass


class GridMismatch(ModelError):
    pass


class GammaZero(ModelError):
    """Kinetic undercooling vanishes; the reduced dispersion relation needs 1/gamma."""


class ModeExcluded(ModelError):
    pass


class ConfigError(ModelError):
    pass


class NoRootInRange(NumericalError):
    pass


class QuadratureFailure(NumericalError):
    pass


class SolveFailure(NumericalError):
    pass


class EigensolveFailure(NumericalError):
    pass


class NotPSD(NumericalError):
    pass


class RangeExit(NumericalError):
    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class StepFailure(NumericalError):
    pass


class DropletCollapse(NumericalError):
    pass
