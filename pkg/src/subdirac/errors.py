"""Exception hierarchy."""


class SubdiracError(Exception):
    """Base class for all errors raised by the package."""


class InvalidDimensionError(SubdiracError, ValueError):
    pass


class InvalidFormError(SubdiracError, ValueError):
    pass


class InvalidInclusionError(SubdiracError, ValueError):
    pass


class ValidationError(SubdiracError, ValueError):
    pass


class SpinInvariantError(SubdiracError):
    """Conjugation by a spin element left the span of the generators."""


class LiftAmbiguityError(SubdiracError):
    def __init__(self, msg, edge=None):
        super().__init__(msg)
        self.edge = edge


class DegenerateImmersionError(SubdiracError):
    def __init__(self, msg, index=None):
        super().__init__(msg)
        self.index = index


class FrameError(SubdiracError):
    pass


class AccuracyError(SubdiracError):
    pass


class FocalRadiusError(SubdiracError, ValueError):
    pass


class NonConformalChartError(SubdiracError):
    pass


class UnsupportedCaseError(SubdiracError, ValueError):
    pass


class FrameRequirementError(SubdiracError):
    pass


class InvalidMetricError(SubdiracError, ValueError):
    pass


class DimensionMismatchError(SubdiracError, ValueError):
    pass


class NonConformalDataError(SubdiracError):
    pass


class DegenerateSpinorError(SubdiracError):
    pass


class InconsistentSpinorError(SubdiracError):
    pass


class CatalogError(SubdiracError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ConfigError(SubdiracError, ValueError):
    pass
