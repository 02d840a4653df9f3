"""Exception hierarchy shared by every module in the package."""


class CurvstabError(Exception):
    """Base class for all package errors."""


class InvalidSpectralData(CurvstabError, ValueError):
    """Spectral inputs violate a Lichnerowicz/Bochner bound or a kind invariant."""


class UnsupportedCombination(CurvstabError):
    """No closed-form second variation is available for this functional/direction pair."""


class NotCritical(CurvstabError):
    """The metric is not a critical point of the functional for the requested data."""


class MissingFactorData(CurvstabError):
    """A factor-level fact needed by a computation was not supplied."""


class DomainError(CurvstabError, ValueError):
    pass


class DegenerateMetric(CurvstabError):
    pass


class NotIntegrable(CurvstabError):
    """Global integrals were requested on a chart-only model."""


class QuadratureNotConverged(CurvstabError):
    pass


class StepSelectionFailed(CurvstabError):
    pass


class FitIllConditioned(CurvstabError):
    pass


class ModelUnavailable(CurvstabError):
    pass


class ConfigError(CurvstabError):
    """Invalid run configuration; ``path`` names the offending field."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.reason = message
