"""Exception hierarchy shared by all pipeline stages."""


class RiskContextError(Exception):
    """Base class for every domain error raised by this package."""


class ConfigurationError(RiskContextError):
    """Invalid configuration value (bad sizes, mismatched lengths, ...)."""


class MappingError(RiskContextError):
    """A diagnosis code could not be resolved through the CCS crosswalk."""


class SplitError(RiskContextError):
    """Requested data split cannot give every partition at least one row."""


class DegenerateLabelError(RiskContextError):
    """Training labels contain a single class."""


class DivergenceError(RiskContextError):
    """Training loss became non-finite."""


class ShapeError(RiskContextError):
    """Input width does not match the model."""


class AucUndefinedError(RiskContextError):
    """AUC requested on single-class labels."""


class InputError(RiskContextError):
    """Malformed input to an explainer or aggregator."""


class StructureError(RiskContextError):
    """Guideline HTML lacks the expected evidence structure."""


class ValidationError(RiskContextError):
    """A serialized document violates its schema."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{message} (at {path})" if path else message)
        self.path = path


class QueryError(RiskContextError):
    """A retrieval query is empty or unusable."""


class NotFoundError(RiskContextError):
    """A referenced patient or artifact does not exist."""


class DependencyError(RiskContextError):
    """A required store or artifact has not been built yet."""

    def __init__(self, message: str, missing: str = ""):
        super().__init__(message)
        self.missing = missing
