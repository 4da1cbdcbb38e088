"""Exception hierarchy shared across the pipeline.

Every error carries a stable ``category`` string so the CLI and the HTTP
service can emit machine-parsable error reports without string-matching
Python class names.
"""


class ElectrifyError(Exception):
    """Base class for all pipeline errors."""

    category = "Error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


# --- GTFS ingest ---

class MissingFile(ElectrifyError):
    category = "MissingFile"


class MalformedRow(ElectrifyError):
    category = "MalformedRow"

    def __init__(self, message: str, filename: str = "", line: int = 0):
        super().__init__(message)
        self.filename = filename
        self.line = line


class DanglingReference(ElectrifyError):
    category = "DanglingReference"


class UnknownRouteName(ElectrifyError):
    category = "UnknownRouteName"


class NoTrips(ElectrifyError):
    category = "NoTrips"


# --- geo enrichment ---

class DegenerateSegment(ElectrifyError):
    category = "DegenerateSegment"


class GradeOutOfRange(ElectrifyError):
    category = "GradeOutOfRange"


class MissingGeoData(ElectrifyError):
    category = "MissingGeoData"


class ProviderUnavailable(ElectrifyError):
    category = "ProviderUnavailable"


class PartialCoverage(ElectrifyError):
    category = "PartialCoverage"

    def __init__(self, message: str, unresolved: list | None = None):
        super().__init__(message)
        self.unresolved = list(unresolved or [])


# --- drive cycle / physics ---

class NonUniformTimestep(ElectrifyError):
    category = "NonUniformTimestep"


class NegativeSpeed(ElectrifyError):
    category = "NegativeSpeed"


class ZeroDistanceCycle(ElectrifyError):
    category = "ZeroDistanceCycle"


# --- surrogate ---

class EmptyGradeSource(ElectrifyError):
    category = "EmptyGradeSource"


class NonConvergence(ElectrifyError):
    category = "NonConvergence"

    def __init__(self, message: str, iterations: int = 0, last_delta: float = float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.last_delta = last_delta


class ModelMissing(ElectrifyError):
    category = "ModelMissing"


# --- fleet / valuation ---

class ZeroCycleLength(ElectrifyError):
    category = "ZeroCycleLength"


class NonPositiveSpeed(ElectrifyError):
    category = "NonPositiveSpeed"


class NonPositiveFE(ElectrifyError):
    category = "NonPositiveFE"


# --- analysis / reporting ---

class AllZeroImpacts(ElectrifyError):
    category = "AllZeroImpacts"


class WriteFailure(ElectrifyError):
    category = "WriteFailure"


# --- configuration ---

class ConfigError(ElectrifyError):
    category = "ConfigError"

    def __init__(self, message: str, field: str = ""):
        super().__init__(message)
        self.field = field


class MissingInput(ConfigError):
    """A required flag/config entry was not supplied; a usage error (exit 2)."""

    category = "MissingInput"
