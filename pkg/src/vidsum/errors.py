"""Exception types raised across the toolkit.

Every error carries the name of the subsystem it originates from so CLI
diagnostics can point at the failing stage and file without a traceback.
"""


class VidsumError(Exception):
    """Base class for all toolkit errors."""

    module = "vidsum"

    def __str__(self) -> str:  # noqa: D105
        return f"[{self.module}] {super().__str__()}"


# --- ingestion ---

class IngestionError(VidsumError):
    module = "ingestion"


class MissingField(IngestionError):
    pass


class BadPath(IngestionError):
    pass


class NonPositiveFps(IngestionError):
    pass


class TooFewFrames(IngestionError):
    pass


class DecodeError(IngestionError):
    pass


class MissingMap(IngestionError):
    pass


class SizeMismatch(IngestionError):
    pass


# --- color features ---

class ColorFeatureError(VidsumError):
    module = "color_features"


class BadBinCount(ColorFeatureError):
    pass


class BinMismatch(ColorFeatureError):
    pass


# --- fusion ---

class FusionError(VidsumError):
    module = "fusion"


class LengthMismatch(FusionError):
    pass


class WrongArity(FusionError):
    pass


class MissingWeights(FusionError):
    pass


class EvenWindow(FusionError):
    pass


# --- selection ---

class SelectionError(VidsumError):
    module = "selection"


class SeriesTooShort(SelectionError):
    pass


# --- evaluation ---

class EvaluationError(VidsumError):
    module = "evaluation"


class ZeroCandidates(EvaluationError):
    pass


class ZeroGroundTruth(EvaluationError):
    pass


# --- cli / configuration ---

class ConfigError(VidsumError):
    module = "config"
