class MotionSegError(Exception):
    """Base error; carries the failing module and optional frame/row/column context."""

    module = "motionseg"

    def __init__(
        self,
        message: str,
        *,
        frame: int | None = None,
        row: int | None = None,
        column: str | None = None,
    ) -> None:
        super().__init__(message)
        self.message = message
        self.frame = frame
        self.row = row
        self.column = column

    def __str__(self) -> str:
        context = [
            f"{name}={value}"
            for name, value in (
                ("frame", self.frame),
                ("row", self.row),
                ("column", self.column),
            )
            if value is not None
        ]
        suffix = f" ({', '.join(context)})" if context else ""
        return f"[{self.module}] {self.message}{suffix}"


class IngestError(MotionSegError):
    module = "ingest"


class FeatureError(MotionSegError):
    module = "features"


class NeighborhoodError(MotionSegError):
    module = "neighborhood"


class SegmentationError(MotionSegError):
    module = "activity_segmentation"


class PrimitiveError(MotionSegError):
    module = "primitive_detection"


class SymmetryError(MotionSegError):
    module = "symmetry"


class ClusteringError(MotionSegError):
    module = "clustering"


class EvaluationError(MotionSegError):
    module = "evaluation"


class ConfigError(MotionSegError):
    module = "config"
