from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
import structlog
from pydantic import BaseModel, Field, model_validator

logger = structlog.get_logger(__name__)

RESERVED_LABELS = ("transition", "uncertain")

SymmetryClass = Literal["symmetric", "phase_shifted", "asymmetric", "mixed"]


@dataclass
class TimeSeries:
    """A multichannel recording.

    Attributes:
        samples: m × N matrix, one row per frame.
        rate: Sampling rate in frames per second.
        channel_names: One unique name per column.
    """

    samples: np.ndarray
    rate: float
    channel_names: list[str]

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 2:
            raise ValueError("samples must be a 2-D frame × channel matrix")
        if self.samples.shape[1] != len(self.channel_names):
            raise ValueError(
                f"{self.samples.shape[1]} columns but"
                f" {len(self.channel_names)} channel names"
            )
        if len(set(self.channel_names)) != len(self.channel_names):
            raise ValueError("channel names must be unique")
        if not self.rate > 0:
            raise ValueError("rate must be positive")

    @property
    def frame_count(self) -> int:
        return int(self.samples.shape[0])

    @property
    def channel_count(self) -> int:
        return int(self.samples.shape[1])

    def with_samples(
        self, samples: np.ndarray, rate: float | None = None
    ) -> "TimeSeries":
        return TimeSeries(
            samples=samples,
            rate=self.rate if rate is None else rate,
            channel_names=list(self.channel_names),
        )


@dataclass
class FeatureSequence:
    vectors: np.ndarray
    offsets: list[int]
    source_dim: int
    bundled: bool = False
    rate: float = 30.0
    channel_names: list[str] = field(default_factory=list)

    @property
    def frame_count(self) -> int:
        return int(self.vectors.shape[0])

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])


class Interval(BaseModel):
    """Closed frame interval [start, end], 0-based."""

    start: int = Field(ge=0)
    end: int = Field(ge=0)

    @model_validator(mode="after")
    def _ordered(self) -> "Interval":
        if self.end < self.start:
            raise ValueError(f"interval end {self.end} precedes start {self.start}")
        return self

    @property
    def length(self) -> int:
        return self.end - self.start + 1

    def contains(self, frame: int) -> bool:
        return self.start <= frame <= self.end

    def overlap(self, other: "Interval") -> int:
        return max(0, min(self.end, other.end) - max(self.start, other.start) + 1)


class GrownRegion(BaseModel):
    """A region produced by one region-growing pass.

    Forward regions grow from `start` (the seed) and close at `corner`; backward
    regions grow from `end` (the seed) and close at `corner`. A region that never
    met a neighbor has no corner.
    """

    start: int
    end: int
    corner: int | None = None


class ActivitySegmentation(BaseModel):
    frame_count: int
    activities: list[Interval] = []
    transitions: list[Interval] = []

    @model_validator(mode="after")
    def _partition(self) -> "ActivitySegmentation":
        spans = sorted(self.activities + self.transitions, key=lambda it: it.start)
        cursor = 0
        for span in spans:
            if span.start != cursor:
                raise ValueError(f"segmentation does not partition frames at {cursor}")
            cursor = span.end + 1
        if cursor != self.frame_count:
            raise ValueError(
                f"segmentation covers {cursor} of {self.frame_count} frames"
            )
        return self


class WarpingPath(BaseModel):
    entries: list[tuple[int, int]]
    cost: float

    @property
    def start(self) -> tuple[int, int]:
        return self.entries[0]

    @property
    def end(self) -> tuple[int, int]:
        return self.entries[-1]

    @property
    def length(self) -> int:
        return len(self.entries)

    @property
    def span(self) -> int:
        """Frames covered on the trial (row) axis."""
        return self.end[0] - self.start[0] + 1

    @property
    def slope(self) -> float:
        advance_a = self.end[0] - self.start[0]
        advance_b = self.end[1] - self.start[1]
        if advance_b == 0:
            return float("inf") if advance_a else 1.0
        return advance_a / advance_b


class CutCandidate(BaseModel):
    frame: int
    cost: float


class MotionPrimitive(BaseModel):
    index: int
    start: int
    end: int
    activity: int
    cluster: int | None = None

    @property
    def length(self) -> int:
        return self.end - self.start + 1

    @property
    def interval(self) -> Interval:
        return Interval(start=self.start, end=self.end)


class SymmetryReport(BaseModel):
    activity: int
    classification: SymmetryClass
    original_cuts: list[int]
    mirrored_cuts: list[int]
    merged_cuts: list[int]


class ClusterEdge(BaseModel):
    source: int
    target: int
    cost: float


class ClusterGraph(BaseModel):
    node_count: int
    edges: list[ClusterEdge] = []
    clusters: list[list[int]] = []

    def cluster_of(self, node: int) -> int:
        for label, members in enumerate(self.clusters):
            if node in members:
                return label
        raise KeyError(node)


class LabeledInterval(Interval):
    label: str


class KeyPoint(BaseModel):
    frame: int = Field(ge=0)
    label: str


class GroundTruth(BaseModel):
    frame_count: int | None = None
    intervals: list[LabeledInterval] = []
    keypoints: list[KeyPoint] = []

    @model_validator(mode="after")
    def _disjoint(self) -> "GroundTruth":
        ordered = sorted(self.intervals, key=lambda it: it.start)
        for prev, cur in zip(ordered, ordered[1:], strict=False):
            if cur.start <= prev.end:
                raise ValueError(
                    f"annotations overlap at frames {cur.start}-{prev.end}"
                )
        return self

    @property
    def kind(self) -> Literal["intervals", "keypoints"]:
        return "keypoints" if self.keypoints and not self.intervals else "intervals"

    def frame_labels(self, frame_count: int) -> list[str]:
        """Per-frame labels; frames outside every interval are transitions."""
        labels = ["transition"] * frame_count
        for interval in self.intervals:
            for frame in range(interval.start, min(interval.end, frame_count - 1) + 1):
                labels[frame] = interval.label
        return labels


class KeypointStats(BaseModel):
    histogram: list[int]
    bin_edges: list[float]
    positions: list[float]
    per_class_std: dict[str, float]
    in_transitions: int = 0


class OverlapStats(BaseModel):
    boundary_distances: list[int]
    boundary_mean: float
    boundary_std: float
    overlaps: list[float]
    overlap_mean: float
    overlap_std: float = 0.0


class EvalReport(BaseModel):
    mode: Literal["strict", "tolerant"] = "strict"
    strict_accuracy: float | None = None
    tolerant_accuracy: float | None = None
    cluster_labels: dict[int, str] = {}
    intra_cluster_variance: dict[int, float] = {}
    keypoints: KeypointStats | None = None
    overlap: OverlapStats | None = None

    @property
    def accuracy(self) -> float | None:
        return self.strict_accuracy if self.mode == "strict" else self.tolerant_accuracy


def _span(start: int, end: int) -> dict[str, int]:
    return {"start": start + 1, "end": end + 1}


class SegmentationResult(BaseModel):
    """Everything one pipeline run produces, 0-based in memory."""

    meta: dict[str, Any] = {}
    segmentation: ActivitySegmentation
    primitives: list[MotionPrimitive] = []
    clusters: ClusterGraph | None = None
    symmetry: list[SymmetryReport] = []

    def to_document(self) -> dict[str, Any]:
        """Serializable form written as seg.json; frames are 1-based inclusive."""
        clusters = self.clusters or ClusterGraph(node_count=len(self.primitives))
        return {
            "meta": self.meta,
            "activities": [
                {"index": idx, **_span(it.start, it.end)}
                for idx, it in enumerate(self.segmentation.activities)
            ],
            "transitions": [
                _span(it.start, it.end) for it in self.segmentation.transitions
            ],
            "primitives": [
                {
                    "index": prim.index,
                    **_span(prim.start, prim.end),
                    "activity": prim.activity,
                    "cluster": prim.cluster,
                }
                for prim in self.primitives
            ],
            "clusters": [
                {"index": label, "members": members}
                for label, members in enumerate(clusters.clusters)
            ],
            "cluster_edges": [edge.model_dump() for edge in clusters.edges],
            "symmetry": [
                {
                    "activity": report.activity,
                    "classification": report.classification,
                    "original_cuts": [cut + 1 for cut in report.original_cuts],
                    "mirrored_cuts": [cut + 1 for cut in report.mirrored_cuts],
                    "merged_cuts": [cut + 1 for cut in report.merged_cuts],
                }
                for report in self.symmetry
            ],
        }

    @classmethod
    def from_document(cls, document: dict[str, Any]) -> "SegmentationResult":
        meta = document.get("meta", {})
        frame_count = int(meta["frame_count"])

        def interval(item: dict[str, Any]) -> Interval:
            return Interval(start=item["start"] - 1, end=item["end"] - 1)

        primitives = [
            MotionPrimitive(
                index=item["index"],
                start=item["start"] - 1,
                end=item["end"] - 1,
                activity=item["activity"],
                cluster=item.get("cluster"),
            )
            for item in document.get("primitives", [])
        ]
        clusters = ClusterGraph(
            node_count=len(primitives),
            edges=[
                ClusterEdge.model_validate(e)
                for e in document.get("cluster_edges", [])
            ],
            clusters=[item["members"] for item in document.get("clusters", [])],
        )
        return cls(
            meta=meta,
            segmentation=ActivitySegmentation(
                frame_count=frame_count,
                activities=[
                    interval(item) for item in document.get("activities", [])
                ],
                transitions=[
                    interval(item) for item in document.get("transitions", [])
                ],
            ),
            primitives=primitives,
            clusters=clusters,
            symmetry=[
                SymmetryReport(
                    activity=item["activity"],
                    classification=item["classification"],
                    original_cuts=[cut - 1 for cut in item["original_cuts"]],
                    mirrored_cuts=[cut - 1 for cut in item["mirrored_cuts"]],
                    merged_cuts=[cut - 1 for cut in item["merged_cuts"]],
                )
                for item in document.get("symmetry", [])
            ],
        )
