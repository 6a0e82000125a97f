"""Scores for a segmentation against annotations, plus cluster compactness."""

import math
import re
from collections import Counter
from typing import Literal

import numpy as np
import structlog
from scipy.spatial.distance import cdist

from .errors import EvaluationError
from .models import (
    RESERVED_LABELS,
    EvalReport,
    GroundTruth,
    KeyPoint,
    KeypointStats,
    LabeledInterval,
    MotionPrimitive,
    OverlapStats,
    SegmentationResult,
)

logger = structlog.get_logger(__name__)

AccuracyMode = Literal["strict", "tolerant"]
HISTOGRAM_BINS = 10
TRIPLET_PATTERN = re.compile(r"^(?P<joint>.+)_(?P<axis>[xyz])$")


def _cluster_keys(primitives: list[MotionPrimitive]) -> list[tuple[str, int]]:
    # unclustered primitives vote on their own
    return [
        ("cluster", prim.cluster)
        if prim.cluster is not None
        else ("primitive", prim.index)
        for prim in primitives
    ]


def cluster_labels(
    primitives: list[MotionPrimitive],
    frame_labels: list[str],
) -> dict[tuple[str, int], str]:
    """Majority ground-truth label per cluster, ignoring reserved labels."""
    votes: dict[tuple[str, int], Counter[str]] = {}
    for key, prim in zip(_cluster_keys(primitives), primitives, strict=True):
        counter = votes.setdefault(key, Counter())
        for frame in range(prim.start, min(prim.end, len(frame_labels) - 1) + 1):
            label = frame_labels[frame]
            if label not in RESERVED_LABELS:
                counter[label] += 1
    labels: dict[tuple[str, int], str] = {}
    for key, counter in votes.items():
        if counter:
            # ties go to the alphabetically first label
            labels[key] = min(counter.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        else:
            labels[key] = "transition"
    return labels


def frame_accuracy(
    result: SegmentationResult,
    gt: GroundTruth,
    mode: AccuracyMode = "strict",
    aliases: dict[str, str] | None = None,
) -> float:
    """Share of frames whose predicted label matches the annotation.

    A primitive's frames are predicted as its cluster's majority label, frames
    outside primitives as `transition`. Predicted transitions match reserved
    annotations; in tolerant mode reserved annotations match anything.
    """
    if mode not in ("strict", "tolerant"):
        raise EvaluationError(f"unknown accuracy mode {mode!r}")
    if not gt.intervals:
        raise EvaluationError("frame accuracy needs interval annotations")
    m = result.segmentation.frame_count
    aliases = aliases or {}
    truth = [aliases.get(label, label) for label in gt.frame_labels(m)]
    labels = cluster_labels(result.primitives, truth)

    predicted = ["transition"] * m
    keys = _cluster_keys(result.primitives)
    for key, prim in zip(keys, result.primitives, strict=True):
        for frame in range(prim.start, prim.end + 1):
            predicted[frame] = labels[key]

    correct = 0
    for pred, label in zip(predicted, truth, strict=True):
        reserved = label in RESERVED_LABELS
        if pred == label or (reserved and (pred == "transition" or mode == "tolerant")):
            correct += 1
    return correct / m


def dtw(
    seq_a: np.ndarray,
    seq_b: np.ndarray,
    local: np.ndarray | None = None,
) -> tuple[float, list[tuple[int, int]]]:
    """Classical DTW with steps (1,0), (0,1), (1,1) and summed frame distances.

    Args:
        seq_a: n × D sequence.
        seq_b: p × D sequence.
        local: Precomputed n × p local cost matrix; Euclidean by default.

    Returns:
        Total cost and the optimal alignment from (0, 0) to (n−1, p−1).
    """
    if local is None:
        local = cdist(np.atleast_2d(seq_a), np.atleast_2d(seq_b))
    n, p = local.shape
    if n == 0 or p == 0:
        raise EvaluationError("dtw needs non-empty sequences")
    acc = np.full((n + 1, p + 1), math.inf)
    acc[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, p + 1):
            best = min(acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1])
            acc[i, j] = local[i - 1, j - 1] + best
    path = [(n - 1, p - 1)]
    i, j = n, p
    while (i, j) != (1, 1):
        moves = (
            (acc[i - 1, j - 1], i - 1, j - 1),
            (acc[i - 1, j], i - 1, j),
            (acc[i, j - 1], i, j - 1),
        )
        _, i, j = min(moves, key=lambda move: move[0])
        path.append((i - 1, j - 1))
    path.reverse()
    return float(acc[n, p]), path


def joint_triplets(channel_names: list[str]) -> list[tuple[int, int, int]]:
    """Column indices of every `<joint>_x/_y/_z` channel triplet, in channel order."""
    axes: dict[str, dict[str, int]] = {}
    for index, name in enumerate(channel_names):
        matched = TRIPLET_PATTERN.match(name)
        if matched:
            axes.setdefault(matched["joint"], {})[matched["axis"]] = index
    return [
        (found["x"], found["y"], found["z"])
        for found in axes.values()
        if {"x", "y", "z"} <= found.keys()
    ]


def point_cloud_distance(
    cloud_a: np.ndarray, cloud_b: np.ndarray, weights: np.ndarray | None = None
) -> float:
    """Distance between two 3-D point clouds after the best alignment of b onto a.

    The alignment is a rotation about the vertical (y) axis plus a translation
    in the floor (x–z) plane, solved in closed form.
    """
    cloud_a = np.asarray(cloud_a, dtype=np.float64).reshape(-1, 3)
    cloud_b = np.asarray(cloud_b, dtype=np.float64).reshape(-1, 3)
    if cloud_a.shape != cloud_b.shape:
        raise EvaluationError(
            f"point clouds differ in size: {cloud_a.shape} vs {cloud_b.shape}"
        )
    if weights is None:
        w = np.full(len(cloud_a), 1.0 / len(cloud_a))
    else:
        w = np.asarray(weights, dtype=np.float64) / np.sum(weights)
    x, y, z = cloud_a.T
    xb, yb, zb = cloud_b.T
    x_bar, z_bar, xb_bar, zb_bar = w @ x, w @ z, w @ xb, w @ zb
    theta = math.atan2(
        w @ (x * zb - xb * z) - (x_bar * zb_bar - xb_bar * z_bar),
        w @ (x * xb + z * zb) - (x_bar * xb_bar + z_bar * zb_bar),
    )
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    x0 = x_bar - xb_bar * cos_t - zb_bar * sin_t
    z0 = z_bar + xb_bar * sin_t - zb_bar * cos_t
    aligned_x = xb * cos_t + zb * sin_t + x0
    aligned_z = -xb * sin_t + zb * cos_t + z0
    squared = (x - aligned_x) ** 2 + (y - yb) ** 2 + (z - aligned_z) ** 2
    return float(math.sqrt(w @ squared))


def _clouds(
    seq: np.ndarray, triplets: list[tuple[int, int, int]], window: int
) -> list[np.ndarray]:
    half = window // 2
    m = seq.shape[0]
    points = seq[:, np.asarray(triplets).ravel()].reshape(m, len(triplets), 3)
    return [
        points[max(0, i - half) : min(m, i + half + 1)].reshape(-1, 3) for i in range(m)
    ]


def point_cloud_costs(
    seq_a: np.ndarray,
    seq_b: np.ndarray,
    triplets: list[tuple[int, int, int]],
    window: int = 1,
) -> np.ndarray:
    if not triplets:
        raise EvaluationError("point-cloud distance needs <joint>_x/_y/_z channels")
    clouds_a = _clouds(seq_a, triplets, window)
    clouds_b = _clouds(seq_b, triplets, window)
    costs = np.empty((len(clouds_a), len(clouds_b)))
    for i, a in enumerate(clouds_a):
        for j, b in enumerate(clouds_b):
            size = min(len(a), len(b))
            costs[i, j] = point_cloud_distance(a[:size], b[:size])
    return costs


def intra_cluster_variance(
    segments: list[np.ndarray],
    triplets: list[tuple[int, int, int]] | None = None,
    window: int = 1,
) -> float:
    """Σ over ordered pairs i≠j of DTW(s_i, s_j) / len(s_i).

    Undefined for fewer than two segments.
    """
    if len(segments) < 2:
        raise EvaluationError(
            f"intra-cluster variance needs at least 2 segments, got {len(segments)}"
        )
    total = 0.0
    for i, seg_i in enumerate(segments):
        for j, seg_j in enumerate(segments):
            if i == j:
                continue
            local = (
                point_cloud_costs(seg_i, seg_j, triplets, window) if triplets else None
            )
            cost, _ = dtw(seg_i, seg_j, local)
            total += cost / len(seg_i)
    return total


def cluster_variances(
    result: SegmentationResult,
    samples: np.ndarray,
    channel_names: list[str] | None = None,
    metric: Literal["euclidean", "point_cloud"] = "euclidean",
    window: int = 1,
) -> dict[int, float]:
    """D per cluster; singleton clusters have none and are left out."""
    triplets = joint_triplets(channel_names or []) if metric == "point_cloud" else None
    if metric == "point_cloud" and not triplets:
        raise EvaluationError("point-cloud metric needs <joint>_x/_y/_z channels")
    clusters = result.clusters.clusters if result.clusters is not None else []
    variances: dict[int, float] = {}
    for label, members in enumerate(clusters):
        if len(members) < 2:
            continue
        segments = [
            samples[result.primitives[k].start : result.primitives[k].end + 1]
            for k in members
        ]
        variances[label] = intra_cluster_variance(segments, triplets, window)
    return variances


def keypoint_consistency(
    primitives: list[MotionPrimitive],
    keypoints: list[KeyPoint],
    bins: int = HISTOGRAM_BINS,
) -> KeypointStats:
    """Relative position of each key point inside its enclosing primitive."""
    positions: list[float] = []
    by_class: dict[str, list[float]] = {}
    outside = 0
    for kp in keypoints:
        prim = next((p for p in primitives if p.start <= kp.frame <= p.end), None)
        if prim is None:
            outside += 1
            continue
        rel = (kp.frame - prim.start) / prim.length
        positions.append(rel)
        by_class.setdefault(kp.label, []).append(rel)
    histogram, edges = np.histogram(positions, bins=bins, range=(0.0, 1.0))
    return KeypointStats(
        histogram=[int(v) for v in histogram],
        bin_edges=[float(v) for v in edges],
        positions=positions,
        per_class_std={
            label: float(np.std(values)) for label, values in sorted(by_class.items())
        },
        in_transitions=outside,
    )


def interval_overlap(
    primitives: list[MotionPrimitive], intervals: list[LabeledInterval]
) -> OverlapStats:
    """Boundary distance to the nearest cut and best single-primitive overlap.

    Boundaries are fence posts: a primitive [s, e] contributes s and e + 1.
    Overlaps are percentages of each annotated interval.
    """
    if not primitives:
        raise EvaluationError("interval overlap needs at least one primitive")
    cuts = np.array(
        sorted({p.start for p in primitives} | {p.end + 1 for p in primitives})
    )
    distances: list[int] = []
    overlaps: list[float] = []
    for ann in intervals:
        if ann.label in RESERVED_LABELS:
            continue
        for bound in (ann.start, ann.end + 1):
            distances.append(int(np.abs(cuts - bound).min()))
        best = max(p.interval.overlap(ann) for p in primitives)
        overlaps.append(100.0 * best / ann.length)
    return OverlapStats(
        boundary_distances=distances,
        boundary_mean=float(np.mean(distances)) if distances else 0.0,
        boundary_std=float(np.std(distances)) if distances else 0.0,
        overlaps=overlaps,
        overlap_mean=float(np.mean(overlaps)) if overlaps else 0.0,
        overlap_std=float(np.std(overlaps)) if overlaps else 0.0,
    )


def evaluate(
    result: SegmentationResult,
    gt: GroundTruth,
    mode: AccuracyMode = "strict",
    aliases: dict[str, str] | None = None,
    samples: np.ndarray | None = None,
    channel_names: list[str] | None = None,
    metric: Literal["euclidean", "point_cloud"] = "euclidean",
    window: int = 1,
) -> EvalReport:
    report = EvalReport(mode=mode)
    if gt.intervals:
        report.strict_accuracy = frame_accuracy(result, gt, "strict", aliases)
        report.tolerant_accuracy = frame_accuracy(result, gt, "tolerant", aliases)
        aliases = aliases or {}
        truth = [
            aliases.get(label, label)
            for label in gt.frame_labels(result.segmentation.frame_count)
        ]
        report.cluster_labels = {
            key[1]: label
            for key, label in cluster_labels(result.primitives, truth).items()
            if key[0] == "cluster"
        }
        if result.primitives:
            report.overlap = interval_overlap(result.primitives, gt.intervals)
    if gt.keypoints:
        report.keypoints = keypoint_consistency(result.primitives, gt.keypoints)
    if samples is not None and result.clusters is not None:
        report.intra_cluster_variance = cluster_variances(
            result, samples, channel_names, metric, window
        )
    logger.info(
        "Evaluated segmentation",
        stage="evaluation",
        strict=report.strict_accuracy,
        tolerant=report.tolerant_accuracy,
        clusters=len(report.intra_cluster_variance),
    )
    return report
