"""End-to-end orchestration from a recording to activities, primitives and clusters."""

import json
import time
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd
import structlog
from rich.progress import Progress

from . import __version__
from .activity import remove_diagonal_band, segment_activities
from .clustering import assign_clusters, build_clusters
from .config import PipelineConfig
from .errors import MotionSegError
from .evaluation import frame_accuracy
from .features import (
    MirrorMap,
    bundle_features,
    load_mirror_map,
    mirror_features,
    stack_features,
)
from .ingest import load_timeseries, preprocess_acceleration, preprocess_emg, resample
from .models import (
    FeatureSequence,
    GroundTruth,
    MotionPrimitive,
    SegmentationResult,
    SymmetryReport,
    TimeSeries,
)
from .neighborhood import Neighborhoods, compute_neighborhoods, cross_neighborhoods
from .primitives import detect_cuts, primitives_from_cuts
from .render import save_sssm, timeline_svg
from .symmetry import classify_symmetry, mirrored_cuts

logger = structlog.get_logger(__name__)

RESULT_FILE = "seg.json"
SSSM_FILE = "sssm.pgm"
TIMELINE_FILE = "timeline.svg"


@dataclass
class PipelineRun:
    result: SegmentationResult
    series: TimeSeries
    features: FeatureSequence
    neighborhoods: Neighborhoods
    trimmed: Neighborhoods
    timings: dict[str, float] = field(default_factory=dict)


@contextmanager
def _timed(timings: dict[str, float], stage: str) -> Iterator[None]:
    started = time.perf_counter()
    try:
        yield
    finally:
        timings[stage] = time.perf_counter() - started


def prepare_series(series: TimeSeries, config: PipelineConfig) -> TimeSeries:
    target = config.target_rate or 30.0
    if config.preprocess == "emg":
        return preprocess_emg(series, target_rate=target)
    if config.preprocess == "acceleration":
        return preprocess_acceleration(series, target_rate=target)
    if config.target_rate is not None and config.target_rate != series.rate:
        return resample(series, config.target_rate)
    return series


def build_features(series: TimeSeries, config: PipelineConfig) -> FeatureSequence:
    feats = stack_features(series, config.offsets)
    if not config.bundling:
        return feats
    if feats.frame_count <= config.bundling_k:
        logger.warning(
            "Too few frames for bundling; using stacked features",
            frames=feats.frame_count,
            k=config.bundling_k,
        )
        return feats
    return bundle_features(
        feats, k=config.bundling_k, seed=config.seed, threads=config.threads
    )


def _result_meta(
    series: TimeSeries,
    config: PipelineConfig,
    nbrs: Neighborhoods,
    source: str | None,
) -> dict:
    return {
        "tool": "motionseg",
        "version": __version__,
        "input": source,
        "frame_count": series.frame_count,
        "rate": series.rate,
        "channels": list(series.channel_names),
        "radius_used": nbrs.radius,
        "neighbor_entries": nbrs.entry_count,
        "max_neighbors": nbrs.max_neighbors,
        # run-local settings stay out so reruns are byte-identical
        "config": config.model_dump(mode="json", exclude={"output_dir", "threads"}),
    }


def segment_series(
    series: TimeSeries,
    config: PipelineConfig,
    mirror: MirrorMap | None = None,
    progress: Progress | None = None,
    source: str | None = None,
) -> PipelineRun:
    """Run every stage on an in-memory recording."""
    timings: dict[str, float] = {}
    series = prepare_series(series, config)
    rate = series.rate
    band = round(rate * config.band_seconds)

    with _timed(timings, "features"):
        feats = build_features(series, config)
    with _timed(timings, "neighborhoods"):
        nbrs = compute_neighborhoods(feats, config.radius)
        trimmed = remove_diagonal_band(nbrs, rate, config.band_seconds)
    with _timed(timings, "activities"):
        segmentation = segment_activities(
            trimmed, rate, config.stop_window, config.min_activity_seconds
        )

    path_params = {
        "min_span": config.min_span,
        "slope_limit": config.slope_limit,
        "merge_distance": config.merge_distance,
    }
    with _timed(timings, "primitives"):
        cuts = [
            [c.frame for c in detect_cuts(activity, trimmed, **path_params)]
            for activity in segmentation.activities
        ]

    reports: list[SymmetryReport] = []
    if config.symmetry and mirror is not None:
        with _timed(timings, "symmetry"):
            mirrored = build_features(mirror_features(series, mirror), config)
            cross = cross_neighborhoods(feats, mirrored, config.radius)
            for index, activity in enumerate(segmentation.activities):
                found = mirrored_cuts(
                    activity, cross, series.frame_count, band, **path_params
                )
                report = classify_symmetry(
                    cuts[index],
                    found,
                    config.symmetry_tolerance,
                    config.merge_distance,
                    activity=index,
                )
                reports.append(report)
                cuts[index] = report.merged_cuts
    elif config.symmetry:
        logger.warning("Symmetry analysis requested without a mirror map; skipped")

    primitives: list[MotionPrimitive] = []
    for index, activity in enumerate(segmentation.activities):
        primitives.extend(
            primitives_from_cuts(activity, cuts[index], index, len(primitives))
        )

    with _timed(timings, "clustering"):
        graph = build_clusters(
            primitives,
            trimmed,
            config.min_span,
            config.slope_limit,
            threads=config.threads,
            progress=progress,
        )
        primitives = assign_clusters(primitives, graph)

    result = SegmentationResult(
        meta=_result_meta(series, config, nbrs, source),
        segmentation=segmentation,
        primitives=primitives,
        clusters=graph,
        symmetry=reports,
    )
    logger.info(
        "Pipeline finished",
        stage="pipeline",
        frames=series.frame_count,
        activities=len(segmentation.activities),
        primitives=len(primitives),
        clusters=len(graph.clusters),
        timings={stage: round(seconds, 3) for stage, seconds in timings.items()},
    )
    return PipelineRun(
        result=result,
        series=series,
        features=feats,
        neighborhoods=nbrs,
        trimmed=trimmed,
        timings=timings,
    )


def load_mirror(config: PipelineConfig, series: TimeSeries) -> MirrorMap | None:
    if not config.symmetry or config.mirror_map is None:
        return None
    return load_mirror_map(config.mirror_map, series.channel_names)


def write_result(result: SegmentationResult, out_dir: str | Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / RESULT_FILE
    path.write_text(
        json.dumps(result.to_document(), indent=2) + "\n", encoding="utf-8"
    )
    return path


def read_result(path: str | Path) -> SegmentationResult:
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
        return SegmentationResult.from_document(document)
    except (OSError, KeyError, ValueError) as e:
        raise MotionSegError(f"{path}: unreadable segmentation result: {e}") from e


def run_pipeline(
    config: PipelineConfig,
    input_path: str | Path,
    out_dir: str | Path | None = None,
    progress: Progress | None = None,
) -> PipelineRun:
    """Segment one trial file and write seg.json plus the SSSM and timeline images."""
    input_path = Path(input_path)
    series = load_timeseries(input_path)
    mirror = load_mirror(config, series)
    run = segment_series(series, config, mirror, progress, source=input_path.name)
    out_dir = Path(out_dir) if out_dir is not None else config.output_dir
    write_result(run.result, out_dir)
    save_sssm(run.neighborhoods, out_dir / SSSM_FILE, run.result, png=config.render_png)
    timeline_svg(run.result, out_dir / TIMELINE_FILE)
    logger.info("Wrote results", output=str(out_dir))
    return run


def recluster(
    result: SegmentationResult,
    series: TimeSeries,
    config: PipelineConfig,
    progress: Progress | None = None,
) -> SegmentationResult:
    """Recompute clusters for stored primitives under the given config."""
    series = prepare_series(series, config)
    feats = build_features(series, config)
    trimmed = remove_diagonal_band(
        compute_neighborhoods(feats, config.radius), series.rate, config.band_seconds
    )
    graph = build_clusters(
        result.primitives,
        trimmed,
        config.min_span,
        config.slope_limit,
        config.threads,
        progress,
    )
    return result.model_copy(
        update={
            "clusters": graph,
            "primitives": assign_clusters(result.primitives, graph),
        }
    )


def _score(
    series: TimeSeries,
    gt: GroundTruth,
    config: PipelineConfig,
    mirror: MirrorMap | None,
) -> tuple[float, float, float]:
    run = segment_series(series, config, mirror)
    activities = max(1, len(run.result.segmentation.activities))
    return (
        frame_accuracy(run.result, gt, "strict", config.label_aliases),
        frame_accuracy(run.result, gt, "tolerant", config.label_aliases),
        len(run.result.primitives) / activities,
    )


def offsets_label(offsets: list[int]) -> str:
    return ",".join(str(o) for o in offsets)


def sweep_grid(
    series: TimeSeries,
    gt: GroundTruth,
    config: PipelineConfig,
    radii: list[float],
    offset_sets: list[list[int]],
    progress: Progress | None = None,
) -> tuple[pd.DataFrame, pd.DataFrame]:
    """Strict and tolerant accuracy for every (offsets, radius) cell."""
    index = pd.Index([offsets_label(o) for o in offset_sets], name="offsets")
    columns = pd.Index(radii, name="radius")
    strict = pd.DataFrame(index=index, columns=columns, dtype=float)
    tolerant = pd.DataFrame(index=index, columns=columns, dtype=float)
    total = len(radii) * len(offset_sets)
    task = progress.add_task("Sweep", total=total) if progress else None
    mirror = load_mirror(config, series)
    for offsets in offset_sets:
        for radius in radii:
            cell = config.with_overrides(radius=radius, offsets=offsets)
            s, t, _ = _score(series, gt, cell, mirror)
            strict.loc[offsets_label(offsets), radius] = s
            tolerant.loc[offsets_label(offsets), radius] = t
            logger.debug(
                "Sweep cell", radius=radius, offsets=offsets, strict=s, tolerant=t
            )
            if progress is not None and task is not None:
                progress.update(task, advance=1)
    return strict, tolerant


def sweep_parameter(
    series: TimeSeries,
    gt: GroundTruth,
    config: PipelineConfig,
    name: str,
    values: list[float] | list[int],
    progress: Progress | None = None,
) -> pd.DataFrame:
    """Accuracy and mean primitives per activity while one config field varies."""
    rows = []
    task = progress.add_task(f"Sweep {name}", total=len(values)) if progress else None
    mirror = load_mirror(config, series)
    for value in values:
        cell = config.with_overrides(**{name: value})
        strict, tolerant, per_activity = _score(series, gt, cell, mirror)
        rows.append({
            name: value,
            "strict": strict,
            "tolerant": tolerant,
            "primitives_per_activity": per_activity,
        })
        if progress is not None and task is not None:
            progress.update(task, advance=1)
    return pd.DataFrame(rows)
