from pathlib import Path
from typing import Literal

import click
import structlog
from tabulate import tabulate

from ..config import PipelineConfig
from ..evaluation import evaluate
from ..ingest import load_annotations, load_timeseries
from ..models import EvalReport
from ..pipeline import prepare_series, read_result
from ..render import histogram_svg
from .common import config_options, reported_errors

logger = structlog.get_logger(__name__)

REPORT_FILE = "eval.json"
HISTOGRAM_FILE = "keypoints.svg"


def report_table(report: EvalReport) -> str:
    rows: list[list[object]] = []
    if report.strict_accuracy is not None:
        rows.append(["strict accuracy", f"{report.strict_accuracy:.1%}"])
    if report.tolerant_accuracy is not None:
        rows.append(["tolerant accuracy", f"{report.tolerant_accuracy:.1%}"])
    for label, name in sorted(report.cluster_labels.items()):
        rows.append([f"cluster {label}", name])
    for label, value in sorted(report.intra_cluster_variance.items()):
        rows.append([f"D(cluster {label})", f"{value:.4f}"])
    if report.overlap is not None:
        overlap = report.overlap
        rows.append([
            "boundary distance",
            f"{overlap.boundary_mean:.1f} ± {overlap.boundary_std:.1f}",
        ])
        rows.append([
            "largest overlap",
            f"{overlap.overlap_mean:.1f}% ± {overlap.overlap_std:.1f}",
        ])
    if report.keypoints is not None:
        rows.append(["key points", len(report.keypoints.positions)])
        for name, std in sorted(report.keypoints.per_class_std.items()):
            rows.append([f"std({name})", f"{std:.3f}"])
    return tabulate(rows, headers=["metric", "value"], tablefmt="github")


@click.command()
@click.option(
    "-s",
    "--segmentation",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="seg.json written by `segment`",
)
@click.option(
    "-g",
    "--gt",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Annotation CSV (intervals or key points)",
)
@click.option(
    "-m",
    "--mode",
    type=click.Choice(["strict", "tolerant"]),
    default="strict",
    help="Accuracy reported as the headline number",
)
@click.option(
    "-i",
    "--input",
    "input_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Trial CSV; enables intra-cluster variance",
)
@click.option(
    "-o",
    "--out",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Output directory (defaults to the segmentation's directory)",
)
@config_options()
def main(
    segmentation: Path,
    gt: Path,
    mode: Literal["strict", "tolerant"],
    input_path: Path | None,
    out: Path | None,
    config: PipelineConfig,
):
    """Score a segmentation against annotations"""
    out = out or segmentation.parent
    with reported_errors():
        result = read_result(segmentation)
        truth = load_annotations(gt)
        samples, channel_names = None, None
        if input_path is not None:
            series = prepare_series(load_timeseries(input_path), config)
            samples, channel_names = series.samples, series.channel_names
        report = evaluate(
            result,
            truth,
            mode=mode,
            aliases=config.label_aliases,
            samples=samples,
            channel_names=channel_names,
            metric=config.dtw_metric,
            window=config.dtw_window,
        )
    out.mkdir(parents=True, exist_ok=True)
    (out / REPORT_FILE).write_text(
        report.model_dump_json(indent=2) + "\n", encoding="utf-8"
    )
    if report.keypoints is not None:
        histogram_svg(report.keypoints, out / HISTOGRAM_FILE)
    click.echo(report_table(report))
    if report.accuracy is not None:
        logger.info(f"{mode.capitalize()} accuracy: {report.accuracy:.1%}")
    logger.info(f"The report was saved to: {out / REPORT_FILE}")
