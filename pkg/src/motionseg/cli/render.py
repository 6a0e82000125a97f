from pathlib import Path

import click

from ..config import PipelineConfig
from ..ingest import load_annotations, load_timeseries
from ..neighborhood import compute_neighborhoods
from ..pipeline import (
    SSSM_FILE,
    TIMELINE_FILE,
    build_features,
    prepare_series,
    read_result,
)
from ..render import save_sssm, timeline_svg
from .common import config_options, reported_errors


@click.command()
@click.option(
    "-s",
    "--segmentation",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="seg.json written by `segment`",
)
@click.option(
    "-i",
    "--input",
    "input_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="The trial the segmentation was computed on",
)
@click.option(
    "-g",
    "--gt",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Annotation CSV drawn under the timeline",
)
@click.option(
    "-o",
    "--out",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Output directory (defaults to the segmentation's directory)",
)
@click.option("--png/--no-png", default=False, help="Also write the SSSM as PNG")
@config_options()
def main(
    segmentation: Path,
    input_path: Path,
    gt: Path | None,
    out: Path | None,
    png: bool,
    config: PipelineConfig,
):
    """Re-render the SSSM image and the timeline of a stored segmentation"""
    out = out or segmentation.parent
    with reported_errors():
        result = read_result(segmentation)
        series = prepare_series(load_timeseries(input_path), config)
        nbrs = compute_neighborhoods(build_features(series, config), config.radius)
        written = save_sssm(nbrs, out / SSSM_FILE, result, png=png)
        truth = load_annotations(gt) if gt else None
        written.append(timeline_svg(result, out / TIMELINE_FILE, truth))
    for path in written:
        click.echo(f"Wrote {path}")
