from pathlib import Path

import click

from ..config import PipelineConfig
from ..ingest import load_timeseries
from ..pipeline import read_result, recluster, write_result
from ..utils import default_progress
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
    "-o",
    "--out",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Output directory (defaults to the segmentation's directory)",
)
@config_options()
def main(
    segmentation: Path, input_path: Path, out: Path | None, config: PipelineConfig
):
    """Recompute primitive clusters for a stored segmentation"""
    with reported_errors():
        result = read_result(segmentation)
        series = load_timeseries(input_path)
        with default_progress() as progress:
            result = recluster(result, series, config, progress=progress)
        path = write_result(result, out or segmentation.parent)
    clusters = result.clusters.clusters if result.clusters else []
    for label, members in enumerate(clusters):
        click.echo(f"cluster {label}: primitives {', '.join(str(m) for m in members)}")
    click.echo(f"Wrote {path}")
