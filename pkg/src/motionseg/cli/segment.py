from pathlib import Path

import click
import structlog
from tabulate import tabulate

from ..config import PipelineConfig
from ..pipeline import RESULT_FILE, run_pipeline
from ..utils import default_progress
from .common import config_options, reported_errors

logger = structlog.get_logger(__name__)


@click.command()
@click.option(
    "-i",
    "--input",
    "input_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Trial CSV (# rate=..., channel names, one frame per line)",
)
@click.option(
    "-o",
    "--out",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Output directory (defaults to the config's output_dir)",
)
@click.option("--png/--no-png", default=None, help="Also write the SSSM as PNG")
@config_options()
def main(input_path: Path, out: Path | None, png: bool | None, config: PipelineConfig):
    """Segment a trial into activities, primitives and clusters"""
    with reported_errors():
        if png is not None:
            config = config.with_overrides(render_png=png)
        out = out or config.output_dir
        with default_progress() as progress:
            run = run_pipeline(config, input_path, out, progress=progress)
    result = run.result
    rows = [
        [
            idx,
            a.start + 1,
            a.end + 1,
            sum(1 for p in result.primitives if p.activity == idx),
        ]
        for idx, a in enumerate(result.segmentation.activities)
    ]
    headers = ["activity", "start", "end", "primitives"]
    click.echo(tabulate(rows, headers=headers, tablefmt="github"))
    clusters = result.clusters.clusters if result.clusters else []
    click.echo(f"{len(result.primitives)} primitives in {len(clusters)} clusters")
    for report in result.symmetry:
        click.echo(f"activity {report.activity}: {report.classification}")
    logger.info(f"The result was saved to: {out / RESULT_FILE}")
