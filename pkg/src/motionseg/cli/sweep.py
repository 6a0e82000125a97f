from pathlib import Path

import click
import structlog

from ..config import PipelineConfig
from ..ingest import load_annotations, load_timeseries
from ..pipeline import sweep_grid, sweep_parameter
from ..render import heatmap_svg
from ..utils import default_progress
from .common import (
    config_options,
    parse_int_list,
    parse_offset_sets,
    parse_range,
    reported_errors,
)

logger = structlog.get_logger(__name__)


@click.command()
@click.option(
    "-i",
    "--input",
    "input_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Trial CSV",
)
@click.option(
    "-g",
    "--gt",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Interval annotation CSV",
)
@click.option(
    "--radii", type=str, default=None, help='Radius grid, "a:b:step" or "r1,r2,..."'
)
@click.option(
    "--offsets",
    "offset_sets",
    type=str,
    default=None,
    help='Offset sets separated by ";", e.g. "0;-5,0,5"',
)
@click.option(
    "--stop-windows", type=str, default=None, help='Stop windows, e.g. "2,4,8,16"'
)
@click.option(
    "--slopes", type=str, default=None, help='Slope limits, e.g. "1.25,1.5,2,3"'
)
@click.option(
    "-o",
    "--out",
    type=click.Path(file_okay=False, path_type=Path),
    default=Path("sweep"),
    help="Output directory",
)
@click.option("--heatmap/--no-heatmap", default=True, help="Write accuracy maps as SVG")
@config_options(offsets_override=False)
def main(
    input_path: Path,
    gt: Path,
    radii: str | None,
    offset_sets: str | None,
    stop_windows: str | None,
    slopes: str | None,
    out: Path,
    heatmap: bool,
    config: PipelineConfig,
):
    """Accuracy over a parameter grid"""
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    with reported_errors():
        series = load_timeseries(input_path)
        truth = load_annotations(gt)
        with default_progress() as progress:
            if radii is not None or offset_sets is not None:
                grid_radii = parse_range(radii) if radii else [config.radius]
                grid_offsets = (
                    parse_offset_sets(offset_sets) if offset_sets else [config.offsets]
                )
                strict, tolerant = sweep_grid(
                    series, truth, config, grid_radii, grid_offsets, progress
                )
                for name, frame in (("strict", strict), ("tolerant", tolerant)):
                    path = out / f"accuracy_{name}.csv"
                    frame.to_csv(path, encoding="utf-8")
                    written.append(path)
                    if heatmap:
                        svg = out / f"accuracy_{name}.svg"
                        written.append(heatmap_svg(frame, svg, f"{name} accuracy"))
                best = float(strict.to_numpy(dtype=float).max())
                logger.info(f"Best strict accuracy: {best:.1%}")
            if stop_windows is not None:
                windows = parse_int_list(stop_windows)
                frame = sweep_parameter(
                    series, truth, config, "stop_window", windows, progress
                )
                path = out / "stop_window.csv"
                frame.to_csv(path, index=False, encoding="utf-8")
                written.append(path)
            if slopes is not None:
                limits = parse_range(slopes)
                frame = sweep_parameter(
                    series, truth, config, "slope_limit", limits, progress
                )
                path = out / "slope_limit.csv"
                frame.to_csv(path, index=False, encoding="utf-8")
                written.append(path)
    if not written:
        raise click.UsageError(
            "nothing to sweep; pass --radii, --offsets, --stop-windows or --slopes"
        )
    for path in written:
        click.echo(f"Wrote {path}")
