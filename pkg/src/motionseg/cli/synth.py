from pathlib import Path

import click
import pandas as pd

from ..ingest import write_annotations, write_timeseries
from ..synth import FIXTURES
from .common import reported_errors

MIRROR_FILE = "mirror.csv"


@click.command()
@click.option(
    "-f",
    "--fixture",
    type=click.Choice(sorted(FIXTURES)),
    required=True,
    help="Synthetic trial to generate",
)
@click.option(
    "--noise",
    type=float,
    default=None,
    help="Gaussian noise σ (fixture default if omitted)",
)
@click.option("--seed", type=int, default=0, help="Noise seed")
@click.option(
    "-o",
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Trial CSV to write",
)
@click.option(
    "-g",
    "--gt",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Annotation CSV (defaults to gt.csv next to the trial)",
)
def main(fixture: str, noise: float | None, seed: int, out: Path, gt: Path | None):
    """Write a synthetic trial with its annotations"""
    kwargs: dict[str, float | int] = {"seed": seed}
    if noise is not None:
        kwargs["noise"] = noise
    trial = FIXTURES[fixture](**kwargs)
    gt = gt or out.with_name("gt.csv")
    with reported_errors():
        out.parent.mkdir(parents=True, exist_ok=True)
        write_timeseries(trial.series, out)
        write_annotations(trial.truth, gt)
    series = trial.series
    click.echo(f"Wrote {out} ({series.frame_count} frames at {series.rate:g} fps)")
    click.echo(f"Wrote {gt}")
    if trial.mirror_pairs:
        mirror = out.with_name(MIRROR_FILE)
        pairs = pd.DataFrame(trial.mirror_pairs, columns=["left", "right", "negate"])
        pairs.to_csv(mirror, index=False, encoding="utf-8")
        click.echo(f"Wrote {mirror}")
