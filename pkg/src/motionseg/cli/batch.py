from pathlib import Path

import click
import pandas as pd
import structlog
from tabulate import tabulate

from ..config import PipelineConfig
from ..dataset import TrialDataset
from ..evaluation import evaluate
from ..pipeline import run_pipeline
from ..utils import default_progress
from .common import config_options, reported_errors

logger = structlog.get_logger(__name__)

SUMMARY_FILE = "summary.csv"


@click.command()
@click.option(
    "-d",
    "--data-dir",
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    default="data",
    help="Dataset directory (<subject>/<trial>/trial.csv + gt.csv)",
)
@click.option(
    "-o",
    "--out",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Output directory (defaults to the config's output_dir)",
)
@config_options()
def main(data_dir: Path, out: Path | None, config: PipelineConfig):
    """Segment and evaluate every trial of a dataset"""
    out = out or config.output_dir
    dataset = TrialDataset(data_dir)
    records = []
    with reported_errors(), default_progress() as progress:
        task = progress.add_task("Trials", total=len(dataset))
        for trial in dataset:
            trial_config = config
            if config.symmetry and trial.mirror_path is not None:
                trial_config = config.with_overrides(mirror_map=trial.mirror_path)
            trial_out = out / trial.subject / trial.name
            run = run_pipeline(trial_config, trial.series_path, trial_out)
            report = evaluate(
                run.result, trial.ground_truth, aliases=config.label_aliases
            )
            records.append({
                "subject": trial.subject,
                "trial": trial.name,
                "frames": run.series.frame_count,
                "activities": len(run.result.segmentation.activities),
                "primitives": len(run.result.primitives),
                "strict": report.strict_accuracy,
                "tolerant": report.tolerant_accuracy,
            })
            logger.debug(
                "Trial evaluated",
                subject=trial.subject,
                trial=trial.name,
                strict=report.strict_accuracy,
            )
            progress.update(task, advance=1)

    df = pd.DataFrame(records)
    if not df.empty:
        df[["strict", "tolerant"]] = df[["strict", "tolerant"]].astype(float)
    out.mkdir(parents=True, exist_ok=True)
    df.to_csv(out / SUMMARY_FILE, index=False, encoding="utf-8")
    if df.empty:
        logger.warning("No complete trials found", data_dir=str(data_dir))
        return
    click.echo(
        tabulate(
            df, headers="keys", tablefmt="github", showindex=False, floatfmt=".3f"
        )
    )
    logger.info(
        f"Mean strict accuracy: {df['strict'].mean():.1%}; "
        f"Mean tolerant accuracy: {df['tolerant'].mean():.1%}; "
        f"Total: {len(df)}"
    )
