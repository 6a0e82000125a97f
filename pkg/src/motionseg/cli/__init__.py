import logging

import click
from dotenv import load_dotenv

from ..log import default_logging_setup
from .batch import main as batch_cmd
from .cluster import main as cluster_cmd
from .evaluate import main as eval_cmd
from .render import main as render_cmd
from .segment import main as segment_cmd
from .sweep import main as sweep_cmd
from .synth import main as synth_cmd

load_dotenv()


@click.group()
@click.option(
    "--log-file",
    type=click.Path(dir_okay=False),
    envvar="MOTIONSEG_LOG_FILE",
    default=None,
    help="Also write JSON-lines logs to this file",
)
@click.option("-v", "--verbose", is_flag=True, help="Debug output on the console")
def cli(log_file: str | None, verbose: bool):
    """Unsupervised segmentation of motion recordings"""
    default_logging_setup(
        filename=log_file,
        handlers="both" if log_file else "console",
        target_module="motionseg",
        target_module_level_console=logging.DEBUG if verbose else logging.INFO,
        target_module_level_file=logging.DEBUG,
    )


cli.add_command(segment_cmd, name="segment")
cli.add_command(cluster_cmd, name="cluster")
cli.add_command(eval_cmd, name="eval")
cli.add_command(sweep_cmd, name="sweep")
cli.add_command(render_cmd, name="render")
cli.add_command(synth_cmd, name="synth")
cli.add_command(batch_cmd, name="batch")
main = cli
