from collections.abc import Callable, Iterator
from contextlib import contextmanager
from functools import wraps
from pathlib import Path
from typing import Any, TypeVar

import click
import numpy as np

from ..config import PipelineConfig, load_config, parse_offsets
from ..errors import ConfigError, MotionSegError

F = TypeVar("F", bound=Callable[..., Any])


@contextmanager
def reported_errors() -> Iterator[None]:
    """Surface library errors as click failures with a non-zero exit."""
    try:
        yield
    except MotionSegError as e:
        raise click.ClickException(str(e)) from e


def config_options(offsets_override: bool = True) -> Callable[[F], F]:
    """Shared `--config` file plus flag overrides, passed on as a validated `config`.

    Commands that use `--offsets` for something else pass `offsets_override=False`.
    """

    def decorator(func: F) -> F:
        return _with_config(func, offsets_override)

    return decorator


def _with_config(func: F, offsets_override: bool) -> F:
    @click.option(
        "-c",
        "--config",
        "config_path",
        type=click.Path(exists=True, dir_okay=False, path_type=Path),
        default=None,
        help="Flat TOML config file",
    )
    @click.option(
        "-R", "--radius", type=float, default=None, help="Base neighborhood radius"
    )
    @click.option(
        "--bundling/--no-bundling", default=None, help="Toggle feature bundling"
    )
    @click.option("--seed", type=int, default=None, help="Seed behind all randomness")
    @click.option(
        "--symmetry/--no-symmetry", default=None, help="Toggle symmetry analysis"
    )
    @click.option(
        "--mirror-map",
        type=click.Path(exists=True, dir_okay=False, path_type=Path),
        default=None,
        help="Mirror map CSV (left,right[,negate])",
    )
    @click.option(
        "-t",
        "--threads",
        type=int,
        envvar="MOTIONSEG_THREADS",
        default=None,
        help="Worker threads for bundling and clustering",
    )
    @wraps(func)
    def wrapper(
        *args: Any,
        config_path: Path | None,
        radius: float | None,
        bundling: bool | None,
        seed: int | None,
        symmetry: bool | None,
        mirror_map: Path | None,
        threads: int | None,
        **kwargs: Any,
    ) -> Any:
        offsets = kwargs.pop("offsets", None) if offsets_override else None
        with reported_errors():
            config = load_config(
                config_path,
                radius=radius,
                offsets=parse_offsets(offsets) if offsets else None,
                bundling=bundling,
                seed=seed,
                symmetry=symmetry,
                mirror_map=mirror_map,
                threads=threads,
            )
        return func(*args, config=config, **kwargs)

    if offsets_override:
        wrapper = click.option(
            "--offsets", type=str, default=None, help='Stacking offsets, e.g. "-5,0,5"'
        )(wrapper)
    return wrapper  # type: ignore[return-value]


def parse_range(text: str) -> list[float]:
    """`"0.1:0.3:0.1"` (inclusive) or `"0.1,0.2"` → list of floats."""
    try:
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
            if step <= 0 or stop < start:
                raise ConfigError(f"invalid range {text!r}")
            values = np.arange(start, stop + step / 2, step)
            return [round(float(v), 10) for v in values]
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigError(f"invalid range {text!r}") from e


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigError(f"invalid integer list {text!r}") from e


def parse_offset_sets(text: str) -> list[list[int]]:
    """`"0;-5,0,5"` → [[0], [-5, 0, 5]]."""
    return [parse_offsets(part) for part in text.split(";") if part.strip()]


def describe_config(config: PipelineConfig) -> dict[str, Any]:
    return config.model_dump(mode="json", exclude={"label_aliases"})
