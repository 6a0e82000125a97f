import tomllib
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import ConfigError


class PipelineConfig(BaseModel):
    """Every knob of a segmentation run; one flat TOML file plus CLI overrides."""

    model_config = ConfigDict(extra="forbid")

    radius: float = Field(0.2, gt=0, description="base radius R before generalization")
    offsets: list[int] = Field(default_factory=lambda: [-5, 0, 5])
    bundling: bool = True
    bundling_k: int = Field(64, ge=2)
    seed: int = 0
    stop_window: int = Field(8, ge=1)
    slope_limit: float = Field(2.0, gt=1)
    min_span: int = Field(5, ge=1)
    merge_distance: int = Field(5, ge=1)
    band_seconds: float = Field(1.0, ge=0)
    min_activity_seconds: float = Field(1.0, ge=0)
    mirror_map: Path | None = None
    symmetry: bool = False
    symmetry_tolerance: int = Field(5, ge=0)
    label_aliases: dict[str, str] = Field(default_factory=dict)
    output_dir: Path = Path("results")
    threads: int = Field(1, ge=1)
    preprocess: Literal["none", "emg", "acceleration"] = "none"
    target_rate: float | None = Field(None, gt=0)
    dtw_metric: Literal["euclidean", "point_cloud"] = "euclidean"
    dtw_window: int = Field(1, ge=1)
    render_png: bool = False

    @field_validator("offsets")
    @classmethod
    def _offsets_hold_zero(cls, value: list[int]) -> list[int]:
        if 0 not in value:
            raise ValueError("offsets must contain 0")
        return sorted(set(value))

    def with_overrides(self, **overrides: Any) -> "PipelineConfig":
        """Validated copy with every non-None override applied."""
        merged = self.model_dump()
        merged.update({
            key: value for key, value in overrides.items() if value is not None
        })
        return build_config(merged)


def build_config(values: dict[str, Any]) -> PipelineConfig:
    try:
        return PipelineConfig.model_validate(values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
            for err in e.errors()
        )
        raise ConfigError(f"config validation error: {problems}") from e


def load_config(path: str | Path | None = None, **overrides: Any) -> PipelineConfig:
    """Read a flat TOML file (missing path means defaults) and apply overrides."""
    values: dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"{path}: config file not found")
        try:
            values = tomllib.loads(path.read_text(encoding="utf-8"))
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"{path}: {e}") from e
        mirror_map = values.get("mirror_map")
        if mirror_map is not None and not Path(mirror_map).is_absolute():
            values["mirror_map"] = str(path.parent / mirror_map)
    values.update({key: value for key, value in overrides.items() if value is not None})
    return build_config(values)


def parse_offsets(text: str) -> list[int]:
    """`"-5,0,5"` → [-5, 0, 5]."""
    try:
        return [int(part) for part in text.replace(" ", "").split(",") if part]
    except ValueError as e:
        raise ConfigError(f"invalid offsets {text!r}") from e
