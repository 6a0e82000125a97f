from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from motionseg.activity import remove_diagonal_band
from motionseg.config import PipelineConfig
from motionseg.features import stack_features
from motionseg.ingest import write_annotations, write_timeseries
from motionseg.models import TimeSeries
from motionseg.neighborhood import Neighborhoods, compute_neighborhoods
from motionseg.synth import (
    SyntheticTrial,
    fixture_a,
    fixture_aba,
    fixture_b,
    fixture_gait,
)


def plain_config(**overrides) -> PipelineConfig:
    """Raw features, no stacking or bundling, at the radius the fixtures expect."""
    values = {"radius": 0.225, "offsets": [0], "bundling": False}
    values.update(overrides)
    return PipelineConfig(**values)


def trimmed_neighborhoods(series: TimeSeries, radius: float = 0.225) -> Neighborhoods:
    nbrs = compute_neighborhoods(stack_features(series, [0]), radius)
    return remove_diagonal_band(nbrs, series.rate)


def write_trial(trial: SyntheticTrial, root: Path) -> tuple[Path, Path]:
    root.mkdir(parents=True, exist_ok=True)
    write_timeseries(trial.series, root / "trial.csv")
    write_annotations(trial.truth, root / "gt.csv")
    return root / "trial.csv", root / "gt.csv"


@pytest.fixture
def config() -> PipelineConfig:
    return plain_config()


@pytest.fixture(scope="session")
def fix_a() -> SyntheticTrial:
    return fixture_a(noise=0.05, seed=0)


@pytest.fixture(scope="session")
def fix_b() -> SyntheticTrial:
    return fixture_b(noise=0.05, seed=0)


@pytest.fixture(scope="session")
def fix_aba() -> SyntheticTrial:
    return fixture_aba(noise=0.05, seed=0)


@pytest.fixture(scope="session")
def gait() -> SyntheticTrial:
    return fixture_gait()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def fix_b_files(fix_b: SyntheticTrial, tmp_path: Path) -> tuple[Path, Path]:
    return write_trial(fix_b, tmp_path / "fixB")
