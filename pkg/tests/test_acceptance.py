"""Multi-seed fixture suites and published dataset figures.

Dataset folders come from environment variables; unset ones skip.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest

from motionseg.config import load_config
from motionseg.dataset import TrialDataset
from motionseg.evaluation import evaluate, interval_overlap
from motionseg.features import bundle_features, stack_features
from motionseg.pipeline import load_mirror, segment_series
from motionseg.synth import fixture_a

from .conftest import plain_config

DEFAULT_CONFIG = Path(__file__).parents[1] / "configs" / "default.toml"


def _primitive_count_error(noise: float, seed: int, bundling: bool) -> int:
    trial = fixture_a(noise=noise, seed=seed)
    result = segment_series(trial.series, plain_config(bundling=bundling)).result
    return abs(len(result.primitives) - len(trial.cycle_starts))


@pytest.mark.slow
def test_cycle_counts_over_noise_seeds():
    hits = 0
    for seed in range(20):
        trial = fixture_a(noise=0.05, seed=seed)
        result = segment_series(trial.series, plain_config()).result
        cuts = [p.start for p in result.primitives[1:]]
        on_beat = all(abs(c - 40 * round(c / 40)) <= 3 for c in cuts)
        if abs(len(result.primitives) - 10) <= 1 and on_beat:
            hits += 1
    assert hits >= 18


@pytest.mark.slow
def test_bundling_does_not_hurt_cycle_counts():
    wins = sum(
        _primitive_count_error(0.1, seed, True)
        <= _primitive_count_error(0.1, seed, False)
        for seed in range(20)
    )
    assert wins >= 15


@pytest.mark.slow
def test_bundling_pulls_cycles_together():
    trial = fixture_a(noise=0.1, seed=0)
    feats = stack_features(trial.series, [0])
    bundled = bundle_features(feats, k=64)

    def radial_error(vectors: np.ndarray) -> float:
        return float(np.abs(np.linalg.norm(vectors[:, :2], axis=1) - 1.0).mean())

    assert radial_error(bundled.vectors) < radial_error(feats.vectors)


def _dataset(variable: str) -> TrialDataset:
    root = os.environ.get(variable)
    if not root or not Path(root).is_dir():
        pytest.skip(f"{variable} not set")
    return TrialDataset(Path(root))


@pytest.mark.dataset
def test_cmu_subject_86_accuracy():
    config = load_config(DEFAULT_CONFIG)
    strict, tolerant = [], []
    for trial in _dataset("MOTIONSEG_CMU86_DIR"):
        mirror = load_mirror(config, trial.series)
        result = segment_series(trial.series, config, mirror).result
        report = evaluate(result, trial.ground_truth, aliases=config.label_aliases)
        strict.append(report.strict_accuracy)
        tolerant.append(report.tolerant_accuracy)
    assert abs(np.mean(strict) - 0.90) <= 0.05
    assert abs(np.mean(tolerant) - 0.99) <= 0.03


@pytest.mark.dataset
def test_msr3d_boundaries_and_overlap():
    config = load_config(DEFAULT_CONFIG)
    distances, overlaps = [], []
    for trial in _dataset("MOTIONSEG_MSR3D_DIR"):
        result = segment_series(trial.series, config).result
        if not result.primitives:
            continue
        stats = interval_overlap(result.primitives, trial.ground_truth.intervals)
        distances.extend(stats.boundary_distances)
        overlaps.extend(stats.overlaps)
    assert abs(np.mean(distances) - 21.2) <= 0.2 * 21.2
    assert abs(np.mean(overlaps) - 66.56) <= 0.2 * 66.56
