from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from motionseg.errors import FeatureError
from motionseg.features import (
    MirrorMap,
    bundle_features,
    direction_of_movement,
    kde_bandwidth,
    kde_density,
    load_mirror_map,
    mirror_features,
    movement_derivatives,
    orthogonal_subspace,
    stack_features,
    subspace_mean_shift,
)
from motionseg.models import FeatureSequence, TimeSeries
from motionseg.synth import LIMB_CHANNELS, LIMB_PAIRS, fixture_a, fixture_symmetric


def _sequence(vectors: np.ndarray) -> FeatureSequence:
    return FeatureSequence(
        vectors=np.asarray(vectors, dtype=float),
        offsets=[0],
        source_dim=vectors.shape[1],
    )


def _circle(noise: float, seed: int, cycles: int = 10, period: int = 50) -> np.ndarray:
    theta = 2 * np.pi * np.arange(cycles * period) / period
    points = np.column_stack([np.cos(theta), np.sin(theta)])
    return points + np.random.default_rng(seed).normal(0.0, noise, size=points.shape)


class TestStacking:
    def test_dimension(self):
        names = [f"c{i}" for i in range(12)]
        series = TimeSeries(samples=np.zeros((20, 12)), rate=30.0, channel_names=names)
        feats = stack_features(series, [-5, 0, 5])
        assert feats.dim == 36
        assert feats.offsets == [-5, 0, 5]

    def test_single_offset_is_identity(self, rng: np.random.Generator):
        series = TimeSeries(
            samples=rng.normal(size=(15, 3)), rate=30.0, channel_names=["a", "b", "c"]
        )
        stacked = stack_features(series, [0])
        np.testing.assert_array_equal(stacked.vectors, series.samples)

    def test_clamps_at_trial_start(self):
        samples = np.array([[1.0, 10.0], [2.0, 20.0], [3.0, 30.0]])
        series = TimeSeries(samples=samples, rate=30.0, channel_names=["a", "b"])
        feats = stack_features(series, [-1, 0, 1])
        np.testing.assert_array_equal(
            feats.vectors[0], [1.0, 10.0, 1.0, 10.0, 2.0, 20.0]
        )
        np.testing.assert_array_equal(
            feats.vectors[2], [2.0, 20.0, 3.0, 30.0, 3.0, 30.0]
        )

    def test_offsets_need_zero(self):
        series = TimeSeries(samples=np.zeros((5, 1)), rate=30.0, channel_names=["a"])
        with pytest.raises(FeatureError):
            stack_features(series, [-1, 1])


class TestMirror:
    def test_equal_limbs_unchanged(self):
        trial = fixture_symmetric()
        mirror = MirrorMap.from_pairs(LIMB_CHANNELS, LIMB_PAIRS)
        mirrored = mirror_features(trial.series, mirror)
        np.testing.assert_array_equal(mirrored.samples, trial.series.samples)

    def test_involution_is_bit_exact(self, rng: np.random.Generator):
        series = TimeSeries(
            samples=rng.normal(size=(30, 4)),
            rate=30.0,
            channel_names=list(LIMB_CHANNELS),
        )
        pairs = [("l_x", "r_x", True), ("l_y", "r_y", False)]
        mirror = MirrorMap.from_pairs(LIMB_CHANNELS, pairs)
        twice = mirror_features(mirror_features(series, mirror), mirror)
        np.testing.assert_array_equal(twice.samples, series.samples)

    def test_gait_mirror_is_half_stride_shift(self, gait):
        mirror = MirrorMap.from_pairs(LIMB_CHANNELS, LIMB_PAIRS)
        mirrored = mirror_features(gait.series, mirror).samples
        original = gait.series.samples
        half = 40
        assert np.abs(mirrored[:-half] - original[half:]).max() < 1e-9

    def test_rejects_non_involution(self):
        with pytest.raises(ValueError):
            MirrorMap(permutation=[1, 2, 0], negate=[False, False, False])

    def test_rejects_unknown_channel(self):
        with pytest.raises(FeatureError, match="unknown channel"):
            MirrorMap.from_pairs(LIMB_CHANNELS, [("l_x", "tail", False)])

    def test_load_from_csv(self, tmp_path: Path):
        path = tmp_path / "mirror.csv"
        path.write_text("left,right,negate\nl_x,r_x,1\nl_y,r_y,0\n", encoding="utf-8")
        mirror = load_mirror_map(path, list(LIMB_CHANNELS))
        assert mirror.permutation == [2, 3, 0, 1]
        assert mirror.negate == [True, False, True, False]

    def test_channel_count_must_match(self):
        series = TimeSeries(
            samples=np.zeros((4, 2)), rate=30.0, channel_names=["a", "b"]
        )
        with pytest.raises(FeatureError):
            mirror_features(series, MirrorMap.identity(3))


class TestDirection:
    def test_linear_motion(self):
        v = np.array([1.0, -2.0, 0.5])
        feats = _sequence(np.arange(12)[:, None] * v)
        for i in range(2, 10):
            unit, moving = direction_of_movement(feats, i)
            assert moving
            np.testing.assert_allclose(unit, v / np.linalg.norm(v), atol=1e-12)

    def test_constant_sequence_has_no_direction(self):
        unit, moving = direction_of_movement(_sequence(np.ones((10, 2))), 4)
        assert not moving
        np.testing.assert_array_equal(unit, 0.0)

    def test_five_point_stencil_is_exact_for_quartics(self):
        values = (np.arange(10, dtype=float) ** 4)[:, None]
        assert movement_derivatives(values)[5, 0] == pytest.approx(500.0, abs=1e-9)

    def test_frame_out_of_range(self):
        with pytest.raises(FeatureError):
            direction_of_movement(_sequence(np.ones((6, 1))), 6)

    @pytest.mark.parametrize("frames", [1, 2, 4])
    def test_fewer_than_five_frames(self, frames: int):
        feats = _sequence(np.arange(frames, dtype=float)[:, None])
        with pytest.raises(FeatureError, match="at least 5 frames"):
            direction_of_movement(feats, 0)
        with pytest.raises(FeatureError, match="at least 5 frames"):
            movement_derivatives(feats.vectors)

    def test_five_frames_suffice(self):
        unit, moving = direction_of_movement(_sequence(np.arange(5.0)[:, None]), 2)
        assert moving
        np.testing.assert_allclose(unit, [1.0])


class TestOrthogonalSubspace:
    def test_plane(self):
        basis = orthogonal_subspace(np.array([1.0, 0.0]))
        assert basis.shape == (2, 1)
        np.testing.assert_allclose(np.abs(basis[:, 0]), [0.0, 1.0], atol=1e-12)

    def test_orthonormal_complement(self, rng: np.random.Generator):
        direction = rng.normal(size=5)
        basis = orthogonal_subspace(direction, rng)
        assert basis.shape == (5, 4)
        np.testing.assert_allclose(basis.T @ basis, np.eye(4), atol=1e-10)
        assert np.abs(basis.T @ direction).max() < 1e-10

    def test_zero_direction(self):
        with pytest.raises(FeatureError):
            orthogonal_subspace(np.zeros(3))


class TestDensity:
    def test_scott_bandwidth(self):
        a = 2.0 * np.sqrt(31 / 32)
        samples = np.array([a] * 16 + [-a] * 16)[:, None]
        assert kde_bandwidth(samples)[0] == pytest.approx(1.0, rel=1e-12)

    def test_constant_variate_gets_floor(self, rng: np.random.Generator):
        samples = np.column_stack([rng.normal(size=20), np.full(20, 4.0)])
        bandwidth = kde_bandwidth(samples)
        assert bandwidth[1] > 0
        assert np.isfinite(kde_density(samples[:1], samples, bandwidth)).all()

    def test_density_matches_direct_sum(self, rng: np.random.Generator):
        samples = rng.normal(size=(32, 3))
        points = rng.normal(size=(5, 3))
        bandwidth = kde_bandwidth(samples)
        expected = []
        for x in points:
            total = 0.0
            for y in samples:
                z = (x - y) / bandwidth
                norm = (2 * np.pi) ** 1.5 * np.prod(bandwidth)
                total += np.exp(-0.5 * z @ z) / norm
            expected.append(total / len(samples))
        np.testing.assert_allclose(
            kde_density(points, samples, bandwidth), expected, rtol=1e-9
        )

    def test_ascent_never_decreases_density(self, rng: np.random.Generator):
        samples = rng.normal(size=(64, 3))
        bandwidth = kde_bandwidth(samples)
        start = rng.normal(size=3) * 2
        basis = orthogonal_subspace(rng.normal(size=3), rng)
        previous = kde_density(start, samples, bandwidth)[0]
        for iterations in range(1, 8):
            coords, _ = subspace_mean_shift(
                start, basis, samples, bandwidth, 0.0, iterations
            )
            current = kde_density(start + basis @ coords, samples, bandwidth)[0]
            assert current >= previous * (1 - 1e-12)
            previous = current


class TestBundling:
    def test_offsets_orthogonal_to_motion(self):
        feats = stack_features(fixture_a(noise=0.05, seed=3).series, [0])
        bundled = bundle_features(feats, k=32, seed=0)
        assert bundled.bundled
        derivatives = movement_derivatives(feats.vectors)
        offsets = bundled.vectors - feats.vectors
        for d, o in zip(derivatives, offsets, strict=True):
            norm = np.linalg.norm(d)
            if norm < 1e-9:
                continue
            assert abs(o @ d / norm) <= 1e-6 * np.linalg.norm(o) + 1e-12

    def test_collinear_repetitions_stay_put(self):
        tri = np.abs((np.arange(200) % 20) - 10).astype(float)
        vectors = tri[:, None] * np.array([0.3, -0.1, 0.2])
        feats = _sequence(vectors)
        bundled = bundle_features(feats, k=16)
        np.testing.assert_allclose(bundled.vectors, vectors, atol=1e-6)

    def test_noisy_circle_moves_toward_ring(self):
        points = _circle(noise=0.1, seed=7)
        bundled = bundle_features(_sequence(points), k=64, seed=0)
        before = np.abs(np.linalg.norm(points, axis=1) - 1).mean()
        after = np.abs(np.linalg.norm(bundled.vectors, axis=1) - 1).mean()
        assert after < before

    def test_deterministic_across_threads(self):
        feats = _sequence(_circle(noise=0.05, seed=2, cycles=4))
        single = bundle_features(feats, k=16, seed=5, threads=1)
        multi = bundle_features(feats, k=16, seed=5, threads=4)
        np.testing.assert_array_equal(single.vectors, multi.vectors)

    def test_needs_more_frames_than_neighbors(self):
        with pytest.raises(FeatureError):
            bundle_features(_sequence(np.ones((10, 2))), k=64)
