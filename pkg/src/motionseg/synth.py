"""Synthetic trials with known structure such as repeated cycles and mirrored limbs."""

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .models import GroundTruth, LabeledInterval, TimeSeries

TAU = 2 * np.pi


@dataclass
class SyntheticTrial:
    """A generated recording together with everything known about it.

    Attributes:
        series: The recording.
        truth: Interval annotations (one interval per cycle or step).
        cycle_starts: First frame of every cycle, 0-based.
        mirror_pairs: Channel pairs swapped by the mirror map.
    """

    series: TimeSeries
    truth: GroundTruth
    cycle_starts: list[int] = field(default_factory=list)
    mirror_pairs: list[tuple[str, str, bool]] = field(default_factory=list)


def curve_a(theta: np.ndarray) -> np.ndarray:
    return np.column_stack([
        np.cos(theta), np.sin(theta), np.cos(2 * theta), np.sin(2 * theta)
    ])


def curve_b(theta: np.ndarray, center: float = 3.0) -> np.ndarray:
    return center + np.column_stack([
        np.cos(theta), np.sin(theta), 0.5 * np.cos(3 * theta), 0.5 * np.sin(3 * theta)
    ])


def limb(theta: np.ndarray) -> np.ndarray:
    return np.column_stack([
        np.cos(theta), 0.5 * np.sin(theta) + 0.3 * np.cos(2 * theta)
    ])


def _line(
    start: np.ndarray, stop: np.ndarray, frames: int, bump: float = 0.0
) -> np.ndarray:
    u = (np.arange(frames) + 1) / (frames + 1)
    path = start + u[:, None] * (stop - start)
    if bump:
        path[:, -1] += bump * np.sin(np.pi * u)
    return path


def _cycle_intervals(starts: list[int], stop: int, label: str) -> list[LabeledInterval]:
    bounds = [*starts, stop]
    return [
        LabeledInterval(start=lo, end=hi - 1, label=label)
        for lo, hi in zip(bounds, bounds[1:], strict=False)
    ]


def _noisy(samples: np.ndarray, noise: float, seed: int) -> np.ndarray:
    if noise <= 0:
        return samples
    rng = np.random.default_rng(seed)
    return samples + rng.normal(0.0, noise, size=samples.shape)


CHANNELS = ["c0", "c1", "c2", "c3"]


def fixture_a(
    noise: float = 0.05,
    seed: int = 0,
    cycles: int = 10,
    period: int = 40,
    rate: float = 30.0,
) -> SyntheticTrial:
    """One cyclic activity over the whole trial."""
    t = np.arange(cycles * period)
    samples = _noisy(curve_a(TAU * t / period), noise, seed)
    starts = [c * period for c in range(cycles)]
    return SyntheticTrial(
        series=TimeSeries(samples=samples, rate=rate, channel_names=list(CHANNELS)),
        truth=GroundTruth(intervals=_cycle_intervals(starts, len(t), "a")),
        cycle_starts=starts,
    )


def fixture_b(noise: float = 0.05, seed: int = 0, rate: float = 25.0) -> SyntheticTrial:
    """Two cyclic blocks split by a 30-frame transition.

    The first block holds 10 cycles of 30 frames, the second 7 cycles over 300
    frames.
    """
    block_a = curve_a(TAU * np.arange(300) / 30)
    block_b = curve_b(TAU * np.arange(300) * 7 / 300)
    bridge = _line(curve_a(np.array([0.0]))[0], curve_b(np.array([0.0]))[0], 30)
    samples = _noisy(np.vstack([block_a, bridge, block_b]), noise, seed)
    starts_a = list(range(0, 300, 30))
    starts_b = [330 + round(300 * c / 7) for c in range(7)]
    intervals = [
        *_cycle_intervals(starts_a, 300, "a"),
        LabeledInterval(start=300, end=329, label="transition"),
        *_cycle_intervals(starts_b, 630, "b"),
    ]
    return SyntheticTrial(
        series=TimeSeries(samples=samples, rate=rate, channel_names=list(CHANNELS)),
        truth=GroundTruth(intervals=intervals),
        cycle_starts=starts_a + starts_b,
    )


def fixture_aba(
    noise: float = 0.05,
    seed: int = 0,
    rate: float = 30.0,
    cycles: int = 5,
    period: int = 40,
) -> SyntheticTrial:
    """A, transition, B, transition, A; the second transition takes a detour."""
    length = cycles * period
    theta = TAU * np.arange(length) / period
    origin = np.array([0.0])
    block_a, block_b = curve_a(theta), curve_b(theta)
    there = _line(curve_a(origin)[0], curve_b(origin)[0], 20)
    back = _line(curve_b(origin)[0], curve_a(origin)[0], 20, bump=2.0)
    samples = _noisy(np.vstack([block_a, there, block_b, back, block_a]), noise, seed)
    b0 = length + 20
    a1 = b0 + length + 20
    starts_a = [c * period for c in range(cycles)]
    starts_a += [a1 + c * period for c in range(cycles)]
    starts_b = [b0 + c * period for c in range(cycles)]
    intervals = [
        *_cycle_intervals(starts_a[:cycles], length, "a"),
        LabeledInterval(start=length, end=b0 - 1, label="transition"),
        *_cycle_intervals(starts_b, b0 + length, "b"),
        LabeledInterval(start=b0 + length, end=a1 - 1, label="transition"),
        *_cycle_intervals(starts_a[cycles:], a1 + length, "a"),
    ]
    return SyntheticTrial(
        series=TimeSeries(samples=samples, rate=rate, channel_names=list(CHANNELS)),
        truth=GroundTruth(intervals=intervals),
        cycle_starts=sorted(starts_a + starts_b),
    )


LIMB_CHANNELS = ["l_x", "l_y", "r_x", "r_y"]
LIMB_PAIRS: list[tuple[str, str, bool]] = [("l_x", "r_x", False), ("l_y", "r_y", False)]


def _limb_trial(
    left: np.ndarray,
    right: np.ndarray,
    strides: int,
    period: int,
    rate: float,
    noise: float,
    seed: int,
) -> SyntheticTrial:
    samples = _noisy(np.hstack([left, right]), noise, seed)
    half = period // 2
    starts = list(range(0, strides * period, half))
    labels = ["left_step", "right_step"]
    intervals = [
        LabeledInterval(start=s, end=s + half - 1, label=labels[k % 2])
        for k, s in enumerate(starts)
    ]
    return SyntheticTrial(
        series=TimeSeries(
            samples=samples, rate=rate, channel_names=list(LIMB_CHANNELS)
        ),
        truth=GroundTruth(intervals=intervals),
        cycle_starts=starts,
        mirror_pairs=list(LIMB_PAIRS),
    )


def fixture_gait(
    noise: float = 0.0,
    seed: int = 0,
    strides: int = 3,
    period: int = 80,
    rate: float = 30.0,
) -> SyntheticTrial:
    """Walking-like limbs, the right one half a stride behind: R(t) = L(t + T/2)."""
    t = np.arange(strides * period)
    theta = TAU * t / period
    right = limb(theta + np.pi)
    return _limb_trial(limb(theta), right, strides, period, rate, noise, seed)


def fixture_symmetric(
    noise: float = 0.0,
    seed: int = 0,
    strides: int = 3,
    period: int = 80,
    rate: float = 30.0,
) -> SyntheticTrial:
    """Both limbs move in unison, so mirroring changes nothing."""
    theta = TAU * np.arange(strides * period) / period
    return _limb_trial(limb(theta), limb(theta), strides, period, rate, noise, seed)


def fixture_asymmetric(
    noise: float = 0.0,
    seed: int = 0,
    strides: int = 3,
    period: int = 80,
    rate: float = 30.0,
) -> SyntheticTrial:
    """Only the left limb moves; the mirrored pose never occurs."""
    theta = TAU * np.arange(strides * period) / period
    still = np.full((len(theta), 2), 3.0)
    return _limb_trial(limb(theta), still, strides, period, rate, noise, seed)


def fixture_blocks(
    blocks: int,
    cycles: int = 3,
    period: int = 40,
    noise: float = 0.0,
    seed: int = 0,
    rate: float = 30.0,
) -> SyntheticTrial:
    """Distinct cyclic blocks back to back; neighbor counts stay bounded."""
    theta = TAU * np.arange(cycles * period) / period
    parts = [curve_a(theta) + np.array([4.0 * b, 0.0, 0.0, 0.0]) for b in range(blocks)]
    samples = _noisy(np.vstack(parts), noise, seed)
    length = cycles * period
    intervals = [
        LabeledInterval(start=b * length, end=(b + 1) * length - 1, label=f"block{b}")
        for b in range(blocks)
    ]
    return SyntheticTrial(
        series=TimeSeries(samples=samples, rate=rate, channel_names=list(CHANNELS)),
        truth=GroundTruth(intervals=intervals),
        cycle_starts=[k * period for k in range(blocks * cycles)],
    )


FIXTURES: dict[str, Callable[..., SyntheticTrial]] = {
    "fixA": fixture_a,
    "fixB": fixture_b,
    "aba": fixture_aba,
    "gait": fixture_gait,
    "symmetric": fixture_symmetric,
    "asymmetric": fixture_asymmetric,
}
