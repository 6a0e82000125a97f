from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from motionseg.errors import IngestError
from motionseg.ingest import (
    binomial_weights,
    filter_series,
    load_annotations,
    load_timeseries,
    preprocess_acceleration,
    preprocess_emg,
    resample,
    write_annotations,
    write_timeseries,
)
from motionseg.models import GroundTruth, KeyPoint, LabeledInterval, TimeSeries


def _write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


def _amplitude(x: np.ndarray, bin_index: int) -> float:
    return float(np.abs(np.fft.rfft(x))[bin_index] * 2 / len(x))


def test_load_small_trial(tmp_path: Path):
    path = _write(tmp_path / "t.csv", "# rate=30\na,b\n0.1,0.2\n0.3,0.4\n0.5,0.6\n")
    series = load_timeseries(path)
    assert series.frame_count == 3
    assert series.channel_count == 2
    assert series.rate == 30
    assert series.channel_names == ["a", "b"]
    np.testing.assert_allclose(series.samples[2], [0.5, 0.6])


def test_nan_cell_names_row_and_column(tmp_path: Path):
    path = _write(
        tmp_path / "t.csv", "# rate=120\nlhumerus_rx,lhumerus_ry\n0.1,0.2\nNaN,0.4\n"
    )
    with pytest.raises(IngestError) as excinfo:
        load_timeseries(path)
    assert excinfo.value.row == 2
    assert excinfo.value.column == "lhumerus_rx"
    assert "row=2" in str(excinfo.value)
    assert "column=lhumerus_rx" in str(excinfo.value)


def test_empty_data_section(tmp_path: Path):
    path = _write(tmp_path / "t.csv", "# rate=30\na,b\n")
    with pytest.raises(IngestError, match="no frames"):
        load_timeseries(path)


@pytest.mark.parametrize(
    "text",
    [
        "rate=30\na\n1\n",
        "# rate=0\na\n1\n",
        "# rate=30\na,a\n1,2\n",
        "# rate=30\na,b\n1,2,3\n",
        "# rate=30\na,b\n1,x\n",
    ],
)
def test_malformed_files(tmp_path: Path, text: str):
    with pytest.raises(IngestError):
        load_timeseries(_write(tmp_path / "t.csv", text))


@pytest.mark.parametrize(
    ("text", "row", "found"),
    [
        ("# rate=30\na,b\n1,2\n3,4\n5,6,7\n", 3, 3),
        ("# rate=30\na,b\n1,2\n3\n", 2, 1),
        ("# rate=30\na,b\n1,2\n\n3,4\n5\n", 3, 1),
    ],
)
def test_ragged_row_is_reported(tmp_path: Path, text: str, row: int, found: int):
    with pytest.raises(IngestError, match="expected 2 columns") as excinfo:
        load_timeseries(_write(tmp_path / "t.csv", text))
    assert excinfo.value.row == row
    assert f"found {found}" in str(excinfo.value)


def test_write_then_load(tmp_path: Path, rng: np.random.Generator):
    series = TimeSeries(
        samples=rng.normal(size=(20, 3)), rate=25.0, channel_names=["x", "y", "z"]
    )
    write_timeseries(series, tmp_path / "t.csv")
    loaded = load_timeseries(tmp_path / "t.csv")
    assert loaded.rate == 25.0
    np.testing.assert_allclose(loaded.samples, series.samples, rtol=1e-9)


def test_resample_frame_count():
    series = TimeSeries(
        samples=np.zeros((2000, 1)), rate=2000.0, channel_names=["emg"]
    )
    assert resample(series, 30.0).frame_count == 30


def test_resample_identity():
    samples = np.arange(12, dtype=float).reshape(6, 2)
    series = TimeSeries(samples=samples, rate=30.0, channel_names=["a", "b"])
    out = resample(series, 30.0)
    np.testing.assert_array_equal(out.samples, samples)
    assert out.rate == 30.0


def test_resample_ramp():
    series = TimeSeries(
        samples=np.array([[0.0], [1.0], [2.0], [3.0]]), rate=4.0, channel_names=["r"]
    )
    out = resample(series, 2.0)
    np.testing.assert_allclose(out.samples[:, 0], [0.0, 2.0])
    assert out.rate == 2.0


@pytest.mark.parametrize(
    ("frames", "rate", "target"), [(2000, 2000.0, 30.0), (480, 120.0, 30.0)]
)
def test_resample_there_and_back(frames: int, rate: float, target: float):
    t = np.arange(frames) / rate
    series = TimeSeries(
        samples=np.sin(2 * np.pi * 0.5 * t)[:, None], rate=rate, channel_names=["s"]
    )
    down = resample(series, target)
    back = resample(down, rate)
    assert back.frame_count == frames
    assert back.rate == rate
    # past the last coarse frame the interpolation holds the edge value
    covered = int((down.frame_count - 1) * rate / target) + 1
    np.testing.assert_allclose(
        back.samples[:covered, 0], series.samples[:covered, 0], atol=5e-3
    )


def test_rectify():
    series = TimeSeries(
        samples=np.array([[-1.0], [2.0], [-3.0]]), rate=30.0, channel_names=["e"]
    )
    rectified = filter_series(series, "rectify").samples[:, 0]
    np.testing.assert_array_equal(rectified, [1.0, 2.0, 3.0])


def test_binomial_preserves_constants():
    assert binomial_weights(16).sum() == pytest.approx(1.0)
    series = TimeSeries(
        samples=np.full((50, 2), 3.5), rate=30.0, channel_names=["a", "b"]
    )
    smoothed = filter_series(series, "binomial", window=16).samples
    np.testing.assert_allclose(smoothed, 3.5)


def test_lowpass_attenuates_high_component():
    rate = 30.0
    t = np.arange(600) / rate
    x = np.sin(2 * np.pi * 1.0 * t) + np.sin(2 * np.pi * 14.0 * t)
    series = TimeSeries(samples=x[:, None], rate=rate, channel_names=["s"])
    out = filter_series(series, "lowpass", cutoff_hz=5.0).samples[:, 0]
    # central 10 s hold whole periods of both components and no edge transients
    core_in, core_out = x[150:450], out[150:450]
    assert _amplitude(core_out, 10) == pytest.approx(_amplitude(core_in, 10), rel=0.02)
    assert _amplitude(core_out, 140) < 0.05 * _amplitude(core_in, 140)


def test_lowpass_cutoff_must_stay_below_nyquist():
    series = TimeSeries(samples=np.zeros((100, 1)), rate=30.0, channel_names=["s"])
    with pytest.raises(IngestError, match="cutoff"):
        filter_series(series, "lowpass", cutoff_hz=20.0)


def test_filter_needs_parameters():
    series = TimeSeries(samples=np.zeros((10, 1)), rate=30.0, channel_names=["s"])
    with pytest.raises(IngestError):
        filter_series(series, "binomial")
    with pytest.raises(IngestError):
        filter_series(series, "lowpass")


@pytest.mark.parametrize("window", [0, 1])
def test_binomial_window_needs_two_frames(window: int):
    series = TimeSeries(samples=np.zeros((10, 1)), rate=30.0, channel_names=["s"])
    with pytest.raises(IngestError, match="at least 2 frames"):
        filter_series(series, "binomial", window=window)


def test_two_frame_binomial_averages_neighbours():
    assert binomial_weights(2).tolist() == pytest.approx([0.5, 0.5])


def test_preprocess_emg_runs_cutoff_at_source_rate():
    rate = 2000.0
    t = np.arange(4000) / rate
    raw = np.sin(2 * np.pi * 50 * t) * (1 + 0.5 * np.sin(2 * np.pi * 0.5 * t))
    series = TimeSeries(samples=raw[:, None], rate=rate, channel_names=["emg"])
    out = preprocess_emg(series)
    assert out.rate == 30.0
    assert out.frame_count == 60
    assert np.isfinite(out.samples).all()
    assert out.samples[10:50].mean() > 0.2


def test_preprocess_acceleration():
    series = TimeSeries(
        samples=np.full((200, 3), 9.81), rate=100.0, channel_names=["x", "y", "z"]
    )
    out = preprocess_acceleration(series)
    assert out.frame_count == 60
    np.testing.assert_allclose(out.samples, 9.81)


def test_interval_annotations_are_one_based(tmp_path: Path):
    path = _write(
        tmp_path / "gt.csv",
        "start_frame,end_frame,label\n1,10,walk\n11,15,transition\n16,30,jump\n",
    )
    gt = load_annotations(path)
    assert gt.kind == "intervals"
    assert [(it.start, it.end, it.label) for it in gt.intervals] == [
        (0, 9, "walk"),
        (10, 14, "transition"),
        (15, 29, "jump"),
    ]
    labels = gt.frame_labels(32)
    assert labels[0] == "walk"
    assert labels[30] == "transition"


def test_keypoint_annotations(tmp_path: Path):
    path = _write(tmp_path / "kp.csv", "keyframe,label\n5,punch\n40,kick\n")
    gt = load_annotations(path)
    assert gt.kind == "keypoints"
    assert gt.keypoints == [
        KeyPoint(frame=4, label="punch"),
        KeyPoint(frame=39, label="kick"),
    ]


def test_overlapping_annotations_rejected(tmp_path: Path):
    path = _write(
        tmp_path / "gt.csv", "start_frame,end_frame,label\n1,10,a\n10,20,b\n"
    )
    with pytest.raises(IngestError):
        load_annotations(path)


def test_unknown_annotation_layout(tmp_path: Path):
    with pytest.raises(IngestError, match="expected columns"):
        load_annotations(_write(tmp_path / "gt.csv", "from,to\n1,2\n"))


def test_annotations_write_back(tmp_path: Path):
    gt = GroundTruth(
        intervals=[
            LabeledInterval(start=0, end=4, label="a"),
            LabeledInterval(start=5, end=9, label="b"),
        ]
    )
    write_annotations(gt, tmp_path / "gt.csv")
    assert (tmp_path / "gt.csv").read_text(encoding="utf-8").splitlines()[1] == "1,5,a"
    assert load_annotations(tmp_path / "gt.csv") == gt
