"""Loading, resampling and filtering of raw recordings."""

import re
from pathlib import Path
from typing import Literal

import numpy as np
import pandas as pd
import structlog
from scipy import signal
from scipy.ndimage import convolve1d
from scipy.stats import binom

from .errors import IngestError
from .models import GroundTruth, KeyPoint, LabeledInterval, TimeSeries

logger = structlog.get_logger(__name__)

RATE_PATTERN = re.compile(r"^#\s*rate\s*=\s*([0-9.eE+-]+)\s*$")

FilterKind = Literal["rectify", "lowpass", "binomial"]


def _read_preamble(path: Path, lines: list[str]) -> tuple[float, list[str]]:
    rate_line = lines[0].strip() if lines else ""
    header_line = lines[1].strip() if len(lines) > 1 else ""
    matched = RATE_PATTERN.match(rate_line)
    if matched is None:
        raise IngestError(f"{path}: first line must be '# rate=<fps>'", row=0)
    try:
        rate = float(matched.group(1))
    except ValueError as e:
        raise IngestError(f"{path}: unreadable rate {matched.group(1)!r}", row=0) from e
    if not rate > 0:
        raise IngestError(f"{path}: rate must be positive, got {rate}", row=0)
    channel_names = [name.strip() for name in header_line.split(",")]
    if not header_line or any(name == "" for name in channel_names):
        raise IngestError(f"{path}: missing or empty channel names", row=0)
    if len(set(channel_names)) != len(channel_names):
        raise IngestError(f"{path}: channel names must be unique", row=0)
    return rate, channel_names


def _split_rows(path: Path, lines: list[str], width: int) -> list[list[str]]:
    """Split the data section, checking the field count of every non-blank row."""
    rows = []
    for line in lines:
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != width:
            raise IngestError(
                f"{path}: expected {width} columns, found {len(fields)}",
                row=len(rows) + 1,
            )
        rows.append(fields)
    return rows


def load_timeseries(path: str | Path) -> TimeSeries:
    """Read a `# rate=<fps>` + header + numeric rows CSV into a TimeSeries.

    Rows are reported 1-based, counting non-blank data rows only.
    """
    path = Path(path)
    if not path.exists():
        raise IngestError(f"{path}: file not found")
    lines = path.read_text(encoding="utf-8").splitlines()
    rate, channel_names = _read_preamble(path, lines)
    rows = _split_rows(path, lines[2:], len(channel_names))
    if not rows:
        raise IngestError(f"{path}: no frames")

    raw = pd.DataFrame(rows, dtype=str)
    numeric = raw.apply(
        lambda column: pd.to_numeric(column.str.strip(), errors="coerce")
    )
    samples = numeric.to_numpy(dtype=np.float64)
    bad = ~np.isfinite(samples)
    if bad.any():
        row, col = (int(v) for v in np.argwhere(bad)[0])
        raise IngestError(
            f"{path}: non-finite value {raw.iat[row, col]!r}",
            row=row + 1,
            column=channel_names[col],
        )

    series = TimeSeries(samples=samples, rate=rate, channel_names=channel_names)
    logger.info(
        "Loaded time series",
        file=str(path),
        frames=series.frame_count,
        channels=series.channel_count,
        rate=rate,
    )
    return series


def write_timeseries(series: TimeSeries, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(series.samples, columns=series.channel_names)
    with path.open("w", encoding="utf-8") as f:
        f.write(f"# rate={series.rate:g}\n")
        frame.to_csv(f, index=False, float_format="%.10g", lineterminator="\n")


def resample(series: TimeSeries, target_rate: float) -> TimeSeries:
    """Linear-interpolation resampling; the output keeps round(m·target/rate) frames."""
    if not target_rate > 0:
        raise IngestError(f"target rate must be positive, got {target_rate}")
    m = series.frame_count
    n_out = max(1, round(m * target_rate / series.rate))
    if target_rate == series.rate:
        return series.with_samples(series.samples.copy())
    positions = np.arange(n_out) * (series.rate / target_rate)
    source = np.arange(m, dtype=np.float64)
    samples = np.column_stack([
        np.interp(positions, source, series.samples[:, c])
        for c in range(series.channel_count)
    ])
    logger.debug(
        "Resampled", frames=m, frames_out=n_out, rate=series.rate, target=target_rate
    )
    return series.with_samples(samples, rate=target_rate)


def binomial_weights(window: int) -> np.ndarray:
    return binom.pmf(np.arange(window), window - 1, 0.5)


def filter_series(
    series: TimeSeries,
    kind: FilterKind,
    *,
    cutoff_hz: float | None = None,
    window: int | None = None,
) -> TimeSeries:
    """Apply one filter to every channel.

    Args:
        series: Input recording.
        kind: `rectify` (absolute value), `lowpass` (2nd-order Butterworth,
            forward-backward, needs `cutoff_hz`) or `binomial` (needs `window`).
        cutoff_hz: Low-pass cutoff, strictly below the Nyquist frequency.
        window: Binomial window length in frames, at least 2.
    """
    samples = series.samples
    if kind == "rectify":
        return series.with_samples(np.abs(samples))

    if kind == "lowpass":
        if cutoff_hz is None or not 0 < cutoff_hz < series.rate / 2:
            raise IngestError(
                f"low-pass cutoff {cutoff_hz} Hz must lie in (0, {series.rate / 2}) Hz"
            )
        b, a = signal.butter(2, cutoff_hz, btype="low", fs=series.rate)
        padlen = min(3 * max(len(a), len(b)), series.frame_count - 1)
        filtered = signal.filtfilt(b, a, samples, axis=0, padtype="even", padlen=padlen)
        return series.with_samples(filtered)

    if kind == "binomial":
        if window is None or window < 2:
            raise IngestError(f"binomial window needs at least 2 frames, got {window}")
        weights = binomial_weights(window)
        filtered = convolve1d(samples, weights, axis=0, mode="reflect")
        return series.with_samples(filtered)

    raise IngestError(f"unknown filter kind {kind!r}")


def preprocess_emg(
    series: TimeSeries, target_rate: float = 30.0, cutoff_hz: float = 20.0
) -> TimeSeries:
    # the cutoff must run at the source rate; 20 Hz is above a 30 Hz stream's Nyquist
    rectified = filter_series(series, "rectify")
    smoothed = filter_series(rectified, "lowpass", cutoff_hz=cutoff_hz)
    return resample(smoothed, target_rate)


def preprocess_acceleration(
    series: TimeSeries, target_rate: float = 30.0, window: int = 16
) -> TimeSeries:
    return filter_series(resample(series, target_rate), "binomial", window=window)


def load_annotations(path: str | Path) -> GroundTruth:
    """Read interval or key-point annotations.

    Interval files have `start_frame,end_frame,label` columns, key-point files
    `keyframe,label`.
    """
    path = Path(path)
    if not path.exists():
        raise IngestError(f"{path}: file not found")
    frame = pd.read_csv(path, dtype={"label": str}, encoding="utf-8")
    columns = set(frame.columns)
    try:
        if {"start_frame", "end_frame", "label"} <= columns:
            intervals = [
                LabeledInterval(
                    start=int(row.start_frame) - 1,
                    end=int(row.end_frame) - 1,
                    label=str(row.label),
                )
                for row in frame.itertuples(index=False)
            ]
            return GroundTruth(intervals=intervals)
        if {"keyframe", "label"} <= columns:
            keypoints = [
                KeyPoint(frame=int(row.keyframe) - 1, label=str(row.label))
                for row in frame.itertuples(index=False)
            ]
            return GroundTruth(keypoints=keypoints)
    except ValueError as e:
        raise IngestError(f"{path}: invalid annotation: {e}") from e
    raise IngestError(
        f"{path}: expected columns start_frame,end_frame,label or keyframe,label"
    )


def write_annotations(gt: GroundTruth, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if gt.kind == "keypoints":
        frame = pd.DataFrame({
            "keyframe": [kp.frame + 1 for kp in gt.keypoints],
            "label": [kp.label for kp in gt.keypoints],
        })
    else:
        frame = pd.DataFrame({
            "start_frame": [it.start + 1 for it in gt.intervals],
            "end_frame": [it.end + 1 for it in gt.intervals],
            "label": [it.label for it in gt.intervals],
        })
    frame.to_csv(path, index=False, encoding="utf-8")
