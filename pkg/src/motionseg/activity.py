"""Split a trial into activities and transitions by growing regions over the SSSM."""

from typing import Literal

import numpy as np
import structlog

from .errors import SegmentationError
from .models import ActivitySegmentation, GrownRegion, Interval
from .neighborhood import Neighborhoods
from .utils import OperationCounter

logger = structlog.get_logger(__name__)


def remove_diagonal_band(
    nbrs: Neighborhoods, rate: float, seconds: float = 1.0
) -> Neighborhoods:
    """Drop every pair with |i − j| ≤ round(rate · seconds)."""
    if not rate > 0:
        raise SegmentationError(f"rate must be positive, got {rate}")
    band = round(rate * seconds)
    keep = np.abs(nbrs.entry_rows - nbrs.indices) > band
    trimmed = nbrs.select(keep)
    logger.debug("Removed diagonal band", band=band, entries=trimmed.entry_count)
    return trimmed


def region_grow(
    nbrs: Neighborhoods,
    direction: Literal["forward", "backward"],
    stop_window: int = 8,
    counter: OperationCounter | None = None,
) -> list[GrownRegion]:
    """Grow triangular regions row by row and return them in time order.

    A region only counts pairs whose both frames lie between its seed and the
    current row. Once it has met its first neighbor, `stop_window` consecutive
    rows without a new neighbor close it at the last neighbor-bearing row; the
    next region is seeded right after that corner. Every frame ends up in
    exactly one region.
    """
    if stop_window < 1:
        raise SegmentationError(f"stop window must be >= 1, got {stop_window}")
    if direction not in ("forward", "backward"):
        raise SegmentationError(f"unknown direction {direction!r}")
    m = nbrs.frame_count
    forward = direction == "forward"
    rows = range(m) if forward else range(m - 1, -1, -1)
    regions: list[GrownRegion] = []
    seed = 0 if forward else m - 1
    last: int | None = None

    for j in rows:
        cols, _ = nbrs.row(j)
        if counter is not None:
            counter.add(1 + len(cols))
        if forward:
            found = np.searchsorted(cols, j) - np.searchsorted(cols, seed)
        else:
            found = np.searchsorted(cols, seed, side="right") - np.searchsorted(
                cols, j, side="right"
            )
        if found > 0:
            last = j
        elif last is not None and abs(j - last) >= stop_window:
            if forward:
                regions.append(GrownRegion(start=seed, end=last, corner=last))
                seed = last + 1
            else:
                regions.append(GrownRegion(start=last, end=seed, corner=last))
                seed = last - 1
            last = None

    if forward:
        if last is not None:
            regions.append(GrownRegion(start=seed, end=last, corner=last))
            if last < m - 1:
                regions.append(GrownRegion(start=last + 1, end=m - 1))
        elif seed <= m - 1:
            regions.append(GrownRegion(start=seed, end=m - 1))
    else:
        if last is not None:
            regions.append(GrownRegion(start=last, end=seed, corner=last))
            if last > 0:
                regions.append(GrownRegion(start=0, end=last - 1))
        elif seed >= 0:
            regions.append(GrownRegion(start=0, end=seed))
        regions.reverse()

    logger.debug(
        "Grew regions",
        direction=direction,
        regions=len(regions),
        corners=[r.corner for r in regions if r.corner is not None],
    )
    return regions


def _clip_crossings(spans: list[tuple[int, int]]) -> list[tuple[int, int]]:
    clipped: list[tuple[int, int]] = []
    for start, end in sorted(spans):
        if clipped and start <= clipped[-1][1]:
            prev_start, prev_end = clipped[-1]
            mid = (start + prev_end) // 2
            clipped[-1] = (prev_start, mid)
            start = mid + 1
            if clipped[-1][1] < clipped[-1][0]:
                clipped.pop()
        if start <= end:
            clipped.append((start, end))
    return clipped


def _gaps(spans: list[tuple[int, int]], m: int) -> list[Interval]:
    gaps: list[Interval] = []
    cursor = 0
    for start, end in spans:
        if start > cursor:
            gaps.append(Interval(start=cursor, end=start - 1))
        cursor = end + 1
    if cursor < m:
        gaps.append(Interval(start=cursor, end=m - 1))
    return gaps


def combine_regions(
    forward: list[GrownRegion],
    backward: list[GrownRegion],
    m: int,
    min_length: int = 0,
) -> ActivitySegmentation:
    """Pair each forward region with the backward region holding its end corner.

    The activity is the intersection of the pair, i.e. it runs from the later
    of the forward seed and the backward start corner to the forward end
    corner. Crossing activities are clipped at their midpoint and activities
    shorter than `min_length` frames become transitions.
    """
    if m < 1:
        raise SegmentationError("segmentation needs at least one frame")
    spans: list[tuple[int, int]] = []
    for region in forward:
        if region.corner is None:
            continue
        partner = next(
            (
                b
                for b in backward
                if b.start <= region.corner <= b.end and b.corner is not None
            ),
            None,
        )
        if partner is None or partner.corner is None:
            continue
        start = max(region.start, partner.corner)
        if start <= region.corner:
            spans.append((start, region.corner))

    spans = [
        (start, end)
        for start, end in _clip_crossings(spans)
        if end - start + 1 >= min_length
    ]
    return ActivitySegmentation(
        frame_count=m,
        activities=[Interval(start=s, end=e) for s, e in spans],
        transitions=_gaps(spans, m),
    )


def segment_activities(
    nbrs: Neighborhoods,
    rate: float,
    stop_window: int = 8,
    min_seconds: float = 1.0,
    counter: OperationCounter | None = None,
) -> ActivitySegmentation:
    """Grow regions forward and backward on band-free neighborhoods, then combine."""
    forward = region_grow(nbrs, "forward", stop_window, counter)
    backward = region_grow(nbrs, "backward", stop_window, counter)
    min_length = round(rate * min_seconds)
    segmentation = combine_regions(forward, backward, nbrs.frame_count, min_length)
    logger.info(
        "Segmented activities",
        stage="activities",
        frames=nbrs.frame_count,
        activities=[(a.start, a.end) for a in segmentation.activities],
        transitions=len(segmentation.transitions),
    )
    return segmentation
