"""Compare primitive cuts of a motion with those of its mirror image."""

import structlog

from .errors import SymmetryError
from .models import Interval, SymmetryReport
from .neighborhood import Neighborhoods
from .primitives import MERGE_DISTANCE, MIN_SPAN, SLOPE_LIMIT, detect_cuts

logger = structlog.get_logger(__name__)

SYMMETRY_TOLERANCE = 5


def _near(frame: int, cuts: list[int], tolerance: int) -> bool:
    return any(abs(frame - other) <= tolerance for other in cuts)


def classify_symmetry(
    orig_cuts: list[int],
    mirr_cuts: list[int],
    tolerance: int = SYMMETRY_TOLERANCE,
    merge_distance: int = MERGE_DISTANCE,
    activity: int = 0,
) -> SymmetryReport:
    """Label the relation between original and mirrored cuts and merge them.

    symmetric: same count, pairwise within tolerance. phase_shifted: no
    mirrored cut near any original one. asymmetric: either side has no cuts.
    mixed: anything else. Mirrored cuts without an original counterpart are
    inserted unless they fall closer than `merge_distance` to a kept cut.
    """
    if tolerance < 0:
        raise SymmetryError(f"tolerance must be non-negative, got {tolerance}")
    orig = sorted(set(orig_cuts))
    mirr = sorted(set(mirr_cuts))

    if not orig or not mirr:
        classification = "asymmetric"
    elif not any(_near(c, orig, tolerance) for c in mirr):
        classification = "phase_shifted"
    elif len(orig) == len(mirr) and all(
        abs(a - b) <= tolerance for a, b in zip(orig, mirr, strict=True)
    ):
        classification = "symmetric"
    else:
        classification = "mixed"

    merged = list(orig)
    for cut in mirr:
        if _near(cut, orig, tolerance):
            continue
        if all(abs(cut - other) >= merge_distance for other in merged):
            merged.append(cut)
    report = SymmetryReport(
        activity=activity,
        classification=classification,
        original_cuts=orig,
        mirrored_cuts=mirr,
        merged_cuts=sorted(merged),
    )
    logger.debug(
        "Classified symmetry",
        activity=activity,
        classification=classification,
        added=len(report.merged_cuts) - len(orig),
    )
    return report


def mirrored_cuts(
    activity: Interval,
    cross_nbrs: Neighborhoods,
    frame_count: int,
    band: int,
    *,
    min_span: int = MIN_SPAN,
    slope_limit: float = SLOPE_LIMIT,
    merge_distance: int = MERGE_DISTANCE,
) -> list[int]:
    """Cuts found in the original × mirrored block of concatenated neighborhoods."""
    if cross_nbrs.frame_count != 2 * frame_count:
        raise SymmetryError(
            f"cross neighborhoods cover {cross_nbrs.frame_count} frames,"
            f" expected {2 * frame_count}"
        )
    cuts = detect_cuts(
        activity,
        cross_nbrs,
        min_span=min_span,
        slope_limit=slope_limit,
        merge_distance=merge_distance,
        column_offset=frame_count,
        min_lag=band,
    )
    return [c.frame for c in cuts]
