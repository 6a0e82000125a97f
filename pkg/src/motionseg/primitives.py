"""Motion primitives from warping paths through an activity's neighborhood graph."""

import math
from dataclasses import dataclass

import numpy as np
import structlog
from scipy.sparse import coo_matrix, csgraph

from .errors import PrimitiveError
from .models import CutCandidate, Interval, MotionPrimitive, WarpingPath
from .neighborhood import Neighborhoods
from .utils import OperationCounter

logger = structlog.get_logger(__name__)

# (row, column) advances allowed between consecutive path entries
STEPS = ((1, 1), (0, 1), (1, 0))
# predecessor offsets, lexicographic by (row, column)
PREDECESSORS = ((-1, -1), (-1, 0), (0, -1))

MIN_SPAN = 5
SLOPE_LIMIT = 2.0
MERGE_DISTANCE = 5


@dataclass
class NeighborhoodGraph:
    """Entries of an SSSM block as nodes; edges follow STEPS between present entries.

    Nodes are stored in (row, column) order, which is a topological order.
    `predecessors[n]` lists the node reached from by each PREDECESSORS offset, or -1.
    """

    rows: np.ndarray
    cols: np.ndarray
    costs: np.ndarray
    predecessors: np.ndarray
    column_offset: int = 0

    @property
    def node_count(self) -> int:
        return int(self.rows.shape[0])

    @property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        targets, slots = np.nonzero(self.predecessors >= 0)
        return self.predecessors[targets, slots], targets

    @property
    def edge_count(self) -> int:
        return int((self.predecessors >= 0).sum())

    def entry(self, node: int) -> tuple[int, int]:
        return int(self.rows[node]), int(self.cols[node]) - self.column_offset


def _as_span(span: Interval | tuple[int, int]) -> tuple[int, int]:
    if isinstance(span, Interval):
        return span.start, span.end
    return int(span[0]), int(span[1])


def build_neighborhood_graph(
    nbrs: Neighborhoods,
    activity: Interval | tuple[int, int],
    *,
    columns: tuple[int, int] | None = None,
    column_offset: int = 0,
    lower_triangle: bool = True,
    min_lag: int = 0,
    counter: OperationCounter | None = None,
) -> NeighborhoodGraph:
    """Graph over the entries with rows in `activity` and columns in `columns`.

    Args:
        nbrs: Neighborhoods the entries come from.
        activity: Row range (trial axis), inclusive.
        columns: Column range in `nbrs` indexing, inclusive; defaults to the
            row range shifted by `column_offset`.
        column_offset: Subtracted from a column before comparing it with a row,
            so a cross block of concatenated sequences reads like a self block.
        lower_triangle: Keep only entries with column < row.
        min_lag: Keep only entries with |row − column| > min_lag.
        counter: Receives one step per candidate edge inspected.
    """
    start, end = _as_span(activity)
    if start > end:
        raise PrimitiveError(f"empty activity [{start}, {end}]", frame=start)
    if columns is None:
        columns = (start + column_offset, end + column_offset)
    col_start, col_end = columns

    lo, hi = nbrs.indptr[start], nbrs.indptr[end + 1]
    rows = nbrs.entry_rows[lo:hi]
    cols = nbrs.indices[lo:hi]
    costs = nbrs.distances[lo:hi]
    local_cols = cols - column_offset
    keep = (cols >= col_start) & (cols <= col_end)
    if lower_triangle:
        keep &= local_cols < rows
    if min_lag > 0:
        keep &= np.abs(rows - local_cols) > min_lag
    rows, cols, costs = rows[keep], cols[keep], costs[keep]

    width = nbrs.frame_count + 1
    keys = rows * width + cols
    predecessors = np.full((rows.shape[0], len(PREDECESSORS)), -1, dtype=np.int64)
    for slot, (dr, dc) in enumerate(PREDECESSORS):
        wanted = (rows + dr) * width + (cols + dc)
        pos = np.searchsorted(keys, wanted)
        pos_clipped = np.minimum(pos, max(len(keys) - 1, 0))
        if len(keys):
            hit = keys[pos_clipped] == wanted
            predecessors[hit, slot] = pos_clipped[hit]
    if counter is not None:
        counter.add(len(PREDECESSORS) * rows.shape[0])
    return NeighborhoodGraph(
        rows=rows,
        cols=cols,
        costs=costs,
        predecessors=predecessors,
        column_offset=column_offset,
    )


def connected_components(graph: NeighborhoodGraph) -> list[np.ndarray]:
    """Weakly connected components as sorted node arrays, ordered by first entry."""
    n = graph.node_count
    if n == 0:
        return []
    sources, targets = graph.edges
    adjacency = coo_matrix(
        (np.ones(len(sources)), (sources, targets)), shape=(n, n)
    ).tocsr()
    count, labels = csgraph.connected_components(
        adjacency, directed=True, connection="weak"
    )
    order = np.argsort(labels, kind="stable")
    splits = np.cumsum(np.bincount(labels, minlength=count))[:-1]
    components = np.split(order, splits)
    components.sort(key=lambda nodes: int(nodes[0]))
    return components


def shortest_warping_path(
    graph: NeighborhoodGraph,
    component: np.ndarray,
    counter: OperationCounter | None = None,
) -> WarpingPath | None:
    """Minimum-cost path from the component's first row to its last row.

    A virtual start reaches every entry of the first row and every entry of
    the last row reaches a virtual end; each edge costs the distance stored
    at the entry it lands on. Ties go to the lexicographically smaller
    predecessor. Returns None when no entry of the last row is reachable.
    """
    nodes = np.sort(np.asarray(component, dtype=np.int64))
    if nodes.size == 0:
        raise PrimitiveError("component has no entries")
    rows = graph.rows[nodes]
    first_row, last_row = int(rows.min()), int(rows.max())

    preds = graph.predecessors[nodes]
    local = np.searchsorted(nodes, preds)
    local = np.minimum(local, nodes.size - 1)
    local = np.where((preds >= 0) & (nodes[local] == preds), local, -1)

    costs = graph.costs[nodes]
    total = np.full(nodes.size, math.inf)
    back = np.full(nodes.size, -1, dtype=np.int64)
    for t in range(nodes.size):
        if rows[t] == first_row:
            total[t] = costs[t]
            continue
        best, arg = math.inf, -1
        for p in local[t]:
            if p >= 0 and total[p] < best:
                best, arg = total[p], int(p)
        if arg >= 0:
            total[t] = best + costs[t]
            back[t] = arg
    if counter is not None:
        counter.add(len(PREDECESSORS) * nodes.size)

    ends = np.flatnonzero((rows == last_row) & np.isfinite(total))
    if ends.size == 0:
        return None
    t = int(ends[np.argmin(total[ends])])
    cost = float(total[t])
    trail: list[tuple[int, int]] = []
    while t >= 0:
        trail.append(graph.entry(int(nodes[t])))
        t = int(back[t])
    trail.reverse()
    return WarpingPath(entries=trail, cost=cost)


def filter_paths(
    paths: list[WarpingPath], min_span: int = MIN_SPAN, slope_limit: float = SLOPE_LIMIT
) -> list[WarpingPath]:
    """Keep paths spanning at least `min_span` trial frames with slope in [1/ν, ν]."""
    if not slope_limit > 1:
        raise PrimitiveError(f"slope limit must exceed 1, got {slope_limit}")
    if min_span < 1:
        raise PrimitiveError(f"minimum span must be positive, got {min_span}")
    return [
        path
        for path in paths
        if path.span >= min_span and 1 / slope_limit <= path.slope <= slope_limit
    ]


def merge_cut_candidates(
    candidates: list[CutCandidate], distance: int = MERGE_DISTANCE
) -> list[CutCandidate]:
    """Drop every candidate that lies closer than `distance` frames to a cheaper one."""
    accepted: list[CutCandidate] = []
    for candidate in sorted(candidates, key=lambda c: (c.cost, c.frame)):
        if all(abs(candidate.frame - other.frame) >= distance for other in accepted):
            accepted.append(candidate)
    return sorted(accepted, key=lambda c: c.frame)


def warping_paths(
    graph: NeighborhoodGraph, counter: OperationCounter | None = None
) -> list[WarpingPath]:
    paths = []
    for component in connected_components(graph):
        path = shortest_warping_path(graph, component, counter)
        if path is not None:
            paths.append(path)
    return paths


def detect_cuts(
    activity: Interval | tuple[int, int],
    nbrs: Neighborhoods,
    *,
    min_span: int = MIN_SPAN,
    slope_limit: float = SLOPE_LIMIT,
    merge_distance: int = MERGE_DISTANCE,
    column_offset: int = 0,
    min_lag: int = 0,
    counter: OperationCounter | None = None,
) -> list[CutCandidate]:
    """Cut candidates inside the activity, one per valid path at its first row."""
    start, end = _as_span(activity)
    graph = build_neighborhood_graph(
        nbrs,
        (start, end),
        column_offset=column_offset,
        min_lag=min_lag,
        counter=counter,
    )
    paths = warping_paths(graph, counter)
    valid = filter_paths(paths, min_span, slope_limit)
    candidates = [CutCandidate(frame=path.start[0], cost=path.cost) for path in valid]
    merged = merge_cut_candidates(candidates, merge_distance)
    cuts = [c for c in merged if start < c.frame <= end]
    logger.debug(
        "Detected cuts",
        activity=(start, end),
        nodes=graph.node_count,
        paths=len(paths),
        valid=len(valid),
        cuts=[c.frame for c in cuts],
    )
    return cuts


def primitives_from_cuts(
    activity: Interval | tuple[int, int],
    cuts: list[int],
    activity_index: int = 0,
    first_index: int = 0,
) -> list[MotionPrimitive]:
    """Partition the activity at the given cut frames (each cut starts a primitive)."""
    start, end = _as_span(activity)
    bounds = [start, *sorted(c for c in set(cuts) if start < c <= end), end + 1]
    return [
        MotionPrimitive(
            index=first_index + k, start=lo, end=hi - 1, activity=activity_index
        )
        for k, (lo, hi) in enumerate(zip(bounds, bounds[1:], strict=False))
    ]


def extract_primitives(
    activity: Interval | tuple[int, int],
    nbrs: Neighborhoods,
    *,
    activity_index: int = 0,
    first_index: int = 0,
    min_span: int = MIN_SPAN,
    slope_limit: float = SLOPE_LIMIT,
    merge_distance: int = MERGE_DISTANCE,
    counter: OperationCounter | None = None,
) -> list[MotionPrimitive]:
    """Primitives of one activity; with no valid path it is a single primitive."""
    cuts = detect_cuts(
        activity,
        nbrs,
        min_span=min_span,
        slope_limit=slope_limit,
        merge_distance=merge_distance,
        counter=counter,
    )
    frames = [c.frame for c in cuts]
    return primitives_from_cuts(activity, frames, activity_index, first_index)
