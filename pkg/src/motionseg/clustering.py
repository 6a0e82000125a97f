"""Group primitives that are linked by valid warping paths."""

from itertools import combinations

import numpy as np
import structlog
from rich.progress import Progress
from scipy.sparse import coo_matrix, csgraph

from .errors import ClusteringError
from .models import ClusterEdge, ClusterGraph, MotionPrimitive, WarpingPath
from .neighborhood import Neighborhoods
from .primitives import (
    MIN_SPAN,
    SLOPE_LIMIT,
    build_neighborhood_graph,
    filter_paths,
    warping_paths,
)
from .utils import parallel_map

logger = structlog.get_logger(__name__)


def pairwise_path(
    nbrs: Neighborhoods,
    prim_a: MotionPrimitive,
    prim_b: MotionPrimitive,
    min_span: int = MIN_SPAN,
    slope_limit: float = SLOPE_LIMIT,
) -> WarpingPath | None:
    """Cheapest valid path in the block rows(a) × columns(b), if any."""
    if prim_a.end >= nbrs.frame_count or prim_b.end >= nbrs.frame_count:
        raise ClusteringError(
            f"primitive beyond the {nbrs.frame_count} frames of the neighborhoods",
            frame=max(prim_a.end, prim_b.end),
        )
    graph = build_neighborhood_graph(
        nbrs,
        (prim_a.start, prim_a.end),
        columns=(prim_b.start, prim_b.end),
        lower_triangle=False,
    )
    if graph.node_count == 0:
        return None
    valid = filter_paths(warping_paths(graph), min_span, slope_limit)
    if not valid:
        return None
    return min(valid, key=lambda path: path.cost)


def strongly_connected_clusters(
    node_count: int, edges: list[tuple[int, int]]
) -> list[list[int]]:
    """Strongly connected components, each sorted, ordered by their smallest member."""
    if node_count == 0:
        return []
    if edges:
        sources, targets = np.asarray(edges, dtype=np.int64).T
    else:
        sources = targets = np.zeros(0, dtype=np.int64)
    adjacency = coo_matrix(
        (np.ones(len(sources)), (sources, targets)), shape=(node_count, node_count)
    ).tocsr()
    _, labels = csgraph.connected_components(
        adjacency, directed=True, connection="strong"
    )
    groups: dict[int, list[int]] = {}
    for node, label in enumerate(labels):
        groups.setdefault(int(label), []).append(node)
    return sorted(groups.values(), key=lambda members: members[0])


def build_clusters(
    primitives: list[MotionPrimitive],
    nbrs: Neighborhoods,
    min_span: int = MIN_SPAN,
    slope_limit: float = SLOPE_LIMIT,
    threads: int = 1,
    progress: Progress | None = None,
) -> ClusterGraph:
    """Search every primitive pair for a valid path and cluster the resulting graph.

    A path between two primitives links them both ways, so clusters are the
    strongly connected components of the symmetric closure.
    """
    n = len(primitives)
    pairs = list(combinations(range(n), 2))
    paths = parallel_map(
        lambda pair: pairwise_path(
            nbrs, primitives[pair[0]], primitives[pair[1]], min_span, slope_limit
        ),
        pairs,
        threads=threads,
        progress=progress,
        name="Pairwise paths",
    )
    edges = [
        ClusterEdge(source=a, target=b, cost=path.cost)
        for (a, b), path in zip(pairs, paths, strict=True)
        if path is not None
    ]
    directed = [(e.source, e.target) for e in edges]
    directed += [(e.target, e.source) for e in edges]
    clusters = strongly_connected_clusters(n, directed)
    logger.info(
        "Clustered primitives",
        stage="clustering",
        primitives=n,
        edges=len(edges),
        clusters=len(clusters),
    )
    return ClusterGraph(node_count=n, edges=edges, clusters=clusters)


def assign_clusters(
    primitives: list[MotionPrimitive], graph: ClusterGraph
) -> list[MotionPrimitive]:
    labels = {
        node: label for label, members in enumerate(graph.clusters) for node in members
    }
    return [
        prim.model_copy(update={"cluster": labels.get(k)})
        for k, prim in enumerate(primitives)
    ]
