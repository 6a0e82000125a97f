"""Fixed-radius frame neighborhoods and the sparse self-similarity image."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import structlog
from PIL import Image
from scipy.sparse import csr_matrix
from scipy.spatial import cKDTree

from .errors import NeighborhoodError
from .models import FeatureSequence

logger = structlog.get_logger(__name__)

NEIGHBOR_WHITE = 254
BACKGROUND = 255


def generalized_radius(R: float, window_size: int, dim: int) -> float:
    """Scale the base radius so it stays meaningful as the feature dimension grows."""
    if not R > 0:
        raise NeighborhoodError(f"radius R must be positive, got {R}")
    if window_size < 1 or dim < 1:
        raise NeighborhoodError(
            f"window size and dimension must be positive, got {window_size}, {dim}"
        )
    return float(R * np.sqrt(window_size * dim))


@dataclass(frozen=True)
class Neighborhoods:
    """Per-frame neighbor sets stored row-wise (CSR), columns ascending, self excluded.

    Attributes:
        indptr: Row pointer, length m + 1.
        indices: Neighbor frame of every entry.
        distances: Euclidean distance of every entry, all within `radius`.
        radius: Radius the sets were searched with.
        frame_count: m.
    """

    indptr: np.ndarray
    indices: np.ndarray
    distances: np.ndarray
    radius: float
    frame_count: int

    @classmethod
    def from_pairs(
        cls,
        frame_count: int,
        rows: np.ndarray,
        cols: np.ndarray,
        distances: np.ndarray,
        radius: float,
    ) -> "Neighborhoods":
        """Build symmetric sets from unordered pairs, in either orientation.

        Duplicate pairs are kept once.
        """
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        distances = np.asarray(distances, dtype=np.float64)
        both_rows = np.concatenate([rows, cols])
        both_cols = np.concatenate([cols, rows])
        both_dist = np.concatenate([distances, distances])
        keep = both_rows != both_cols
        both_rows, both_cols = both_rows[keep], both_cols[keep]
        both_dist = both_dist[keep]
        keys = both_rows * frame_count + both_cols
        keys, first = np.unique(keys, return_index=True)
        both_rows, both_cols = both_rows[first], both_cols[first]
        both_dist = both_dist[first]
        indptr = np.zeros(frame_count + 1, dtype=np.int64)
        np.add.at(indptr, both_rows + 1, 1)
        return cls(
            indptr=np.cumsum(indptr),
            indices=both_cols,
            distances=both_dist,
            radius=float(radius),
            frame_count=frame_count,
        )

    @property
    def entry_count(self) -> int:
        return int(self.indices.shape[0])

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def max_neighbors(self) -> int:
        return int(self.sizes.max(initial=0))

    @property
    def entry_rows(self) -> np.ndarray:
        return np.repeat(np.arange(self.frame_count), self.sizes)

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.distances[lo:hi]

    def neighbors(self, i: int) -> list[tuple[int, float]]:
        indices, distances = self.row(i)
        return [(int(j), float(d)) for j, d in zip(indices, distances, strict=True)]

    def lookup(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """Entry position of every (row, col) pair, -1 where the pair is absent."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        keys = self.entry_rows * self.frame_count + self.indices
        m = self.frame_count
        inside = (rows >= 0) & (rows < m) & (cols >= 0) & (cols < m)
        wanted = np.where(inside, rows * m + cols, -1)
        pos = np.searchsorted(keys, wanted)
        pos = np.minimum(pos, max(len(keys) - 1, 0))
        found = inside & (len(keys) > 0)
        if len(keys):
            found &= keys[pos] == wanted
        return np.where(found, pos, -1)

    def select(self, mask: np.ndarray) -> "Neighborhoods":
        rows = self.entry_rows[mask]
        indptr = np.zeros(self.frame_count + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        return Neighborhoods(
            indptr=np.cumsum(indptr),
            indices=self.indices[mask],
            distances=self.distances[mask],
            radius=self.radius,
            frame_count=self.frame_count,
        )

    def to_csr(self) -> csr_matrix:
        return csr_matrix(
            (self.distances, self.indices, self.indptr),
            shape=(self.frame_count, self.frame_count),
        )


def compute_neighborhoods(feats: FeatureSequence, R: float) -> Neighborhoods:
    """Exact radius search over all frame pairs.

    The search radius is r = generalized_radius(R, |w|, N).
    """
    if feats.frame_count < 2:
        raise NeighborhoodError(
            f"neighborhoods need at least 2 frames, got {feats.frame_count}"
        )
    radius = generalized_radius(R, len(feats.offsets), feats.source_dim)
    vectors = feats.vectors
    tree = cKDTree(vectors)
    pairs = tree.query_pairs(radius, p=2.0, eps=0, output_type="ndarray")
    if len(pairs):
        distances = np.linalg.norm(
            vectors[pairs[:, 0]] - vectors[pairs[:, 1]], axis=1
        )
    else:
        pairs = np.zeros((0, 2), dtype=np.int64)
        distances = np.zeros(0)
    nbrs = Neighborhoods.from_pairs(
        feats.frame_count, pairs[:, 0], pairs[:, 1], distances, radius
    )
    logger.info(
        "Computed neighborhoods",
        stage="neighborhoods",
        frames=feats.frame_count,
        radius=radius,
        entries=nbrs.entry_count,
        max_neighbors=nbrs.max_neighbors,
    )
    return nbrs


def cross_neighborhoods(
    feats_a: FeatureSequence, feats_b: FeatureSequence, R: float
) -> Neighborhoods:
    """Neighborhoods of [A; B]; frame j of B sits at index m_A + j."""
    if feats_a.dim != feats_b.dim:
        raise NeighborhoodError(
            f"feature dimensions differ: {feats_a.dim} vs {feats_b.dim}"
        )
    joined = FeatureSequence(
        vectors=np.vstack([feats_a.vectors, feats_b.vectors]),
        offsets=list(feats_a.offsets),
        source_dim=feats_a.source_dim,
        bundled=feats_a.bundled and feats_b.bundled,
        rate=feats_a.rate,
        channel_names=list(feats_a.channel_names),
    )
    return compute_neighborhoods(joined, R)


def sssm_matrix(nbrs: Neighborhoods) -> np.ndarray:
    """8-bit image of the sparse matrix.

    Distances map linearly from 0 (identical) to NEIGHBOR_WHITE (at the radius);
    absent pairs get the BACKGROUND level, one step brighter than any neighbor.
    """
    m = nbrs.frame_count
    image = np.full((m, m), BACKGROUND, dtype=np.uint8)
    if nbrs.radius > 0 and nbrs.entry_count:
        scaled = np.rint(NEIGHBOR_WHITE * nbrs.distances / nbrs.radius)
        levels = np.clip(scaled, 0, NEIGHBOR_WHITE).astype(np.uint8)
        image[nbrs.entry_rows, nbrs.indices] = levels
    image[np.arange(m), np.arange(m)] = 0
    return image


def sssm_export(
    nbrs: Neighborhoods,
    path: str | Path,
    png: bool = False,
    image: Image.Image | None = None,
) -> list[Path]:
    """Write the SSSM, or a decorated rendering of it, as binary PGM (P5, maxval 255).

    A PNG copy is written next to it when `png` is set.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    image = Image.fromarray(sssm_matrix(nbrs)) if image is None else image
    pgm = path.with_suffix(".pgm")
    image.save(pgm, format="PPM")
    written = [pgm]
    if png:
        image.save(path.with_suffix(".png"), format="PNG")
        written.append(path.with_suffix(".png"))
    logger.debug("Exported SSSM", files=[str(p) for p in written])
    return written
