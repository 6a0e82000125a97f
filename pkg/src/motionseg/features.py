"""Feature stacking, mirroring and neighborhood-based feature bundling."""

from functools import partial
from pathlib import Path

import numpy as np
import pandas as pd
import structlog
from pydantic import BaseModel, model_validator
from scipy.spatial import cKDTree
from sklearn.decomposition import PCA

from .errors import FeatureError
from .models import FeatureSequence, TimeSeries
from .utils import parallel_map

logger = structlog.get_logger(__name__)

DEFAULT_OFFSETS = (-5, 0, 5)
PCA_VARIANCE = 0.975
MAX_ASCENT_ITERATIONS = 50
ASCENT_TOLERANCE = 1e-6
STENCIL_FRAMES = 5


def stack_features(
    series: TimeSeries, offsets: list[int] | tuple[int, ...] = DEFAULT_OFFSETS
) -> FeatureSequence:
    """Concatenate the frames at `i + o` for every offset, clamped to the trial."""
    offsets = sorted(set(int(o) for o in offsets))
    if 0 not in offsets:
        raise FeatureError(f"offsets {offsets} must contain 0")
    m = series.frame_count
    frames = np.arange(m)
    blocks = [series.samples[np.clip(frames + o, 0, m - 1)] for o in offsets]
    return FeatureSequence(
        vectors=np.hstack(blocks),
        offsets=offsets,
        source_dim=series.channel_count,
        rate=series.rate,
        channel_names=list(series.channel_names),
    )


class MirrorMap(BaseModel):
    """Involutive channel permutation with per-channel sign flips."""

    permutation: list[int]
    negate: list[bool]

    @model_validator(mode="after")
    def _involution(self) -> "MirrorMap":
        n = len(self.permutation)
        if len(self.negate) != n:
            raise ValueError("permutation and negate must have equal length")
        if sorted(self.permutation) != list(range(n)):
            raise ValueError("mirror map is not a permutation")
        for i, j in enumerate(self.permutation):
            if self.permutation[j] != i:
                raise ValueError(f"mirror map is not an involution at channel {i}")
            if self.negate[i] != self.negate[j]:
                raise ValueError(
                    f"inconsistent sign flip between channels {i} and {j}"
                )
        return self

    @classmethod
    def identity(cls, channel_count: int) -> "MirrorMap":
        return cls(
            permutation=list(range(channel_count)), negate=[False] * channel_count
        )

    @classmethod
    def from_pairs(
        cls, channel_names: list[str], pairs: list[tuple[str, str, bool]]
    ) -> "MirrorMap":
        index = {name: i for i, name in enumerate(channel_names)}
        permutation = list(range(len(channel_names)))
        negate = [False] * len(channel_names)
        for left, right, flip in pairs:
            for name in (left, right):
                if name not in index:
                    raise FeatureError(
                        f"mirror map names unknown channel {name!r}", column=name
                    )
            a, b = index[left], index[right]
            permutation[a], permutation[b] = b, a
            negate[a] = negate[b] = bool(flip)
        try:
            return cls(permutation=permutation, negate=negate)
        except ValueError as e:
            raise FeatureError(f"invalid mirror map: {e}") from e


def load_mirror_map(path: str | Path, channel_names: list[str]) -> MirrorMap:
    """Read `left,right[,negate]` rows; unlisted channels map to themselves."""
    frame = pd.read_csv(path, encoding="utf-8")
    if not {"left", "right"} <= set(frame.columns):
        raise FeatureError(f"{path}: mirror map needs columns left,right[,negate]")
    if "negate" in frame.columns:
        negate = frame["negate"]
    else:
        negate = pd.Series([False] * len(frame))
    pairs = [
        (
            str(left).strip(),
            str(right).strip(),
            str(flip).strip().lower() in {"1", "true", "yes"},
        )
        for left, right, flip in zip(frame["left"], frame["right"], negate, strict=True)
    ]
    return MirrorMap.from_pairs(channel_names, pairs)


def mirror_features(series: TimeSeries, mirror: MirrorMap) -> TimeSeries:
    if len(mirror.permutation) != series.channel_count:
        raise FeatureError(
            f"mirror map covers {len(mirror.permutation)} channels, "
            f"series has {series.channel_count}"
        )
    signs = np.where(mirror.negate, -1.0, 1.0)
    return series.with_samples(series.samples[:, mirror.permutation] * signs)


def movement_derivatives(vectors: np.ndarray) -> np.ndarray:
    """Five-point derivative per frame; one-sided fourth-order stencils at the ends."""
    f = np.asarray(vectors, dtype=np.float64)
    m = f.shape[0]
    if m < STENCIL_FRAMES:
        raise FeatureError(
            f"movement direction needs at least {STENCIL_FRAMES} frames, got {m}"
        )
    out = np.empty_like(f)
    out[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / 12
    out[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / 12
    out[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / 12
    out[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / 12
    out[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / 12
    return out


def _unit_rows(derivatives: np.ndarray, scale: float) -> tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(derivatives, axis=1)
    moving = norms > 1e-12 * max(scale, 1.0)
    units = np.zeros_like(derivatives)
    units[moving] = derivatives[moving] / norms[moving, None]
    return units, moving


def direction_of_movement(feats: FeatureSequence, i: int) -> tuple[np.ndarray, bool]:
    """Unit tangent at frame i and whether the frame moves (zero vector if not)."""
    m = feats.frame_count
    if m < STENCIL_FRAMES:
        raise FeatureError(
            f"movement direction needs at least {STENCIL_FRAMES} frames, got {m}"
        )
    if not 0 <= i < m:
        raise FeatureError(f"frame {i} outside [0, {m})", frame=i)
    # any window of >= 5 frames around i reproduces the full-sequence stencil
    lo, hi = max(0, i - 4), min(m, i + 5)
    row = movement_derivatives(feats.vectors[lo:hi])[i - lo]
    scale = float(np.abs(feats.vectors).max(initial=0.0))
    units, moving = _unit_rows(row[None, :], scale)
    return units[0], bool(moving[0])


def orthogonal_subspace(
    direction: np.ndarray, rng: np.random.Generator | None = None
) -> np.ndarray:
    """D × (D−1) orthonormal complement of `direction`, via QR with a random fill."""
    direction = np.asarray(direction, dtype=np.float64)
    norm = np.linalg.norm(direction)
    if norm == 0:
        raise FeatureError("direction must be non-zero")
    dim = direction.shape[0]
    if dim == 1:
        return np.zeros((1, 0))
    rng = np.random.default_rng(0) if rng is None else rng
    fill = np.column_stack([direction / norm, rng.standard_normal((dim, dim - 1))])
    q, _ = np.linalg.qr(fill)
    return q[:, 1:]


def kde_bandwidth(samples: np.ndarray) -> np.ndarray:
    """Diagonal Scott bandwidth σ_j·k^(−1/(d+4)).

    Zero spread is floored at 1e−12 × the data range.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    k, d = samples.shape
    if k < 2:
        raise FeatureError(f"bandwidth needs at least 2 samples, got {k}")
    sigma = samples.std(axis=0, ddof=1)
    floor = 1e-12 * (float(np.ptp(samples)) or 1.0)
    sigma = np.maximum(sigma, floor)
    return sigma * k ** (-1.0 / (d + 4))


def kde_density(
    points: np.ndarray, samples: np.ndarray, bandwidth: np.ndarray
) -> np.ndarray:
    """Gaussian product-kernel density of `samples` at each row of `points`."""
    points = np.atleast_2d(points)
    samples = np.atleast_2d(samples)
    bandwidth = np.asarray(bandwidth, dtype=np.float64)
    scaled = (points[:, None, :] - samples[None, :, :]) / bandwidth
    norm = (2 * np.pi) ** (bandwidth.shape[0] / 2) * np.prod(bandwidth)
    return np.exp(-0.5 * np.sum(scaled**2, axis=2)).mean(axis=1) / norm


def subspace_mean_shift(
    start: np.ndarray,
    basis: np.ndarray,
    samples: np.ndarray,
    bandwidth: np.ndarray,
    tolerance: float,
    max_iterations: int = MAX_ASCENT_ITERATIONS,
) -> tuple[np.ndarray, int]:
    """Density ascent on the KDE restricted to `start + basis·c`.

    Each step solves the weighted least-squares bound of the Gaussian mixture
    inside the subspace, so the density never decreases.

    Returns:
        The subspace coordinates `c` and the iteration count.
    """
    coords = np.zeros(basis.shape[1])
    if basis.shape[1] == 0:
        return coords, 0
    precision = 1.0 / bandwidth**2
    normal = basis.T @ (basis * precision[:, None])
    iterations = 0
    for iterations in range(1, max_iterations + 1):  # noqa: B007
        point = start + basis @ coords
        log_w = -0.5 * np.sum(((samples - point) / bandwidth) ** 2, axis=1)
        w = np.exp(log_w - log_w.max())
        target = (w @ samples) / w.sum()
        updated = np.linalg.solve(normal, basis.T @ (precision * (target - start)))
        step = float(np.linalg.norm(basis @ (updated - coords)))
        coords = updated
        if step < tolerance:
            break
    return coords, iterations


def _bundle_frame(
    i: int,
    vectors: np.ndarray,
    units: np.ndarray,
    moving: np.ndarray,
    tree: cKDTree,
    k: int,
    seed: int,
) -> np.ndarray:
    frame = vectors[i]
    if not moving[i]:
        return frame
    distances, indices = tree.query(frame, k=k + 1)
    keep = indices != i
    neighbors_idx = indices[keep][:k]
    radius = float(distances[keep][:k][-1])
    neighbors = vectors[neighbors_idx]
    if np.ptp(neighbors) == 0:
        return frame

    pca = PCA(n_components=PCA_VARIANCE, svd_solver="full")
    projected = pca.fit_transform(neighbors)
    loadings = pca.components_
    position = (frame - pca.mean_) @ loadings.T
    tangent = loadings @ units[i]
    tangent_norm = np.linalg.norm(tangent)
    dim = loadings.shape[0]
    if tangent_norm <= 1e-12:
        basis = np.eye(dim)
    elif dim == 1:
        return frame
    else:
        rng = np.random.default_rng([seed, i])
        basis = orthogonal_subspace(tangent / tangent_norm, rng)

    bandwidth = kde_bandwidth(projected)
    tolerance = ASCENT_TOLERANCE * radius if radius > 0 else 1e-12
    coords, _ = subspace_mean_shift(position, basis, projected, bandwidth, tolerance)
    return frame + loadings.T @ (basis @ coords)


def bundle_features(
    feats: FeatureSequence, k: int = 64, seed: int = 0, threads: int = 1
) -> FeatureSequence:
    """Pull each frame toward the local density ridge, orthogonal to its own motion."""
    m = feats.frame_count
    if k < 2:
        raise FeatureError(f"bundling needs k >= 2, got {k}")
    if m <= k:
        raise FeatureError(f"bundling needs more than k={k} frames, got {m}")
    vectors = feats.vectors
    scale = float(np.abs(vectors).max(initial=0.0))
    units, moving = _unit_rows(movement_derivatives(vectors), scale)
    if not moving.all():
        logger.warning(
            "Frames without movement copied unchanged",
            stage="bundling",
            count=int((~moving).sum()),
        )
    tree = cKDTree(vectors)
    worker = partial(
        _bundle_frame,
        vectors=vectors,
        units=units,
        moving=moving,
        tree=tree,
        k=k,
        seed=seed,
    )
    bundled = np.vstack(parallel_map(worker, list(range(m)), threads=threads))
    shift = np.linalg.norm(bundled - vectors, axis=1)
    logger.info(
        "Bundled features",
        stage="bundling",
        frames=m,
        k=k,
        mean_shift=float(shift.mean()),
        max_shift=float(shift.max()),
    )
    return FeatureSequence(
        vectors=bundled,
        offsets=list(feats.offsets),
        source_dim=feats.source_dim,
        bundled=True,
        rate=feats.rate,
        channel_names=list(feats.channel_names),
    )
