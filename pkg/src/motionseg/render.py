"""Static pictures of a run: SSSM with boundaries, timeline, histograms, sweep maps."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "motionseg"

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402
import structlog  # noqa: E402
from PIL import Image, ImageDraw  # noqa: E402

from .models import GroundTruth, KeypointStats, SegmentationResult  # noqa: E402
from .neighborhood import Neighborhoods, sssm_export, sssm_matrix  # noqa: E402

logger = structlog.get_logger(__name__)

SVG_METADATA = {"Date": None}
ACTIVITY_GRAY = 0
CUT_GRAY = 128


def sssm_image(
    nbrs: Neighborhoods, result: SegmentationResult | None = None
) -> Image.Image:
    """SSSM as a grayscale image with activity bounds and primitive cuts as lines."""
    image = Image.fromarray(sssm_matrix(nbrs))
    if result is None:
        return image
    draw = ImageDraw.Draw(image)
    m = nbrs.frame_count
    for prim in result.primitives:
        draw.line([(prim.start, 0), (prim.start, m - 1)], fill=CUT_GRAY)
        draw.line([(0, prim.start), (m - 1, prim.start)], fill=CUT_GRAY)
    for activity in result.segmentation.activities:
        for frame in (activity.start, activity.end):
            draw.line([(frame, 0), (frame, m - 1)], fill=ACTIVITY_GRAY)
            draw.line([(0, frame), (m - 1, frame)], fill=ACTIVITY_GRAY)
    return image


def save_sssm(
    nbrs: Neighborhoods,
    path: str | Path,
    result: SegmentationResult | None = None,
    png: bool = False,
) -> list[Path]:
    return sssm_export(nbrs, path, png=png, image=sssm_image(nbrs, result))


def timeline_svg(
    result: SegmentationResult, path: str | Path, gt: GroundTruth | None = None
) -> Path:
    """Activities, primitives colored by cluster and, if given, the annotations."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    m = result.segmentation.frame_count
    cmap = plt.get_cmap("tab20")
    rows = 3 if gt is not None else 2
    fig, ax = plt.subplots(figsize=(12, 0.6 * rows + 1.0))
    top = (2 * (rows - 1), 0.8)
    segmentation = result.segmentation
    ax.broken_barh(
        [(a.start, a.length) for a in segmentation.activities], top, color="tab:blue"
    )
    ax.broken_barh(
        [(t.start, t.length) for t in segmentation.transitions], top, color="lightgray"
    )
    for prim in result.primitives:
        color = cmap(prim.cluster % 20) if prim.cluster is not None else "gray"
        ax.broken_barh(
            [(prim.start, prim.length)],
            (2 * (rows - 2), 0.8),
            facecolor=color,
            edgecolor="black",
        )
    ticks = [2 * (rows - 1) + 0.4, 2 * (rows - 2) + 0.4]
    labels = ["activities", "primitives"]
    if gt is not None:
        names = sorted({it.label for it in gt.intervals})
        for it in gt.intervals:
            color = cmap(names.index(it.label) % 20)
            ax.broken_barh([(it.start, it.length)], (0, 0.8), color=color)
        ticks.append(0.4)
        labels.append("ground truth")
    ax.set_yticks(ticks, labels)
    ax.set_xlim(0, m)
    ax.set_xlabel("frame")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    return path


def histogram_svg(stats: KeypointStats, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 3))
    edges = stats.bin_edges
    widths = [hi - lo for lo, hi in zip(edges, edges[1:], strict=False)]
    ax.bar(
        edges[:-1], stats.histogram, width=widths, align="edge", edgecolor="black"
    )
    ax.set_xlabel("relative key-point position")
    ax.set_ylabel("count")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    return path


def heatmap_svg(frame: pd.DataFrame, path: str | Path, title: str = "") -> Path:
    """Accuracy map with one row per offset set and one column per radius."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows, cols = frame.shape
    fig, ax = plt.subplots(figsize=(1.0 + 0.6 * cols, 1.0 + 0.5 * rows))
    im = ax.imshow(
        frame.to_numpy(dtype=float), vmin=0.0, vmax=1.0, cmap="viridis", aspect="auto"
    )
    ax.set_xticks(range(frame.shape[1]), [str(c) for c in frame.columns], rotation=45)
    ax.set_yticks(range(frame.shape[0]), [str(i) for i in frame.index])
    ax.set_xlabel(str(frame.columns.name or "radius"))
    ax.set_ylabel(str(frame.index.name or "offsets"))
    if title:
        ax.set_title(title)
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    return path
