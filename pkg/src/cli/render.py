import csv
import logging
import os
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from src.core.arith import RatVec, add, format_rat
from src.modules.family.sweep import ClassDecomposition
from src.modules.horo.ghpolytope import GHPolytope
from src.modules.mmp.family import MMPFamily
from src.modules.polytope.hpolyhedron import edges, vertices
from src.setting import MAX_RENDER_DIM, RENDER_DPI

logger = logging.getLogger(__name__)

UNSUPPORTED = "render unsupported"
TOP_VIEW = "view from the top"


@dataclass
class RenderResult:
    csv_path: str
    frames: List[str] = field(default_factory=list)
    supported: bool = True
    message: Optional[str] = None
    projection: Optional[str] = None


@dataclass
class Frame:
    index: int
    title: str
    weights: List[RatVec]
    points: List[RatVec]
    segments: List[Tuple[RatVec, RatVec]]


def _label(p: RatVec) -> str:
    return "(" + ", ".join(format_rat(a) for a in p) + ")"


def _place(shift: Optional[RatVec], x: RatVec) -> RatVec:
    return x if shift is None else add(shift, x)


def drawing_points(Q: GHPolytope) -> Tuple[List[RatVec], List[RatVec], bool]:
    """Vertices of Q as (weight coordinates, M coordinates), sorted by weight.

    When the translation of Q leaves M_Q the pseudo-moment polytope is drawn instead
    and the flag is False.
    """
    shift = Q.space.from_weight(Q.translation())
    pairs = sorted((Q.moment_point(v.witness), _place(shift, v.witness)) for v in vertices(Q.pseudo))
    return [w for w, _ in pairs], [m for _, m in pairs], shift is not None


def _floats(points: Sequence[RatVec], dim: int) -> np.ndarray:
    arr = np.array([[float(a) for a in p] for p in points], dtype=float).reshape(len(points), dim)
    if dim == 1:
        return np.hstack([arr, np.zeros((arr.shape[0], 1))])
    return arr


def _hull_order(pts: np.ndarray) -> np.ndarray:
    center = pts.mean(axis=0)
    angles = np.arctan2(pts[:, 1] - center[1], pts[:, 0] - center[0])
    return pts[np.argsort(angles)]


def _draw_frame(path: str, frame: Frame, dim: int) -> None:
    fig = plt.figure(figsize=(5, 5))
    pts = _floats(frame.points, dim)
    if dim == 3:
        # all three coordinates are plotted; the camera looks down the third axis
        ax = fig.add_subplot(projection="3d")
        ax.view_init(elev=90, azim=-90)
        for p, q in frame.segments:
            seg = _floats([p, q], dim)
            ax.plot(seg[:, 0], seg[:, 1], seg[:, 2], color="tab:blue", linewidth=1.5)
        ax.scatter(pts[:, 0], pts[:, 1], pts[:, 2], color="black", s=14)
        for w, (x, y, z) in zip(frame.weights, pts):
            ax.text(x, y, z, _label(w), fontsize=7)
    else:
        ax = fig.add_subplot()
        if dim == 2 and len(pts) >= 3:
            hull = _hull_order(np.unique(pts, axis=0))
            ax.fill(hull[:, 0], hull[:, 1], alpha=0.25, color="tab:blue")
        for p, q in frame.segments:
            seg = _floats([p, q], dim)
            ax.plot(seg[:, 0], seg[:, 1], color="tab:blue", linewidth=1.5)
        ax.scatter(pts[:, 0], pts[:, 1], color="black", s=14, zorder=3)
        for w, (x, y) in zip(frame.weights, pts):
            ax.annotate(_label(w), (x, y), textcoords="offset points", xytext=(4, 4), fontsize=7)
        ax.set_aspect("equal", adjustable="datalim")
        ax.grid(True, linewidth=0.3)
    ax.set_title(frame.title)
    fig.savefig(path, dpi=RENDER_DPI, bbox_inches="tight")
    plt.close(fig)


def render_family(
    mmp: MMPFamily,
    decomposition: ClassDecomposition,
    out_dir: str,
    formats: Sequence[str] = ("svg", "csv"),
) -> RenderResult:
    """One frame per class representative (singletons included) and a CSV of exact moment vertices.

    Frames are drawn in M coordinates, so a frame has the dimension of M_Q; labels and
    the CSV keep the weight coordinates.
    """
    os.makedirs(out_dir, exist_ok=True)
    space = mmp.embedding.space
    dim = space.n
    frames = []
    for k, cls in enumerate(decomposition.classes):
        Q = mmp.polytope(cls.family, cls.sample)
        shift = space.from_weight(Q.translation())
        weights, points, translated = drawing_points(Q)
        segments = []
        for e in edges(Q.pseudo):
            p, q = e.vertices
            segments.append((_place(shift, p), _place(shift, q)))
        title = f"eps in {cls.interval}" if not cls.interval.is_point else f"eps = {format_rat(cls.sample)}"
        if not translated:
            title += " (pseudo-moment)"
        frames.append(Frame(k, title, weights, points, segments))

    csv_path = os.path.join(out_dir, "vertices.csv")
    width = space.M_basis.ncols
    with open(csv_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["class", "interval", "epsilon", "vertex"] + [f"w{j + 1}" for j in range(width)])
        for frame, cls in zip(frames, decomposition.classes):
            for i, w in enumerate(frame.weights):
                writer.writerow([frame.index, str(cls.interval), format_rat(cls.sample), i] + [format_rat(a) for a in w])
    result = RenderResult(csv_path=csv_path)

    if dim > MAX_RENDER_DIM:
        result.supported = False
        result.message = f"{UNSUPPORTED}: M has rank {dim}, vertex data written to CSV"
        logger.warning(result.message)
        return result
    if dim == 3:
        result.projection = TOP_VIEW
    if "svg" not in formats:
        return result

    for frame in frames:
        path = os.path.join(out_dir, f"frame_{frame.index:02d}.svg")
        _draw_frame(path, frame, dim)
        result.frames.append(path)
    logger.info(f"Rendered {len(result.frames)} frame(s) of dimension {dim} to {out_dir}")
    return result
