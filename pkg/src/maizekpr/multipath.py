"""Three-path averaging for a steadier kernels-per-row estimate.

One traced row can be thrown off by local irregularities, especially the
asymmetric immature cluster at the ear tip. The central row path is
therefore extended to a full-height polyline, every remaining kernel is
assigned to the left or right of that polyline, and each half is traced
independently with the same row tracer. The reported value averages the
three mature counts. A half with too few kernels degrades the result to
the center path alone, with an explicit flag.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass

from .errors import NoPathError, OutOfRangeError, TooFewKernelsError
from .rowgraph import GraphConfig, RowPath, count_kpr_single

ON_LINE_EPS = 1e-9


@dataclass(frozen=True)
class CentralPolyline:
    """Full-height piecewise-linear curve through the central path kernels.

    Vertices run from y=0 to y=max_height with strictly increasing y; the
    first and last segments extend vertically from the terminal kernels to
    the image borders.
    """

    vertices: tuple[tuple[float, float], ...]

    @property
    def max_height(self) -> float:
        return self.vertices[-1][1]


def central_polyline(path: RowPath, kernels, image_height: float) -> CentralPolyline:
    """Extend the traced path to a y-monotone curve spanning the image.

    Path kernels are walked from the top end downward; a kernel whose
    center does not advance y (possible on heavily jittered rows) is
    skipped so interpolation stays single-valued in y.
    """
    if len(path.node_ids) < 2:
        raise ValueError("central path needs at least 2 nodes")
    by_id = {k.id: k for k in kernels}
    pts = [by_id[i].center for i in path.node_ids]
    if pts[0][1] > pts[-1][1]:
        pts.reverse()
    verts: list[tuple[float, float]] = []
    for x, y in pts:
        if not verts or y > verts[-1][1]:
            verts.append((float(x), float(y)))
    if verts[-1][1] > image_height:
        raise ValueError("path extends below image_height")
    if verts[0][1] > 0.0:
        verts.insert(0, (verts[0][0], 0.0))
    if verts[-1][1] < image_height:
        verts.append((verts[-1][0], float(image_height)))
    return CentralPolyline(vertices=tuple(verts))


def polyline_x_at(polyline: CentralPolyline, y: float) -> float:
    """x of the polyline at height y, linearly interpolated.

    Exact at vertices (no float drift from interpolating t=0 or t=1).
    Raises OutOfRangeError outside [0, max_height].
    """
    verts = polyline.vertices
    if y < 0.0 or y > polyline.max_height:
        raise OutOfRangeError(f"y={y} outside [0, {polyline.max_height}]")
    ys = [v[1] for v in verts]
    i = bisect_left(ys, y)
    if i < len(ys) and ys[i] == y:
        return verts[i][0]
    x0, y0 = verts[i - 1]
    x1, y1 = verts[i]
    t = (y - y0) / (y1 - y0)
    return x0 + t * (x1 - x0)


def split_kernels(kernels, polyline: CentralPolyline):
    """Partition kernels into (left, right) of the central polyline.

    A kernel whose center x matches the polyline at its own y (within
    1e-9 px) belongs to the path itself and is excluded from both halves,
    so path + left + right is a disjoint cover of the input.
    """
    left, right = [], []
    for k in kernels:
        cx, cy = k.center
        x_line = polyline_x_at(polyline, cy)
        if abs(cx - x_line) <= ON_LINE_EPS:
            continue
        (right if cx > x_line else left).append(k)
    return left, right


@dataclass(frozen=True)
class KprResult:
    """Per-ear outcome of the three-path strategy.

    ``left``/``right`` are None when that half could not be traced; any
    flag means the mean degraded to the center count alone.
    """

    center: RowPath
    left: RowPath | None
    right: RowPath | None
    kpr_mean: float
    kpr_rounded: int
    flags: tuple[str, ...] = ()

    @property
    def degraded(self) -> bool:
        return bool(self.flags)


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def three_path_kpr(kernels, image_height: float, cfg: GraphConfig | None = None) -> KprResult:
    """Center path plus one path per half; mean of the three mature counts.

    Failures on the center path propagate. A half that is too sparse (or,
    on pathological inputs, disconnected) raises no error: the result
    carries a flag and kpr_mean falls back to the center count.
    """
    cfg = cfg or GraphConfig()
    kernels = list(kernels)
    center = count_kpr_single(kernels, cfg)
    poly = central_polyline(center, kernels, image_height)
    left_k, right_k = split_kernels(kernels, poly)

    flags: list[str] = []
    halves: dict[str, RowPath | None] = {"left": None, "right": None}
    for name, group in (("left", left_k), ("right", right_k)):
        try:
            halves[name] = count_kpr_single(group, cfg)
        except TooFewKernelsError:
            flags.append(f"half_too_sparse_{name}")
        except NoPathError:
            flags.append(f"half_no_path_{name}")

    left, right = halves["left"], halves["right"]
    if flags:
        mean = float(center.mature_count)
    else:
        mean = (center.mature_count + left.mature_count + right.mature_count) / 3.0
    return KprResult(
        center=center,
        left=left,
        right=right,
        kpr_mean=mean,
        kpr_rounded=_round_half_up(mean),
        flags=tuple(flags),
    )
