"""Row tracing over kernel centers.

Kernel centers become nodes of a sparse geometric graph: each node keeps
its five nearest neighbours, then drops neighbours that line up with a
closer one (pairwise angle at the node under 20 degrees means the two
point down the same row, so only the nearer survives). Edges carry
Euclidean pixel distance and the matrix is symmetrised. A row is then the
cheapest path from the second bottom-most to the second topmost kernel;
skipping the extreme kernels avoids detached debris at the ear ends. The
kernel count of that path, minus the run of under-sized kernels at its
tip, is the kernels-per-row estimate.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import Kernel
from .errors import NoPathError, TooFewKernelsError

IMMATURE_RULES = ("prefix", "anywhere")


@dataclass
class GraphConfig:
    k: int = 5
    angle_min_deg: float = 20.0
    mature_min_px: int = 2000
    immature_rule: str = "prefix"

    def validate(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0.0 <= self.angle_min_deg < 180.0:
            raise ValueError("angle_min_deg must be in [0, 180)")
        if self.mature_min_px < 0:
            raise ValueError("mature_min_px must be >= 0")
        if self.immature_rule not in IMMATURE_RULES:
            raise ValueError(f"immature_rule must be one of {IMMATURE_RULES}")


@dataclass(frozen=True)
class RowPath:
    """An ordered kernel path; counts derive from the node list."""

    node_ids: tuple[int, ...]
    total_length: float
    immature_count: int = 0

    @property
    def raw_count(self) -> int:
        return len(self.node_ids)

    @property
    def mature_count(self) -> int:
        return self.raw_count - self.immature_count


@dataclass
class EarGraph:
    """Symmetric weighted adjacency over kernel centers.

    ``adjacency`` holds both directions of every edge, keyed by kernel id
    pairs. Zero-length edges (coincident centers) are dropped so weights
    stay strictly positive; coincident kernels are segmentation duplicates
    that the mask filter should already have removed.
    """

    kernels: tuple[Kernel, ...]
    adjacency: dict[tuple[int, int], float]
    _lists: dict[int, tuple[tuple[int, float], ...]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        lists: dict[int, list[tuple[int, float]]] = {k.id: [] for k in self.kernels}
        for (i, j), w in self.adjacency.items():
            lists[i].append((j, w))
        self._lists = {i: tuple(sorted(nbrs)) for i, nbrs in lists.items()}

    def neighbors(self, node_id: int) -> tuple[tuple[int, float], ...]:
        return self._lists[node_id]


def knn_neighbors(centers, k: int = 5, ids=None) -> list[list[int]]:
    """Per-node lists of the k nearest other nodes by Euclidean distance.

    Distance ties break on node id. Nodes get fewer than k neighbours only
    when there are fewer than k other nodes.
    """
    pts = np.asarray(centers, dtype=np.float64)
    n = len(pts)
    if n < 2:
        raise TooFewKernelsError(f"need at least 2 centers, got {n}")
    node_ids = np.arange(n) if ids is None else np.asarray(ids)
    diff = pts[:, None, :] - pts[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(d2, np.inf)
    tie_break = np.broadcast_to(node_ids, (n, n))
    order = np.lexsort((tie_break, d2), axis=1)
    k_eff = min(k, n - 1)
    return [[int(j) for j in row[:k_eff]] for row in order]


def pair_angle_deg(origin, p, q) -> float:
    """Angle at ``origin`` between the directions to p and q, in degrees.

    Degenerate (zero-length) directions count as angle 0 so that a
    coincident point always triggers the pruning rule.
    """
    ox, oy = origin
    ux, uy = p[0] - ox, p[1] - oy
    vx, vy = q[0] - ox, q[1] - oy
    nu = math.hypot(ux, uy)
    nv = math.hypot(vx, vy)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    cosang = (ux * vx + uy * vy) / (nu * nv)
    return math.degrees(math.acos(max(-1.0, min(1.0, cosang))))


def refine_by_angle(centers, node: int, neighbors, angle_min_deg: float = 20.0) -> list[int]:
    """Drop neighbours that sight down the same row as a nearer one.

    For every pair in the node's list whose angle at the node is below
    ``angle_min_deg``, the farther member is removed. Pairs are examined
    in ascending combined distance and re-evaluated against survivors
    only, so near neighbours get first claim; this fixes the otherwise
    order-dependent outcome. Distance ties on removal break toward the
    larger id.
    """
    pts = np.asarray(centers, dtype=np.float64)
    nbrs = list(neighbors)
    if len(nbrs) < 2:
        return nbrs
    origin = pts[node]
    dist = {j: float(np.hypot(*(pts[j] - origin))) for j in nbrs}
    pairs = [(dist[a] + dist[b], a, b) for idx, a in enumerate(nbrs) for b in nbrs[idx + 1 :]]
    pairs.sort()
    alive = set(nbrs)
    for _, a, b in pairs:
        if a not in alive or b not in alive:
            continue
        if pair_angle_deg(origin, pts[a], pts[b]) < angle_min_deg:
            if dist[a] > dist[b] or (dist[a] == dist[b] and a > b):
                alive.discard(a)
            else:
                alive.discard(b)
    return [j for j in nbrs if j in alive]


def build_adjacency(kernels, cfg: GraphConfig | None = None) -> EarGraph:
    """kNN selection, angle refinement, then symmetrised distance edges."""
    cfg = cfg or GraphConfig()
    cfg.validate()
    kernels = tuple(kernels)
    if len(kernels) < 2:
        raise TooFewKernelsError(f"need at least 2 kernels, got {len(kernels)}")
    ids = [k.id for k in kernels]
    if len(set(ids)) != len(ids):
        raise ValueError("kernel ids must be unique")
    pts = np.asarray([k.center for k in kernels], dtype=np.float64)
    neighbor_lists = knn_neighbors(pts, k=cfg.k, ids=ids)
    adjacency: dict[tuple[int, int], float] = {}
    for i, nbrs in enumerate(neighbor_lists):
        for j in refine_by_angle(pts, i, nbrs, cfg.angle_min_deg):
            w = float(np.hypot(*(pts[j] - pts[i])))
            if w <= 0.0:
                continue
            adjacency[(ids[i], ids[j])] = w
            adjacency[(ids[j], ids[i])] = w
    return EarGraph(kernels=kernels, adjacency=adjacency)


def select_endpoints(kernels) -> tuple[int, int]:
    """Ids of the second bottom-most and second topmost kernels.

    Bottom means large image y (tips-up orientation). Ties on y break by
    x, then id. Skipping the extremes sidesteps stray debris at the ends.
    """
    ks = list(kernels)
    if len(ks) < 4:
        raise TooFewKernelsError(f"endpoint rule needs >= 4 kernels, got {len(ks)}")
    order = sorted(ks, key=lambda k: (-k.center[1], k.center[0], k.id))
    return order[1].id, order[-2].id


def dijkstra(graph: EarGraph, start: int, end: int) -> RowPath:
    """Minimum-distance path between two kernels of the graph.

    Equal-cost ties resolve toward the lexicographically smallest node-id
    sequence, which keeps golden tests stable. Raises NoPathError when the
    endpoints sit in different graph components.
    """
    if start == end:
        raise ValueError("start and end must differ")
    known = {k.id for k in graph.kernels}
    if start not in known or end not in known:
        raise ValueError("start and end must be kernel ids of the graph")
    heap: list[tuple[float, tuple[int, ...]]] = [(0.0, (start,))]
    done: set[int] = set()
    while heap:
        cost, path = heapq.heappop(heap)
        node = path[-1]
        if node in done:
            continue
        done.add(node)
        if node == end:
            return RowPath(node_ids=path, total_length=cost)
        for j, w in graph.neighbors(node):
            if j not in done:
                heapq.heappush(heap, (cost + w, path + (j,)))
    raise NoPathError(f"no path from kernel {start} to kernel {end}")


def filter_immature(path: RowPath, kernels, mature_min_px: int = 2000, rule: str = "prefix") -> RowPath:
    """Count the under-sized kernels to subtract from the path total.

    ``prefix`` walks from the path's top end downward and counts the
    consecutive run of kernels below the size threshold, stopping at the
    first mature one; this targets the under-developed tip. ``anywhere``
    instead counts every under-sized kernel on the path.
    """
    if rule not in IMMATURE_RULES:
        raise ValueError(f"rule must be one of {IMMATURE_RULES}")
    info = {k.id: k for k in kernels}
    seq = list(path.node_ids)
    if info[seq[0]].center[1] > info[seq[-1]].center[1]:
        seq.reverse()  # walk top (small y) to bottom
    if rule == "anywhere":
        immature = sum(1 for i in seq if info[i].area < mature_min_px)
    else:
        immature = 0
        for i in seq:
            if info[i].area >= mature_min_px:
                break
            immature += 1
    return replace(path, immature_count=immature)


def count_kpr_single(kernels, cfg: GraphConfig | None = None) -> RowPath:
    """Full single-row trace: graph, endpoints, cheapest path, tip filter."""
    cfg = cfg or GraphConfig()
    kernels = list(kernels)
    graph = build_adjacency(kernels, cfg)
    start, end = select_endpoints(kernels)
    path = dijkstra(graph, start, end)
    return filter_immature(path, kernels, cfg.mature_min_px, cfg.immature_rule)
