"""Exterior visibility paths on a clearance-eroded occupancy grid."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from shapely.geometry import LineString, Point
from shapely.ops import unary_union

from .distances import DistanceWitness
from .scene import PolytopeScene

__all__ = ["NoPathError", "visibility_path"]


class NoPathError(RuntimeError):
    def __init__(self, clearance, max_feasible):
        super().__init__(
            f"no exterior path at clearance {clearance:.4g}; "
            f"max feasible clearance ~ {max_feasible:.4g}"
        )
        self.clearance = clearance
        self.max_feasible = max_feasible


def _grid_path(free: np.ndarray, start_idx, goal_idx):
    """Dijkstra on an 8-connected grid; returns index path or None."""
    n, m = free.shape
    if not (free[start_idx] and free[goal_idx]):
        return None
    dist = np.full((n, m), np.inf)
    prev = {}
    dist[start_idx] = 0.0
    pq = [(0.0, start_idx)]
    moves = [
        (1, 0, 1.0), (-1, 0, 1.0), (0, 1, 1.0), (0, -1, 1.0),
        (1, 1, np.sqrt(2)), (1, -1, np.sqrt(2)), (-1, 1, np.sqrt(2)), (-1, -1, np.sqrt(2)),
    ]
    while pq:
        d, (i, j) = heapq.heappop(pq)
        if (i, j) == goal_idx:
            break
        if d > dist[i, j]:
            continue
        for di, dj, c in moves:
            a, b = i + di, j + dj
            if 0 <= a < n and 0 <= b < m and free[a, b] and d + c < dist[a, b]:
                dist[a, b] = d + c
                prev[(a, b)] = (i, j)
                heapq.heappush(pq, (d + c, (a, b)))
    if not np.isfinite(dist[goal_idx]):
        return None
    path = [goal_idx]
    while path[-1] != start_idx:
        path.append(prev[path[-1]])
    return path[::-1]


def visibility_path(
    A: PolytopeScene,
    B: PolytopeScene,
    from_point,
    to_witness: DistanceWitness,
    clearance: float,
    grid_n: int = 160,
    cone_offset: float | None = None,
) -> np.ndarray:
    """Polyline from `from_point` to the witness point pushed off the boundary
    along its exterior direction, whose clearance-tube avoids both scenes.

    Shortest path on an occupancy grid eroded by the clearance radius. Raises
    NoPathError carrying the largest grid-feasible clearance when the request
    cannot be met.
    """
    if A.dimension != 2:
        raise NotImplementedError("visibility paths are 2D")
    from_point = np.asarray(from_point, dtype=float)
    wp = np.asarray(to_witness.point, dtype=float)

    # exterior offset direction at the witness: outward normal of the hosting edge
    host = A if to_witness.side == "A" else B
    verts = host.components[to_witness.component]
    Pv = verts[to_witness.edge_or_face]
    Qv = verts[(to_witness.edge_or_face + 1) % len(verts)]
    t = (Qv - Pv) / np.linalg.norm(Qv - Pv)
    omega = np.array([t[1], -t[0]])
    if cone_offset is None:
        cone_offset = max(1.5 * clearance, 0.05 * max(to_witness.value, clearance))
    goal = wp + cone_offset * omega

    union = unary_union(list(A.shapely_components) + list(B.shapely_components))
    allpts = np.vstack([from_point[None, :], goal[None, :]] +
                       [c for c in A.components] + [c for c in B.components])
    lo = allpts.min(axis=0) - 4 * clearance - 0.5
    hi = allpts.max(axis=0) + 4 * clearance + 0.5
    xs = np.linspace(lo[0], hi[0], grid_n)
    ys = np.linspace(lo[1], hi[1], grid_n)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    # eroded free space: distance to the union at least the clearance
    from shapely import distance as shp_distance
    import shapely

    dvals = shapely.distance(union, shapely.points(pts)).reshape(grid_n, grid_n)

    def solve(clr):
        free = dvals > clr
        sidx = (int(np.argmin(np.abs(xs - from_point[0]))), int(np.argmin(np.abs(ys - from_point[1]))))
        gidx = (int(np.argmin(np.abs(xs - goal[0]))), int(np.argmin(np.abs(ys - goal[1]))))
        return _grid_path(free, sidx, gidx)

    path = solve(clearance)
    if path is None:
        # binary search the feasible clearance for the error payload
        lo_c, hi_c = 0.0, clearance
        for _ in range(24):
            mid = (lo_c + hi_c) / 2
            if solve(mid) is not None:
                lo_c = mid
            else:
                hi_c = mid
        raise NoPathError(clearance, lo_c)

    poly = np.array([[xs[i], ys[j]] for i, j in path])
    poly[0] = from_point
    poly[-1] = goal
    # verify the clearance tube by sampling
    line = LineString(poly)
    ss = np.linspace(0, line.length, 4 * len(poly))
    gap = min(union.distance(line.interpolate(s)) for s in ss)
    if gap < 0.75 * clearance:
        raise NoPathError(clearance, gap)
    return poly
