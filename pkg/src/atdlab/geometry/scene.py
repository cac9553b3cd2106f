"""Polytope scenes, rigid frames, the JSON scene format, and admissibility.

A scene holds one or more pairwise disjoint solid components: simple
counterclockwise polygons in 2D, closed polyhedra (vertex list plus planar
polygonal faces with outward orientation) in 3D. The a-priori parameters
(R0, r0, L0, theta0) travel with the scene and drive the admissibility
checks: minimum edge length, angle windows, 3D face thickness, containment
in B_R0, and a sampled exterior cone condition.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Sequence

import numpy as np
from shapely.geometry import Point, Polygon
from shapely.ops import unary_union

__all__ = [
    "AprioriParams",
    "PolytopeScene",
    "RigidFrame",
    "SceneError",
    "AdmissibilityReport",
    "validate_admissible",
    "load_scene",
    "save_scene",
]


class SceneError(ValueError):
    """Malformed scene: open loops, zero-area faces, self-intersections."""


@dataclass(frozen=True)
class AprioriParams:
    R0: float
    r0: float
    L0: float
    theta0: float

    def as_dict(self) -> dict:
        return {"R0": self.R0, "r0": self.r0, "L0": self.L0, "theta0": self.theta0}


@dataclass(frozen=True)
class RigidFrame:
    """Orientation-preserving rigid motion x -> R x + t."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=float)
        if abs(np.linalg.det(R) - 1.0) > 1e-10:
            raise ValueError("rotation must have determinant +1")
        if np.max(np.abs(R.T @ R - np.eye(len(R)))) > 1e-12:
            raise ValueError("rotation columns must be orthonormal to 1e-12")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", np.asarray(self.translation, float))

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        return x @ self.rotation.T + self.translation

    def invert(self, x):
        x = np.asarray(x, dtype=float)
        return (x - self.translation) @ self.rotation

    def compose(self, other: "RigidFrame") -> "RigidFrame":
        # (self o other)(x) = self(other(x))
        return RigidFrame(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    @staticmethod
    def identity(dim: int) -> "RigidFrame":
        return RigidFrame(np.eye(dim), np.zeros(dim))


class PolytopeScene:
    """One or more disjoint solid polytopes with a-priori parameters."""

    def __init__(self, dimension: int, components: Sequence, apriori: AprioriParams):
        if dimension not in (2, 3):
            raise SceneError("dimension must be 2 or 3")
        self.dimension = dimension
        self.apriori = apriori
        if dimension == 2:
            # an empty component list is the legal "no obstacle" scene
            self.components = [np.asarray(c, dtype=float) for c in components]
            for c in self.components:
                if c.ndim != 2 or c.shape[1] != 2 or len(c) < 3:
                    raise SceneError("2D component must be an (n>=3, 2) vertex loop")
                poly = Polygon(c)
                if not poly.is_valid or poly.area <= 0:
                    raise SceneError("2D component is not a valid simple polygon")
                if not poly.exterior.is_ccw:
                    raise SceneError("2D component vertices must be counterclockwise")
            self._polys = [Polygon(c) for c in self.components]
            self._union = unary_union(self._polys)
        else:
            self.components = []
            for comp in components:
                verts = np.asarray(comp["vertices"], dtype=float)
                faces = [list(map(int, f)) for f in comp["faces"]]
                if verts.ndim != 2 or verts.shape[1] != 3:
                    raise SceneError("3D component needs (n, 3) vertices")
                for f in faces:
                    if len(f) < 3:
                        raise SceneError("face with fewer than 3 vertices")
                self.components.append({"vertices": verts, "faces": faces})
            self._polys = None
            self._union = None

    # ---------------- 2D helpers ----------------
    @property
    def shapely_union(self):
        if self.dimension != 2:
            raise SceneError("shapely_union is 2D-only")
        return self._union

    @property
    def shapely_components(self):
        if self.dimension != 2:
            raise SceneError("shapely_components is 2D-only")
        return self._polys

    def edges_2d(self):
        """Yield (component index, edge index, vertex A, vertex B)."""
        for ci, c in enumerate(self.components):
            n = len(c)
            for ei in range(n):
                yield ci, ei, c[ei], c[(ei + 1) % n]

    def contains_points(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.dimension == 2:
            from shapely import contains_xy

            out = np.zeros(len(pts), dtype=bool)
            for poly in self._polys:
                out |= contains_xy(poly, pts[:, 0], pts[:, 1])
            return out
        out = np.zeros(len(pts), dtype=bool)
        for comp in self.components:
            tris = self._cached_tris(id(comp), comp)
            total = _solid_angles_batch(pts, tris)
            out |= np.abs(total) > 2 * np.pi
        return out

    def distance_to(self, pts) -> np.ndarray:
        """Distance from points to the solid scene (0 inside)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.dimension == 2:
            import shapely

            geoms = shapely.points(pts)
            d = np.full(len(pts), np.inf)
            for poly in self._polys:
                d = np.minimum(d, shapely.distance(poly, geoms))
            return d
        d = np.full(len(pts), np.inf)
        for comp in self.components:
            tris = self._cached_tris(id(comp), comp)
            for tri in tris:
                d = np.minimum(d, _point_triangle_distance_batch(pts, tri))
        d[self.contains_points(pts)] = 0.0
        return d

    # ---------------- 3D helpers ----------------
    def _face_triangles(self, comp) -> np.ndarray:
        tris = []
        verts = comp["vertices"]
        for f in comp["faces"]:
            tris.extend(_ear_clip(verts[f]))
        return np.asarray(tris)

    def _inside_3d(self, p) -> bool:
        p = np.asarray(p, dtype=float)
        for comp in self.components:
            total = 0.0
            for tri in self._cached_tris(id(comp), comp):
                total += _solid_angle(tri - p[None, :])
            if abs(total) > 2 * np.pi:  # 4 pi inside, 0 outside
                return True
        return False

    _tri_cache: dict = {}

    def _cached_tris(self, key, comp):
        cache = self.__dict__.setdefault("_tris", {})
        if key not in cache:
            cache[key] = self._face_triangles(comp)
        return cache[key]

    def _boundary_distance_3d(self, p) -> float:
        best = np.inf
        for comp in self.components:
            for tri in self._cached_tris(id(comp), comp):
                best = min(best, _point_triangle_distance(p, tri))
        return best

    def boundary_samples_3d(self, per_face: int = 64):
        """(points, normals, face ids) sampled uniformly over all faces."""
        pts, nrm, fid = [], [], []
        fcount = 0
        for comp in self.components:
            verts = comp["vertices"]
            for f in comp["faces"]:
                loop = verts[f]
                n = _face_normal(loop)
                tris = _ear_clip(loop)
                areas = np.array([_tri_area(t) for t in tris])
                w = areas / areas.sum()
                rng = np.random.default_rng(fcount)
                choice = rng.choice(len(tris), size=per_face, p=w)
                for ti in choice:
                    a, b, c = tris[ti]
                    u, v = rng.random(2)
                    if u + v > 1:
                        u, v = 1 - u, 1 - v
                    pts.append(a + u * (b - a) + v * (c - a))
                    nrm.append(n)
                    fid.append(fcount)
                fcount += 1
        return np.asarray(pts), np.asarray(nrm), np.asarray(fid)

    def bounding_radius(self) -> float:
        mx = 0.0
        if self.dimension == 2:
            for c in self.components:
                mx = max(mx, float(np.max(np.linalg.norm(c, axis=1))))
        else:
            for comp in self.components:
                mx = max(mx, float(np.max(np.linalg.norm(comp["vertices"], axis=1))))
        return mx

    def translated(self, shift) -> "PolytopeScene":
        shift = np.asarray(shift, dtype=float)
        if self.dimension == 2:
            comps = [c + shift[None, :] for c in self.components]
        else:
            comps = [
                {"vertices": c["vertices"] + shift[None, :], "faces": c["faces"]}
                for c in self.components
            ]
        return PolytopeScene(self.dimension, comps, self.apriori)

    def scaled(self, factor: float, about=None) -> "PolytopeScene":
        if self.dimension == 2:
            if about is None:
                about = np.zeros(2)
            about = np.asarray(about, dtype=float)
            comps = [about + factor * (c - about) for c in self.components]
            return PolytopeScene(2, comps, self.apriori)
        if about is None:
            about = np.zeros(3)
        about = np.asarray(about, dtype=float)
        comps = [
            {
                "vertices": about + factor * (c["vertices"] - about),
                "faces": c["faces"],
            }
            for c in self.components
        ]
        return PolytopeScene(3, comps, self.apriori)


# ---------------- small 3D primitives ----------------
def _face_normal(loop: np.ndarray) -> np.ndarray:
    # Newell's method; loops are oriented so the normal points outward
    n = np.zeros(3)
    m = len(loop)
    for i in range(m):
        a, b = loop[i], loop[(i + 1) % m]
        n += np.cross(a, b)
    nn = np.linalg.norm(n)
    if nn == 0:
        raise SceneError("zero-area face")
    return n / nn


def _ear_clip(loop: np.ndarray) -> list:
    """Triangulate a planar polygon loop (possibly nonconvex)."""
    n0 = _face_normal(loop)
    # build a 2D chart
    u = loop[1] - loop[0]
    u = u - (u @ n0) * n0
    u /= np.linalg.norm(u)
    v = np.cross(n0, u)
    pts2 = np.column_stack([(loop - loop[0]) @ u, (loop - loop[0]) @ v])
    idx = list(range(len(loop)))
    tris = []
    guard = 0
    while len(idx) > 3 and guard < 10000:
        guard += 1
        ear_found = False
        for j in range(len(idx)):
            i0, i1, i2 = idx[j - 1], idx[j], idx[(j + 1) % len(idx)]
            a, b, c = pts2[i0], pts2[i1], pts2[i2]
            if _cross2(b - a, c - b) <= 1e-14:
                continue
            tri = Polygon([a, b, c])
            ok = True
            for other in idx:
                if other in (i0, i1, i2):
                    continue
                if tri.contains(Point(pts2[other])):
                    ok = False
                    break
            if ok:
                tris.append(np.array([loop[i0], loop[i1], loop[i2]]))
                idx.pop(j)
                ear_found = True
                break
        if not ear_found:
            break
    if len(idx) == 3:
        tris.append(np.array([loop[idx[0]], loop[idx[1]], loop[idx[2]]]))
    return tris


def _cross2(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _tri_area(tri: np.ndarray) -> float:
    return 0.5 * np.linalg.norm(np.cross(tri[1] - tri[0], tri[2] - tri[0]))


def _solid_angle(tri: np.ndarray) -> float:
    """Signed solid angle subtended by the triangle at the origin."""
    a, b, c = tri
    la, lb, lc = np.linalg.norm(a), np.linalg.norm(b), np.linalg.norm(c)
    num = np.dot(a, np.cross(b, c))
    den = la * lb * lc + np.dot(a, b) * lc + np.dot(b, c) * la + np.dot(c, a) * lb
    return 2.0 * np.arctan2(num, den)


def _solid_angles_batch(pts: np.ndarray, tris: np.ndarray) -> np.ndarray:
    """Total signed solid angle of all triangles seen from each point."""
    # pts (P,3), tris (T,3,3) -> (P,)
    a = tris[None, :, 0, :] - pts[:, None, :]
    b = tris[None, :, 1, :] - pts[:, None, :]
    c = tris[None, :, 2, :] - pts[:, None, :]
    la = np.linalg.norm(a, axis=2)
    lb = np.linalg.norm(b, axis=2)
    lc = np.linalg.norm(c, axis=2)
    num = np.einsum("ptk,ptk->pt", a, np.cross(b, c))
    den = (
        la * lb * lc
        + np.einsum("ptk,ptk->pt", a, b) * lc
        + np.einsum("ptk,ptk->pt", b, c) * la
        + np.einsum("ptk,ptk->pt", c, a) * lb
    )
    return 2.0 * np.arctan2(num, den).sum(axis=1)


def _point_triangle_distance_batch(pts: np.ndarray, tri: np.ndarray) -> np.ndarray:
    """Distance from many points to one triangle (region-case analysis,
    regions claimed in the same order as the scalar routine)."""
    a, b, c = tri
    ab, ac = b - a, c - a
    ap = pts - a[None, :]
    bp = pts - b[None, :]
    cp = pts - c[None, :]
    d1, d2 = ap @ ab, ap @ ac
    d3, d4 = bp @ ab, bp @ ac
    d5, d6 = cp @ ab, cp @ ac
    vc = d1 * d4 - d3 * d2
    vb = d5 * d2 - d1 * d6
    va = d3 * d6 - d5 * d4
    out = np.full(len(pts), np.inf)

    def claim(mask):
        m = mask & ~np.isfinite(out)
        return m

    def safe_div(num, den):
        return num / np.where(den == 0, 1.0, den)

    m = claim((d1 <= 0) & (d2 <= 0))
    out[m] = np.linalg.norm(ap[m], axis=1)
    m = claim((d3 >= 0) & (d4 <= d3))
    out[m] = np.linalg.norm(bp[m], axis=1)
    m = claim((vc <= 0) & (d1 >= 0) & (d3 <= 0))
    t = safe_div(d1[m], d1[m] - d3[m])
    out[m] = np.linalg.norm(ap[m] - t[:, None] * ab[None, :], axis=1)
    m = claim((d6 >= 0) & (d5 <= d6))
    out[m] = np.linalg.norm(cp[m], axis=1)
    m = claim((vb <= 0) & (d2 >= 0) & (d6 <= 0))
    t = safe_div(d2[m], d2[m] - d6[m])
    out[m] = np.linalg.norm(ap[m] - t[:, None] * ac[None, :], axis=1)
    m = claim((va <= 0) & ((d4 - d3) >= 0) & ((d5 - d6) >= 0))
    t = safe_div(d4[m] - d3[m], (d4[m] - d3[m]) + (d5[m] - d6[m]))
    out[m] = np.linalg.norm(pts[m] - (b[None, :] + t[:, None] * (c - b)[None, :]), axis=1)
    m = ~np.isfinite(out)
    n = np.cross(ab, ac)
    out[m] = np.abs(ap[m] @ n) / np.linalg.norm(n)
    return out


def _point_triangle_distance(p: np.ndarray, tri: np.ndarray) -> float:
    a, b, c = tri
    ab, ac, ap = b - a, c - a, p - a
    d1, d2 = ab @ ap, ac @ ap
    if d1 <= 0 and d2 <= 0:
        return float(np.linalg.norm(ap))
    bp = p - b
    d3, d4 = ab @ bp, ac @ bp
    if d3 >= 0 and d4 <= d3:
        return float(np.linalg.norm(bp))
    vc = d1 * d4 - d3 * d2
    if vc <= 0 and d1 >= 0 and d3 <= 0:
        t = d1 / (d1 - d3)
        return float(np.linalg.norm(ap - t * ab))
    cp = p - c
    d5, d6 = ab @ cp, ac @ cp
    if d6 >= 0 and d5 <= d6:
        return float(np.linalg.norm(cp))
    vb = d5 * d2 - d1 * d6
    if vb <= 0 and d2 >= 0 and d6 <= 0:
        t = d2 / (d2 - d6)
        return float(np.linalg.norm(ap - t * ac))
    va = d3 * d6 - d5 * d4
    if va <= 0 and (d4 - d3) >= 0 and (d5 - d6) >= 0:
        t = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        return float(np.linalg.norm(p - (b + t * (c - b))))
    n = np.cross(ab, ac)
    return float(abs(ap @ n) / np.linalg.norm(n))


# ---------------- JSON scene format ----------------
def load_scene(path_or_dict) -> PolytopeScene:
    """Scene file format:
    {"dimension": 2|3,
     "components": [{"vertices": [[...], ...], "faces": [[i,...], ...]?}, ...],
     "apriori": {"R0":, "r0":, "L0":, "theta0":}}
    Lengths in consistent units; angles in radians.
    """
    if isinstance(path_or_dict, dict):
        data = path_or_dict
    else:
        with open(path_or_dict) as fh:
            data = json.load(fh)
    ap = AprioriParams(**data["apriori"])
    dim = int(data["dimension"])
    if dim == 2:
        comps = [np.asarray(c["vertices"], dtype=float) for c in data["components"]]
    else:
        comps = data["components"]
    return PolytopeScene(dim, comps, ap)


def save_scene(scene: PolytopeScene, path) -> None:
    if scene.dimension == 2:
        comps = [{"vertices": c.tolist()} for c in scene.components]
    else:
        comps = [
            {"vertices": c["vertices"].tolist(), "faces": c["faces"]}
            for c in scene.components
        ]
    with open(path, "w") as fh:
        json.dump(
            {
                "dimension": scene.dimension,
                "components": comps,
                "apriori": scene.apriori.as_dict(),
            },
            fh,
            indent=2,
        )


# ---------------- admissibility ----------------
@dataclass
class AdmissibilityItem:
    name: str
    passed: bool
    detail: str = ""
    offending: Optional[object] = None


@dataclass
class AdmissibilityReport:
    items: List[AdmissibilityItem] = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(it.passed for it in self.items)

    def add(self, name, passed, detail="", offending=None):
        self.items.append(AdmissibilityItem(name, bool(passed), detail, offending))

    def failures(self):
        return [it for it in self.items if not it.passed]

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "items": [
                {
                    "name": it.name,
                    "passed": it.passed,
                    "detail": it.detail,
                    "offending": _jsonable(it.offending),
                }
                for it in self.items
            ],
        }


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


def _angle_ok(beta: float, theta0: float) -> bool:
    return (theta0 < beta < np.pi - theta0) or (
        np.pi + theta0 < beta < 2 * np.pi - theta0
    )


def _interior_angles_2d(verts: np.ndarray) -> np.ndarray:
    n = len(verts)
    angles = np.empty(n)
    for i in range(n):
        a, b, c = verts[i - 1], verts[i], verts[(i + 1) % n]
        v1, v2 = a - b, c - b
        ang = np.arctan2(_cross2(v2, v1), np.dot(v2, v1))
        if ang < 0:
            ang += 2 * np.pi
        angles[i] = ang
    return angles


def _cone_points(y, omega, r0, theta0, n_dir=8, n_rad=32):
    """Sample points of the open cone C(y, omega, r0, theta0)."""
    omega = omega / np.linalg.norm(omega)
    radii = r0 * (np.arange(1, n_rad + 1) / (n_rad + 1))
    if len(omega) == 2:
        angs = np.linspace(-theta0 * 0.98, theta0 * 0.98, n_dir)
        base = np.arctan2(omega[1], omega[0])
        dirs = np.column_stack([np.cos(base + angs), np.sin(base + angs)])
    else:
        # directions within angle theta0 of omega
        perp1 = np.cross(omega, [0.0, 0.0, 1.0])
        if np.linalg.norm(perp1) < 1e-12:
            perp1 = np.cross(omega, [0.0, 1.0, 0.0])
        perp1 /= np.linalg.norm(perp1)
        perp2 = np.cross(omega, perp1)
        polar = np.linspace(0, theta0 * 0.98, max(2, n_dir // 4))
        azim = np.linspace(0, 2 * np.pi, 8, endpoint=False)
        dirs = [omega]
        for pt in polar[1:]:
            for az in azim:
                dirs.append(
                    np.cos(pt) * omega
                    + np.sin(pt) * (np.cos(az) * perp1 + np.sin(az) * perp2)
                )
        dirs = np.asarray(dirs)
    pts = (y[None, None, :] + radii[None, :, None] * dirs[:, None, :]).reshape(
        -1, len(omega)
    )
    return pts


def _cone_condition_2d(scene, report, n_boundary=96, n_omega=64):
    ap = scene.apriori
    # boundary samples
    samples = []
    for ci, ei, A, B in scene.edges_2d():
        for s in np.linspace(0.1, 0.9, 3):
            samples.append(A + s * (B - A))
    for c in scene.components:
        samples.extend(list(c))
    samples = np.asarray(samples)
    omegas = np.column_stack(
        [
            np.cos(2 * np.pi * np.arange(n_omega) / n_omega),
            np.sin(2 * np.pi * np.arange(n_omega) / n_omega),
        ]
    )
    worst = None
    for xc in samples:
        near = samples[np.linalg.norm(samples - xc, axis=1) <= ap.r0]
        found = False
        for om in omegas:
            ok = True
            for y in near:
                pts = _cone_points(y, om, ap.r0, ap.theta0)
                if scene.contains_points(pts).any():
                    ok = False
                    break
            if ok:
                found = True
                break
        if not found:
            worst = xc
            break
    report.add(
        "exterior_cone_condition",
        worst is None,
        "sampled cone-direction search"
        + ("" if worst is None else f" failed near {worst}"),
        worst,
    )


def _cone_condition_3d(scene, report, per_face=6, n_omega=48):
    ap = scene.apriori
    pts, nrms, _ = scene.boundary_samples_3d(per_face=per_face)
    # candidate directions: fibonacci sphere
    i = np.arange(n_omega)
    ga = np.pi * (3 - np.sqrt(5))
    z = 1 - 2 * (i + 0.5) / n_omega
    rr = np.sqrt(1 - z**2)
    omegas = np.column_stack([rr * np.cos(ga * i), rr * np.sin(ga * i), z])
    worst = None
    for xc, nv in zip(pts[:: max(1, len(pts) // 24)], nrms[:: max(1, len(pts) // 24)]):
        near_mask = np.linalg.norm(pts - xc, axis=1) <= ap.r0
        near = pts[near_mask]
        found = False
        # try the face normal first, then the global candidates
        for om in np.vstack([nv[None, :], omegas]):
            ok = True
            for y in near[:: max(1, len(near) // 12)]:
                cpts = _cone_points(y, om, ap.r0, ap.theta0, n_dir=12, n_rad=8)
                if scene.contains_points(cpts).any():
                    ok = False
                    break
            if ok:
                found = True
                break
        if not found:
            worst = xc
            break
    report.add(
        "exterior_cone_condition",
        worst is None,
        "sampled cone-direction search"
        + ("" if worst is None else f" failed near {worst}"),
        worst,
    )


def validate_admissible(scene: PolytopeScene, check_cone: bool = True) -> AdmissibilityReport:
    """Check the scene against the a-priori class; pass/fail per assumption."""
    ap = scene.apriori
    report = AdmissibilityReport()

    # edge sizes
    short = None
    if scene.dimension == 2:
        for ci, ei, A, B in scene.edges_2d():
            if np.linalg.norm(B - A) < ap.r0:
                short = (ci, ei, float(np.linalg.norm(B - A)))
                break
    else:
        for comp in scene.components:
            verts = comp["vertices"]
            for f in comp["faces"]:
                for i in range(len(f)):
                    a, b = verts[f[i]], verts[f[(i + 1) % len(f)]]
                    if np.linalg.norm(b - a) < ap.r0:
                        short = (f[i], f[(i + 1) % len(f)], float(np.linalg.norm(b - a)))
                        break
    report.add(
        "edge_size",
        short is None,
        f"all edges >= r0={ap.r0}" if short is None else f"edge shorter than r0: {short}",
        short,
    )

    # angles
    bad_angle = None
    if scene.dimension == 2:
        for ci, c in enumerate(scene.components):
            for i, beta in enumerate(_interior_angles_2d(c)):
                if not _angle_ok(beta, ap.theta0):
                    bad_angle = (ci, i, float(beta))
                    break
        report.add(
            "vertex_angles",
            bad_angle is None,
            "interior angles inside (theta0, pi-theta0) u (pi+theta0, 2pi-theta0)"
            if bad_angle is None
            else f"angle outside window: {bad_angle}",
            bad_angle,
        )
    else:
        for comp in scene.components:
            verts = comp["vertices"]
            for f in comp["faces"]:
                loop = verts[f]
                nrm = _face_normal(loop)
                m = len(loop)
                for i in range(m):
                    a, b, c = loop[i - 1], loop[i], loop[(i + 1) % m]
                    v1, v2 = a - b, c - b
                    ang = np.arctan2(np.cross(v2, v1) @ nrm, np.dot(v2, v1))
                    if ang < 0:
                        ang += 2 * np.pi
                    if not _angle_ok(ang, ap.theta0):
                        bad_angle = ("face_angle", float(ang))
                        break
        report.add(
            "face_angles",
            bad_angle is None,
            "" if bad_angle is None else f"{bad_angle}",
            bad_angle,
        )
        bad_dihedral = None
        for comp in scene.components:
            verts = comp["vertices"]
            # collect edge -> adjacent faces
            edge_faces = {}
            for fi, f in enumerate(comp["faces"]):
                for i in range(len(f)):
                    e = tuple(sorted((f[i], f[(i + 1) % len(f)])))
                    edge_faces.setdefault(e, []).append(fi)
            for e, fs in edge_faces.items():
                if len(fs) != 2:
                    report.add("closed_surface", False, f"edge {e} not shared by 2 faces", e)
                    return report
                n1 = _face_normal(verts[comp["faces"][fs[0]]])
                n2 = _face_normal(verts[comp["faces"][fs[1]]])
                theta_n = np.arctan2(
                    np.linalg.norm(np.cross(n1, n2)), float(n1 @ n2)
                )
                # convex edge: interior dihedral = pi - theta_n; reflex: pi + theta_n.
                # Decide by probing just inside the normal bisector.
                edge_mid = 0.5 * (verts[e[0]] + verts[e[1]])
                bis = n1 + n2
                bis /= max(np.linalg.norm(bis), 1e-300)
                probe = edge_mid - 1e-4 * ap.r0 * bis
                ang = np.pi - theta_n if self_contains(scene, probe) else np.pi + theta_n
                if not _angle_ok(ang, ap.theta0):
                    bad_dihedral = (e, float(ang))
                    break
        report.add(
            "dihedral_angles",
            bad_dihedral is None,
            "" if bad_dihedral is None else f"{bad_dihedral}",
            bad_dihedral,
        )
        # face thickness: a point at distance >= r0 from the face boundary
        thin = None
        for comp in scene.components:
            verts = comp["vertices"]
            for fi, f in enumerate(comp["faces"]):
                loop = verts[f]
                n0 = _face_normal(loop)
                u = loop[1] - loop[0]
                u = u - (u @ n0) * n0
                u /= np.linalg.norm(u)
                v = np.cross(n0, u)
                poly2 = Polygon(
                    np.column_stack([(loop - loop[0]) @ u, (loop - loop[0]) @ v])
                )
                if poly2.buffer(-ap.r0).is_empty:
                    thin = fi
                    break
        report.add(
            "face_thickness",
            thin is None,
            "" if thin is None else f"face {thin} has inradius < r0",
            thin,
        )

    # boundedness
    rad = scene.bounding_radius()
    report.add(
        "containment_in_B_R0",
        rad <= ap.R0,
        f"scene radius {rad:.6g} vs R0={ap.R0}",
        rad if rad > ap.R0 else None,
    )

    # pairwise disjointness (positive clearance)
    clear_bad = None
    if scene.dimension == 2 and len(scene.components) > 1:
        polys = scene.shapely_components
        for i in range(len(polys)):
            for j in range(i + 1, len(polys)):
                if polys[i].distance(polys[j]) <= 0:
                    clear_bad = (i, j)
    report.add(
        "pairwise_disjoint",
        clear_bad is None,
        "" if clear_bad is None else f"components {clear_bad} touch or overlap",
        clear_bad,
    )

    # exterior connectivity: disjoint simply connected solids cannot trap a
    # bounded exterior pocket, so disjointness plus simplicity suffices
    report.add(
        "exterior_connected",
        clear_bad is None,
        "implied by pairwise disjoint simple components",
    )

    if check_cone:
        if scene.dimension == 2:
            _cone_condition_2d(scene, report)
        else:
            _cone_condition_3d(scene, report)
    return report


def self_contains(scene: PolytopeScene, p) -> bool:
    return bool(scene.contains_points(np.asarray(p)[None, :])[0])
