"""Test-domain frames anchored at exterior-visible flat boundary pieces.

The 2D frame maps the anchor point to the origin and the hosting edge onto
the positive x1-axis with the anchor scene's interior on the upper side, so
the wedge Q_h = {0 < theta < theta0, r < h} dips into the anchor obstacle
while staying clear of the other scene. I1 is the flat anchor segment on the
x1-axis, I2 the slanted segment at angle theta0, I3 the closing arc, and the
rays extend I1, I2 to infinity.

The 3D frame similarly maps the hosting face into {x3 = 0} with interior on
x3 > 0. P_h is the spherical wedge {r < h, 0 <= theta <= pi/2, 0 <= phi <=
phi0}; S1 is its flat patch in the face plane, S2 and S3 the meridian
quarter-disks, S4 the spherical cap, with outward normals nu1 = -e3,
nu2 = -e2, nu3 = (-sin phi0, cos phi0, 0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distances import DistanceWitness
from .scene import PolytopeScene, RigidFrame, _face_normal

__all__ = ["FrameError", "AtdFrame2D", "AtdFrame3D", "build_atd_2d", "build_atd_3d"]


class FrameError(ValueError):
    """Anchor cannot host the requested test domain (corner/edge margins)."""


@dataclass
class AtdFrame2D:
    frame: RigidFrame  # world -> local
    h: float
    theta0: float
    anchor_world: np.ndarray
    edge: tuple  # (component, edge index) of the hosting edge

    def to_world(self, x_local):
        return self.frame.invert(x_local)

    def to_local(self, x_world):
        return self.frame.apply(x_world)

    # boundary-piece parameterizations, local coordinates
    def I1(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float)) * self.h
        return np.column_stack([t, np.zeros_like(t)])

    def I2(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float)) * self.h
        return np.column_stack([t * np.cos(self.theta0), t * np.sin(self.theta0)])

    def I3(self, t):
        ang = np.atleast_1d(np.asarray(t, dtype=float)) * self.theta0
        return self.h * np.column_stack([np.cos(ang), np.sin(ang)])

    def ray1(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        return np.column_stack([r, np.zeros_like(r)])

    def ray2(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        return np.column_stack([r * np.cos(self.theta0), r * np.sin(self.theta0)])

    nu1 = property(lambda self: np.array([0.0, -1.0]))

    @property
    def nu2(self):
        return np.array([-np.sin(self.theta0), np.cos(self.theta0)])

    def sector_points(self, n=400, rng_seed=0):
        rng = np.random.default_rng(rng_seed)
        r = self.h * np.sqrt(rng.random(n))
        a = self.theta0 * rng.random(n)
        return np.column_stack([r * np.cos(a), r * np.sin(a)])


@dataclass
class AtdFrame3D:
    frame: RigidFrame
    h: float
    phi0: float
    anchor_world: np.ndarray
    face: tuple  # (component, face index)

    def to_world(self, x_local):
        return self.frame.invert(x_local)

    def to_local(self, x_world):
        return self.frame.apply(x_world)

    @property
    def nu1(self):
        return np.array([0.0, 0.0, -1.0])

    @property
    def nu2(self):
        return np.array([0.0, -1.0, 0.0])

    @property
    def nu3(self):
        return np.array([-np.sin(self.phi0), np.cos(self.phi0), 0.0])

    def S1(self, r, phi):
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), np.zeros_like(r)])

    def S2(self, r, theta):
        return np.column_stack([r * np.sin(theta), np.zeros_like(r), r * np.cos(theta)])

    def S3(self, r, theta):
        return np.column_stack(
            [
                r * np.sin(theta) * np.cos(self.phi0),
                r * np.sin(theta) * np.sin(self.phi0),
                r * np.cos(theta),
            ]
        )

    def wedge_points(self, n=500, rng_seed=0):
        rng = np.random.default_rng(rng_seed)
        r = self.h * rng.random(n) ** (1 / 3)
        th = np.arccos(rng.random(n))  # theta in [0, pi/2]
        ph = self.phi0 * rng.random(n)
        return np.column_stack(
            [r * np.sin(th) * np.cos(ph), r * np.sin(th) * np.sin(ph), r * np.cos(th)]
        )


def _rotation_2d(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def build_atd_2d(
    D: PolytopeScene,
    Dprime: PolytopeScene,
    witness: DistanceWitness,
    c2: float = 0.5,
    theta0: float = np.pi / 2,
    slide_steps: int = 64,
) -> AtdFrame2D:
    """Attach the planar test wedge at the witness point.

    h = c2 * witness.value. The anchor must sit on a flat edge with both
    endpoints at least h away; if the witness is too close to a vertex the
    anchor slides along the hosting edge toward its midpoint until the margin
    fits, and the construction fails if the edge cannot host it at all.
    """
    if not 0 < c2 < 1:
        raise ValueError("c2 must lie in (0,1)")
    if not 0 < theta0 < np.pi:
        raise ValueError("theta0 must lie in (0, pi)")
    if witness.point is None or witness.value <= 0:
        raise FrameError("witness carries no positive separation")
    host = D if witness.side == "A" else Dprime
    other = Dprime if witness.side == "A" else D
    h = c2 * witness.value

    verts = host.components[witness.component]
    P = verts[witness.edge_or_face]
    Q = verts[(witness.edge_or_face + 1) % len(verts)]
    L = np.linalg.norm(Q - P)
    tang = (Q - P) / L
    t_anchor = float((np.asarray(witness.point) - P) @ tang)
    if L < 2 * h:
        raise FrameError(
            f"hosting edge (length {L:.4g}) cannot contain a margin-2h anchor (h={h:.4g})"
        )
    lo, hi = h, L - h
    if not lo <= t_anchor <= hi:
        # slide toward the midpoint, as far as needed but no further
        t_anchor = float(np.clip(t_anchor, lo, hi))
    anchor = P + t_anchor * tang

    # local frame: anchor -> origin, edge -> +x1, interior of host -> +x2.
    # ccw polygons have interior on the LEFT of the edge direction.
    angle = np.arctan2(tang[1], tang[0])
    R = _rotation_2d(-angle)
    frame = RigidFrame(R, -R @ anchor)
    fr = AtdFrame2D(frame=frame, h=h, theta0=theta0, anchor_world=anchor,
                    edge=(witness.component, witness.edge_or_face))

    # invariants: the wedge avoids the other scene; I1 stays on the hosting edge
    pts_world = fr.to_world(fr.sector_points(1000))
    if other.distance_to(pts_world).min() <= 0:
        raise FrameError("test wedge intersects the other scene")
    i1_world = fr.to_world(fr.I1(np.linspace(0.01, 0.99, 16)))
    seg = P[None, :] + np.linspace(0, 1, 2)[:, None] * (Q - P)[None, :]
    for p in i1_world:
        tproj = float((p - P) @ tang)
        offedge = np.linalg.norm(p - (P + tproj * tang))
        if offedge > 1e-9 * max(1.0, L) or not -1e-12 <= tproj <= L + 1e-12:
            raise FrameError("flat anchor segment escaped the hosting edge")
    return fr


def build_atd_3d(
    Sigma: PolytopeScene,
    SigmaPrime: PolytopeScene,
    witness: DistanceWitness,
    c1: float = 0.5,
    phi0: float = np.pi / 2,
) -> AtdFrame3D:
    """Attach the 3D test wedge at a witness in the relative interior of a face."""
    if not 0 < c1 < 1:
        raise ValueError("c1 must lie in (0,1)")
    if not 0 < phi0 <= np.pi / 2:
        raise ValueError("phi0 must lie in (0, pi/2]")
    if witness.point is None or witness.value <= 0:
        raise FrameError("witness carries no positive separation")
    host = Sigma if witness.side == "A" else SigmaPrime
    other = SigmaPrime if witness.side == "A" else Sigma
    h = c1 * witness.value

    comp = host.components[witness.component]
    face = comp["faces"][witness.edge_or_face]
    loop = comp["vertices"][face]
    n_out = _face_normal(loop)
    anchor = np.asarray(witness.point, dtype=float)

    # margin: B_h(anchor) cap boundary must stay inside this face
    from shapely.geometry import Point as ShPoint, Polygon as ShPolygon

    u0 = loop[1] - loop[0]
    u0 = u0 - (u0 @ n_out) * n_out
    u0 /= np.linalg.norm(u0)
    v0 = np.cross(n_out, u0)
    poly2 = ShPolygon(np.column_stack([(loop - loop[0]) @ u0, (loop - loop[0]) @ v0]))
    a2 = np.array([(anchor - loop[0]) @ u0, (anchor - loop[0]) @ v0])
    margin = poly2.exterior.distance(ShPoint(a2))
    if margin < h:
        # slide toward the face centroid
        cen = np.asarray(poly2.centroid.coords[0])
        best = None
        for s in np.linspace(0, 1, 65):
            cand = a2 + s * (cen - a2)
            if poly2.exterior.distance(ShPoint(cand)) >= h and poly2.contains(ShPoint(cand)):
                best = cand
                break
        if best is None:
            raise FrameError(
                f"face cannot host the margin-h anchor (h={h:.4g}, margin={margin:.4g})"
            )
        anchor = loop[0] + best[0] * u0 + best[1] * v0

    # frame: anchor -> 0, face plane -> {x3=0}, interior (-n_out) -> +e3
    e3 = -n_out
    e1 = u0
    e2 = np.cross(e3, e1)
    R = np.vstack([e1, e2, e3])  # rows: local axes in world coords
    frame = RigidFrame(R, -R @ anchor)
    fr = AtdFrame3D(frame=frame, h=h, phi0=phi0, anchor_world=anchor,
                    face=(witness.component, witness.edge_or_face))

    pts_world = fr.to_world(fr.wedge_points(1200))
    if other.distance_to(pts_world).min() <= 0:
        raise FrameError("3D test wedge intersects the other scene")
    return fr
