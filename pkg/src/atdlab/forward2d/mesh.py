"""Boundary meshes for the layer-potential solver.

Polygon boundaries get composite Gauss panels with algebraic grading (default
exponent 3) toward both panel-chain endpoints of every edge or sub-edge, which
resolves the corner singularities of the density. The circle validation mode
uses a uniform trigonometric grid suited to the spectral Kress quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..geometry.scene import PolytopeScene
from .impedance import ImpedanceSpec, MixedEdge, _BC

__all__ = ["Panel", "PolygonMesh", "CircleMesh", "graded_breaks"]


def graded_breaks(n: int, q: float = 3.0) -> np.ndarray:
    """n+1 breakpoints of [0,1] with algebraic grading of exponent q at both ends."""
    t = np.linspace(0.0, 1.0, n + 1)
    return t**q / (t**q + (1 - t) ** q)


@dataclass
class Panel:
    a: np.ndarray
    b: np.ndarray
    tang: np.ndarray
    nrm: np.ndarray
    idx: np.ndarray          # node indices into the global vectors
    bc: _BC
    component: int
    edge: int
    L: float = 0.0

    def __post_init__(self):
        self.L = float(np.linalg.norm(self.b - self.a))

    def points(self, tloc):
        """Local coordinates tloc in [-1, 1] -> physical points."""
        tloc = np.atleast_1d(np.asarray(tloc, dtype=float))
        return self.a[None, :] + (tloc[:, None] + 1) / 2 * self.L * self.tang[None, :]


class PolygonMesh:
    def __init__(
        self,
        scene: PolytopeScene,
        spec: ImpedanceSpec,
        panels_per_edge: int = 12,
        grading_q: float = 3.0,
        ngl: int = 10,
    ):
        self.scene = scene
        self.spec = spec
        self.ngl = int(ngl)
        self.glx, self.glw = leggauss(self.ngl)
        V = np.polynomial.legendre.legvander(self.glx, self.ngl - 1)
        self.leg_vinv = np.linalg.inv(V)

        xs, ws, nus, etas, diri = [], [], [], [], []
        self.panels: List[Panel] = []
        idx = 0
        for ci, ei, A, B in scene.edges_2d():
            bc = spec.bc_for(ci, ei)
            pieces = bc.pieces if isinstance(bc, MixedEdge) else [(0.0, 1.0, bc)]
            edge_vec = B - A
            L_edge = float(np.linalg.norm(edge_vec))
            tang = edge_vec / L_edge
            nrm = np.array([tang[1], -tang[0]])  # ccw polygon -> exterior normal
            for (t0, t1, sub) in pieces:
                sub_a = A + t0 * edge_vec
                br = t0 + graded_breaks(panels_per_edge, grading_q) * (t1 - t0)
                for j in range(panels_per_edge):
                    pa = A + br[j] * edge_vec
                    pb = A + br[j + 1] * edge_vec
                    pan = Panel(
                        a=pa, b=pb, tang=tang, nrm=nrm,
                        idx=np.arange(idx, idx + self.ngl),
                        bc=sub, component=ci, edge=ei,
                    )
                    half = pan.L / 2
                    pts = pan.points(self.glx)
                    xs.append(pts)
                    ws.append(self.glw * half)
                    nus.append(np.repeat(nrm[None, :], self.ngl, axis=0))
                    tpar = (br[j] + (self.glx + 1) / 2 * (br[j + 1] - br[j]))
                    if sub.is_dirichlet:
                        etas.append(np.zeros(self.ngl, dtype=complex))
                        diri.append(np.ones(self.ngl, dtype=bool))
                    else:
                        etas.append(np.asarray(sub.eta(tpar), dtype=complex))
                        diri.append(np.zeros(self.ngl, dtype=bool))
                    self.panels.append(pan)
                    idx += self.ngl
        if idx == 0:
            # empty scene: no boundary, zero scattered field
            self.x = np.zeros((0, 2))
            self.w = np.zeros(0)
            self.nu = np.zeros((0, 2))
            self.eta = np.zeros(0, dtype=complex)
            self.dirichlet = np.zeros(0, dtype=bool)
        else:
            self.x = np.vstack(xs)
            self.w = np.concatenate(ws)
            self.nu = np.vstack(nus)
            self.eta = np.concatenate(etas)
            self.dirichlet = np.concatenate(diri)
        self.n = idx
        self.panel_mids = np.array([(p.a + p.b) / 2 for p in self.panels]).reshape(-1, 2)
        self.panel_L = np.array([p.L for p in self.panels])

    @property
    def min_panel_length(self) -> float:
        return float(self.panel_L.min())

    @property
    def near_eval_threshold(self) -> float:
        # points closer than ~3 typical panel widths need adaptive quadrature
        return 3.0 * float(np.median(self.panel_L))


@dataclass
class CircleMesh:
    center: np.ndarray
    radius: float
    n: int
    spec: Optional[ImpedanceSpec] = None
    t: np.ndarray = field(init=False)
    x: np.ndarray = field(init=False)
    nu: np.ndarray = field(init=False)
    w: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.n % 2:
            raise ValueError("circle mesh needs an even number of nodes")
        self.center = np.asarray(self.center, dtype=float)
        self.t = 2 * np.pi * np.arange(self.n) / self.n
        ring = np.column_stack([np.cos(self.t), np.sin(self.t)])
        self.x = self.center[None, :] + self.radius * ring
        self.nu = ring
        self.w = np.full(self.n, 2 * np.pi / self.n * self.radius)
