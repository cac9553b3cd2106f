"""Far-field patterns on the unit circle.

Convention: u_s(x) = e^{ikr} / sqrt(r) * (u_inf(xh) + O(1/r)), so the
far-field kernel of the single layer is fac * e^{-ik xh.y} and of the double
layer fac * (-ik xh.nu(y)) e^{-ik xh.y}, with fac = e^{i pi/4}/sqrt(8 pi k).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .mesh import CircleMesh
from .solver import ScatterSolution

__all__ = ["FarFieldPattern", "eval_far_field", "far_field_error"]


@dataclass
class FarFieldPattern:
    theta: np.ndarray      # uniform angular grid on [0, 2pi)
    values: np.ndarray     # complex samples of u_inf
    k: float

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if len(self.theta) != len(self.values):
            raise ValueError("grid/value length mismatch")

    @property
    def weights(self) -> np.ndarray:
        return np.full(len(self.theta), 2 * np.pi / len(self.theta))

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(self.weights * np.abs(self.values) ** 2)))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["theta", "re", "im"])
            for t, v in zip(self.theta, self.values):
                wr.writerow([f"{t:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"])


def eval_far_field(sol: ScatterSolution, n_dirs: int = 128) -> FarFieldPattern:
    """Sample u_inf on a uniform angular grid from the layer representation."""
    k = sol.k
    theta = 2 * np.pi * np.arange(n_dirs) / n_dirs
    xh = np.column_stack([np.cos(theta), np.sin(theta)])
    fac = np.exp(1j * np.pi / 4) / np.sqrt(8 * np.pi * k)
    sigma_D, sigma_S = sol._rep_densities()
    mesh = sol.mesh
    if isinstance(mesh, CircleMesh):
        x, nu, w = mesh.x, mesh.nu, mesh.w
    else:
        x, nu, w = mesh.x, mesh.nu, mesh.w
    phase = np.exp(-1j * k * xh @ x.T)
    vals = fac * (
        phase @ (sigma_S * w)
        + ((-1j * k * (xh @ nu.T)) * phase) @ (sigma_D * w)
    )
    return FarFieldPattern(theta, vals, k)


def far_field_error(F: FarFieldPattern, G: FarFieldPattern) -> float:
    """Quadrature L2(S^1) norm of F - G on their common grid."""
    if len(F.theta) != len(G.theta) or np.max(np.abs(F.theta - G.theta)) > 1e-12:
        raise ValueError("far-field grids do not match")
    w = F.weights
    return float(np.sqrt(np.sum(w * np.abs(F.values - G.values) ** 2)))
