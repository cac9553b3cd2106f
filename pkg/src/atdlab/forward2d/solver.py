"""Exterior Helmholtz solver on polygon and circle boundaries.

Formulations (all second kind except the Dirichlet block of mixed scenes):

* impedance / sound-hard, direct, unknown = boundary trace of the total
  field:       (1/2) u - D[u] - S[eta u] = u_inc            on Gamma
  representation u_s = D[u] + S[eta u] exterior.

* pure sound-soft, combined-field indirect, unknown = density phi:
               ((1/2) I + D - i gamma S) phi = -u_inc       on Gamma
  representation u_s = D[phi] - i gamma S[phi]; the complex coupling
  gamma ~ max(k, 1) avoids the spurious interior resonances.

* mixed soft/impedance, direct, unknowns = trace on the impedance part and
  the normal derivative psi on the Dirichlet part:
  u_s = D_I[u] + S_I[eta u] - S_D[psi].

Nystrom discretization: plain Gauss products for separated panel pairs,
adaptive dyadic subdivision with in-panel Legendre interpolation for self and
near pairs (handles the logarithmic singularity), and spectral Kress
quadrature on the circle. The double-layer kernel vanishes identically along
a flat panel's own line, which removes its polygon self-interaction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
import scipy.special as sp

from ..geometry.scene import PolytopeScene
from .impedance import ImpedanceSpec, SoundSoft
from .mesh import CircleMesh, Panel, PolygonMesh

__all__ = [
    "IncidentWave",
    "PlaneWave",
    "PointSource",
    "ScatterSolution",
    "IllConditionedError",
    "solve_exterior",
    "solve_circle",
]

COND_LIMIT = 1e12


class IllConditionedError(RuntimeError):
    """Near-resonant system; advise changing the coupling parameter or k."""


# ---------------- incident fields ----------------
class IncidentWave:
    kind = "abstract"

    def eval(self, x):
        raise NotImplementedError

    def grad(self, x):
        raise NotImplementedError


@dataclass
class PlaneWave(IncidentWave):
    direction: np.ndarray
    k: float
    kind: str = "plane"

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        nd = np.linalg.norm(d)
        if abs(nd - 1.0) > 1e-12:
            d = d / nd
        self.direction = d

    def eval(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.exp(1j * self.k * x @ self.direction)
        return out if len(out) > 1 else complex(out[0])

    def grad(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        u = np.exp(1j * self.k * x @ self.direction)
        return 1j * self.k * self.direction[None, :] * u[:, None]


@dataclass
class PointSource(IncidentWave):
    location: np.ndarray
    k: float
    kind: str = "point"

    def __post_init__(self):
        self.location = np.asarray(self.location, dtype=float)

    def eval(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        r = np.linalg.norm(x - self.location[None, :], axis=1)
        out = 0.25j * sp.hankel1(0, self.k * r)
        return out if len(out) > 1 else complex(out[0])

    def grad(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        d = x - self.location[None, :]
        r = np.linalg.norm(d, axis=1)
        val = -0.25j * self.k * sp.hankel1(1, self.k * r) / r
        return val[:, None] * d


# ---------------- kernels ----------------
def kernel_S(k, d, r):
    return 0.25j * sp.hankel1(0, k * r)


def kernel_D(k, d, r, nrm, nrm_rows=None):
    # d = x - y; nu(y) either one shared normal or per-row normals
    if nrm_rows is not None:
        m = (d * nrm_rows).sum(axis=1)
    else:
        m = d @ nrm
    return 0.25j * k * sp.hankel1(1, k * r) * m / r


def grad_kernel_S(k, d, r):
    """grad_x G(x, y), shape (m, 2)."""
    return (-0.25j * k * sp.hankel1(1, k * r) / r)[:, None] * d


def grad_kernel_D(k, d, r, nrm):
    """grad_x of d_nu(y) G(x, y), shape (m, 2)."""
    m = d @ nrm
    h1 = sp.hankel1(1, k * r)
    h1p = sp.hankel1(0, k * r) - h1 / (k * r)
    term1 = (0.25j * k * k * h1p * m / (r * r))[:, None] * d
    term2 = (0.25j * k * h1 / r)[:, None] * (
        nrm[None, :] - (m / (r * r))[:, None] * d
    )
    return term1 + term2


# ---------------- adaptive near quadrature over one panel ----------------
def _dyadic_segments(pan: Panel, target: np.ndarray, depth: int = 34):
    s = np.clip(((target - pan.a) @ pan.tang) / pan.L, 0.0, 1.0) * 2 - 1
    foot = pan.a + (s + 1) / 2 * pan.L * pan.tang
    dist = np.linalg.norm(target - foot)
    if dist > pan.L:
        return np.array([[-1.0, 1.0]])
    segs = []
    a, b = -1.0, 1.0
    for _ in range(depth):
        if (b - a) * pan.L / 2 < max(dist, 1e-14 * max(pan.L, 1e-30)):
            break
        mid = (a + b) / 2
        if s <= mid:
            segs.append((mid, b))
            b = mid
        else:
            segs.append((a, mid))
            a = mid
    segs.append((a, b))
    return np.asarray(segs)


def panel_rowblock(mesh, pan: Panel, target, which: str, k: float):
    """Integrals over `pan` of kernel(target, .) times each Lagrange basis."""
    segs = _dyadic_segments(pan, np.asarray(target, dtype=float))
    mids = (segs[:, 0] + segs[:, 1]) / 2
    halfs = (segs[:, 1] - segs[:, 0]) / 2
    tt = (mids[:, None] + halfs[:, None] * mesh.glx[None, :]).ravel()
    wq = (halfs[:, None] * mesh.glw[None, :]).ravel() * pan.L / 2
    pts = pan.points(tt)
    d = np.asarray(target, dtype=float)[None, :] - pts
    r = np.linalg.norm(d, axis=1)
    keep = r > 1e-13 * max(1.0, pan.L)
    kv = np.zeros(len(r), dtype=complex)
    if which == "S":
        kv[keep] = kernel_S(k, d[keep], r[keep])
    elif which == "D":
        kv[keep] = kernel_D(k, d[keep], r[keep], pan.nrm)
    else:
        raise ValueError(which)
    basis = np.polynomial.legendre.legvander(tt, mesh.ngl - 1) @ mesh.leg_vinv
    return (kv * wq) @ basis


def panel_rowblock_grad(mesh, pan: Panel, target, which: str, k: float):
    """Like panel_rowblock but for the x-gradient kernels; returns (ngl, 2)."""
    segs = _dyadic_segments(pan, np.asarray(target, dtype=float))
    mids = (segs[:, 0] + segs[:, 1]) / 2
    halfs = (segs[:, 1] - segs[:, 0]) / 2
    tt = (mids[:, None] + halfs[:, None] * mesh.glx[None, :]).ravel()
    wq = (halfs[:, None] * mesh.glw[None, :]).ravel() * pan.L / 2
    pts = pan.points(tt)
    d = np.asarray(target, dtype=float)[None, :] - pts
    r = np.linalg.norm(d, axis=1)
    if which == "S":
        kv = grad_kernel_S(k, d, r)
    else:
        kv = grad_kernel_D(k, d, r, pan.nrm)
    basis = np.polynomial.legendre.legvander(tt, mesh.ngl - 1) @ mesh.leg_vinv
    return (kv * wq[:, None]).T @ basis  # (2, ngl)


def assemble_layer_matrices(mesh: PolygonMesh, k: float):
    """Nystrom matrices for S and the principal-value D on the polygon mesh."""
    x, w, nu = mesh.x, mesh.w, mesh.nu
    d = x[:, None, :] - x[None, :, :]
    r = np.linalg.norm(d, axis=2)
    np.fill_diagonal(r, 1.0)
    S = 0.25j * sp.hankel1(0, k * r) * w[None, :]
    dn = np.einsum("ijc,jc->ij", d, nu)
    D = 0.25j * k * sp.hankel1(1, k * r) * dn / r * w[None, :]
    np.fill_diagonal(S, 0.0)
    np.fill_diagonal(D, 0.0)
    for pi, pan in enumerate(mesh.panels):
        dt = np.linalg.norm(x - mesh.panel_mids[pi], axis=1)
        near = np.where(dt < 1.5 * pan.L)[0]
        for ti in near:
            S[ti, pan.idx] = panel_rowblock(mesh, pan, x[ti], "S", k)
            D[ti, pan.idx] = panel_rowblock(mesh, pan, x[ti], "D", k)
    return S, D


# ---------------- circle (Kress) quadrature ----------------
def _kress_R(n: int) -> np.ndarray:
    t = 2 * np.pi * np.arange(n) / n
    dt = t[:, None] - t[None, :]
    R = np.zeros((n, n))
    for m in range(1, n // 2):
        R += np.cos(m * dt) / m
    return -(4 * np.pi / n) * R - (4 * np.pi / n**2) * np.cos((n / 2) * dt)


def circle_layer_matrices(mesh: CircleMesh, k: float):
    n, a = mesh.n, mesh.radius
    t = mesh.t
    dt = t[:, None] - t[None, :]
    off = ~np.eye(n, dtype=bool)
    d = mesh.x[:, None, :] - mesh.x[None, :, :]
    r = np.linalg.norm(d, axis=2)
    np.fill_diagonal(r, 1.0)
    kr = k * r
    ls = np.zeros_like(dt)
    ls[off] = np.log(4 * np.sin(dt[off] / 2) ** 2)
    R = _kress_R(n)

    M = 0.25j * sp.hankel1(0, kr) * a
    M1 = -(1 / (4 * np.pi)) * sp.jv(0, kr) * a
    np.fill_diagonal(M1, -a / (4 * np.pi))
    M2 = np.where(off, M - M1 * ls, 0)
    np.fill_diagonal(
        M2,
        (0.25j - np.euler_gamma / (2 * np.pi) - np.log(k * a / 2) / (2 * np.pi)) * a,
    )
    S = R * M1 + (2 * np.pi / n) * M2

    dn = (d * mesh.nu[None, :, :]).sum(axis=2)
    L = 0.25j * k * sp.hankel1(1, kr) * dn / r * a
    L1 = -(k / (4 * np.pi)) * sp.jv(1, kr) * dn / r * a
    np.fill_diagonal(L1, 0.0)
    L2 = np.where(off, L - L1 * ls, 0)
    np.fill_diagonal(L2, -1 / (4 * np.pi))
    D = R * L1 + (2 * np.pi / n) * L2
    return S, D


# ---------------- solution object ----------------
@dataclass
class ScatterSolution:
    mesh: Union[PolygonMesh, CircleMesh]
    incident: IncidentWave
    k: float
    formulation: str  # "direct" | "cfie-soft" | "mixed"
    density: np.ndarray          # trace u (direct), phi (cfie), mixed unknown
    gamma: float = 0.0
    spec: Optional[ImpedanceSpec] = None
    diagnostics: dict = field(default_factory=dict)

    # -- polygon representation weights per node ('moment' densities) --
    def _rep_densities(self):
        """(sigma_D, sigma_S): densities entering D and S in the representation."""
        if self.formulation == "cfie-soft":
            return self.density, -1j * self.gamma * self.density
        mesh = self.mesh
        if isinstance(mesh, CircleMesh):
            eta = self.diagnostics.get("eta_nodes")
            return self.density, eta * self.density
        sigma_D = np.where(mesh.dirichlet, 0.0, self.density)
        sigma_S = np.where(
            mesh.dirichlet, -self.density, mesh.eta * self.density
        )
        return sigma_D, sigma_S

    def eval_scattered(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        sigma_D, sigma_S = self._rep_densities()
        mesh = self.mesh
        out = np.zeros(len(pts), dtype=complex)
        if isinstance(mesh, CircleMesh):
            # upsampled trapezoid; spectrally accurate away from the boundary
            up = _circle_upsample(mesh, np.column_stack([sigma_D, sigma_S]), factor=8)
            xs, nus, ws, dens = up
            for i, p in enumerate(pts):
                d = p[None, :] - xs
                r = np.linalg.norm(d, axis=1)
                out[i] = np.sum(
                    kernel_D(self.k, d, r, None, nus) * dens[:, 0] * ws
                ) + np.sum(kernel_S(self.k, d, r) * dens[:, 1] * ws)
            return out if len(out) > 1 else complex(out[0])
        # per-panel near cut: 10-point Gauss is ~1e-10 accurate beyond twice
        # the panel length; overlapping targets get an adaptive correction
        cut = 2.0 * mesh.panel_L
        pd = np.linalg.norm(pts[:, None, :] - mesh.panel_mids[None, :, :], axis=2)
        near_pairs = np.argwhere(pd <= cut[None, :])
        wD = sigma_D * mesh.w
        wS = sigma_S * mesh.w
        chunk = max(1, int(2**22 // max(mesh.n, 1)))
        for lo in range(0, len(pts), chunk):
            sel = slice(lo, min(lo + chunk, len(pts)))
            d = pts[sel][:, None, :] - mesh.x[None, :, :]
            r = np.linalg.norm(d, axis=2)
            r = np.maximum(r, 1e-300)
            dn = np.einsum("pjc,jc->pj", d, mesh.nu)
            kd = 0.25j * self.k * sp.hankel1(1, self.k * r) * dn / r
            ks = 0.25j * sp.hankel1(0, self.k * r)
            out[sel] = kd @ wD + ks @ wS
        for i, pi in near_pairs:
            pan = mesh.panels[pi]
            p = pts[i]
            dd = p[None, :] - mesh.x[pan.idx]
            rr = np.maximum(np.linalg.norm(dd, axis=1), 1e-300)
            plain = np.sum(kernel_D(self.k, dd, rr, pan.nrm) * wD[pan.idx]) + np.sum(
                kernel_S(self.k, dd, rr) * wS[pan.idx]
            )
            refined = panel_rowblock(mesh, pan, p, "D", self.k) @ sigma_D[pan.idx]
            refined += panel_rowblock(mesh, pan, p, "S", self.k) @ sigma_S[pan.idx]
            out[i] += refined - plain
        return out if len(out) > 1 else complex(out[0])

    def eval_total_field(self, pts):
        """u = u_inc + u_s at exterior points.

        Near-boundary evaluation switches to adaptive subdivision quadrature;
        points inside an obstacle are rejected.
        """
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        scene = getattr(self.mesh, "scene", None)
        if scene is not None and scene.contains_points(pts).any():
            raise ValueError("evaluation point inside the obstacle")
        if isinstance(self.mesh, CircleMesh):
            rr = np.linalg.norm(pts - self.mesh.center[None, :], axis=1)
            if np.any(rr < self.mesh.radius - 1e-12):
                raise ValueError("evaluation point inside the obstacle")
        ui = np.atleast_1d(self.incident.eval(pts))
        us = np.atleast_1d(self.eval_scattered(pts))
        out = ui + us
        return out if len(out) > 1 else complex(out[0])

    def eval_total_gradient(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        sigma_D, sigma_S = self._rep_densities()
        mesh = self.mesh
        gi = self.incident.grad(pts).astype(complex)
        if isinstance(mesh, CircleMesh):
            xs, nus, ws, dens = _circle_upsample(
                mesh, np.column_stack([sigma_D, sigma_S]), factor=8
            )
            for i, p in enumerate(pts):
                d = p[None, :] - xs
                r = np.linalg.norm(d, axis=1)
                gD = (grad_kernel_D_multi(self.k, d, r, nus) * (dens[:, 0] * ws)[:, None]).sum(axis=0)
                gS = (grad_kernel_S(self.k, d, r) * (dens[:, 1] * ws)[:, None]).sum(axis=0)
                gi[i] += gD + gS
            return gi
        thr = mesh.near_eval_threshold
        for i, p in enumerate(pts):
            dists = np.linalg.norm(mesh.panel_mids - p[None, :], axis=1)
            for pi, pan in enumerate(mesh.panels):
                if dists[pi] > max(thr, 1.5 * pan.L):
                    dd = p[None, :] - mesh.x[pan.idx]
                    rr = np.linalg.norm(dd, axis=1)
                    gi[i] += (
                        grad_kernel_D(self.k, dd, rr, pan.nrm)
                        * (sigma_D[pan.idx] * mesh.w[pan.idx])[:, None]
                    ).sum(axis=0)
                    gi[i] += (
                        grad_kernel_S(self.k, dd, rr)
                        * (sigma_S[pan.idx] * mesh.w[pan.idx])[:, None]
                    ).sum(axis=0)
                else:
                    gi[i] += panel_rowblock_grad(mesh, pan, p, "D", self.k) @ sigma_D[pan.idx]
                    gi[i] += panel_rowblock_grad(mesh, pan, p, "S", self.k) @ sigma_S[pan.idx]
        return gi

    def boundary_trace(self):
        """Total-field trace at the mesh nodes (zero for pure sound-soft)."""
        if self.formulation == "cfie-soft":
            return np.zeros(self.mesh.n, dtype=complex)
        if isinstance(self.mesh, CircleMesh):
            return self.density.copy()
        tr = self.density.copy()
        tr[self.mesh.dirichlet] = 0.0
        return tr

    def boundary_trace_at(self, pts):
        """Interpolated total-field trace at points on the boundary.

        Locates the panel hosting each point and evaluates the Legendre
        interpolant of the nodal trace there.
        """
        if self.formulation == "cfie-soft":
            return np.zeros(len(np.atleast_2d(pts)), dtype=complex)
        mesh = self.mesh
        if isinstance(mesh, CircleMesh):
            raise NotImplementedError("interpolated circle trace not needed")
        tr = self.boundary_trace()
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.empty(len(pts), dtype=complex)
        for i, p in enumerate(pts):
            best, best_off, best_t = None, np.inf, 0.0
            for pan in mesh.panels:
                t = float((p - pan.a) @ pan.tang)
                if -1e-9 * pan.L <= t <= pan.L * (1 + 1e-9):
                    off = abs(float((p - pan.a) @ pan.nrm))
                    if off < best_off:
                        best, best_off, best_t = pan, off, t
            if best is None or best_off > 1e-6 * max(1.0, best.L):
                raise ValueError(f"point {p} does not lie on the boundary mesh")
            tloc = 2 * best_t / best.L - 1
            basis = np.polynomial.legendre.legvander(np.array([tloc]), mesh.ngl - 1) @ mesh.leg_vinv
            out[i] = complex((basis @ tr[best.idx])[0])
        return out


def grad_kernel_D_multi(k, d, r, nrm_rows):
    m = (d * nrm_rows).sum(axis=1)
    h1 = sp.hankel1(1, k * r)
    h1p = sp.hankel1(0, k * r) - h1 / (k * r)
    term1 = (0.25j * k * k * h1p * m / (r * r))[:, None] * d
    term2 = (0.25j * k * h1 / r)[:, None] * (nrm_rows - (m / (r * r))[:, None] * d)
    return term1 + term2


def _circle_upsample(mesh: CircleMesh, dens: np.ndarray, factor: int = 8):
    n2 = mesh.n * factor
    t2 = 2 * np.pi * np.arange(n2) / n2
    ring = np.column_stack([np.cos(t2), np.sin(t2)])
    xs = mesh.center[None, :] + mesh.radius * ring
    ws = np.full(n2, 2 * np.pi / n2 * mesh.radius)
    out = np.empty((n2, dens.shape[1]), dtype=complex)
    for j in range(dens.shape[1]):
        F = np.fft.fft(dens[:, j])
        Fp = np.zeros(n2, dtype=complex)
        h = mesh.n // 2
        Fp[:h] = F[:h]
        Fp[-h:] = F[-h:]
        out[:, j] = np.fft.ifft(Fp) * factor
    return xs, ring, ws, out


# ---------------- drivers ----------------
def _condition_guard(A: np.ndarray, label: str):
    if len(A) <= 2200:
        c = np.linalg.cond(A)
        if c > COND_LIMIT:
            raise IllConditionedError(
                f"{label} system condition number {c:.2e} exceeds {COND_LIMIT:.0e}; "
                "likely near an interior resonance - change the coupling parameter "
                "or perturb k"
            )
        return float(c)
    return float("nan")


def solve_exterior(
    scene: PolytopeScene,
    bc: ImpedanceSpec,
    inc: IncidentWave,
    panels_per_edge: int = 12,
    grading_q: float = 3.0,
    ngl: int = 10,
    gamma: Optional[float] = None,
) -> ScatterSolution:
    """Solve the exterior scattering problem on a 2D polygon scene."""
    if scene.dimension != 2:
        raise ValueError("solve_exterior handles 2D scenes")
    k = inc.k
    if k <= 0:
        raise ValueError("wavenumber must be positive")
    bc.validate()
    mesh = PolygonMesh(scene, bc, panels_per_edge=panels_per_edge,
                       grading_q=grading_q, ngl=ngl)
    if mesh.n == 0:
        # no obstacle: u = u_inc exactly
        sol = ScatterSolution(mesh, inc, k, "direct", np.zeros(0, dtype=complex), spec=bc)
        sol.diagnostics["condition"] = 1.0
        return sol
    S, D = assemble_layer_matrices(mesh, k)
    ui = np.atleast_1d(inc.eval(mesh.x))

    all_soft = bool(mesh.dirichlet.all())
    any_soft = bool(mesh.dirichlet.any())
    if all_soft:
        g = float(gamma) if gamma is not None else max(k, 1.0)
        A = 0.5 * np.eye(mesh.n) + D - 1j * g * S
        cond = _condition_guard(A, "combined-field sound-soft")
        phi = np.linalg.solve(A, -ui)
        sol = ScatterSolution(mesh, inc, k, "cfie-soft", phi, gamma=g, spec=bc)
    elif not any_soft:
        A = 0.5 * np.eye(mesh.n) - D - S * mesh.eta[None, :]
        cond = _condition_guard(A, "direct impedance")
        u = np.linalg.solve(A, ui)
        sol = ScatterSolution(mesh, inc, k, "direct", u, spec=bc)
    else:
        # mixed: unknown u on impedance nodes, psi on Dirichlet nodes
        ddir = mesh.dirichlet
        A = np.empty((mesh.n, mesh.n), dtype=complex)
        # columns: impedance nodes act through D + S eta; Dirichlet through -S
        A[:, ~ddir] = -D[:, ~ddir] - S[:, ~ddir] * mesh.eta[None, ~ddir]
        A[:, ddir] = S[:, ddir]
        A[np.ix_(~ddir, ~ddir)] += 0.5 * np.eye(int((~ddir).sum()))
        cond = _condition_guard(A, "mixed soft/impedance")
        u = np.linalg.solve(A, ui)
        sol = ScatterSolution(mesh, inc, k, "mixed", u, spec=bc)
    sol.diagnostics["condition"] = cond
    sol.diagnostics.update(_bc_residuals(sol))
    return sol


def solve_circle(
    center,
    radius: float,
    bc: ImpedanceSpec,
    inc: IncidentWave,
    n: int = 192,
    gamma: Optional[float] = None,
) -> ScatterSolution:
    """Validation-only smooth-curve mode on a circle boundary."""
    k = inc.k
    mesh = CircleMesh(np.asarray(center, dtype=float), float(radius), int(n), spec=bc)
    S, D = circle_layer_matrices(mesh, k)
    ui = np.atleast_1d(inc.eval(mesh.x))
    sub = bc.default
    if isinstance(sub, SoundSoft):
        g = float(gamma) if gamma is not None else max(k, 1.0)
        A = 0.5 * np.eye(mesh.n) + D - 1j * g * S
        cond = _condition_guard(A, "circle sound-soft")
        phi = np.linalg.solve(A, -ui)
        sol = ScatterSolution(mesh, inc, k, "cfie-soft", phi, gamma=g, spec=bc)
        sol.diagnostics["eta_nodes"] = np.zeros(mesh.n, dtype=complex)
    else:
        eta = np.asarray(sub.eta(mesh.t / (2 * np.pi)), dtype=complex)
        A = 0.5 * np.eye(mesh.n) - D - S * eta[None, :]
        cond = _condition_guard(A, "circle direct impedance")
        u = np.linalg.solve(A, ui)
        sol = ScatterSolution(mesh, inc, k, "direct", u, spec=bc)
        sol.diagnostics["eta_nodes"] = eta
    sol.diagnostics["condition"] = cond
    return sol


def circle_offnode_residual(sol: ScatterSolution, n_check: int = 32) -> float:
    """Equation residual at off-node circle points via shifted Kress rows."""
    mesh = sol.mesh
    if not isinstance(mesh, CircleMesh):
        raise ValueError("circle_offnode_residual needs a circle solution")
    k, a, n = sol.k, mesh.radius, mesh.n
    t = mesh.t
    tc = t[: n_check] + np.pi / n  # halfway between nodes
    xs = mesh.center[None, :] + a * np.column_stack([np.cos(tc), np.sin(tc)])
    # trig-interpolated density at the checkpoints
    F = np.fft.fft(sol.density)
    modes = np.fft.fftfreq(n, d=1.0 / n)
    dens_c = (F[None, :] * np.exp(1j * np.outer(tc, modes))).sum(axis=1) / n
    scale = float(np.max(np.abs(np.atleast_1d(sol.incident.eval(mesh.x)))))
    worst = 0.0
    for tci, xc, dc in zip(tc, xs, dens_c):
        dt = tci - t
        r = np.linalg.norm(xc[None, :] - mesh.x, axis=1)
        kr = k * r
        ls = np.log(4 * np.sin(dt / 2) ** 2)
        m = np.arange(1, n // 2)
        R = -(4 * np.pi / n) * (np.cos(np.outer(dt, m)) / m[None, :]).sum(axis=1) - (
            4 * np.pi / n**2
        ) * np.cos((n / 2) * dt)
        M1 = -(1 / (4 * np.pi)) * sp.jv(0, kr) * a
        M2 = 0.25j * sp.hankel1(0, kr) * a - M1 * ls
        Srow = R * M1 + (2 * np.pi / n) * M2
        d = xc[None, :] - mesh.x
        dn = (d * mesh.nu).sum(axis=1)
        L1 = -(k / (4 * np.pi)) * sp.jv(1, kr) * dn / r * a
        L2 = 0.25j * k * sp.hankel1(1, kr) * dn / r * a - L1 * ls
        Drow = R * L1 + (2 * np.pi / n) * L2
        ui = complex(np.atleast_1d(sol.incident.eval(xc[None, :]))[0])
        if sol.formulation == "cfie-soft":
            resid = abs(ui + 0.5 * dc + Drow @ sol.density - 1j * sol.gamma * (Srow @ sol.density))
        else:
            eta = sol.diagnostics["eta_nodes"]
            resid = abs(0.5 * dc - Drow @ sol.density - Srow @ (eta * sol.density) - ui)
        worst = max(worst, resid / scale)
    return worst


def _bc_residuals(sol: ScatterSolution) -> dict:
    """Equation residual at off-node boundary points (panel centers).

    For the soft formulation this is literally |u| on the boundary; for the
    direct formulations it is the trace-equation residual, which encodes the
    impedance condition. Reported separately for corner-adjacent panels.
    """
    mesh = sol.mesh
    if isinstance(mesh, CircleMesh):
        return {}
    k = sol.k
    smooth, corner = 0.0, 0.0
    scale = float(np.max(np.abs(np.atleast_1d(sol.incident.eval(mesh.x)))))
    n_edges = {}
    for pan in mesh.panels:
        key = (pan.component, pan.edge)
        n_edges.setdefault(key, []).append(pan)
    for key, pans in n_edges.items():
        for pos, pan in enumerate(pans):
            target = pan.points(np.zeros(1))[0]
            ui = complex(np.atleast_1d(sol.incident.eval(target[None, :]))[0])
            sD = np.zeros(mesh.n, dtype=complex)
            sS = np.zeros(mesh.n, dtype=complex)
            for p2 in mesh.panels:
                dmid = np.linalg.norm((p2.a + p2.b) / 2 - target)
                if dmid > 1.5 * max(p2.L, pan.L):
                    dd = target[None, :] - mesh.x[p2.idx]
                    rr = np.linalg.norm(dd, axis=1)
                    sD[p2.idx] = kernel_D(k, dd, rr, p2.nrm) * mesh.w[p2.idx]
                    sS[p2.idx] = kernel_S(k, dd, rr) * mesh.w[p2.idx]
                else:
                    sD[p2.idx] = panel_rowblock(mesh, p2, target, "D", k)
                    sS[p2.idx] = panel_rowblock(mesh, p2, target, "S", k)
            basis_mid = np.polynomial.legendre.legvander(np.zeros(1), mesh.ngl - 1) @ mesh.leg_vinv
            dens_mid = complex((basis_mid @ sol.density[pan.idx])[0])
            if sol.formulation == "cfie-soft":
                resid = abs(ui + 0.5 * dens_mid + sD @ sol.density
                            - 1j * sol.gamma * (sS @ sol.density))
            else:
                sigma_D, sigma_S = sol._rep_densities()
                if pan.bc.is_dirichlet:
                    resid = abs(ui + sD @ sigma_D + sS @ sigma_S)
                else:
                    resid = abs(0.5 * dens_mid - sD @ sigma_D - sS @ sigma_S - ui)
            is_corner = pos in (0, len(pans) - 1)
            if is_corner:
                corner = max(corner, resid / scale)
            else:
                smooth = max(smooth, resid / scale)
    return {"bc_residual_smooth": smooth, "bc_residual_corner": corner}
