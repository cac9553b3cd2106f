"""Quantitative propagation of smallness.

Moduli: the far-field-to-near-field map eps -> C_f exp(-(-log eps)^{1/2})
and the boundary modulus T(eps) = C_w (log|log(1/eps)|)^{-alpha}; both
strictly decreasing on their domains. Three-sphere checks measure a
multiplicative-interpolation witness exponent beta on concentric ball
triples (r/4, r/2, r), and chain_propagation iterates that step along an
obstacle-free tube to bound the end norm from the start norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

__all__ = [
    "SmallnessBudget",
    "near_field_modulus",
    "boundary_modulus",
    "default_chain_radius",
    "three_sphere_check",
    "chain_propagation",
    "boundary_error_measure",
]


def near_field_modulus(eps: float, C_f: float = 1.0) -> float:
    """eps1 = C_f exp(-sqrt(-log eps)) for 0 < eps < e^{-1}."""
    if not 0 < eps < np.exp(-1.0):
        raise ValueError("near_field_modulus needs 0 < eps < e^{-1}")
    return float(C_f * np.exp(-np.sqrt(-np.log(eps))))


def boundary_modulus(eps: float, alpha: float = 0.5, C_w: float = 1.0) -> float:
    """T(eps) = C_w (log|log(1/eps)|)^{-alpha}, for eps < e^{-e} so the
    double logarithm exceeds 1 and T decreases to 0 with eps."""
    if not 0 < eps < np.exp(-np.e):
        raise ValueError("boundary_modulus needs 0 < eps < e^{-e}")
    return float(C_w * np.log(np.abs(np.log(1.0 / eps))) ** (-alpha))


def default_chain_radius(
    d_gamma: float, beta: float, eps1: float, alpha: float = 0.5,
    h: Optional[float] = None, zeta: Optional[float] = None,
) -> float:
    """Default link radius d_gamma |log beta| / ((1-alpha) log|log eps1|),
    clamped to min(h/4, zeta) when those are given."""
    r = d_gamma * abs(np.log(beta)) / ((1 - alpha) * np.log(abs(np.log(eps1))))
    caps = [v for v in (None if h is None else h / 4, zeta) if v is not None]
    return float(min([r, *caps])) if caps else float(r)


@dataclass
class SmallnessBudget:
    eps: float
    C_f: float = 1.0
    C_w: float = 1.0
    alpha: float = 0.5
    beta: Optional[float] = None       # measured when None
    E_bound: Optional[float] = None    # uniform field bound, measured when None
    chain_centers: Optional[np.ndarray] = None
    r: Optional[float] = None
    n_links: int = 0
    provenance: dict = field(default_factory=dict)

    @property
    def eps1(self) -> float:
        return near_field_modulus(self.eps, self.C_f)

    @property
    def T(self) -> float:
        return boundary_modulus(self.eps, self.alpha, self.C_w)

    def as_dict(self) -> dict:
        prov = {"C_f": "config", "C_w": "config", "alpha": "config",
                "beta": "measured" if self.beta is None else "config",
                "E_bound": "measured" if self.E_bound is None else "config"}
        prov.update(self.provenance)
        return {
            "eps": self.eps,
            "eps1": self.eps1,
            "T": self.T,
            "C_f": self.C_f,
            "C_w": self.C_w,
            "alpha": self.alpha,
            "beta": self.beta,
            "E_bound": self.E_bound,
            "r": self.r,
            "n_links": self.n_links,
            "provenance": prov,
        }


def _ball_samples(center, radius, n, dim, rng):
    u = rng.random(n)
    if dim == 2:
        rr = radius * np.sqrt(u)
        th = 2 * np.pi * rng.random(n)
        return center[None, :] + np.column_stack([rr * np.cos(th), rr * np.sin(th)])
    rr = radius * u ** (1 / 3)
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return center[None, :] + rr[:, None] * v


def _sup_on_ball(field: Callable, center, radius, n_samples, rng) -> float:
    pts = _ball_samples(np.asarray(center, dtype=float), radius, n_samples,
                        len(np.atleast_1d(center)), rng)
    return float(np.max(np.abs(np.asarray(field(pts), dtype=complex))))


@dataclass
class ThreeSphereResult:
    beta_witness: float
    M1: float
    M2: float
    M3: float
    C_used: float
    ok: bool


def three_sphere_check(
    field: Callable,
    center,
    r1: float,
    r2: float,
    r3: float,
    C: float = 10.0,
    n_samples: int = 2048,
    seed: int = 0,
) -> ThreeSphereResult:
    """Largest beta in (0,1) with M2 <= C M3^{1-beta} M1^beta on sampled
    sup norms M_i over the three concentric balls.

    Flags the unique-continuation-violating configuration M1 = 0 < M2.
    """
    if not 0 < r1 < r2 < r3:
        raise ValueError("need r1 < r2 < r3")
    rng = np.random.default_rng(seed)
    center = np.asarray(center, dtype=float)
    dim = len(np.atleast_1d(center))
    pts = np.vstack(
        [_ball_samples(center, rr, n_samples, dim, rng) for rr in (r1, r2, r3)]
    )
    vals = np.abs(np.asarray(field(pts), dtype=complex))
    M1 = float(np.max(vals[:n_samples]))
    M2 = float(np.max(vals[n_samples : 2 * n_samples]))
    M3 = max(float(np.max(vals[2 * n_samples :])), M2, M1)
    if M1 == 0.0 and M2 > 0:
        raise ValueError(
            "M1 = 0 with M2 > 0 violates unique continuation; "
            "field/sampling inconsistency"
        )
    if M2 <= 0:
        return ThreeSphereResult(1.0 - 1e-12, M1, M2, M3, C, True)
    ratio = M1 / M3
    if ratio >= 1.0 - 1e-12:
        beta = 1.0 - 1e-12
        ok = M2 <= C * M3
        return ThreeSphereResult(beta, M1, M2, M3, C, ok)
    val = np.log(M2 / (C * M3)) / np.log(ratio)
    beta = float(min(max(val, 0.0), 1.0 - 1e-12))
    ok = 0.0 < beta < 1.0 and M2 <= C * M3 ** (1 - beta) * M1**beta * (1 + 1e-9)
    return ThreeSphereResult(beta, M1, M2, M3, C, ok)


@dataclass
class ChainResult:
    end_bound: float
    measured_end: float
    n_links: int
    betas: List[float]
    centers: np.ndarray
    dominates: bool


def chain_propagation(
    field: Callable,
    path: np.ndarray,
    r: float,
    start_bound: float,
    C: float = 10.0,
    E_bound: Optional[float] = None,
    n_samples: int = 1024,
    seed: int = 0,
) -> ChainResult:
    """Iterate the measured three-sphere step along the polyline.

    Ball centers are spaced at most r/4 apart (r1 = r/4, r2 = r/2, r3 = r),
    so each r1-ball sits inside the previous r2-ball. The propagated bound
    applies M_{next} <= C E^{1-beta} M_prev^beta per link with per-link
    measured beta; it must dominate the measured end norm.
    """
    path = np.asarray(path, dtype=float)
    seglens = np.linalg.norm(np.diff(path, axis=0), axis=1)
    total = float(seglens.sum())
    step = r / 4.0
    n_links = int(np.ceil(total / step))
    ss = np.linspace(0.0, total, n_links + 1)
    cum = np.concatenate([[0.0], np.cumsum(seglens)])
    centers = np.empty((len(ss), path.shape[1]))
    for i, s in enumerate(ss):
        j = int(np.searchsorted(cum, s, side="right") - 1)
        j = min(j, len(seglens) - 1)
        t = (s - cum[j]) / seglens[j] if seglens[j] > 0 else 0.0
        centers[i] = path[j] + t * (path[j + 1] - path[j])

    rng = np.random.default_rng(seed)
    measured_prev = _sup_on_ball(field, centers[0], r / 4, n_samples, rng)
    if measured_prev > start_bound * (1 + 1e-9):
        raise ValueError("start_bound must dominate the measured start norm")
    link_results = [
        three_sphere_check(field, c, r / 4, r / 2, r, C=C, n_samples=n_samples, seed=seed)
        for c in centers[:-1]
    ]
    if E_bound is None:
        E_bound = max(res.M3 for res in link_results)
    bound = float(start_bound)
    betas = []
    for res in link_results:
        beta = res.beta_witness
        betas.append(beta)
        if res.M3 > E_bound * (1 + 1e-9):
            raise ValueError("a link's outer norm exceeds the uniform bound")
        # monotone in the previous bound, so propagating bounds stays valid
        bound = float(C * E_bound ** (1 - beta) * bound**beta)
    measured_end = _sup_on_ball(field, centers[-1], r / 4, n_samples, rng)
    return ChainResult(
        end_bound=bound,
        measured_end=measured_end,
        n_links=len(centers) - 1,
        betas=betas,
        centers=centers,
        dominates=measured_end <= bound * (1 + 1e-9),
    )


def boundary_error_measure(
    u_sol,
    uprime_sol,
    frame,
    n_samples: int = 128,
    step_frac: float = 1e-4,
    offset_frac: float = 0.02,
) -> dict:
    """sup |w| and sup |grad w| along the flat anchor I1, w = u - u'.

    Samples the world-frame anchor segment. The gradient uses central
    differences with step step_frac * h at stencil points offset by
    offset_frac * h along the outward normal: the offset keeps the stencil
    on the exterior side and above the layer-evaluation noise floor, so the
    small differencing step does not amplify evaluation noise.
    """
    h = float(frame.h)
    ts = (np.arange(n_samples) + 0.5) / n_samples
    pts_local = frame.I1(ts)
    pts = frame.to_world(pts_local)
    # outward (exterior-of-obstacle) side: local -e2 maps to world
    nrm_world = frame.to_world(np.array([[0.0, -1.0]])) - frame.to_world(
        np.array([[0.0, 0.0]])
    )
    nrm_world = nrm_world[0] / np.linalg.norm(nrm_world[0])
    step = max(step_frac, offset_frac / 4) * h
    base = pts + offset_frac * h * nrm_world[None, :]

    def w_at(q):
        return np.asarray(u_sol.eval_total_field(q), dtype=complex) - np.asarray(
            uprime_sol.eval_total_field(q), dtype=complex
        )

    wvals = w_at(base)
    gx = (w_at(base + step * np.array([1.0, 0.0])) - w_at(base - step * np.array([1.0, 0.0]))) / (2 * step)
    gy = (w_at(base + step * np.array([0.0, 1.0])) - w_at(base - step * np.array([0.0, 1.0]))) / (2 * step)
    return {
        "sup_w": float(np.max(np.abs(wvals))),
        "sup_grad_w": float(np.max(np.hypot(np.abs(gx), np.abs(gy)))),
        "n_samples": n_samples,
        "offset": 2 * step,
    }
