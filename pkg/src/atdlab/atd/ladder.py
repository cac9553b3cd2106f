"""Recursive degeneracy ladder and hyperplane-relation witnesses.

The planar ladder evaluates, order by order, the obstruction quantities
whose simultaneous vanishing characterizes an exterior hyperplane relation
for the expanded field. With the expansion convention of localexp
(two-sided coefficients, a_0 = b_0 = c_0/2) and the line normal pointing to
positive x2:

  Dirichlet (u = 0):        stage s = a_{N+s-1} + b_{N+s-1}
  Neumann  (d_nu u = 0):    stage s = a_{N+s-1} - b_{N+s-1}
  Robin  (d_nu u + eta u):  stage 1 = a_N - b_N and for s >= 2 the raw
        recursion condition at order m = N+s-2,
        R_m = eta (a_m + b_m) + (k/2) [(a_{m-1} - b_{m-1}) - (a_{m+1} - b_{m+1})]
        (coefficients of order -1 read as zero), reported as 2*R_m so stage 2
        is 2 eta (a_N + b_N) - k (a_{N+1} - b_{N+1}).

Stages are evaluated sequentially and the probe stops at the first value
above tolerance; an all-vanishing ladder marks a hyperplane candidate.
Stages beyond 2 evaluate the same recursion at higher orders and are flagged
as extrapolated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from ..localexp import LocalExpansion, vanishing_order

__all__ = [
    "LadderResult",
    "ladder_stage_value",
    "degeneracy_probe",
    "hyperplane_witness",
]


@dataclass
class LadderResult:
    regime: str
    N: int
    stages: List[complex]
    magnitudes: List[float]
    scale: float
    tol: float
    decided_stage: Optional[int]  # 1-based stage whose value broke the ladder
    verdict: str  # "nondegenerate" | "hyperplane-candidate" | "inconclusive"
    extrapolated_from_stage: int = 3

    def as_dict(self) -> dict:
        return {
            "regime": self.regime,
            "N": self.N,
            "stages": [[v.real, v.imag] for v in self.stages],
            "magnitudes": self.magnitudes,
            "scale": self.scale,
            "tol": self.tol,
            "decided_stage": self.decided_stage,
            "verdict": self.verdict,
            "extrapolated_from_stage": self.extrapolated_from_stage,
        }


def _ab(exp: LocalExpansion, n: int):
    if n < 0:
        return 0.0 + 0.0j, 0.0 + 0.0j
    if n > exp.n_max:
        raise IndexError(f"ladder needs order {n} but expansion stops at {exp.n_max}")
    return complex(exp.a[n]), complex(exp.b[n])


def ladder_stage_value(
    exp: LocalExpansion, regime: str, eta0: complex, N: int, stage: int
) -> complex:
    """Value of one obstruction stage (1-based) at anchor order N."""
    k = exp.k
    if regime == "dirichlet":
        a, b = _ab(exp, N + stage - 1)
        return a + b
    if regime == "neumann":
        a, b = _ab(exp, N + stage - 1)
        return a - b
    if regime == "robin":
        if stage == 1:
            a, b = _ab(exp, N)
            return a - b
        m = N + stage - 2
        am, bm = _ab(exp, m)
        am1, bm1 = _ab(exp, m - 1)
        ap1, bp1 = _ab(exp, m + 1)
        return 2 * eta0 * (am + bm) + k * ((am1 - bm1) - (ap1 - bp1))
    raise ValueError(f"unknown regime {regime!r}")


def degeneracy_probe(
    exp: LocalExpansion,
    eta0: complex,
    regime: str,
    max_stage: int = 6,
    tol: float = 1e-8,
) -> LadderResult:
    """Evaluate obstruction stages in order; stop at the first non-vanishing.

    Verdicts: "nondegenerate" when some stage exceeds tol*scale,
    "hyperplane-candidate" when every evaluable stage vanishes, and
    "inconclusive" when max_stage cannot be decided within the truncation
    order of the expansion.
    """
    regime = regime.lower()
    if regime in ("soft", "sound-soft"):
        regime = "dirichlet"
    if regime in ("hard", "sound-hard"):
        regime = "neumann"
    N = vanishing_order(exp, tol=tol)
    scale = exp.max_magnitude() * (1.0 + exp.k + 2 * abs(eta0))
    stages, mags = [], []
    decided = None
    hit_truncation = False
    for s in range(1, max_stage + 1):
        try:
            v = ladder_stage_value(exp, regime, eta0, N, s)
        except IndexError:
            hit_truncation = True
            break
        stages.append(v)
        mags.append(abs(v))
        if abs(v) > tol * scale:
            decided = s
            break
    if decided is not None:
        verdict = "nondegenerate"
    elif hit_truncation and len(stages) < max_stage:
        verdict = "inconclusive"
    else:
        verdict = "hyperplane-candidate"
    return LadderResult(
        regime=regime,
        N=N,
        stages=stages,
        magnitudes=mags,
        scale=float(scale),
        tol=tol,
        decided_stage=decided,
        verdict=verdict,
    )


@dataclass
class SubspaceLine:
    """Affine line (2D) or plane (3D): a point plus direction(s).

    The witness normal is the direction rotated by +90 degrees in 2D
    ((1,0) -> (0,1)), or the given plane normal in 3D.
    """

    point: np.ndarray
    direction: np.ndarray  # line direction (2D) or plane normal (3D)
    dimension: int = 2

    def normal(self) -> np.ndarray:
        if self.dimension == 2:
            d = self.direction / np.linalg.norm(self.direction)
            return np.array([-d[1], d[0]])
        return self.direction / np.linalg.norm(self.direction)

    def sample(self, n: int, half_width: float) -> np.ndarray:
        if self.dimension == 2:
            d = self.direction / np.linalg.norm(self.direction)
            ts = np.linspace(-half_width, half_width, n)
            return self.point[None, :] + ts[:, None] * d[None, :]
        nrm = self.normal()
        seed = np.array([1.0, 0.0, 0.0])
        if abs(seed @ nrm) > 0.9:
            seed = np.array([0.0, 1.0, 0.0])
        u = seed - (seed @ nrm) * nrm
        u /= np.linalg.norm(u)
        v = np.cross(nrm, u)
        m = max(2, int(np.sqrt(n)))
        ts = np.linspace(-half_width, half_width, m)
        U, V = np.meshgrid(ts, ts, indexing="ij")
        return (
            self.point[None, :]
            + U.ravel()[:, None] * u[None, :]
            + V.ravel()[:, None] * v[None, :]
        )


def hyperplane_witness(
    field,
    subspace: SubspaceLine,
    regime: str,
    eta: complex = 0.0,
    samples: int = 64,
    half_width: float = 1.0,
    fd_step: float = 1e-4,
    grad: Optional[Callable] = None,
    threshold: float = 1e-8,
) -> dict:
    """Residual of the hyperplane relation on the subspace.

    Dirichlet: u = 0; Neumann: d_nu u = 0; Robin: d_nu u + eta u = 0, with
    the subspace normal of SubspaceLine. The normal derivative comes from an
    analytic gradient when supplied, otherwise central differences with step
    fd_step * half_width. The residual is normalized by max(|u|, |d_nu u|)
    over the samples.
    """
    regime = regime.lower()
    pts = subspace.sample(samples, half_width)
    nrm = subspace.normal()
    u = np.asarray(field(pts), dtype=complex)
    if grad is not None:
        dn = np.asarray(grad(pts), dtype=complex) @ nrm
    else:
        h = fd_step * half_width
        dn = (
            np.asarray(field(pts + h * nrm[None, :]), dtype=complex)
            - np.asarray(field(pts - h * nrm[None, :]), dtype=complex)
        ) / (2 * h)
    if regime in ("dirichlet", "soft", "sound-soft"):
        resid_raw = np.abs(u)
    elif regime in ("neumann", "hard", "sound-hard"):
        resid_raw = np.abs(dn)
    elif regime == "robin":
        resid_raw = np.abs(dn + eta * u)
    else:
        raise ValueError(f"unknown regime {regime!r}")
    scale = max(float(np.max(np.abs(u))), float(np.max(np.abs(dn))), 1e-300)
    residual = float(np.max(resid_raw) / scale)
    return {
        "residual": residual,
        "verdict": "hyperplane" if residual < threshold else "not-hyperplane",
        "scale": scale,
        "regime": regime,
    }
