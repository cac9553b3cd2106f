"""Tau schedules balancing the boundary-error and remainder terms, and the
far-field-to-geometry relation check."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "tau_schedule",
    "tau_admissible",
    "RelationVerdict",
    "relation_check",
    "fit_kappa",
]


def tau_admissible(tau: float, k: float, tau1: float = 0.0) -> bool:
    """Downstream admissibility gate for a scheduled tau: tau >= max(1, k, tau1)."""
    return tau >= max(1.0, k, tau1)


def tau_schedule(T_eps: float, h: float, N: int, dimension: int) -> float:
    """Balancing tau: T^{-1/(N+1)} h^{-(N+3)/(N+1)} in 2D, T^{-1/3} h^{-5/3}
    in 3D. Admissibility (tau >= max(1, k, tau1)) is checked downstream."""
    if not 0 < T_eps < 1:
        raise ValueError("T_eps must lie in (0,1)")
    if not 0 < h < 1:
        raise ValueError("h must lie in (0,1)")
    if dimension == 2:
        return float(T_eps ** (-1.0 / (N + 1)) * h ** (-(N + 3.0) / (N + 1)))
    if dimension == 3:
        return float(T_eps ** (-1.0 / 3.0) * h ** (-5.0 / 3.0))
    raise ValueError("dimension must be 2 or 3")


@dataclass
class RelationVerdict:
    lhs: float
    rhs_shape: float
    ratio: float
    p: float          # exponent as derived (negative at N=0 in 2D)
    p_plot: float     # max(p, 1), used for monotone plotting only
    kappa0: float
    N: int
    dimension: int
    satisfied_with_C: float

    def as_dict(self) -> dict:
        return self.__dict__.copy()


def relation_check(
    C_A: float,
    d_H: float,
    eps: float,
    dimension: int,
    N: int,
    alpha: float = 0.5,
    eps_m: float = 1e-2,
) -> RelationVerdict:
    """Evaluate lhs = |C_A| d_H^p against the modulus shape
    (log|log(1/eps)|)^{-kappa0}.

    2D: p = (N^2 + 2N - 1)/(N + 1), which is -1 at N = 0; that raw value is
    reported verbatim and p_plot = max(p, 1) is used for monotone plots.
    3D: p = 4/3 and kappa0 = alpha/3.
    """
    if eps >= np.exp(-1.0):
        raise ValueError("relation needs eps < e^{-1} (double log degenerates)")
    if eps > eps_m:
        raise ValueError(f"eps={eps} exceeds the configured eps_m={eps_m}")
    if d_H < 0 or C_A < 0:
        raise ValueError("C_A and d_H must be nonnegative")
    if dimension == 2:
        p = (N**2 + 2 * N - 1) / (N + 1)
        kappa0 = alpha / (N + 1)
    elif dimension == 3:
        p = 4.0 / 3.0
        kappa0 = alpha / 3.0
    else:
        raise ValueError("dimension must be 2 or 3")
    p_plot = max(p, 1.0)
    lhs = C_A * d_H**p_plot if d_H > 0 else 0.0
    rhs = float(np.log(np.abs(np.log(1.0 / eps)))) ** (-kappa0)
    return RelationVerdict(
        lhs=float(lhs),
        rhs_shape=float(rhs),
        ratio=float(lhs / rhs) if rhs > 0 else np.inf,
        p=float(p),
        p_plot=float(p_plot),
        kappa0=float(kappa0),
        N=int(N),
        dimension=dimension,
        satisfied_with_C=float(lhs / rhs) if rhs > 0 else np.inf,
    )


def fit_kappa(d_H_values, eps_values):
    """Fit d_H ~ C (log|log(1/eps)|)^{-kappa} by least squares in
    log-log-log coordinates; returns (C, kappa)."""
    d = np.asarray(d_H_values, dtype=float)
    e = np.asarray(eps_values, dtype=float)
    x = np.log(np.log(np.abs(np.log(1.0 / e))))
    y = np.log(d)
    A = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(np.exp(coef[0])), float(-coef[1])
