"""3D test-domain extraction at a non-vanishing anchor point.

The wedge P_h of geometry.frames has flat faces S1 (in the anchored plane,
opening phi0), S2 and S3 (meridian quarter planes), outward normals
nu1 = -e3, nu2 = -e2, nu3 = (-sin phi0, cos phi0, 0). With the local
expansion u' = u'(0) + u'_1 + ..., u'(0) = 2 sqrt(pi) a_0^0 and the combined
swept-plane functional

    F(tau) = int_{S1~} eta u'(0) u0
           + int_{S1~ u S2~ u S3~} u'_1 dnu u0
           - int_{S2~ u S3~} dnu u'_1 u0

admits F(tau) = C_A / tau^2 + O(tau^{-3}); the entire tau-drift of
tau^2 F(tau) enters through vartheta(tau), so freezing vartheta = 1 gives
the exact limit coefficient. The radial integrals are the closed-form
Laplace transforms; the angular integrals are 64-point Gauss quadratures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..cgo import CgoParams, coeff_functions_3d, make_cgo
from ..localexp import LocalExpansion, vanishing_order

__all__ = [
    "UnsupportedRegimeError",
    "f0_3d",
    "f_combined_3d",
    "f_combined_3d_angles",
    "extract_leading_3d",
    "leading_combination_3d",
    "LeadingFit",
]


class UnsupportedRegimeError(RuntimeError):
    """3D extraction requires vanishing order zero at the anchor."""


def f0_3d(a00: complex, angles, phi0: float, vartheta: float) -> complex:
    """Constant-term functional: tau * int u'(0) dnu u0 over the swept planes.

    Closed form 2 sqrt(pi) a00 sin(phi0) (A^2+B^2+C^2)/(A C D); the numerator
    equals 1 - vartheta^2 = -k^2/tau^2 exactly, which is why this term alone
    is degenerate at order tau^-2.
    """
    psi1, psi2 = angles
    f = coeff_functions_3d(psi1, psi2, phi0, vartheta)
    A, B, C, D = f["A"], f["B"], f["C"], f["D"]
    return complex(
        2 * np.sqrt(np.pi) * a00 * np.sin(phi0) * (A * A + B * B + C * C) / (A * C * D)
    )


def _u1_face_coeffs(exp_or_coeffs, k: float):
    """(c10, beta_minus, beta_plus): u'_1 = c10 x3 + bm (x1 - i x2) + bp (x1 + i x2)."""
    if isinstance(exp_or_coeffs, LocalExpansion):
        a10 = exp_or_coeffs.coeff_3d(1, 0)
        a11 = exp_or_coeffs.coeff_3d(1, 1)
        a1m = exp_or_coeffs.coeff_3d(1, -1)
    else:
        a10, a11, a1m = exp_or_coeffs
    c10 = 2 * np.sqrt(3 * np.pi) * 1j * k / 3 * a10
    bp = -(4 * np.pi * 1j * k / 3) * np.sqrt(3 / (8 * np.pi)) * a11
    bm = (4 * np.pi * 1j * k / 3) * np.sqrt(3 / (8 * np.pi)) * a1m
    return c10, bm, bp


def f_combined_3d_angles(
    a00: complex,
    a1_coeffs,
    eta0: complex,
    k: float,
    angles,
    phi0: float,
    vartheta: float,
    n_gauss: int = 64,
) -> complex:
    """tau^2 * F(tau) as a function of vartheta alone (exact in tau).

    Radial ray integrals are closed forms; the remaining 1D angular
    integrals use n_gauss-point Gauss-Legendre.
    """
    psi1, psi2 = angles
    f = coeff_functions_3d(psi1, psi2, phi0, vartheta)
    A, B, Z = f["A"], f["B"], f["Z"]
    Q1, Q2, Q3 = f["Q1"], f["Q2"], f["Q3"]
    c10, bm, bp = _u1_face_coeffs(a1_coeffs, k)

    xg, wg = leggauss(n_gauss)

    def gauss(fun, lo, hi):
        mid, half = (lo + hi) / 2, (hi - lo) / 2
        return half * np.sum(wg * fun(mid + half * xg))

    half_pi = np.pi / 2
    # u'_1 restrictions r*f_j on the swept planes
    f1 = lambda ph: bm * np.exp(-1j * ph) + bp * np.exp(1j * ph)
    f2 = lambda th: c10 * np.cos(th) + (bm + bp) * np.sin(th)
    f3 = lambda th: c10 * np.cos(th) + (
        bm * np.exp(-1j * phi0) + bp * np.exp(1j * phi0)
    ) * np.sin(th)
    # constant normal derivatives of u'_1 on S2~, S3~
    f4 = 1j * (bm - bp)
    f5 = 1j * (bp * np.exp(1j * phi0) - bm * np.exp(-1j * phi0))

    val = eta0 * 2 * np.sqrt(np.pi) * a00 * gauss(lambda ph: 1.0 / Q1(ph) ** 2, 0, phi0)
    val += 2 * A * gauss(lambda ph: f1(ph) / Q1(ph) ** 3, 0, phi0)
    val += 2 * B * gauss(lambda th: f2(th) / Q2(th) ** 3, 0, half_pi)
    val += 2 * Z * gauss(lambda th: f3(th) / Q3(th) ** 3, 0, half_pi)
    val -= f4 * gauss(lambda th: 1.0 / Q2(th) ** 2, 0, half_pi)
    val -= f5 * gauss(lambda th: 1.0 / Q3(th) ** 2, 0, half_pi)
    return complex(val)


def f_combined_3d(
    exp: LocalExpansion,
    eta0: complex,
    frame,
    p: CgoParams,
    n_gauss: int = 64,
) -> complex:
    """F(tau) for a recovered local expansion at a non-vanishing anchor."""
    if vanishing_order(exp) != 0:
        raise UnsupportedRegimeError(
            "3D extraction is presented for u'(anchor) != 0 (vanishing order 0)"
        )
    a00 = exp.coeff_3d(0, 0)
    a1 = (exp.coeff_3d(1, 0), exp.coeff_3d(1, 1), exp.coeff_3d(1, -1))
    phi0 = float(frame.phi0)
    psi1, psi2 = p.angles
    return (
        f_combined_3d_angles(
            a00, a1, eta0, exp.k, (psi1, psi2), phi0, p.vartheta, n_gauss
        )
        / p.tau**2
    )


@dataclass
class LeadingFit:
    C_A: complex
    c1: complex
    residual: float
    noise_floor: float
    trusted: bool
    tau_grid: np.ndarray


def extract_leading_3d(
    F: Callable[[float], complex],
    tau_grid: Sequence[float],
    residual_threshold: float = 1e-4,
) -> LeadingFit:
    """Fit F(tau) tau^2 ~ c0 + c1/tau by weighted least squares; C_A = c0.

    Weights grow linearly with tau so the asymptotic regime dominates. The
    fit-noise floor is the weighted RMS residual; a leading coefficient
    below that floor is not distinguishable from zero.
    """
    tau = np.asarray(tau_grid, dtype=float)
    if len(tau) < 3:
        raise ValueError("tau grid needs at least 3 points")
    if tau.max() / tau.min() < 10 - 1e-9:
        raise ValueError("tau grid must span at least one decade")
    y = np.array([complex(F(t)) * t**2 for t in tau])
    w = tau / tau.max()
    Am = np.column_stack([np.ones_like(tau), 1.0 / tau]) * w[:, None]
    rhs = y * w
    coef, *_ = np.linalg.lstsq(Am, rhs, rcond=None)
    fit = Am @ coef
    resid = float(np.sqrt(np.mean(np.abs(rhs - fit) ** 2)))
    scale = float(np.max(np.abs(y))) if np.max(np.abs(y)) > 0 else 1.0
    return LeadingFit(
        C_A=complex(coef[0]),
        c1=complex(coef[1]),
        residual=resid,
        noise_floor=resid,
        trusted=resid <= residual_threshold * max(scale, abs(complex(coef[0]))),
        tau_grid=tau,
    )


def leading_combination_3d(a00, a10, a1p, a1m, eta0, k: float) -> float:
    """First-stage 3D non-degeneracy quantity:
    |a_1^0 + sqrt(3) i eta0 / k * a_0^0| + |a_1^1| + |a_1^-1|."""
    return float(
        abs(a10 + np.sqrt(3) * 1j * eta0 / k * a00) + abs(a1p) + abs(a1m)
    )
