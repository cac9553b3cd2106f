"""Special functions used by every field evaluation in the package.

Thin validated wrappers around scipy.special with the conventions fixed
once here: cylindrical J_n / H_n^(1), spherical j_l, orthonormal complex
spherical harmonics with Condon-Shortley phase, and the Gamma function.
Orders above 64 are out of scope and rejected.
"""

from __future__ import annotations

import numpy as np
import scipy.special as _sp

MAX_ORDER = 64


class ComplexValue(complex):
    """Complex scalar with named accessors used in reports."""

    @property
    def re(self) -> float:
        return self.real

    @property
    def im(self) -> float:
        return self.imag

    @property
    def magnitude(self) -> float:
        return abs(self)

    @property
    def phase(self) -> float:
        return float(np.angle(self))


def _check_order(n: int) -> int:
    n = int(n)
    if n < 0:
        raise ValueError(f"order must be nonnegative, got {n}")
    if n > MAX_ORDER:
        raise ValueError(f"order {n} exceeds supported maximum {MAX_ORDER}")
    return n


def bessel_j(order: int, arg):
    """Cylindrical Bessel function of the first kind J_order(arg), arg >= 0."""
    order = _check_order(order)
    arg = np.asarray(arg, dtype=float)
    if np.any(arg < 0):
        raise ValueError("bessel_j requires arg >= 0")
    out = _sp.jv(order, arg)
    return float(out) if out.ndim == 0 else out


def bessel_j_deriv(order: int, arg):
    """dJ_order/dz, same domain as bessel_j."""
    order = _check_order(order)
    arg = np.asarray(arg, dtype=float)
    out = _sp.jvp(order, arg)
    return float(out) if out.ndim == 0 else out


def _bessel_y(order: int, arg):
    # internal: needed only through hankel1
    return _sp.yv(order, arg)


def hankel1(order: int, arg):
    """Hankel function of the first kind H^(1)_order(arg), arg > 0.

    Diverges at arg = 0 (log singularity for order 0, power otherwise).
    """
    order = _check_order(order)
    arg = np.asarray(arg, dtype=float)
    if np.any(arg <= 0):
        raise ValueError("hankel1 requires arg > 0 (singular at 0)")
    out = _sp.hankel1(order, arg)
    return complex(out) if out.ndim == 0 else out


def hankel1_deriv(order: int, arg):
    order = _check_order(order)
    arg = np.asarray(arg, dtype=float)
    if np.any(arg <= 0):
        raise ValueError("hankel1_deriv requires arg > 0")
    out = _sp.h1vp(order, arg)
    return complex(out) if out.ndim == 0 else out


def spherical_bessel_j(degree: int, arg):
    """Spherical Bessel function j_degree(arg); j_0(0) = 1, j_l(t) ~ t^l/(2l+1)!!."""
    degree = _check_order(degree)
    arg = np.asarray(arg, dtype=float)
    if np.any(arg < 0):
        raise ValueError("spherical_bessel_j requires arg >= 0")
    out = _sp.spherical_jn(degree, arg)
    return float(out) if out.ndim == 0 else out


def gamma_fn(b: float) -> float:
    """Gamma(b) for b > 0; Gamma(n) = (n-1)! at positive integers."""
    if b <= 0:
        raise ValueError("gamma_fn requires b > 0")
    return float(_sp.gamma(b))


def spherical_harmonic(degree: int, order: int, polar, azimuth):
    """Orthonormal spherical harmonic Y_degree^order(polar, azimuth).

    Unit-sphere measure normalization with Condon-Shortley phase, so
    Y_0^0 = 1/(2 sqrt(pi)) and Y_1^0 = sqrt(3/4pi) cos(polar).
    Built from associated Legendre functions to stay independent of
    scipy's sph_harm argument-order churn.
    """
    degree = _check_order(degree)
    order = int(order)
    if abs(order) > degree:
        raise ValueError(f"|order|={abs(order)} exceeds degree={degree}")
    polar = np.asarray(polar, dtype=float)
    azimuth = np.asarray(azimuth, dtype=float)
    m = abs(order)
    # lpmv carries the Condon-Shortley (-1)^m already
    norm = np.sqrt(
        (2 * degree + 1)
        / (4 * np.pi)
        * _sp.gamma(degree - m + 1)
        / _sp.gamma(degree + m + 1)
    )
    val = norm * _sp.lpmv(m, degree, np.cos(polar)) * np.exp(1j * m * azimuth)
    if order < 0:
        val = (-1) ** m * np.conjugate(val)
    return complex(val) if val.ndim == 0 else val


def jacobi_anger_sum(kr, theta, n_terms: int):
    """Partial sum sum_{n=-N..N} i^n J_n(kr) e^{i n theta}.

    Converges to exp(i kr cos(theta)); used as a resummation oracle for the
    local-expansion module.
    """
    n_terms = _check_order(n_terms)
    kr = np.asarray(kr, dtype=float)
    theta = np.asarray(theta, dtype=float)
    ns = np.arange(-n_terms, n_terms + 1)
    jn = _sp.jv(ns, kr[..., None])
    phases = (1j**ns) * np.exp(1j * ns * theta[..., None])
    out = (jn * phases).sum(axis=-1)
    return complex(out) if out.ndim == 0 else out
