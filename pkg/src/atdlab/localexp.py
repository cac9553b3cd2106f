"""Local expansions of analytic Helmholtz fields about a point.

2D fields are expanded as
    u(r, theta) = sum_{n>=0} (a_n i^n e^{i n theta} + b_n i^n e^{-i n theta}) J_n(k r),
3D fields as
    u(r, theta, phi) = 4 pi sum_{l,m} i^l a_l^m j_l(k r) Y_l^m(theta, phi).

Coefficients are recovered from field samples on a few circles/spheres by an
angular transform followed by least squares across the radii, which keeps the
recovery away from single-radius Bessel-zero breakdowns. The n = 0 mode of the
2D form is split evenly (a_0 = b_0 = c_0/2), the unique convention under which
fields symmetric across the x1-axis have a_n = b_n at every order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import specfun

__all__ = [
    "LocalExpansion",
    "TrivialFieldError",
    "BesselZeroError",
    "fourier_bessel_coeffs",
    "spherical_coeffs",
    "vanishing_order",
    "decompose",
    "expansion_to_csv",
]

CONDITION_LIMIT = 1e8


class TrivialFieldError(ValueError):
    """All expansion coefficients vanish: the field is (numerically) zero."""


class BesselZeroError(ValueError):
    """A sampling radius sits on a Bessel zero; recovery is ill-conditioned."""


@dataclass
class LocalExpansion:
    dimension: int
    center: np.ndarray
    k: float
    n_max: int
    rho0: float
    radii: np.ndarray
    # 2D: a[n], b[n] for n = 0..n_max.  3D: a[l, m+l] for l = 0..n_max.
    a: np.ndarray
    b: Optional[np.ndarray]
    residual: float
    field: Optional[Callable] = None
    rotation: Optional[np.ndarray] = None

    def coeff_magnitude(self, n: int) -> float:
        if self.dimension == 2:
            return max(abs(self.a[n]), abs(self.b[n]))
        return float(np.max(np.abs(self.a[n, : 2 * n + 1])))

    def max_magnitude(self) -> float:
        return max(self.coeff_magnitude(n) for n in range(self.n_max + 1))

    def coeff_3d(self, ell: int, m: int) -> complex:
        if self.dimension != 3:
            raise ValueError("coeff_3d only applies to 3D expansions")
        if abs(m) > ell:
            raise ValueError("|m| > ell")
        return complex(self.a[ell, m + ell])

    def resum(self, x):
        """Evaluate the truncated series at point(s) x (relative to center)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.dimension == 2:
            r = np.hypot(x[:, 0], x[:, 1])
            th = np.arctan2(x[:, 1], x[:, 0])
            out = np.zeros(len(x), dtype=complex)
            for n in range(self.n_max + 1):
                jn = specfun.bessel_j(n, self.k * r)
                out += (
                    self.a[n] * (1j**n) * np.exp(1j * n * th)
                    + self.b[n] * (1j**n) * np.exp(-1j * n * th)
                ) * jn
            return out if len(out) > 1 else complex(out[0])
        r = np.linalg.norm(x, axis=1)
        theta = np.arccos(np.clip(x[:, 2] / np.where(r == 0, 1.0, r), -1, 1))
        phi = np.arctan2(x[:, 1], x[:, 0])
        out = np.zeros(len(x), dtype=complex)
        for ell in range(self.n_max + 1):
            jl = specfun.spherical_bessel_j(ell, self.k * r)
            for m in range(-ell, ell + 1):
                ylm = specfun.spherical_harmonic(ell, m, theta, phi)
                out += 4 * np.pi * (1j**ell) * self.a[ell, m + ell] * jl * ylm
        return out if len(out) > 1 else complex(out[0])


def _check_radial_conditioning(radial_fn, orders, k, radii) -> None:
    """Per-mode check: the chosen radii must catch a non-negligible fraction
    of the radial function's magnitude on the sampled range (a radius pinned
    to a Bessel zero makes that mode's least squares meaningless)."""
    radii = np.atleast_1d(radii)
    rr = np.linspace(0.5 * radii.min(), 1.05 * radii.max(), 257)
    for n in orders:
        avail = float(np.max(np.abs(radial_fn(n, k * rr))))
        got = float(np.max(np.abs(radial_fn(n, k * radii))))
        if avail > 0 and (got == 0 or avail / got > CONDITION_LIMIT):
            raise BesselZeroError(
                f"mode {n}: sampling radii sit near zeros of the radial factor "
                f"(sensitivity ratio {avail/max(got, 1e-300):.2e} > "
                f"{CONDITION_LIMIT:.0e}); choose different radii than {radii}"
            )


def fourier_bessel_coeffs(
    field: Callable,
    center,
    k: float,
    radii,
    n_max: int,
    rho0: Optional[float] = None,
) -> LocalExpansion:
    """Recover the 2D expansion coefficients (a_n, b_n) for n <= n_max.

    `field` maps an (m, 2) array of absolute coordinates to m complex values.
    Samples sit on circles of the given radii around `center`; 4*n_max angles
    per circle feed an FFT, then each mode is least-squares fitted across the
    radii against J_n(k r).
    """
    center = np.asarray(center, dtype=float)
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if np.any(radii <= 0):
        raise ValueError("radii must be positive")
    n_max = int(n_max)
    m_ang = max(4 * n_max, 16)
    theta = 2 * np.pi * np.arange(m_ang) / m_ang

    # modal samples c_hat[j, n] ~ c_n i^|n| J_n(k r_j), n = -n_max..n_max
    hat = np.zeros((len(radii), 2 * n_max + 1), dtype=complex)
    for j, r in enumerate(radii):
        pts = center[None, :] + r * np.column_stack([np.cos(theta), np.sin(theta)])
        vals = np.asarray(field(pts), dtype=complex)
        f = np.fft.fft(vals) / m_ang
        for n in range(-n_max, n_max + 1):
            hat[j, n + n_max] = f[n % m_ang]

    ns = np.arange(-n_max, n_max + 1)
    design = np.empty((len(radii), 2 * n_max + 1))
    for i, n in enumerate(ns):
        design[:, i] = specfun.bessel_j(abs(int(n)), k * radii)
    _check_radial_conditioning(specfun.bessel_j, range(n_max + 1), k, radii)

    c = np.empty(2 * n_max + 1, dtype=complex)
    for i, n in enumerate(ns):
        col = design[:, i]
        c[i] = (col @ hat[:, i]) / (col @ col)
    # strip the i^n prefactor: stored c_n with u = sum c_n i^n e^{i n th} J_n
    c = c / (1j ** np.abs(ns))

    a = np.zeros(n_max + 1, dtype=complex)
    b = np.zeros(n_max + 1, dtype=complex)
    a[0] = b[0] = c[n_max] / 2
    for n in range(1, n_max + 1):
        a[n] = c[n + n_max]
        b[n] = c[-n + n_max]

    exp = LocalExpansion(
        dimension=2,
        center=center,
        k=float(k),
        n_max=n_max,
        rho0=float(rho0 if rho0 is not None else radii.max() / 0.7),
        radii=radii,
        a=a,
        b=b,
        residual=0.0,
        field=field,
    )
    exp.residual = _validation_residual(exp)
    return exp


def _validation_residual(exp: LocalExpansion) -> float:
    """Relative mismatch between the resummed series and fresh field samples."""
    rv = 0.6 * float(np.max(exp.radii))
    if exp.dimension == 2:
        th = np.linspace(0, 2 * np.pi, 37)[:-1]
        pts_local = rv * np.column_stack([np.cos(th), np.sin(th)])
        truth = np.asarray(exp.field(exp.center[None, :] + pts_local), dtype=complex)
        approx = np.atleast_1d(exp.resum(pts_local))
    else:
        th = np.linspace(0.1, np.pi - 0.1, 8)
        ph = np.linspace(0, 2 * np.pi, 9)[:-1]
        T, P = np.meshgrid(th, ph, indexing="ij")
        pts_local = rv * np.column_stack(
            [
                (np.sin(T) * np.cos(P)).ravel(),
                (np.sin(T) * np.sin(P)).ravel(),
                np.cos(T).ravel(),
            ]
        )
        truth = np.asarray(exp.field(exp.center[None, :] + pts_local), dtype=complex)
        approx = np.atleast_1d(exp.resum(pts_local))
    scale = float(np.max(np.abs(truth)))
    if scale == 0:
        return float(np.max(np.abs(approx)))
    return float(np.max(np.abs(approx - truth)) / scale)


def spherical_coeffs(
    field: Callable,
    center,
    k: float,
    radii,
    ell_max: int,
    rho0: Optional[float] = None,
) -> LocalExpansion:
    """Recover 3D coefficients a_l^m, l <= ell_max, via tensor-product
    Gauss(theta) x trapezoid(phi) quadrature on spheres plus radial least
    squares against 4 pi i^l j_l(k r)."""
    center = np.asarray(center, dtype=float)
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    ell_max = int(ell_max)
    n_th = 2 * ell_max + 2
    n_ph = 2 * ell_max + 2
    xg, wg = np.polynomial.legendre.leggauss(n_th)
    theta = np.arccos(xg)
    phi = 2 * np.pi * np.arange(n_ph) / n_ph
    T, P = np.meshgrid(theta, phi, indexing="ij")
    W = np.repeat(wg[:, None], n_ph, axis=1) * (2 * np.pi / n_ph)
    dirs = np.column_stack(
        [
            (np.sin(T) * np.cos(P)).ravel(),
            (np.sin(T) * np.sin(P)).ravel(),
            np.cos(T).ravel(),
        ]
    )

    hat = np.zeros((len(radii), ell_max + 1, 2 * ell_max + 1), dtype=complex)
    for j, r in enumerate(radii):
        vals = np.asarray(field(center[None, :] + r * dirs), dtype=complex).reshape(
            n_th, n_ph
        )
        for ell in range(ell_max + 1):
            for m in range(-ell, ell + 1):
                ylm = specfun.spherical_harmonic(ell, m, T, P)
                hat[j, ell, m + ell] = np.sum(vals * np.conjugate(ylm) * W)

    a = np.zeros((ell_max + 1, 2 * ell_max + 1), dtype=complex)
    _check_radial_conditioning(specfun.spherical_bessel_j, range(ell_max + 1), k, radii)
    for ell in range(ell_max + 1):
        col = np.atleast_1d(4 * np.pi * (1j**ell) * specfun.spherical_bessel_j(ell, k * radii))
        denom = np.conjugate(col) @ col
        for m in range(-ell, ell + 1):
            a[ell, m + ell] = (np.conjugate(col) @ hat[:, ell, m + ell]) / denom

    exp = LocalExpansion(
        dimension=3,
        center=center,
        k=float(k),
        n_max=ell_max,
        rho0=float(rho0 if rho0 is not None else radii.max() / 0.7),
        radii=radii,
        a=a,
        b=None,
        residual=0.0,
        field=field,
    )
    exp.residual = _validation_residual(exp)
    return exp


def vanishing_order(exp: LocalExpansion, tol: float = 1e-8) -> int:
    """Smallest order with a coefficient above tol times the overall maximum.

    Raises TrivialFieldError when every coefficient is at the zero floor,
    which for a nontrivial Helmholtz solution would contradict unique
    continuation (finite vanishing order).
    """
    mx = exp.max_magnitude()
    if mx == 0.0:
        raise TrivialFieldError("all expansion coefficients are zero")
    for n in range(exp.n_max + 1):
        if exp.coeff_magnitude(n) > tol * mx:
            return n
    raise TrivialFieldError(
        "no coefficient exceeds the relative tolerance; field is numerically trivial"
    )


@dataclass
class Decomposition:
    leading: Callable
    remainder: Callable
    order: int
    C_N: float
    C_Np1: float


def decompose(exp: LocalExpansion, N: int, fit_radii=None) -> Decomposition:
    """Split the field into its leading term and the remainder at order N.

    leading(x) is the explicit lowest-order term of the expansion; the
    remainder is the exact pointwise difference field - leading. C_N is the
    sharp prefactor of |leading| <= C_N |x|^N; C_Np1 is fitted as the largest
    observed |remainder|/|x|^(N+1) over sample radii below rho0/2.
    """
    if N != vanishing_order(exp):
        raise ValueError("N does not match the expansion's vanishing order")
    if exp.field is None:
        raise ValueError("decompose needs the original field evaluator")
    k, center = exp.k, exp.center

    if exp.dimension == 2:
        aN, bN = exp.a[N], exp.b[N]

        def leading(x):
            x = np.atleast_2d(np.asarray(x, dtype=float))
            r = np.hypot(x[:, 0], x[:, 1])
            th = np.arctan2(x[:, 1], x[:, 0])
            val = (
                (k * r / 2) ** N
                / specfun.gamma_fn(N + 1)
                * (1j**N)
                * (aN * np.exp(1j * N * th) + bN * np.exp(-1j * N * th))
            )
            return val if len(val) > 1 else complex(val[0])

        C_N = (k / 2) ** N / specfun.gamma_fn(N + 1) * (abs(aN) + abs(bN))
    else:
        coeffs = [exp.coeff_3d(N, m) for m in range(-N, N + 1)]
        dfac = float(np.prod(np.arange(2 * N + 1, 0, -2))) if N > 0 else 1.0

        def leading(x):
            x = np.atleast_2d(np.asarray(x, dtype=float))
            r = np.linalg.norm(x, axis=1)
            theta = np.arccos(np.clip(x[:, 2] / np.where(r == 0, 1.0, r), -1, 1))
            phi = np.arctan2(x[:, 1], x[:, 0])
            val = np.zeros(len(x), dtype=complex)
            for m in range(-N, N + 1):
                val += coeffs[m + N] * specfun.spherical_harmonic(N, m, theta, phi)
            val *= 4 * np.pi * (1j**N) * (k * r) ** N / dfac
            return val if len(val) > 1 else complex(val[0])

        # crude sharp bound: sup over sphere samples of the angular factor
        th = np.linspace(0, np.pi, 61)
        ph = np.linspace(0, 2 * np.pi, 61)
        T, P = np.meshgrid(th, ph, indexing="ij")
        ang = np.zeros(T.shape, dtype=complex)
        for m in range(-N, N + 1):
            ang += coeffs[m + N] * specfun.spherical_harmonic(N, m, T, P)
        C_N = 4 * np.pi * k**N / dfac * float(np.max(np.abs(ang)))

    def remainder(x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        truth = np.asarray(exp.field(center[None, :] + x), dtype=complex)
        lead = np.atleast_1d(leading(x))
        out = truth - lead
        return out if len(out) > 1 else complex(out[0])

    if fit_radii is None:
        fit_radii = np.linspace(0.05, 0.5, 8) * exp.rho0
    cnp1 = 0.0
    for r in np.atleast_1d(fit_radii):
        if exp.dimension == 2:
            th = np.linspace(0, 2 * np.pi, 25)[:-1]
            pts = r * np.column_stack([np.cos(th), np.sin(th)])
        else:
            u = np.linspace(0.1, np.pi - 0.1, 7)
            v = np.linspace(0, 2 * np.pi, 9)[:-1]
            U, V = np.meshgrid(u, v, indexing="ij")
            pts = r * np.column_stack(
                [
                    (np.sin(U) * np.cos(V)).ravel(),
                    (np.sin(U) * np.sin(V)).ravel(),
                    np.cos(U).ravel(),
                ]
            )
        cnp1 = max(cnp1, float(np.max(np.abs(np.atleast_1d(remainder(pts))))) / r ** (N + 1))
    return Decomposition(leading=leading, remainder=remainder, order=N, C_N=float(C_N), C_Np1=cnp1)


def expansion_to_csv(exp: LocalExpansion, path) -> None:
    """Dump coefficients as CSV: (n, re_a, im_a, re_b, im_b) in 2D or
    (l, m, re_a, im_a) in 3D."""
    with open(path, "w") as fh:
        if exp.dimension == 2:
            fh.write("n,re_a,im_a,re_b,im_b\n")
            for n in range(exp.n_max + 1):
                fh.write(
                    f"{n},{exp.a[n].real:.17g},{exp.a[n].imag:.17g},"
                    f"{exp.b[n].real:.17g},{exp.b[n].imag:.17g}\n"
                )
        else:
            fh.write("l,m,re_a,im_a\n")
            for ell in range(exp.n_max + 1):
                for m in range(-ell, ell + 1):
                    c = exp.coeff_3d(ell, m)
                    fh.write(f"{ell},{m},{c.real:.17g},{c.imag:.17g}\n")
