"""Complex-exponential (CGO) test solutions and their closed-form ray calculus.

The phase vector is rho = tau*d + i*sqrt(k^2 + tau^2)*dperp with unit
vectors d, dperp orthogonal, so rho.rho = -k^2 and u0 = exp(rho.x) solves
the Helmholtz equation exactly. Direction conventions:

  2D:  d = (cos psi, sin psi),  dperp = (-sin psi, cos psi),
       psi in (theta0 + pi/2, 3pi/2)
  3D:  d = (sin psi1 cos psi2, sin psi1 sin psi2, cos psi1),
       dperp = (-sin psi2, cos psi2, 0),
       psi1 in (pi/2, pi), psi2 in (phi0 + pi/2, 3pi/2)

On the admissible angle sets, -d.xh > 0 for every direction xh spanning the
attached test domain, giving uniform decay |u0(x)| <= exp(-alpha tau |x|).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .specfun import gamma_fn

__all__ = [
    "CgoParams",
    "DualDirectionSet",
    "make_cgo",
    "eval_cgo",
    "eval_cgo_gradient",
    "decay_margin",
    "ray_laplace",
    "ray_laplace_truncated_tail_bound",
    "coeff_functions_2d",
    "coeff_functions_3d",
]


@dataclass(frozen=True)
class CgoParams:
    """Parameters of one CGO solution exp(rho.x)."""

    tau: float
    k: float
    d: np.ndarray
    dperp: np.ndarray
    rho: np.ndarray
    vartheta: float
    angles: tuple

    @property
    def dimension(self) -> int:
        return len(self.d)

    def check_invariants(self, tol_orth: float = 1e-12, tol_phase: float = 1e-10):
        if abs(float(self.d @ self.dperp)) > tol_orth:
            raise AssertionError("d and dperp are not orthogonal")
        # relative to |rho|^2 = k^2 + 2 tau^2, the size of the cancelled terms
        resid = abs(complex(self.rho @ self.rho) + self.k**2)
        if resid > tol_phase * (self.k**2 + 2 * self.tau**2):
            raise AssertionError(f"rho.rho + k^2 = {resid:.3e} exceeds tolerance")
        if self.vartheta < 1.0:
            raise AssertionError("vartheta must be >= 1")


@dataclass(frozen=True)
class DualDirectionSet:
    """Admissible CGO direction angles for a test domain of given opening.

    2D: the interval (theta0 + pi/2, 3pi/2) for psi.
    3D: the rectangle (pi/2, pi) x (phi0 + pi/2, 3pi/2) for (psi1, psi2).
    """

    dimension: int
    opening: float  # theta0 (2D) or phi0 (3D)
    margin: float = 0.0

    def __post_init__(self):
        if self.dimension == 2:
            if not 0 < self.opening < np.pi:
                raise ValueError("theta0 must lie in (0, pi)")
        elif self.dimension == 3:
            if not 0 < self.opening <= np.pi / 2:
                raise ValueError("phi0 must lie in (0, pi/2]")
        else:
            raise ValueError("dimension must be 2 or 3")

    def contains(self, angles) -> bool:
        if self.dimension == 2:
            psi = float(angles)
            return self.opening + np.pi / 2 < psi < 3 * np.pi / 2
        psi1, psi2 = angles
        return (np.pi / 2 < psi1 < np.pi) and (
            self.opening + np.pi / 2 < psi2 < 3 * np.pi / 2
        )

    def midpoint(self):
        """Default direction: centre of the admissible interval/rectangle."""
        if self.dimension == 2:
            return 0.5 * (self.opening + np.pi / 2 + 3 * np.pi / 2)
        return (
            0.5 * (np.pi / 2 + np.pi),
            0.5 * (self.opening + np.pi / 2 + 3 * np.pi / 2),
        )

    def sample(self, n: int, pad: float = 0.05):
        """n interior angle samples, padded away from the degenerate endpoints."""
        if self.dimension == 2:
            lo, hi = self.opening + np.pi / 2, 3 * np.pi / 2
            w = hi - lo
            return np.linspace(lo + pad * w, hi - pad * w, n)
        m = max(2, int(np.sqrt(n)))
        l1, h1 = np.pi / 2, np.pi
        l2, h2 = self.opening + np.pi / 2, 3 * np.pi / 2
        p1 = np.linspace(l1 + pad * (h1 - l1), h1 - pad * (h1 - l1), m)
        p2 = np.linspace(l2 + pad * (h2 - l2), h2 - pad * (h2 - l2), m)
        return [(a, b) for a in p1 for b in p2]


def make_cgo(tau: float, k: float, angles) -> CgoParams:
    """Build CGO parameters from tau > 0, k > 0 and the direction angles.

    `angles` is a single float psi in 2D or a pair (psi1, psi2) in 3D.
    """
    if tau <= 0 or k <= 0:
        raise ValueError("make_cgo requires tau > 0 and k > 0")
    if np.isscalar(angles):
        psi = float(angles)
        d = np.array([np.cos(psi), np.sin(psi)])
        dperp = np.array([-np.sin(psi), np.cos(psi)])
        ang = (psi,)
    else:
        psi1, psi2 = (float(a) for a in angles)
        d = np.array(
            [np.sin(psi1) * np.cos(psi2), np.sin(psi1) * np.sin(psi2), np.cos(psi1)]
        )
        dperp = np.array([-np.sin(psi2), np.cos(psi2), 0.0])
        ang = (psi1, psi2)
    rho = tau * d + 1j * np.sqrt(k**2 + tau**2) * dperp
    p = CgoParams(
        tau=float(tau),
        k=float(k),
        d=d,
        dperp=dperp,
        rho=rho,
        vartheta=float(np.sqrt(1 + k**2 / tau**2)),
        angles=ang,
    )
    p.check_invariants()
    return p


def eval_cgo(p: CgoParams, x) -> complex:
    """u0(x) = exp(rho.x); |u0| = exp(Re(rho.x))."""
    x = np.asarray(x, dtype=float)
    out = np.exp(x @ p.rho)
    return complex(out) if out.ndim == 0 else out


def eval_cgo_gradient(p: CgoParams, x):
    x = np.asarray(x, dtype=float)
    return p.rho * np.exp(complex(x @ p.rho))


def decay_margin(p: CgoParams, frame, n_samples: int = 256) -> float:
    """Smallest value of -d.xh over unit directions xh spanning the frame's
    test domain. Positive margin certifies exp(-margin*tau*|x|) decay; a
    non-positive margin rejects the direction.

    `frame` needs only an opening-angle attribute: theta0 (2D) or phi0 (3D).
    """
    if p.dimension == 2:
        theta0 = float(frame.theta0 if hasattr(frame, "theta0") else frame)
        phis = np.linspace(0.0, theta0, n_samples)
        xh = np.column_stack([np.cos(phis), np.sin(phis)])
    else:
        phi0 = float(frame.phi0 if hasattr(frame, "phi0") else frame)
        m = max(4, int(np.sqrt(n_samples)))
        th = np.linspace(0.0, np.pi / 2, m)
        ph = np.linspace(0.0, phi0, m)
        T, P = np.meshgrid(th, ph, indexing="ij")
        xh = np.column_stack(
            [
                (np.sin(T) * np.cos(P)).ravel(),
                (np.sin(T) * np.sin(P)).ravel(),
                np.cos(T).ravel(),
            ]
        )
    margin = float(np.min(-(xh @ p.d)))
    if margin <= 0:
        raise ValueError(
            f"direction rejected: decay margin {margin:.3e} is not positive"
        )
    return margin


def ray_laplace(m: int, p: CgoParams, xhat) -> complex:
    """Closed form of the ray integral int_0^inf r^m exp(rho.xhat r) dr.

    Equals m! / (-rho.xhat)^(m+1), valid when Re(-rho.xhat) > 0.
    """
    if m < 0 or int(m) != m:
        raise ValueError("m must be a nonnegative integer")
    xhat = np.asarray(xhat, dtype=float)
    z = -complex(p.rho @ xhat)
    if z.real <= 0:
        raise ValueError(
            f"ray_laplace precondition violated: Re(-rho.xhat) = {z.real:.3e} <= 0"
        )
    return gamma_fn(m + 1) / z ** (m + 1)


def ray_laplace_truncated_tail_bound(m: int, p: CgoParams, xhat, R: float) -> float:
    """Upper bound for |int_R^inf r^m exp(rho.xhat r) dr|.

    Simple exponential tail estimate: with mu = Re(-rho.xhat) > 0 and
    R large enough that r^m <= exp(mu r / 2) on [R, inf), the tail is
    below 2 exp(-mu R / 2) / mu.
    """
    xhat = np.asarray(xhat, dtype=float)
    mu = float(-(p.rho @ xhat).real)
    if mu <= 0:
        raise ValueError("tail bound needs Re(-rho.xhat) > 0")
    return 2.0 * np.exp(-mu * R / 2.0) / mu


def coeff_functions_2d(psi: float, theta0: float, vartheta: float) -> dict:
    """Angular coefficient functions of the planar ray calculus.

    G multiplies the normal derivative of u0 on the horizontal ray,
    H on the slanted ray; L and J are the corresponding scaled ray
    denominators -rho.xh/tau. At vartheta = 1 one has G = iL and J = iH,
    and both are nonzero on psi in (theta0 + pi/2, 3pi/2).
    """
    if not theta0 + np.pi / 2 < psi < 3 * np.pi / 2:
        raise ValueError("psi outside the admissible interval (theta0+pi/2, 3pi/2)")
    if vartheta < 1.0:
        raise ValueError("vartheta must be >= 1")
    G = -np.sin(psi) - 1j * vartheta * np.cos(psi)
    H = np.sin(psi - theta0) + 1j * vartheta * np.cos(psi - theta0)
    J = -np.cos(theta0 - psi) - 1j * vartheta * np.sin(theta0 - psi)
    L = -np.cos(psi) + 1j * vartheta * np.sin(psi)
    return {"G": G, "H": H, "J": J, "L": L}


def coeff_functions_3d(psi1: float, psi2: float, phi0: float, vartheta: float) -> dict:
    """Angular coefficients of the 3D ray calculus and the denominator handles.

    Returns A, B, C, D, Z together with the per-face denominators
    Q1(phi) = C cos phi + B sin phi,  Q2(theta) = C sin theta + A cos theta,
    Q3(theta) = A cos theta + D sin theta, which satisfy Re Qj > 0 on the
    integration intervals for admissible angles. The exact identity
    A^2 + B^2 + C^2 = 1 - vartheta^2 = -k^2/tau^2 holds by construction.
    """
    if not (np.pi / 2 < psi1 < np.pi and phi0 + np.pi / 2 < psi2 < 3 * np.pi / 2):
        raise ValueError("(psi1, psi2) outside the admissible rectangle")
    if vartheta < 1.0:
        raise ValueError("vartheta must be >= 1")
    A = -np.cos(psi1)
    B = -np.sin(psi1) * np.sin(psi2) - 1j * vartheta * np.cos(psi2)
    C = -np.sin(psi1) * np.cos(psi2) + 1j * vartheta * np.sin(psi2)
    Z = C * np.sin(phi0) - B * np.cos(phi0)
    D = C * np.cos(phi0) + B * np.sin(phi0)
    return {
        "A": A,
        "B": B,
        "C": C,
        "D": D,
        "Z": Z,
        "Q1": lambda phi: C * np.cos(phi) + B * np.sin(phi),
        "Q2": lambda theta: C * np.sin(theta) + A * np.cos(theta),
        "Q3": lambda theta: A * np.cos(theta) + D * np.sin(theta),
    }
