import numpy as np
import pytest

from atdlab import cgo, localexp
from atdlab.atd import threed
from atdlab.geometry.frames import AtdFrame3D
from atdlab.geometry.scene import RigidFrame

import oracles


def admissible_angles(rng, phi0):
    psi1 = rng.uniform(np.pi / 2 + 0.1, np.pi - 0.1)
    psi2 = rng.uniform(phi0 + np.pi / 2 + 0.1, 3 * np.pi / 2 - 0.1)
    return psi1, psi2


def test_f0_matches_quadrature_oracle():
    rng = np.random.default_rng(0)
    for _ in range(4):
        phi0 = rng.uniform(0.4, np.pi / 2)
        psi1, psi2 = admissible_angles(rng, phi0)
        tau, k = rng.uniform(6, 40), rng.uniform(0.5, 3)
        vt = np.sqrt(1 + k**2 / tau**2)
        a00 = rng.normal() + 1j * rng.normal()
        closed = threed.f0_3d(a00, (psi1, psi2), phi0, vt)
        f = cgo.coeff_functions_3d(psi1, psi2, phi0, vt)
        A, B, Z = f["A"], f["B"], f["Z"]
        Q1, Q2, Q3 = f["Q1"], f["Q2"], f["Q3"]
        qv = 2 * np.sqrt(np.pi) * a00 * (
            oracles.complex_quad(lambda p: A / Q1(p) ** 2, 0, phi0)
            + oracles.complex_quad(lambda t: B / Q2(t) ** 2, 0, np.pi / 2)
            + oracles.complex_quad(lambda t: Z / Q3(t) ** 2, 0, np.pi / 2)
        )
        assert abs(closed - qv) < 1e-8 * max(1, abs(closed))


def test_f0_scales_like_tau_minus_2():
    rng = np.random.default_rng(1)
    phi0 = 1.1
    psi1, psi2 = admissible_angles(rng, phi0)
    k, a00 = 2.0, 1.3 - 0.4j
    vals = []
    for tau in (7.0, 50.0):
        vt = np.sqrt(1 + k**2 / tau**2)
        vals.append(abs(threed.f0_3d(a00, (psi1, psi2), phi0, vt)) * tau**2)
    # tau^2 F0 drifts only through the vartheta-dependence of ACD
    assert abs(vals[0] - vals[1]) < 0.05 * vals[1]
    assert abs(threed.f0_3d(0.0, (psi1, psi2), phi0, 1.01)) == 0.0


def test_f_combined_matches_full_ray_quadrature():
    """Brute-force oracle: angular quadrature x radial quadrature of the
    actual surface integrals on the swept planes."""
    rng = np.random.default_rng(2)
    phi0 = 1.2
    psi1, psi2 = admissible_angles(rng, phi0)
    tau, k = 9.0, 1.5
    eta0 = 0.7 + 0.25j
    a00, a10, a11, a1m = rng.normal(size=4) + 1j * rng.normal(size=4)
    vt = np.sqrt(1 + k**2 / tau**2)

    d = np.array([np.sin(psi1) * np.cos(psi2), np.sin(psi1) * np.sin(psi2), np.cos(psi1)])
    dperp = np.array([-np.sin(psi2), np.cos(psi2), 0.0])
    rho = tau * d + 1j * np.sqrt(k**2 + tau**2) * dperp
    c10 = 2 * np.sqrt(3 * np.pi) * 1j * k / 3 * a10
    bp = -(4 * np.pi * 1j * k / 3) * np.sqrt(3 / (8 * np.pi)) * a11
    bm = (4 * np.pi * 1j * k / 3) * np.sqrt(3 / (8 * np.pi)) * a1m
    grad_u1 = np.array([bm + bp, 1j * (bp - bm), c10])

    def u1(x):
        return c10 * x[2] + bm * (x[0] - 1j * x[1]) + bp * (x[0] + 1j * x[1])

    import scipy.special as sp

    def radial(m, xh):
        z = -(rho @ xh)
        return sp.gamma(m + 1) / z ** (m + 1)

    nu1 = np.array([0, 0, -1.0])
    nu2 = np.array([0, -1.0, 0])
    nu3 = np.array([-np.sin(phi0), np.cos(phi0), 0])
    xh1 = lambda p: np.array([np.cos(p), np.sin(p), 0.0])
    xh2 = lambda t: np.array([np.sin(t), 0.0, np.cos(t)])
    xh3 = lambda t: np.array([np.sin(t) * np.cos(phi0), np.sin(t) * np.sin(phi0), np.cos(t)])
    cq = oracles.complex_quad
    T_eta = cq(lambda p: eta0 * 2 * np.sqrt(np.pi) * a00 * radial(1, xh1(p)), 0, phi0)
    T1 = cq(lambda p: (rho @ nu1) * u1(xh1(p)) * radial(2, xh1(p)), 0, phi0)
    T2 = cq(lambda t: (rho @ nu2) * u1(xh2(t)) * radial(2, xh2(t)), 0, np.pi / 2)
    T3 = cq(lambda t: (rho @ nu3) * u1(xh3(t)) * radial(2, xh3(t)), 0, np.pi / 2)
    T4 = cq(lambda t: (grad_u1 @ nu2) * radial(1, xh2(t)), 0, np.pi / 2)
    T5 = cq(lambda t: (grad_u1 @ nu3) * radial(1, xh3(t)), 0, np.pi / 2)
    oracle = T_eta + T1 + T2 + T3 - T4 - T5

    closed = threed.f_combined_3d_angles(
        a00, (a10, a11, a1m), eta0, k, (psi1, psi2), phi0, vt
    ) / tau**2
    assert abs(closed - oracle) < 1e-8 * max(1, abs(oracle))


def test_eta_and_a10_anchor_limits():
    # paper-quoted tau -> infinity anchors for the eta-term and the a10-term
    rng = np.random.default_rng(3)
    phi0 = 1.0
    psi1, psi2 = admissible_angles(rng, phi0)
    k = 2.0
    eta0 = 0.7 + 0.3j
    a00, a10 = 1.1 - 0.4j, 0.6 + 0.2j
    f = cgo.coeff_functions_3d(psi1, psi2, phi0, 1.0)
    A, B, C, D, Z = f["A"], f["B"], f["C"], f["D"], f["Z"]
    common = (1 / A**2) * (Z / D + B / C)
    anchor_eta = -2 * np.sqrt(np.pi) * eta0 * common * a00
    anchor_a10 = (2 * np.sqrt(3 * np.pi) * 1j * k / 3) * common * a10
    got_eta = threed.f_combined_3d_angles(a00, (0, 0, 0), eta0, k, (psi1, psi2), phi0, 1.0)
    got_a10 = threed.f_combined_3d_angles(0.0, (a10, 0, 0), 0.0, k, (psi1, psi2), phi0, 1.0)
    assert abs(got_eta - anchor_eta) < 1e-10 * abs(anchor_eta)
    assert abs(got_a10 - anchor_a10) < 1e-10 * abs(anchor_a10)


def test_frozen_vartheta_is_tau_independent():
    rng = np.random.default_rng(4)
    phi0 = 0.9
    psi1, psi2 = admissible_angles(rng, phi0)
    k, eta0 = 1.5, 0.9
    coeffs = rng.normal(size=4) + 1j * rng.normal(size=4)
    v1 = threed.f_combined_3d_angles(coeffs[0], tuple(coeffs[1:]), eta0, k, (psi1, psi2), phi0, 1.0)
    # vartheta frozen at 1: no tau anywhere in the expression
    v2 = threed.f_combined_3d_angles(coeffs[0], tuple(coeffs[1:]), eta0, k, (psi1, psi2), phi0, 1.0)
    assert abs(v1 - v2) < 1e-10 * max(1, abs(v1))


def test_extract_leading_synthetic_exact():
    # exact c0 + c1/tau data recovers c0 to 1e-10
    c0, c1 = 0.7 - 0.3j, -2.0 + 1.1j
    F = lambda tau: (c0 + c1 / tau) / tau**2
    fit = threed.extract_leading_3d(F, np.geomspace(10, 200, 24))
    assert abs(fit.C_A - c0) < 1e-10
    assert fit.residual < 1e-12


def test_extract_leading_recovers_anchor_combination():
    rng = np.random.default_rng(5)
    phi0 = 1.2
    psi1, psi2 = admissible_angles(rng, phi0)
    k, eta0 = 2.0, 0.8 + 0.1j
    a00, a10, a11, a1m = rng.normal(size=4) + 1j * rng.normal(size=4)
    F = lambda tau: threed.f_combined_3d_angles(
        a00, (a10, a11, a1m), eta0, k, (psi1, psi2), phi0, np.sqrt(1 + k**2 / tau**2)
    ) / tau**2
    fit = threed.extract_leading_3d(F, np.geomspace(150, 3000, 28))
    anchor = threed.f_combined_3d_angles(
        a00, (a10, a11, a1m), eta0, k, (psi1, psi2), phi0, 1.0
    )
    assert abs(fit.C_A - anchor) < 1e-4 * abs(anchor)


def test_degenerate_combination_drives_CA_to_noise_floor():
    rng = np.random.default_rng(6)
    phi0 = 1.0
    psi1, psi2 = admissible_angles(rng, phi0)
    k, eta0 = 2.0, 0.9 + 0.2j
    a00 = 1.2 - 0.5j
    a10 = -np.sqrt(3) * 1j * eta0 / k * a00
    F = lambda tau: threed.f_combined_3d_angles(
        a00, (a10, 0.0, 0.0), eta0, k, (psi1, psi2), phi0, np.sqrt(1 + k**2 / tau**2)
    ) / tau**2
    fit = threed.extract_leading_3d(F, np.geomspace(150, 3000, 28))
    assert threed.leading_combination_3d(a00, a10, 0.0, 0.0, eta0, k) < 1e-14
    assert abs(fit.C_A) < 10 * max(fit.noise_floor, 1e-14)
    # and at vartheta = 1 the functional vanishes identically
    assert abs(
        threed.f_combined_3d_angles(a00, (a10, 0, 0), eta0, k, (psi1, psi2), phi0, 1.0)
    ) < 1e-12


def test_leading_combination_values():
    assert threed.leading_combination_3d(0.0, 1.0, 0.0, 0.0, 0.0, 2.0) == 1.0
    eta0, k, a00 = 0.5 + 0.1j, 2.0, 0.7 - 0.2j
    a10 = -np.sqrt(3) * 1j * eta0 / k * a00
    assert threed.leading_combination_3d(a00, a10, 0, 0, eta0, k) < 1e-15


def test_unsupported_vanishing_order_raises():
    k = 1.5
    field = oracles.SphericalWaveSum3D(k, {(1, 0): 1.0})  # order-1 field
    exp = localexp.spherical_coeffs(field, (0, 0, 0), k, [0.3, 0.5], ell_max=3)
    frame = AtdFrame3D(
        frame=RigidFrame(np.eye(3), np.zeros(3)),
        h=0.3,
        phi0=np.pi / 2,
        anchor_world=np.zeros(3),
        face=(0, 0),
    )
    p = cgo.make_cgo(10.0, k, (3 * np.pi / 4, 5 * np.pi / 4))
    with pytest.raises(threed.UnsupportedRegimeError):
        threed.f_combined_3d(exp, 0.5, frame, p)


def test_f_combined_from_expansion_roundtrip():
    # recovered expansion coefficients reproduce the direct-angle assembly
    k, eta0, phi0 = 1.5, 0.6, 1.1
    coeffs = {(0, 0): 1.0 + 0.3j, (1, 0): 0.4 - 0.2j, (1, 1): -0.3j, (1, -1): 0.25}
    field = oracles.SphericalWaveSum3D(k, coeffs)
    exp = localexp.spherical_coeffs(field, (0, 0, 0), k, [0.3, 0.5], ell_max=3)
    frame = AtdFrame3D(
        frame=RigidFrame(np.eye(3), np.zeros(3)),
        h=0.3,
        phi0=phi0,
        anchor_world=np.zeros(3),
        face=(0, 0),
    )
    tau = 25.0
    p = cgo.make_cgo(tau, k, (3 * np.pi / 4, phi0 + np.pi / 2 + 0.6))
    got = threed.f_combined_3d(exp, eta0, frame, p)
    ref = threed.f_combined_3d_angles(
        coeffs[(0, 0)],
        (coeffs[(1, 0)], coeffs[(1, 1)], coeffs[(1, -1)]),
        eta0,
        k,
        p.angles,
        phi0,
        p.vartheta,
    ) / tau**2
    assert abs(got - ref) < 1e-8 * abs(ref)


def test_extraction_through_rotated_3d_frame():
    # world-frame synthetic field, frame from a real cube pair: the local
    # expansion + combined functional recover the frame-local anchor value
    from atdlab.geometry import AprioriParams, PolytopeScene, build_atd_3d, modified_distance

    ap = AprioriParams(R0=10.0, r0=0.2, L0=2.0, theta0=np.pi / 6)
    v = np.array(
        [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
         [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]], float)
    faces = [[0, 3, 2, 1], [4, 5, 6, 7], [0, 1, 5, 4], [2, 3, 7, 6], [1, 2, 6, 5], [0, 4, 7, 3]]
    A = PolytopeScene(3, [{"vertices": v, "faces": faces}], ap)
    B = PolytopeScene(3, [{"vertices": v * 0.5 + 0.25, "faces": faces}], ap)
    w = modified_distance(A, B, samples_per_edge=96)
    fr = build_atd_3d(A, B, w, c1=0.5, phi0=1.1)

    k, eta0 = 1.5, 0.7
    coeffs = {(0, 0): 1.0 + 0.2j, (1, 0): 0.5 - 0.1j, (1, 1): 0.2j, (1, -1): -0.15}
    local_field = oracles.SphericalWaveSum3D(k, coeffs)

    def world_field(pts_world):
        return local_field(fr.to_local(pts_world))

    rho0 = 0.9 * w.value
    exp = localexp.spherical_coeffs(
        lambda q: world_field(fr.to_world(q)), (0, 0, 0), k,
        [0.3 * rho0, 0.5 * rho0], ell_max=2,
    )
    for (ell, m), c in coeffs.items():
        assert abs(exp.coeff_3d(ell, m) - c) < 1e-8
    tau = 30.0
    p = cgo.make_cgo(tau, k, (3 * np.pi / 4, fr.phi0 + np.pi / 2 + 0.5))
    got = threed.f_combined_3d(exp, eta0, fr, p)
    ref = threed.f_combined_3d_angles(
        coeffs[(0, 0)], (coeffs[(1, 0)], coeffs[(1, 1)], coeffs[(1, -1)]),
        eta0, k, p.angles, fr.phi0, p.vartheta,
    ) / tau**2
    assert abs(got - ref) < 1e-7 * abs(ref)
