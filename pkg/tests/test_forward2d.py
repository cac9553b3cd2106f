import numpy as np
import pytest

from atdlab.geometry import AprioriParams, PolytopeScene
from atdlab.forward2d import (
    Bounded,
    ConstantPositive,
    ImpedanceSpec,
    MixedEdge,
    NowhereAnalyticSurrogate,
    PlaneWave,
    PointSource,
    SoundHard,
    SoundSoft,
    eval_far_field,
    far_field_error,
    solve_circle,
    solve_exterior,
)
from atdlab.forward2d.farfield import FarFieldPattern

import oracles

AP = AprioriParams(R0=5.0, r0=0.05, L0=2.0, theta0=np.pi / 8)


def square(side=1.0, shift=(0.0, 0.0)):
    v = np.array([[0, 0], [side, 0], [side, side], [0, side]], float) + np.asarray(shift)
    return PolytopeScene(2, [v], AP)


def polygon_disk(nv=64, radius=1.0):
    th = 2 * np.pi * np.arange(nv) / nv
    return PolytopeScene(2, [radius * np.column_stack([np.cos(th), np.sin(th)])], AP)


# ---------------- circle validation mode ----------------
@pytest.mark.parametrize("k,lam", [(1.0, 0.5), (3.0, 1.0), (5.0, 2.0)])
def test_circle_impedance_matches_series(k, lam):
    sol = solve_circle((0, 0), 1.0, ImpedanceSpec(ConstantPositive(lam)), PlaneWave((1, 0), k), n=160)
    ff = eval_far_field(sol, 256)
    ffs = oracles.disk_farfield_series(k, 1.0, lam, ff.theta)
    assert np.linalg.norm(ff.values - ffs) / np.linalg.norm(ffs) < 1e-4


def test_circle_soft_and_hard_match_series():
    sol = solve_circle((0, 0), 1.0, ImpedanceSpec(SoundSoft()), PlaneWave((1, 0), 2.0), n=160)
    ff = eval_far_field(sol, 256)
    ffs = oracles.disk_farfield_series(2.0, 1.0, None, ff.theta, kind="soft")
    assert np.linalg.norm(ff.values - ffs) / np.linalg.norm(ffs) < 1e-10
    sol = solve_circle((0, 0), 1.0, ImpedanceSpec(SoundHard()), PlaneWave((1, 0), 1.0), n=160)
    ff = eval_far_field(sol, 256)
    ffs = oracles.disk_farfield_series(1.0, 1.0, None, ff.theta, kind="hard")
    assert np.linalg.norm(ff.values - ffs) / np.linalg.norm(ffs) < 1e-10


def test_circle_total_field_matches_series_pointwise():
    k, lam = 3.0, 1.0
    sol = solve_circle((0, 0), 1.0, ImpedanceSpec(ConstantPositive(lam)), PlaneWave((1, 0), k), n=192)
    rng = np.random.default_rng(0)
    th = rng.uniform(0, 2 * np.pi, 12)
    rr = rng.uniform(1.4, 3.0, 12)
    pts = np.column_stack([rr * np.cos(th), rr * np.sin(th)])
    got = np.atleast_1d(sol.eval_total_field(pts))
    ref = oracles.disk_total_field_series(k, 1.0, lam, pts)
    assert np.max(np.abs(got - ref)) < 1e-8


# ---------------- polygon solver ----------------
def test_64gon_sound_soft_matches_disk_series():
    sol = solve_exterior(polygon_disk(), ImpedanceSpec(SoundSoft()), PlaneWave((1, 0), 2.0),
                         panels_per_edge=2, ngl=8)
    ff = eval_far_field(sol, 128)
    ffs = oracles.disk_farfield_series(2.0, 1.0, None, ff.theta, kind="soft")
    assert np.linalg.norm(ff.values - ffs) / np.linalg.norm(ffs) < 1e-2


def test_square_self_convergence_order_at_least_2():
    prev = None
    diffs = []
    for ppe in (4, 8, 16):
        sol = solve_exterior(square(), ImpedanceSpec(SoundSoft()), PlaneWave((1, 0), 2.0),
                             panels_per_edge=ppe, ngl=10)
        ff = eval_far_field(sol, 128)
        if prev is not None:
            diffs.append(np.linalg.norm(ff.values - prev))
        prev = ff.values
    order = np.log2(diffs[0] / diffs[1])
    assert order >= 2.0


def test_sound_hard_square_normal_derivative_at_midpoints():
    # one-sided FD from the exterior using the known boundary trace
    k = 1.0
    sol = solve_exterior(square(), ImpedanceSpec(SoundHard()), PlaneWave((1, 0), k),
                         panels_per_edge=12, ngl=10)
    resid = []
    for ci, ei, A, B in square().edges_2d():
        mid = (A + B) / 2
        tang = (B - A) / np.linalg.norm(B - A)
        nrm = np.array([tang[1], -tang[0]])
        u_mid = complex(sol.boundary_trace_at(mid[None, :])[0])
        d = 1e-3
        u1 = complex(np.atleast_1d(sol.eval_total_field((mid + d * nrm)[None, :]))[0])
        u2 = complex(np.atleast_1d(sol.eval_total_field((mid + 2 * d * nrm)[None, :]))[0])
        dn = (-3 * u_mid + 4 * u1 - u2) / (2 * d)
        resid.append(abs(dn))
    assert max(resid) < 1e-4


def test_bc_residual_diagnostics_square():
    sol = solve_exterior(square(), ImpedanceSpec(ConstantPositive(1.0)), PlaneWave((1, 0), 2.0),
                         panels_per_edge=10, ngl=10)
    # polygon trace-equation residual at off-node points, relative to |u_inc|
    assert sol.diagnostics["bc_residual_smooth"] < 1e-3
    assert sol.diagnostics["bc_residual_corner"] < 1e-3


def test_bc_residual_smooth_mode_circle():
    # the smooth-curve validation mode meets the 1e-6 off-node claim outright
    from atdlab.forward2d.solver import circle_offnode_residual

    sol = solve_circle((0, 0), 1.0, ImpedanceSpec(ConstantPositive(1.0)),
                       PlaneWave((1, 0), 3.0), n=160)
    assert circle_offnode_residual(sol) < 1e-6


def test_total_field_empty_far_and_helmholtz_residual():
    k = 2.0
    sol = solve_exterior(square(), ImpedanceSpec(ConstantPositive(1.0)), PlaneWave((1, 0), k),
                         panels_per_edge=8, ngl=10)
    rng = np.random.default_rng(1)
    for _ in range(4):
        x = np.array([rng.uniform(1.5, 2.5), rng.uniform(-1.0, 2.0)])
        resid, u0 = oracles.helmholtz_fd_residual(lambda q: sol.eval_total_field(q), x, k, h=1e-3)
        assert abs(resid) < 1e-4 * abs(u0)
    with pytest.raises(ValueError):
        sol.eval_total_field(np.array([[0.5, 0.5]]))  # inside the obstacle


def test_far_field_expansion_consistency():
    # u_s(r xh) ~ e^{ikr}/sqrt(r) u_inf(xh) with O(1/r) relative gap
    k = 2.0
    sol = solve_exterior(square(), ImpedanceSpec(SoundSoft()), PlaneWave((1, 0), k),
                         panels_per_edge=8, ngl=10)
    ff = eval_far_field(sol, 8)
    r = 10 * AP.R0
    for i, th in enumerate(ff.theta):
        xh = np.array([np.cos(th), np.sin(th)])
        us = complex(np.atleast_1d(sol.eval_scattered((r * xh)[None, :]))[0])
        pred = np.exp(1j * k * r) / np.sqrt(r) * ff.values[i]
        assert abs(us - pred) < 0.2 / r * max(abs(ff.values[i]), 1e-3)


def test_far_field_grid_doubling_stability():
    k = 2.0
    sol = solve_exterior(square(), ImpedanceSpec(SoundSoft()), PlaneWave((1, 0), k),
                         panels_per_edge=8, ngl=10)
    n0 = int(8 * k * AP.R0)
    f1 = eval_far_field(sol, n0)
    f2 = eval_far_field(sol, 2 * n0)
    assert abs(f1.l2_norm() - f2.l2_norm()) < 1e-8


def test_reflection_symmetry_of_far_field():
    # scene symmetric across the incidence axis: u_inf(theta) = u_inf(-theta)
    v = np.array([[0, -0.5], [1, -0.5], [1, 0.5], [0, 0.5]], float)
    scene = PolytopeScene(2, [v], AP)
    sol = solve_exterior(scene, ImpedanceSpec(SoundSoft()), PlaneWave((1, 0), 2.0),
                         panels_per_edge=8, ngl=10)
    ff = eval_far_field(sol, 64)
    flipped = np.concatenate([[ff.values[0]], ff.values[1:][::-1]])
    assert np.max(np.abs(ff.values - flipped)) < 1e-6 * np.max(np.abs(ff.values))


def test_reciprocity_plane_waves():
    # u_inf(xh; p) = u_inf(-p; -xh) for the sound-soft square at k=2
    k = 2.0
    scene = square()
    th_obs = 2 * np.pi * 5 / 16
    p1 = np.array([1.0, 0.0])
    sol1 = solve_exterior(scene, ImpedanceSpec(SoundSoft()), PlaneWave(p1, k),
                          panels_per_edge=8, ngl=10)
    ff1 = eval_far_field(sol1, 16)
    xh = np.array([np.cos(th_obs), np.sin(th_obs)])
    sol2 = solve_exterior(scene, ImpedanceSpec(SoundSoft()), PlaneWave(-xh, k),
                          panels_per_edge=8, ngl=10)
    ff2 = eval_far_field(sol2, 16)
    v1 = ff1.values[5]  # direction th_obs
    # direction of -p1 = angle pi on the same 16-point grid: index 8
    v2 = ff2.values[8]
    assert abs(v1 - v2) < 1e-3 * max(abs(v1), 1.0)


def test_low_frequency_perturbation_vs_series_oracle():
    # k * diam small: the circle solve tracks the low-frequency disk series
    # (in this normalization the 2D far field is O(1/(sqrt(k) log k)), not
    # small; the oracle pins the actual values) and the total field at test
    # points stays nonzero, which is what anchors order-zero extraction
    k = 0.05
    sol = solve_circle((0, 0), 0.5, ImpedanceSpec(ConstantPositive(1.0)),
                       PlaneWave((1, 0), k), n=128)
    ff = eval_far_field(sol, 32)
    ffs = oracles.disk_farfield_series(k, 0.5, 1.0, ff.theta)
    assert np.linalg.norm(ff.values - ffs) / np.linalg.norm(ffs) < 1e-8
    x = np.array([[2.0, 0.7]])
    ut = complex(np.atleast_1d(sol.eval_total_field(x))[0])
    assert abs(ut) > 0.1


def test_point_source_incident():
    k = 2.0
    inc = PointSource((3.0, 0.5), k)
    sol = solve_exterior(square(), ImpedanceSpec(SoundSoft()), inc, panels_per_edge=8, ngl=10)
    ff = eval_far_field(sol, 64)
    assert np.isfinite(ff.l2_norm())
    # incident gradient against FD
    x = np.array([[1.7, 0.3]])
    g = inc.grad(x)[0]
    h = 1e-6
    fd = np.array(
        [
            (inc.eval(x + [[h, 0]]) - inc.eval(x - [[h, 0]])) / (2 * h),
            (inc.eval(x + [[0, h]]) - inc.eval(x - [[0, h]])) / (2 * h),
        ]
    ).ravel()
    assert np.max(np.abs(g - fd)) < 1e-6


def test_energy_bound_over_admissible_family():
    # Im eta >= 0: far-field norm stays uniformly bounded at fixed k
    k = 2.0
    norms = []
    for scene in (square(), square(side=0.8, shift=(0.1, 0.1)), polygon_disk(nv=16, radius=0.6)):
        for spec in (ImpedanceSpec(ConstantPositive(1.0)), ImpedanceSpec(SoundHard())):
            sol = solve_exterior(scene, spec, PlaneWave((1, 0), k), panels_per_edge=5, ngl=8)
            norms.append(eval_far_field(sol, 64).l2_norm())
    assert max(norms) < 10.0


# ---------------- far-field arithmetic ----------------
def test_far_field_error_cases():
    th = 2 * np.pi * np.arange(64) / 64
    F = FarFieldPattern(th, np.exp(1j * th), 2.0)
    assert far_field_error(F, F) == 0.0
    c = 0.3 - 0.4j
    G = FarFieldPattern(th, F.values + c, 2.0)
    assert abs(far_field_error(F, G) - abs(c) * np.sqrt(2 * np.pi)) < 1e-12
    H = FarFieldPattern(2 * np.pi * np.arange(32) / 32, np.ones(32), 2.0)
    with pytest.raises(ValueError):
        far_field_error(F, H)


def test_far_field_error_translated_squares_positive():
    k = 2.0
    s1 = solve_exterior(square(), ImpedanceSpec(SoundSoft()), PlaneWave((1, 0), k),
                        panels_per_edge=6, ngl=8)
    s2 = solve_exterior(square(shift=(0.05 * AP.r0, 0.0)), ImpedanceSpec(SoundSoft()),
                        PlaneWave((1, 0), k), panels_per_edge=6, ngl=8)
    eps = far_field_error(eval_far_field(s1, 64), eval_far_field(s2, 64))
    assert eps > 1e-6


# ---------------- impedance regimes ----------------
def test_nowhere_analytic_surrogate_validates_and_solves():
    with pytest.raises(ValueError):
        NowhereAnalyticSurrogate(a=0.5, b=2.0)  # a*b too small
    bc = NowhereAnalyticSurrogate(eta_base=1.0, c=0.2, a=0.5, b=13.0, M=12)
    d = bc.describe()
    assert d["truncation_M"] == 12
    sol = solve_exterior(square(), ImpedanceSpec(bc), PlaneWave((1, 0), 1.5),
                         panels_per_edge=6, ngl=8)
    assert sol.diagnostics["bc_residual_smooth"] < 1e-3


def test_bounded_impedance_validation():
    bad = Bounded(lambda t: -1j * np.ones_like(t), M0=2.0)
    with pytest.raises(ValueError):
        ImpedanceSpec(bad).validate()
    ok = Bounded(lambda t: 1.0 + 0.5j * np.sin(np.pi * t), M0=2.0)
    ImpedanceSpec(ok).validate()


def test_mixed_partition_solve_self_consistency():
    # one edge half sound-soft, half impedance; check the Dirichlet piece trace
    pieces = MixedEdge([(0.0, 0.5, SoundSoft()), (0.5, 1.0, ConstantPositive(1.0))])
    spec = ImpedanceSpec(ConstantPositive(1.0), per_edge={(0, 0): pieces})
    sol = solve_exterior(square(), spec, PlaneWave((1, 0), 2.0), panels_per_edge=8, ngl=8)
    mesh = sol.mesh
    # off-node boundary points on the Dirichlet sub-edge: |u| small
    pts = np.column_stack([np.linspace(0.05, 0.42, 7), np.full(7, 0.0)])
    vals = []
    for p in pts:
        # boundary-limit evaluation via the representation
        from atdlab.forward2d.solver import panel_rowblock, kernel_S, kernel_D

        sigma_D, sigma_S = sol._rep_densities()
        acc = complex(np.atleast_1d(sol.incident.eval(p[None, :]))[0])
        for pan in mesh.panels:
            dmid = np.linalg.norm((pan.a + pan.b) / 2 - p)
            if dmid > 1.5 * pan.L:
                dd = p[None, :] - mesh.x[pan.idx]
                rr = np.linalg.norm(dd, axis=1)
                acc += np.sum(kernel_D(sol.k, dd, rr, pan.nrm) * sigma_D[pan.idx] * mesh.w[pan.idx])
                acc += np.sum(kernel_S(sol.k, dd, rr) * sigma_S[pan.idx] * mesh.w[pan.idx])
            else:
                acc += panel_rowblock(mesh, pan, p, "D", sol.k) @ sigma_D[pan.idx]
                acc += panel_rowblock(mesh, pan, p, "S", sol.k) @ sigma_S[pan.idx]
        vals.append(abs(acc))
    assert max(vals) < 5e-3


def test_regime_tags():
    assert ImpedanceSpec(SoundSoft()).regime_tag() == "soft"
    assert ImpedanceSpec(SoundHard()).regime_tag() == "hard"
    assert ImpedanceSpec(ConstantPositive(1.0)).regime_tag() == "xi4"
    assert ImpedanceSpec(NowhereAnalyticSurrogate()).regime_tag() == "xi2"
    mixed = ImpedanceSpec(
        ConstantPositive(1.0),
        per_edge={(0, 0): MixedEdge([(0, 0.5, SoundSoft()), (0.5, 1.0, ConstantPositive(1.0))])},
    )
    assert mixed.regime_tag() == "xi3"


def test_farfield_csv(tmp_path):
    th = 2 * np.pi * np.arange(8) / 8
    F = FarFieldPattern(th, np.exp(1j * th), 2.0)
    path = tmp_path / "ff.csv"
    F.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "theta,re,im"
    assert len(lines) == 9


def test_empty_scene_total_field_is_incident():
    empty = PolytopeScene(2, [], AP)
    inc = PlaneWave((1, 0), 2.0)
    sol = solve_exterior(empty, ImpedanceSpec(SoundSoft()), inc)
    pts = np.array([[0.3, -1.2], [2.0, 0.7], [0.0, 0.0]])
    got = np.atleast_1d(sol.eval_total_field(pts))
    assert np.max(np.abs(got - np.atleast_1d(inc.eval(pts)))) == 0.0
    assert eval_far_field(sol, 16).l2_norm() == 0.0


def test_interior_resonance_detected_and_guarded(monkeypatch):
    # direct sound-hard formulation degrades at interior Dirichlet
    # eigenvalues of the obstacle; k = pi sqrt(2) for the unit square
    k_res = np.pi * np.sqrt(2)
    sol = solve_exterior(square(), ImpedanceSpec(SoundHard()), PlaneWave((1, 0), k_res),
                         panels_per_edge=6, ngl=8)
    assert sol.diagnostics["condition"] > 1e9
    off = solve_exterior(square(), ImpedanceSpec(SoundHard()), PlaneWave((1, 0), 2.0),
                         panels_per_edge=6, ngl=8)
    assert off.diagnostics["condition"] < 1e3
    # the guard raises with advice once the limit is crossed
    import atdlab.forward2d.solver as solver_mod
    from atdlab.forward2d import IllConditionedError

    monkeypatch.setattr(solver_mod, "COND_LIMIT", 1e9)
    with pytest.raises(IllConditionedError, match="coupling"):
        solve_exterior(square(), ImpedanceSpec(SoundHard()), PlaneWave((1, 0), k_res),
                       panels_per_edge=6, ngl=8)
