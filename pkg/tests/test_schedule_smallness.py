import numpy as np
import pytest

from atdlab import smallness
from atdlab.atd import schedule

import oracles


# ---------------- tau schedule ----------------
def test_tau_schedule_2d_arithmetic():
    # N=0, T=1e-2, h=0.1 -> (1e-2)^-1 (0.1)^-3 = 1e5
    assert abs(schedule.tau_schedule(1e-2, 0.1, 0, 2) - 1e5) < 1e-6 * 1e5


def test_tau_schedule_3d_arithmetic():
    expect = 10 * 0.2 ** (-5 / 3)
    assert abs(schedule.tau_schedule(1e-3, 0.2, 0, 3) - expect) < 1e-9 * expect


def test_tau_schedule_near_T_one_small():
    val = schedule.tau_schedule(0.999, 0.5, 0, 2)
    assert abs(val - 0.999 ** (-1.0) * 0.5 ** (-3.0)) < 1e-9 * val
    assert val < 10  # small; flagged inadmissible downstream
    with pytest.raises(ValueError):
        schedule.tau_schedule(1.5, 0.1, 0, 2)
    with pytest.raises(ValueError):
        schedule.tau_schedule(0.1, 1.5, 0, 2)


# ---------------- relation check ----------------
def test_relation_check_trivial_zero_distance():
    v = schedule.relation_check(1.0, 0.0, 1e-3, 2, 1)
    assert v.lhs == 0.0
    assert v.ratio == 0.0


def test_relation_check_2d_exponents():
    v0 = schedule.relation_check(1.0, 0.1, 1e-3, 2, 0)
    assert v0.p == -1.0          # reported verbatim
    assert v0.p_plot == 1.0      # used for monotone plots
    v1 = schedule.relation_check(1.0, 0.1, 1e-3, 2, 1)
    assert abs(v1.p - 1.0) < 1e-15
    v2 = schedule.relation_check(1.0, 0.1, 1e-3, 2, 2)
    assert abs(v2.p - 7 / 3) < 1e-15


def test_relation_check_3d_fixed_exponent():
    v = schedule.relation_check(0.5, 0.2, 1e-3, 3, 0, alpha=0.6)
    assert abs(v.p - 4 / 3) < 1e-15
    assert abs(v.kappa0 - 0.2) < 1e-15


def test_relation_check_eps_domain():
    with pytest.raises(ValueError):
        schedule.relation_check(1.0, 0.1, 0.5, 2, 1)  # eps >= e^{-1}


def test_fit_kappa_recovers_synthetic_exponent():
    C, kappa = 2.0, 1.5
    eps = np.array([1e-3, 1e-5, 1e-8, 1e-12])
    dH = C * np.log(np.abs(np.log(1 / eps))) ** (-kappa)
    Cf, kf = schedule.fit_kappa(dH, eps)
    assert abs(Cf - C) < 1e-9
    assert abs(kf - kappa) < 1e-9


# ---------------- smallness moduli ----------------
def test_near_field_modulus_values():
    assert abs(smallness.near_field_modulus(np.exp(-4.0)) - np.exp(-2.0)) < 1e-15
    assert abs(smallness.near_field_modulus(np.exp(-100.0)) - np.exp(-10.0)) < 1e-15
    with pytest.raises(ValueError):
        smallness.near_field_modulus(0.5)


def test_boundary_modulus_values():
    assert abs(smallness.boundary_modulus(np.exp(-np.exp(2.0)), 1.0) - 0.5) < 1e-15
    v1 = smallness.boundary_modulus(np.exp(-np.exp(2.0)), 1.0)
    v2 = smallness.boundary_modulus(np.exp(-np.exp(2.0)), 2.0)
    assert abs(v2 - v1**2) < 1e-15
    with pytest.raises(ValueError):
        smallness.boundary_modulus(np.exp(-1.5), 1.0)  # above e^{-e}


def test_moduli_strictly_decreasing():
    eps = np.exp(-np.linspace(3.0, 40.0, 60))
    nf = [smallness.near_field_modulus(e) for e in eps]
    assert np.all(np.diff(nf) < 0)
    epsb = np.exp(-np.linspace(np.e + 0.2, 40.0, 60))
    bm = [smallness.boundary_modulus(e) for e in epsb]
    assert np.all(np.diff(bm) < 0)


def test_default_chain_radius_clamped():
    r = smallness.default_chain_radius(2.0, 0.5, 1e-6, alpha=0.5, h=0.4, zeta=0.2)
    assert r <= 0.1 + 1e-15  # min(h/4, zeta) = 0.1


# ---------------- three-sphere checks ----------------
def test_three_sphere_constantlike_field_beta_near_one():
    f = lambda pts: np.full(len(np.atleast_2d(pts)), 2.0 + 0.0j)
    res = smallness.three_sphere_check(f, (0.0, 0.0), 0.05, 0.1, 0.2)
    assert res.beta_witness > 0.999
    assert res.ok


def test_three_sphere_point_source_triples():
    import scipy.special as sp

    k = 2.0
    z = np.array([2.5, 1.0])
    f = lambda pts: sp.hankel1(0, k * np.linalg.norm(np.atleast_2d(pts) - z, axis=1))
    rng = np.random.default_rng(0)
    for _ in range(20):
        c = rng.uniform(-0.6, 0.6, size=2)
        r3 = rng.uniform(0.2, 0.5)
        res = smallness.three_sphere_check(f, c, r3 / 4, r3 / 2, r3, C=10.0)
        assert 0 < res.beta_witness < 1
        assert res.ok


def test_three_sphere_bad_radii_and_uc_violation():
    f = lambda pts: np.ones(len(np.atleast_2d(pts)), dtype=complex)
    with pytest.raises(ValueError):
        smallness.three_sphere_check(f, (0, 0), 0.2, 0.2, 0.1)

    def cheat(pts):
        pts = np.atleast_2d(pts)
        r = np.hypot(pts[:, 0], pts[:, 1])
        return np.where(r < 0.06, 0.0, 1.0).astype(complex)

    with pytest.raises(ValueError):
        smallness.three_sphere_check(cheat, (0, 0), 0.05, 0.1, 0.2)


def test_three_sphere_random_wave_superpositions():
    rng = np.random.default_rng(1)
    k = 2.0
    for trial in range(30):
        m = rng.integers(1, 9)
        f = oracles.PlaneWaveSum(k, rng.uniform(0, 2 * np.pi, m),
                                 amps=rng.normal(size=m) + 1j * rng.normal(size=m))
        c = rng.uniform(-1, 1, size=2)
        r3 = rng.uniform(0.1, 0.5)
        res = smallness.three_sphere_check(f, c, r3 / 4, r3 / 2, r3, C=10.0, seed=trial)
        assert 0 < res.beta_witness < 1
        assert res.ok


# ---------------- chain propagation ----------------
def test_chain_zero_field():
    f = lambda pts: np.zeros(len(np.atleast_2d(pts)), dtype=complex)
    path = np.array([[0.0, 0.0], [1.0, 0.0]])
    res = smallness.chain_propagation(f, path, 0.2, start_bound=0.0)
    assert res.measured_end == 0.0
    assert res.end_bound == 0.0
    assert res.dominates


def test_chain_link_count_scaling():
    f = lambda pts: np.ones(len(np.atleast_2d(pts)), dtype=complex)
    path = np.array([[0.0, 0.0], [2.0, 0.0]])
    r1 = smallness.chain_propagation(f, path, 0.4, start_bound=1.0)
    r2 = smallness.chain_propagation(f, path, 0.2, start_bound=1.0)
    assert abs(r2.n_links - 2 * r1.n_links) <= 1


def test_chain_bound_dominates_measured():
    k = 1.5
    f = oracles.PlaneWaveSum(k, [0.3, 1.2], amps=[1.0, 0.5])
    path = np.array([[0.0, 0.0], [0.8, 0.4], [1.5, 0.2]])
    start = smallness._sup_on_ball(f, np.array([0.0, 0.0]), 0.05, 2048,
                                   np.random.default_rng(0))
    res = smallness.chain_propagation(f, path, 0.2, start_bound=start * 1.01)
    assert res.dominates


def test_chain_bound_monotone_in_start_bound():
    f = oracles.PlaneWaveSum(1.0, [0.5])
    path = np.array([[0.0, 0.0], [1.0, 0.0]])
    r_small = smallness.chain_propagation(f, path, 0.3, start_bound=1.0)
    r_big = smallness.chain_propagation(f, path, 0.3, start_bound=2.0)
    assert r_big.end_bound >= r_small.end_bound


def test_budget_serialization():
    b = smallness.SmallnessBudget(eps=1e-4, beta=0.6, E_bound=3.0)
    d = b.as_dict()
    assert d["provenance"]["beta"] == "config"
    assert d["eps1"] == pytest.approx(smallness.near_field_modulus(1e-4))
    assert 0 < d["T"] < 1


def test_tau_admissibility_gate():
    from atdlab.atd.schedule import tau_admissible, tau_schedule

    tau = tau_schedule(0.999, 0.5, 0, 2)  # near-degenerate: small tau
    assert not tau_admissible(tau, k=9.0)
    assert tau_admissible(tau_schedule(1e-2, 0.1, 0, 2), k=2.0)


def test_boundary_error_measure_identical_and_shrinking():
    import numpy as np
    from atdlab.geometry import AprioriParams, PolytopeScene, build_atd_2d, modified_distance
    from atdlab.forward2d import ImpedanceSpec, PlaneWave, SoundSoft, solve_exterior
    from atdlab.harness.sweep import perturb_scene
    from atdlab.smallness import boundary_error_measure

    ap = AprioriParams(R0=5.0, r0=0.03, L0=2.0, theta0=np.pi / 8)
    sq = PolytopeScene(2, [np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)], ap)
    spec, inc = ImpedanceSpec(SoundSoft()), PlaneWave((1, 0), 2.0)
    sol = solve_exterior(sq, spec, inc, panels_per_edge=5, ngl=8)

    sups = []
    for delta in (0.08, 0.04):
        pert = perturb_scene(sq, {"type": "edge_bump", "edge": 0, "width_frac": 0.4}, delta)
        solp = solve_exterior(pert, spec, inc, panels_per_edge=5, ngl=8)
        w = modified_distance(sq, pert)
        fr = build_atd_2d(sq, pert, w, c2=0.5, theta0=np.pi / 2)
        m = boundary_error_measure(sol, solp, fr, n_samples=24)
        sups.append((m["sup_w"], m["sup_grad_w"]))
        # identical solutions on the same frame: noise floor
        m0 = boundary_error_measure(sol, sol, fr, n_samples=8)
        assert m0["sup_w"] < 1e-10
        assert m0["sup_grad_w"] < 1e-6
    assert sups[1][0] < sups[0][0]  # smaller perturbation, smaller boundary error


def test_complexvalue_carrier():
    from atdlab.specfun import ComplexValue

    z = ComplexValue(3 + 4j)
    assert z.re == 3.0 and z.im == 4.0
    assert z.magnitude == 5.0
    assert abs(z.phase - np.arctan2(4, 3)) < 1e-15
