import json

import numpy as np
import pytest

from atdlab import geometry
from atdlab.geometry import (
    AprioriParams,
    PolytopeScene,
    RigidFrame,
    build_atd_2d,
    build_atd_3d,
    exterior_decomposition,
    hausdorff_distance,
    boundary_hausdorff,
    load_scene,
    modified_distance,
    save_scene,
    validate_admissible,
    visibility_path,
)
from atdlab.geometry.frames import FrameError
from atdlab.geometry.paths import NoPathError


AP = AprioriParams(R0=5.0, r0=0.5, L0=2.0, theta0=np.pi / 6)


def unit_square(shift=(0.0, 0.0), side=1.0, ap=AP):
    s = np.asarray(shift, dtype=float)
    v = np.array([[0, 0], [side, 0], [side, side], [0, side]], float) + s
    return PolytopeScene(2, [v], ap)


def cube(shift=(0, 0, 0), side=1.0, ap=AP):
    s = np.asarray(shift, dtype=float)
    v = (
        np.array(
            [
                [0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
                [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1],
            ],
            float,
        )
        * side
        + s
    )
    # outward-oriented faces
    f = [
        [0, 3, 2, 1],  # bottom, normal -z
        [4, 5, 6, 7],  # top, +z
        [0, 1, 5, 4],  # front, -y
        [2, 3, 7, 6],  # back, +y
        [1, 2, 6, 5],  # right, +x
        [0, 4, 7, 3],  # left, -x
    ]
    return PolytopeScene(3, [{"vertices": v, "faces": f}], ap)


# ---------------- frames / rigid motions ----------------
def test_rigid_frame_roundtrip_and_isometry():
    rng = np.random.default_rng(0)
    th = 0.7
    R = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    fr = RigidFrame(R, np.array([0.3, -1.2]))
    pts = rng.normal(size=(50, 2))
    back = fr.invert(fr.apply(pts))
    assert np.max(np.abs(back - pts)) < 1e-12
    d_before = np.linalg.norm(pts[:-1] - pts[1:], axis=1)
    moved = fr.apply(pts)
    d_after = np.linalg.norm(moved[:-1] - moved[1:], axis=1)
    assert np.max(np.abs(d_before - d_after)) < 1e-12
    with pytest.raises(ValueError):
        RigidFrame(np.array([[1.0, 0.0], [0.0, -1.0]]), np.zeros(2))  # det = -1


# ---------------- admissibility ----------------
def test_admissible_unit_square_passes():
    rep = validate_admissible(unit_square())
    assert rep.passed, rep.failures()


def test_edge_size_failure():
    ap = AprioriParams(R0=5.0, r0=2.0, L0=2.0, theta0=np.pi / 6)
    rep = validate_admissible(unit_square(ap=ap), check_cone=False)
    names = {it.name: it.passed for it in rep.items}
    assert not names["edge_size"]


def test_reflex_angle_L_shape_passes_angle_item():
    # L-shaped hexagon with a 3pi/2 reflex angle at (1,1)
    v = np.array([[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]], float)
    scene = PolytopeScene(2, [v], AP)
    rep = validate_admissible(scene, check_cone=False)
    names = {it.name: it.passed for it in rep.items}
    assert names["vertex_angles"]  # 3pi/2 lies in (pi+theta0, 2pi-theta0)


def test_containment_failure():
    ap = AprioriParams(R0=0.5, r0=0.1, L0=2.0, theta0=np.pi / 6)
    rep = validate_admissible(unit_square(ap=ap), check_cone=False)
    names = {it.name: it.passed for it in rep.items}
    assert not names["containment_in_B_R0"]


def test_cube_admissible():
    ap = AprioriParams(R0=5.0, r0=0.4, L0=2.0, theta0=np.pi / 6)
    rep = validate_admissible(cube(ap=ap), check_cone=False)
    assert rep.passed, rep.failures()


def test_scene_json_roundtrip(tmp_path):
    sc = unit_square()
    path = tmp_path / "scene.json"
    save_scene(sc, path)
    sc2 = load_scene(path)
    assert sc2.dimension == 2
    assert np.allclose(sc2.components[0], sc.components[0])
    assert sc2.apriori.r0 == AP.r0
    data = json.loads(path.read_text())
    assert set(data) == {"dimension", "components", "apriori"}


# ---------------- distances ----------------
def test_hausdorff_identical_zero():
    A = unit_square()
    assert hausdorff_distance(A, A) == 0.0


def test_hausdorff_translated_square():
    A = unit_square()
    B = unit_square(shift=(0.3, 0.0))
    assert abs(hausdorff_distance(A, B) - 0.3) < 1e-9


def test_hausdorff_scaled_square_sampling_oracle():
    # square scaled about its center: oracle decides the exact value
    A = unit_square()
    delta = 0.1
    B = A.scaled(1 + 2 * delta, about=(0.5, 0.5))
    got = hausdorff_distance(A, B)
    # brute-force point-sampling oracle
    rng = np.random.default_rng(0)
    pts = rng.uniform(-0.2, 1.2, size=(20000, 2))
    insideA = A.contains_points(pts)
    insideB = B.contains_points(pts)
    dA = B.distance_to(pts[insideA]).max()
    dB = A.distance_to(pts[insideB]).max()
    oracle = max(dA, dB)
    assert got >= oracle - 1e-3
    assert abs(got - oracle) < 5e-3


def test_exterior_decomposition_disjoint_all_visible():
    A = unit_square()
    B = unit_square(shift=(3.0, 0.0))
    deco = exterior_decomposition(A, B)
    assert deco.visible_fraction("A") == 1.0
    assert deco.visible_fraction("B") == 1.0


def test_exterior_decomposition_nested_hidden():
    ap = AprioriParams(R0=5.0, r0=0.05, L0=2.0, theta0=np.pi / 6)
    A = unit_square(shift=(0.4, 0.4), side=0.2, ap=ap)  # strictly inside B
    B = unit_square(ap=ap)
    deco = exterior_decomposition(A, B)
    assert deco.visible_fraction("A") == 0.0


def test_exterior_decomposition_plus_sign_lens_hidden():
    # two overlapping rectangles forming a plus sign: the lens edges are hidden
    ap = AprioriParams(R0=5.0, r0=0.05, L0=2.0, theta0=np.pi / 6)
    va = np.array([[-1.5, -0.5], [1.5, -0.5], [1.5, 0.5], [-1.5, 0.5]], float)
    vb = np.array([[-0.5, -1.5], [0.5, -1.5], [0.5, 1.5], [-0.5, 1.5]], float)
    A = PolytopeScene(2, [va], ap)
    B = PolytopeScene(2, [vb], ap)
    deco = exterior_decomposition(A, B, samples_per_edge=128)
    assert deco.degenerate_overlap is False
    assert 0.0 < deco.visible_fraction("A") < 1.0
    # the portion of A's boundary inside B (|x| < 0.5 band) is hidden
    hidden_len = sum(
        (t1 - t0) for _, _, t0, t1, vis in deco.labels_A if not vis
    )
    assert hidden_len > 0.2


def test_modified_distance_identical_zero():
    A = unit_square()
    w = modified_distance(A, A)
    assert w.value == 0.0


def test_modified_distance_translated_equals_hausdorff():
    A = unit_square()
    B = unit_square(shift=(0.3, 0.0))
    w = modified_distance(A, B)
    assert abs(w.value - 0.3) < 1e-9
    # witness ball clearance
    assert (
        (B if w.side == "A" else A).distance_to(np.asarray(w.point)[None, :])[0]
        >= w.value - 1e-9
    )


def test_modified_vs_boundary_hausdorff_ordering_random():
    rng = np.random.default_rng(1)
    ap = AprioriParams(R0=20.0, r0=0.05, L0=2.0, theta0=np.pi / 8)
    for trial in range(50):
        A = unit_square(ap=ap)
        mode = trial % 3
        if mode == 0:
            B = unit_square(shift=rng.uniform(-0.4, 0.4, size=2), ap=ap)
        elif mode == 1:
            B = A.scaled(rng.uniform(0.7, 1.3), about=(0.5, 0.5))
        else:
            B = A.translated(rng.uniform(1.2, 2.0, size=2)).scaled(
                rng.uniform(0.8, 1.2), about=(1.5, 1.5)
            )
        d_mod = modified_distance(A, B).value
        d_bdy = boundary_hausdorff(A, B)
        assert d_mod <= d_bdy * (1 + 1e-6) + 1e-9


def test_modified_distance_symmetry():
    A = unit_square()
    B = unit_square(shift=(0.25, 0.1))
    assert abs(modified_distance(A, B).value - modified_distance(B, A).value) < 1e-9


# ---------------- 3D distances ----------------
def test_hausdorff_cubes_translated():
    A = cube()
    B = cube(shift=(0.25, 0, 0))
    assert abs(hausdorff_distance(A, B) - 0.25) < 0.02


def test_modified_distance_cube_shrunk():
    A = cube()
    B = cube(shift=(0.15, 0.15, 0.15), side=0.7)  # strictly inside A
    w = modified_distance(A, B, samples_per_edge=128)
    assert w.side == "A"
    assert 0.1 < w.value < 0.3


# ---------------- visibility paths ----------------
def test_visibility_path_around_convex_obstacle():
    A = unit_square()
    B = unit_square(shift=(0.2, 0.2), side=0.6)
    w = modified_distance(A, B)
    start = np.array([-1.5, 0.5])
    poly = visibility_path(A, B, start, w, clearance=0.05)
    assert np.allclose(poly[0], start)
    # tube clearance verified inside the routine; endpoints exterior
    assert not A.contains_points(poly).any()


def test_visibility_path_straight_in_free_space():
    ap = AprioriParams(R0=50.0, r0=0.5, L0=2.0, theta0=np.pi / 6)
    A = unit_square(ap=ap)
    B = unit_square(shift=(0.2, 0.2), side=0.6, ap=ap)
    w = modified_distance(A, B)
    start = np.asarray(w.point) + np.array([0.0, -2.0])
    poly = visibility_path(A, B, start, w, clearance=0.05)
    assert len(poly) >= 2


def test_visibility_path_infeasible_clearance():
    # start trapped inside a U cavity whose mouth is narrower than the
    # requested clearance: no path exists, error carries the feasible value
    ap = AprioriParams(R0=20.0, r0=0.2, L0=2.0, theta0=np.pi / 6)
    # solid square with a wide interior chamber reachable only through a
    # neck of width 0.9 < 2 * clearance
    u_shape = np.array(
        [
            [0, 0], [3, 0], [3, 3], [1.95, 3], [1.95, 2.2], [2.4, 2.2],
            [2.4, 0.7], [0.6, 0.7], [0.6, 2.2], [1.05, 2.2], [1.05, 3], [0, 3],
        ],
        float,
    )
    A = PolytopeScene(2, [u_shape], ap)
    B = unit_square(shift=(6.0, 0.0), ap=ap)
    w = geometry.DistanceWitness(
        value=2.0, point=np.array([6.0, 0.5]), side="B", clearance_ball_radius=2.0,
        component=0, edge_or_face=3,
    )
    start = np.array([1.5, 1.45])  # chamber interior, 0.75 from the walls
    with pytest.raises(NoPathError) as exc:
        visibility_path(A, B, start, w, clearance=0.5, grid_n=200)
    assert exc.value.max_feasible < 0.5


# ---------------- ATD frames ----------------
def test_build_atd_2d_mid_edge():
    A = unit_square()
    B = unit_square(shift=(0.25, 0.25), side=0.5)  # inside A
    w = modified_distance(A, B)
    fr = build_atd_2d(A, B, w, c2=0.5, theta0=np.pi / 2)
    assert abs(fr.h - 0.5 * w.value) < 1e-12
    # I1 maps onto the hosting edge, interior of the anchor on +x2 side
    host = A if w.side == "A" else B
    probe_local = np.array([[fr.h / 2, fr.h / 4]])
    assert host.contains_points(fr.to_world(probe_local))[0]


def test_build_atd_2d_vertex_margin_slides():
    ap = AprioriParams(R0=10.0, r0=0.05, L0=2.0, theta0=np.pi / 6)
    A = unit_square(ap=ap)
    B = unit_square(shift=(0.3, 0.45), side=0.1, ap=ap)
    w = modified_distance(A, B)
    # force a witness near a vertex of the hosting edge
    w.point = np.array([0.02, 0.0])
    w.component, w.edge_or_face, w.side = 0, 0, "A"
    fr = build_atd_2d(A, B, w, c2=0.5, theta0=np.pi / 2)
    t = fr.anchor_world[0]
    assert t >= fr.h - 1e-12  # slid inward


def test_build_atd_2d_edge_too_short():
    ap = AprioriParams(R0=10.0, r0=0.01, L0=2.0, theta0=np.pi / 6)
    A = unit_square(ap=ap)
    B = unit_square(shift=(4.0, 0.0), ap=ap)
    w = geometry.DistanceWitness(
        value=3.0, point=np.array([0.5, 0.0]), side="A",
        clearance_ball_radius=3.0, component=0, edge_or_face=0,
    )
    with pytest.raises(FrameError):
        build_atd_2d(A, B, w, c2=0.9, theta0=np.pi / 2)  # h=2.7 > edge


def test_build_atd_3d_face_center():
    ap = AprioriParams(R0=10.0, r0=0.2, L0=2.0, theta0=np.pi / 6)
    A = cube(ap=ap)
    B = cube(shift=(0.25, 0.25, 0.25), side=0.5, ap=ap)
    w = modified_distance(A, B, samples_per_edge=96)
    fr = build_atd_3d(A, B, w, c1=0.5, phi0=np.pi / 2)
    assert abs(fr.nu3 @ np.array([-1.0, 0.0, 0.0]) - np.sin(fr.phi0)) < 1e-12
    # interior of the anchor scene on +e3 side
    host = A if w.side == "A" else B
    probe = fr.to_world(np.array([[fr.h / 3, fr.h / 4, fr.h / 3]]))
    assert host.contains_points(probe)[0]


def test_nu3_formula():
    ap = AprioriParams(R0=10.0, r0=0.2, L0=2.0, theta0=np.pi / 6)
    A = cube(ap=ap)
    B = cube(shift=(0.25, 0.25, 0.25), side=0.5, ap=ap)
    w = modified_distance(A, B, samples_per_edge=96)
    fr = build_atd_3d(A, B, w, c1=0.5, phi0=np.pi / 3)
    assert np.allclose(fr.nu3, [-np.sqrt(3) / 2, 0.5, 0.0], atol=1e-12)


def test_build_atd_3d_margin_error():
    ap = AprioriParams(R0=10.0, r0=0.2, L0=2.0, theta0=np.pi / 6)
    A = cube(ap=ap)
    B = cube(shift=(4.0, 0, 0), ap=ap)
    w = geometry.DistanceWitness(
        value=3.0, point=np.array([0.5, 0.5, 0.0]), side="A",
        clearance_ball_radius=3.0, component=0, edge_or_face=0,
    )
    with pytest.raises(FrameError):
        build_atd_3d(A, B, w, c1=0.9, phi0=np.pi / 2)  # h=2.7 > face inradius


def test_hausdorff_3d_resolution_tag():
    A = cube()
    B = cube(shift=(0.25, 0, 0))
    val, info = hausdorff_distance(A, B, return_info=True)
    assert abs(val - 0.25) < info["error_bound"] + 0.02
    assert info["resolution"] > 0
