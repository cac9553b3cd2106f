"""Command-line entry point.

Subcommands: validate-geometry, forward, farfield-diff, atd-extract,
degeneracy-probe, hyperplane-check, stability-sweep, report. Each reads a
JSON config and writes CSV/JSON/SVG artifacts into --outdir.

Exit codes: 0 success, 2 validation failure, 3 numerical-quality failure,
64 unknown subcommand, 65 malformed config.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_QUALITY = 3
EXIT_UNKNOWN = 64
EXIT_BADCONFIG = 65


def _outdir(args) -> str:
    out = getattr(args, "outdir", None) or "."
    os.makedirs(out, exist_ok=True)
    return out


def cmd_validate_geometry(args) -> int:
    from ..geometry import load_scene, validate_admissible
    from .config import ConfigError

    try:
        scene = load_scene(args.scene)
    except (OSError, ValueError, KeyError) as e:
        print(f"malformed scene: {e}", file=sys.stderr)
        return EXIT_BADCONFIG
    report = validate_admissible(scene, check_cone=not args.skip_cone)
    out = os.path.join(_outdir(args), "admissibility.json")
    with open(out, "w") as fh:
        json.dump(report.as_dict(), fh, indent=2)
    for item in report.items:
        print(f"[{'pass' if item.passed else 'FAIL'}] {item.name} {item.detail}")
    print(f"report -> {out}")
    return EXIT_OK if report.passed else EXIT_VALIDATION


def _solve_from_config(cfg):
    from .config import build_impedance, build_incident, build_scene
    from ..forward2d import solve_circle, solve_exterior

    spec = build_impedance(cfg.get("impedance"))
    inc = build_incident(cfg["incident"])
    mesh = cfg.get("mesh", {})
    if "circle" in cfg:
        c = cfg["circle"]
        sol = solve_circle(
            c.get("center", [0.0, 0.0]), float(c["radius"]), spec, inc,
            n=int(mesh.get("n", 192)),
        )
        return sol, None
    from .config import build_scene as _bs

    scene = _bs(cfg)
    sol = solve_exterior(
        scene, spec, inc,
        panels_per_edge=int(mesh.get("panels_per_edge", 10)),
        grading_q=float(mesh.get("grading", 3.0)),
        ngl=int(mesh.get("ngl", 10)),
    )
    return sol, scene


def cmd_forward(args) -> int:
    from .config import ConfigError, load_config
    from ..forward2d import eval_far_field
    from .plots import plot_farfield

    try:
        cfg = load_config(args.config)
        sol, _ = _solve_from_config(cfg)
    except ConfigError as e:
        print(str(e), file=sys.stderr)
        return EXIT_BADCONFIG
    except (ValueError, KeyError) as e:
        print(f"bad config: {e}", file=sys.stderr)
        return EXIT_BADCONFIG

    out = _outdir(args)
    n_dirs = int(cfg.get("farfield", {}).get("n_dirs", 128))
    ff = eval_far_field(sol, n_dirs)
    ff.to_csv(os.path.join(out, "farfield.csv"))
    with open(os.path.join(out, "forward_report.json"), "w") as fh:
        json.dump(
            {
                "k": sol.k,
                "formulation": sol.formulation,
                "n_dofs": int(sol.mesh.n),
                "farfield_l2": ff.l2_norm(),
                "diagnostics": {
                    k_: v
                    for k_, v in sol.diagnostics.items()
                    if isinstance(v, (int, float, str))
                },
                "impedance": sol.spec.describe() if sol.spec else None,
            },
            fh,
            indent=2,
        )
    plot_farfield(ff, os.path.join(out, "farfield.svg"))
    print(f"far field -> {out}/farfield.csv (+ .svg), report -> forward_report.json")
    bc = sol.diagnostics.get("bc_residual_corner", 0.0)
    if bc and bc > 5e-2:
        print(f"numerical quality: corner residual {bc:.2e}", file=sys.stderr)
        return EXIT_QUALITY
    return EXIT_OK


def cmd_farfield_diff(args) -> int:
    from .config import ConfigError, load_config
    from ..forward2d import eval_far_field, far_field_error

    try:
        cfg_a = load_config(args.config_a)
        cfg_b = load_config(args.config_b)
        sol_a, _ = _solve_from_config(cfg_a)
        sol_b, _ = _solve_from_config(cfg_b)
    except ConfigError as e:
        print(str(e), file=sys.stderr)
        return EXIT_BADCONFIG
    n = int(cfg_a.get("farfield", {}).get("n_dirs", 128))
    eps = far_field_error(eval_far_field(sol_a, n), eval_far_field(sol_b, n))
    out = os.path.join(_outdir(args), "farfield_diff.json")
    with open(out, "w") as fh:
        json.dump({"eps": eps, "n_dirs": n}, fh, indent=2)
    print(f"eps = {eps:.12g} -> {out}")
    return EXIT_OK


def cmd_atd_extract(args) -> int:
    from .config import ConfigError, build_impedance, build_incident, load_config
    from ..atd.ladder import degeneracy_probe
    from ..atd.report import AtdReport
    from ..atd.schedule import relation_check
    from ..atd.twod import leading_coeff_2d
    from ..forward2d import eval_far_field, far_field_error, solve_exterior
    from ..geometry import build_atd_2d, hausdorff_distance, load_scene, modified_distance
    from ..localexp import fourier_bessel_coeffs, vanishing_order
    from .plots import plot_tau_sweep

    try:
        cfg = load_config(args.config)
        scene_a = load_scene(cfg["scene_file"])
        scene_b = load_scene(cfg["scene_file_prime"])
        spec = build_impedance(cfg.get("impedance"))
        inc = build_incident(cfg["incident"])
    except (ConfigError, KeyError, ValueError) as e:
        print(f"bad config: {e}", file=sys.stderr)
        return EXIT_BADCONFIG

    mesh = cfg.get("mesh", {})
    atd_cfg = cfg.get("atd", {})
    sol_a = solve_exterior(scene_a, spec, inc, panels_per_edge=int(mesh.get("panels_per_edge", 8)), ngl=int(mesh.get("ngl", 8)))
    sol_b = solve_exterior(scene_b, spec, inc, panels_per_edge=int(mesh.get("panels_per_edge", 8)), ngl=int(mesh.get("ngl", 8)))
    witness = modified_distance(scene_a, scene_b)
    if witness.value <= 0:
        print("scenes coincide; nothing to extract", file=sys.stderr)
        return EXIT_VALIDATION
    frame = build_atd_2d(scene_a, scene_b, witness, c2=float(atd_cfg.get("c2", 0.5)), theta0=float(atd_cfg.get("theta0", np.pi / 2)))
    other = sol_b if witness.side == "A" else sol_a
    rho0 = 0.9 * witness.value
    exp = fourier_bessel_coeffs(
        lambda q: other.eval_total_field(frame.to_world(q)),
        (0.0, 0.0), inc.k, np.array([0.3, 0.5, 0.7]) * rho0,
        int(atd_cfg.get("n_max", 4)), rho0=rho0,
    )
    N = vanishing_order(exp)
    regime = spec.regime_tag()
    C_A = leading_coeff_2d(exp.a[N], exp.b[N], inc.k, N, regime="soft" if regime == "soft" else "impedance")
    ladder_regime = {"soft": "dirichlet", "hard": "neumann"}.get(regime, "robin")
    probe = degeneracy_probe(exp, atd_cfg.get("eta0", 0.0), ladder_regime)
    eps = far_field_error(eval_far_field(sol_a, 64), eval_far_field(sol_b, 64))
    rel = relation_check(
        C_A, hausdorff_distance(scene_a, scene_b), eps, 2, N,
        eps_m=float(atd_cfg.get("eps_m", 5e-2)),
    )

    # tau sweep of the closed-form ray functional on admissible directions
    from ..atd.twod import ray_lhs_2d
    from ..cgo import DualDirectionSet, make_cgo

    psi = DualDirectionSet(2, frame.theta0).midpoint()
    taus = np.geomspace(max(2.0, inc.k), 200 * max(1.0, inc.k), 24)
    sweep_vals = [(float(t), ray_lhs_2d(exp, frame, make_cgo(t, inc.k, psi), N=N)) for t in taus]

    report = AtdReport(
        regime=regime,
        anchor_world=list(frame.anchor_world),
        h=frame.h,
        opening_angle=frame.theta0,
        N=N,
        C_A=C_A,
        ladder=probe,
        relation=rel,
        tau_window=[float(taus[0]), float(taus[-1])],
        tau_sweep=sweep_vals,
        extras={"eps": eps, "witness_side": witness.side, "d_modified": witness.value},
    )
    out = _outdir(args)
    report.to_json(os.path.join(out, "atd_report.json"))
    report.tau_sweep_to_csv(os.path.join(out, "atd_tau_sweep.csv"))
    plot_tau_sweep(taus, [v for _, v in sweep_vals], os.path.join(out, "atd_tau_sweep.svg"))
    print(
        f"N={N}  |C_A|={C_A:.6g}  ladder={probe.verdict}  "
        f"-> {out}/atd_report.json (+ atd_tau_sweep.csv/.svg)"
    )
    return EXIT_OK


def cmd_degeneracy_probe(args) -> int:
    from .config import ConfigError, load_config
    from ..atd.ladder import degeneracy_probe
    from ..localexp import fourier_bessel_coeffs
    from .fields import synthetic_field

    try:
        cfg = load_config(args.config)
        field, k = synthetic_field(cfg["field"])
    except (ConfigError, KeyError, ValueError) as e:
        print(f"bad config: {e}", file=sys.stderr)
        return EXIT_BADCONFIG
    anchor = np.asarray(cfg.get("anchor", [0.0, 0.0]), dtype=float)
    radii = np.asarray(cfg.get("radii", [0.3, 0.5, 0.7]), dtype=float)
    exp = fourier_bessel_coeffs(field, anchor, k, radii, int(cfg.get("n_max", 8)))
    res = degeneracy_probe(
        exp,
        complex(cfg.get("eta0", 0.0)),
        cfg.get("regime", "robin"),
        max_stage=int(cfg.get("max_stage", 6)),
        tol=float(cfg.get("tol", 1e-8)),
    )
    out = os.path.join(_outdir(args), "ladder.json")
    with open(out, "w") as fh:
        json.dump(res.as_dict(), fh, indent=2)
    print(f"verdict: {res.verdict} (N={res.N}, stages={res.magnitudes}) -> {out}")
    return EXIT_OK


def cmd_hyperplane_check(args) -> int:
    from .config import ConfigError, load_config
    from ..atd.ladder import SubspaceLine, hyperplane_witness
    from .fields import synthetic_field

    try:
        cfg = load_config(args.config)
        field, k = synthetic_field(cfg["field"])
        line = cfg["line"]
    except (ConfigError, KeyError, ValueError) as e:
        print(f"bad config: {e}", file=sys.stderr)
        return EXIT_BADCONFIG
    sub = SubspaceLine(
        np.asarray(line["point"], dtype=float),
        np.asarray(line["direction"], dtype=float),
        dimension=len(line["point"]),
    )
    res = hyperplane_witness(
        field, sub, cfg.get("regime", "dirichlet"),
        eta=complex(cfg.get("eta", 0.0)),
        samples=int(cfg.get("samples", 64)),
        half_width=float(cfg.get("half_width", 1.0)),
    )
    out = os.path.join(_outdir(args), "hyperplane.json")
    with open(out, "w") as fh:
        json.dump(res, fh, indent=2)
    print(f"residual = {res['residual']:.3e} -> {res['verdict']} -> {out}")
    return EXIT_OK


def cmd_stability_sweep(args) -> int:
    from .config import ConfigError, build_impedance, build_incident, build_scene, load_config
    from .records import write_sweep_csv
    from .sweep import TheoryViolationError, stability_sweep
    from .plots import plot_sweep

    try:
        cfg = load_config(args.config)
        scene = build_scene(cfg)
        spec = build_impedance(cfg.get("impedance"))
        inc = build_incident(cfg["incident"])
        family = cfg["family"]
        levels = family["levels"]
    except (ConfigError, KeyError, ValueError) as e:
        print(f"bad config: {e}", file=sys.stderr)
        return EXIT_BADCONFIG

    try:
        result = stability_sweep(
            scene, spec, inc, family, levels,
            mesh_cfg=cfg.get("mesh"),
            atd_cfg=cfg.get("atd"),
            n_dirs=int(cfg.get("farfield", {}).get("n_dirs", 64)),
            seed=int(cfg.get("seed", 0)),
            noise_floor=float(cfg.get("noise_floor", 1e-9)),
            config_echo=cfg,
        )
    except TheoryViolationError as e:
        print(f"theory-violation alarm: {e}", file=sys.stderr)
        return EXIT_QUALITY

    out = _outdir(args)
    write_sweep_csv(result.records, os.path.join(out, "sweep.csv"))
    with open(os.path.join(out, "sweep.json"), "w") as fh:
        json.dump(result.as_dict(), fh, indent=2)
    plot_sweep(result, os.path.join(out, "sweep.svg"))
    print(
        f"{len(result.records)} levels, kappa_fit={result.kappa_fit:.4f}, "
        f"C_relation={result.C_relation:.4g} -> {out}/sweep.{{csv,json,svg}}"
    )
    return EXIT_OK


def cmd_report(args) -> int:
    from .plots import plot_sweep
    from .records import SweepRecord
    from .sweep import SweepResult

    try:
        with open(args.sweep_json) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        print(f"cannot read sweep json: {e}", file=sys.stderr)
        return EXIT_BADCONFIG
    recs = []
    for r in doc["records"]:
        recs.append(
            SweepRecord(
                level=int(r["level"]),
                delta=float(r["delta"]),
                regime=r["regime"],
                eps=float(r["eps"]),
                d_hausdorff=float(r["d_hausdorff"]),
                d_modified=float(r["d_modified"]),
                d_boundary=float(r["d_boundary"]),
                N=int(r["N"]),
                abs_C_A=float(r["abs_C_A"]),
                T_eps=float(r["T_eps"]),
                relation_lhs=float(r["relation_lhs"]),
                relation_rhs=float(r["relation_rhs"]),
                ladder_stage=None if r["ladder_stage"] in ("", None) else int(r["ladder_stage"]),
                ladder_verdict=r["ladder_verdict"],
                included_in_fit=bool(int(r["included_in_fit"])),
                seed=int(r["seed"]),
            )
        )
    result = SweepResult(
        records=recs,
        kappa_fit=float(doc["kappa_fit"]),
        C_kappa_fit=float(doc["C_kappa_fit"]),
        C_relation=float(doc["C_relation"]),
        regime=doc["regime"],
        seed=int(doc["seed"]),
    )
    out = _outdir(args)
    plot_sweep(result, os.path.join(out, "sweep_report.svg"))
    print("level  delta       eps          d_H         |C_A|      verdict")
    for r in recs:
        print(
            f"{r.level:>5}  {r.delta:<10.4g} {r.eps:<12.5g} {r.d_hausdorff:<11.5g} "
            f"{r.abs_C_A:<10.4g} {r.ladder_verdict}"
        )
    print(f"kappa = {result.kappa_fit:.4f}, fitted C = {result.C_relation:.4g}")
    print(f"figure -> {out}/sweep_report.svg")
    return EXIT_OK


COMMANDS = {
    "validate-geometry": cmd_validate_geometry,
    "forward": cmd_forward,
    "farfield-diff": cmd_farfield_diff,
    "atd-extract": cmd_atd_extract,
    "degeneracy-probe": cmd_degeneracy_probe,
    "hyperplane-check": cmd_hyperplane_check,
    "stability-sweep": cmd_stability_sweep,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="atdlab", description=__doc__)
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("validate-geometry", help="check a scene against its a-priori class")
    p.add_argument("scene")
    p.add_argument("--outdir", default=".")
    p.add_argument("--skip-cone", action="store_true", help="skip the sampled cone condition")

    p = sub.add_parser("forward", help="forward solve; far field to CSV + SVG")
    p.add_argument("config")
    p.add_argument("--outdir", default=".")

    p = sub.add_parser("farfield-diff", help="L2 far-field error between two configs")
    p.add_argument("config_a")
    p.add_argument("config_b")
    p.add_argument("--outdir", default=".")

    p = sub.add_parser("atd-extract", help="test-domain extraction for a scene pair")
    p.add_argument("config")
    p.add_argument("--outdir", default=".")

    p = sub.add_parser("degeneracy-probe", help="obstruction ladder of a synthetic field")
    p.add_argument("config")
    p.add_argument("--outdir", default=".")

    p = sub.add_parser("hyperplane-check", help="hyperplane relation residual on a line")
    p.add_argument("config")
    p.add_argument("--outdir", default=".")

    p = sub.add_parser("stability-sweep", help="perturbation sweep with fits and figures")
    p.add_argument("config")
    p.add_argument("--outdir", default=".")

    p = sub.add_parser("report", help="re-render figures and a table from sweep.json")
    p.add_argument("sweep_json")
    p.add_argument("--outdir", default=".")
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        build_parser().print_help()
        return EXIT_OK
    if argv[0] not in COMMANDS:
        print(f"unknown subcommand: {argv[0]}", file=sys.stderr)
        return EXIT_UNKNOWN
    args = build_parser().parse_args(argv)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
