"""Command-line entry point: ``chiralcavity <subcommand> [config] [flags]``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import asdict, replace
from pathlib import Path

from . import acceptance, analytics, cavity, detection, harness, molecule
from .analytics import DispersiveInputs
from .config import ConfigError, parse_config
from .dynamics import MODELS, integrate
from .molecule import Chirality
from .units import LIGHT_SPEED, TWO_PI, parse_quantity

OUT_ENV = "CHIRALCAVITY_OUT"
DEFAULT_CONFIG = "propanediol_fig2a.cfg"


def _out_dir(args) -> Path:
    path = Path(args.out or os.environ.get(OUT_ENV) or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load(args):
    cfg = parse_config(args.config_pos or args.config or DEFAULT_CONFIG)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.tolerance is not None:
        cfg = replace(cfg, integrator=replace(cfg.integrator, rtol=args.tolerance, atol=args.tolerance * 1e-2))
    return cfg


def _emit(obj, path: Path | None = None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, default=_jsonable)
    print(text)
    if path is not None:
        path.write_text(text + "\n")


def _jsonable(obj):
    if hasattr(obj, "item"):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Chirality):
        return obj.value
    return str(obj)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


# -- subcommands ------------------------------------------------------------


def cmd_design_cavity(args) -> int:
    R_m = parse_quantity(args.R_m, "length")
    f_target = parse_quantity(args.target, "frequency")
    mu_b = parse_quantity(args.mu_b, "dipole")
    design = cavity.design_cavity(R_m, args.q, f_target, mu_b)
    row = design.table_row()
    out = _out_dir(args) / f"cavity_q{args.q}.csv"
    keys = list(row)
    out.write_text(",".join(keys) + "\n" + ",".join(repr(float(row[k])) for k in keys) + "\n")
    print(
        f"q = {args.q}: d = {row['d_mm']:.6f} mm, w0 = {row['w0_mm']:.6g} mm, "
        f"g0 = 2pi x {row['g0_2piHz']:.6g} Hz, Q = {row['Q_1e9']:.6g}e9, "
        f"kappa = 2pi x {row['kappa_2piHz']:.6g} Hz, tuning = +-{row['tuning_kHz']:.5g} kHz, "
        f"precision = {row['precision_Hz']:.4g} Hz"
    )
    print(f"wrote {out}")
    return 0


def cmd_esst(args) -> int:
    phi = parse_quantity(args.phi, "angle")
    report = {}
    for chi in (Chirality.LEFT, Chirality.RIGHT):
        hist = molecule.apply_pulse_sequence([1, 0, 0], phi, chi)
        entry = {
            "final": [[z.real, z.imag] for z in hist.final],
            "populations": [abs(z) ** 2 for z in hist.final],
        }
        if min(abs(math.remainder(phi, 2 * math.pi) - s * math.pi / 2) for s in (1, -1)) < 1e-9:
            entry["sigma_z0"] = molecule.hypothesis_inversion(chi, phi)
        report[chi.value] = entry
    _emit({"phi": phi, **report})
    return 0


def cmd_simulate(args) -> int:
    cfg = _load(args)
    out = _out_dir(args)
    written = []
    for label, sz in (("L", 1.0), ("R", -1.0)):
        traj = integrate(args.model, cfg, sigma_z0=sz)
        path = out / f"trajectory_{label}.csv"
        traj.to_csv(
            path,
            cfg.detection.phi_lo,
            header={"hypothesis": label, "sigma_z0": sz, "config_sha256": cfg.digest()},
        )
        written.append(str(path))
    _emit({"model": args.model, "files": written})
    return 0


def cmd_detect(args) -> int:
    cfg = _load(args)
    nL, nR, (t0, tf) = detection.hypothesis_means(cfg, args.model)
    stats = detection.shot_statistics(nL, nR, t0, tf, cfg.detection.N_lo)
    _emit({"model": args.model, **asdict(stats)}, _out_dir(args) / "detect.json")
    return 0


def cmd_analytics(args) -> int:
    cfg = _load(args)
    inp = DispersiveInputs.from_config(cfg)
    g0, kappa = cfg.cavity.g0, cfg.cavity.kappa
    gamma = molecule.decay_rates(cfg.molecule)["32"]
    V_max, G_max = analytics.dipole_bound(gamma, cfg.sample.N_m, cfg.sample.L, cfg.molecule.omega_32 / LIGHT_SPEED)
    M_opt = analytics.optimal_window()
    report = {
        "dispersive": inp.dispersive,
        "N_cr": inp.n_cr,
        "phase_at_centre_rad": analytics.dispersive_phase(0.5 * g0, inp.N_m, kappa, inp.Delta_m, inp.sigma_z0),
        "snr_moving": analytics.snr_moving(inp),
        "snr_moving_optimal_window": analytics.snr_moving(replace(inp, M_Y=M_opt)),
        "snr_simplified": analytics.snr_simplified(inp),
        "optimal_M_Y": M_opt,
        "figure_of_merit": analytics.figure_of_merit(g0, cfg.cavity.w0, kappa),
        "trap_time_unit_s": analytics.trap_time_unit(g0, kappa),
        "critical_trap_time_s": analytics.critical_trap_time(g0, inp.lam, kappa, max(inp.N_m, 1.0))
        if inp.lam > 0
        else math.inf,
        "gamma_2piHz": gamma / TWO_PI,
        "V_max_2piHz": V_max / TWO_PI,
        "Gamma_max_2piHz": G_max / TWO_PI,
    }
    _emit(report, _out_dir(args) / "analytics.json")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    out = _out_dir(args)
    if args.kind == "snr-nm":
        res = harness.snr_vs_nm(cfg, _floats(args.nm), args.model, args.jobs)
    elif args.kind == "critical":
        found = harness.critical_nm(cfg, args.target_snr, args.model)
        _emit({**asdict(found), "lambda": cfg.drive.lam, "v": cfg.sample.v}, out / "critical.json")
        return 0
    elif args.kind == "lambda-v":
        res = harness.lambda_v_map(_floats(args.lambdas), _floats(args.speeds), cfg, args.target_snr, args.model, args.jobs)
    elif args.kind == "order":
        rep = harness.order_comparison(cfg)
        rep = {k: v for k, v in rep.items() if k not in ("first", "second")}
        _emit(rep, out / "order_comparison.json")
        return 0
    else:
        diss = cfg.dissipation
        if diss.gamma == 0 and diss.V_max == 0:
            diss = harness.propanediol_dissipation(cfg)
        rep = harness.dissipation_check(cfg, diss)
        _emit(rep, out / "dissipation.json")
        return 0 if rep["negligible"] else 1
    csv_path = out / f"sweep_{args.kind}.csv"
    res.to_csv(csv_path)
    (out / f"sweep_{args.kind}.json").write_text(res.summary_json() + "\n")
    print(res.summary_json())
    print(f"wrote {csv_path}")
    return 0


def cmd_montecarlo(args) -> int:
    cfg = _load(args)
    res = detection.monte_carlo_error_rate(cfg, args.shots, cfg.seed, args.model)
    keys = ("snr", "p_err_analytic", "p_err_empirical", "stderr", "shots", "seed")
    _emit({k: res[k] for k in keys}, _out_dir(args) / "montecarlo.json")
    return 0


def cmd_check(args) -> int:
    numbers = None if not args.criteria else [int(x) for x in args.criteria.split(",")]
    results = acceptance.run_all(numbers, args.jobs)
    for res in results:
        print(res.report() if args.verbose else res.line())
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return 0 if passed == len(results) else 1


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config_pos", nargs="?", metavar="CONFIG", help="config file (or name of a bundled config)")
    common.add_argument("--config", help="config file; same as the positional CONFIG")
    common.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or the current directory)")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: available CPUs)")
    common.add_argument("--seed", type=int, default=None, help="override the config seed")
    common.add_argument("--tolerance", type=float, default=None, help="integrator rtol (atol = rtol/100)")
    common.add_argument("--model", choices=MODELS, default="first", help="equations of motion (default: first)")
    common.add_argument("-v", "--verbose", action="store_true", help="more detail on stdout")

    parser = argparse.ArgumentParser(
        prog="chiralcavity",
        description="Simulate single-shot chiral discrimination of molecules in a driven microwave cavity.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("design-cavity", parents=[common], help="solve a Fabry-Perot cavity design")
    p.add_argument("--R-m", dest="R_m", default="40 mm", help="mirror radius of curvature (default: 40 mm)")
    p.add_argument("--q", type=int, default=0, help="longitudinal mode index (default: 0)")
    p.add_argument("--target", default="5.78109 GHz", help="target mode frequency (default: 5.78109 GHz)")
    p.add_argument("--mu-b", dest="mu_b", default="1.9 D", help="coupled dipole component (default: 1.9 D)")
    p.set_defaults(func=cmd_design_cavity)

    p = sub.add_parser("esst", parents=[common], help="apply the enantio-specific pulse sequence to |1>")
    p.add_argument("--phi", default="-0.5 pi", help="loop phase (default: -0.5 pi)")
    p.set_defaults(func=cmd_esst)

    p = sub.add_parser("simulate", parents=[common], help="integrate both hypotheses, write trajectory CSVs")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("detect", parents=[common], help="homodyne means, SNR and error probability")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("analytics", parents=[common], help="closed-form dispersive report")
    p.set_defaults(func=cmd_analytics)

    p = sub.add_parser("sweep", parents=[common], help="parameter sweeps and model comparisons")
    p.add_argument(
        "--kind",
        choices=("snr-nm", "critical", "lambda-v", "order", "dissipation"),
        default="snr-nm",
        help="sweep to run (default: snr-nm)",
    )
    p.add_argument("--nm", default="100,500,1000,1500,2000,2500,3000", help="comma-separated N_m values")
    p.add_argument("--lambdas", default="0.01,0.1,1,10,100", help="comma-separated lambda values")
    p.add_argument("--speeds", default="1,2,5,10", help="comma-separated speeds in m/s")
    p.add_argument("--target-snr", type=float, default=3.0, help="SNR threshold (default: 3)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("montecarlo", parents=[common], help="empirical error rate of the sign decision")
    p.add_argument("--shots", type=int, default=100_000, help="shots per hypothesis (default: 100000)")
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("check", parents=[common], help="run the acceptance suite")
    p.add_argument("--criteria", default="", help="comma-separated criterion numbers (default: all)")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return 2
    except Exception as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
