"""Command-line front end.

Subcommands: discretize, design, freqresp, simulate, sweep, check.
Global flags: --config PATH, --out DIR, --workers N, --seed-defaults.
Exit codes: 0 success, 1 check or certification failure, 2 configuration or
usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .arm import PlantParams
from .config import ConfigError, ToolConfig, default_config_dict, load_config
from .design import sensitivity_curve
from .linalg import ss_to_tf, zoh_discretize
from .polynomials import poly_roots
from .runtime import RepetitiveController, apply_difference_equation, expanded_taps
from .simulation import (SimulationDiverged, iss_sup_norm, rk4_order_ratio,
                         run_exactness, simulate, sweep_alpha)
from .svgplot import write_line_chart

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2

_VARIANT_NAMES = ("traditional", "higher-order")


def _out_path(out_dir: str, name: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, name)


def _fmt_vec(v) -> str:
    return "[" + ", ".join(f"{x:.6g}" for x in v) + "]"


def cmd_discretize(cfg: ToolConfig, out_dir: str, workers: int) -> int:
    dss = zoh_discretize(cfg.plant.continuous(), cfg.Ts)
    P = ss_to_tf(dss)
    zeros = sorted(poly_roots(P.num), key=lambda z: z.real)
    poles = sorted(poly_roots(P.den), key=lambda z: -z.real)
    print(f"ZOH discretization at Ts = {cfg.Ts:g} s")
    print("F =")
    for row in dss.F:
        print("  " + _fmt_vec(row))
    print("g = " + _fmt_vec(dss.g))
    def _fmt_root(z) -> str:
        if abs(z.imag) <= 1e-6 * (1.0 + abs(z.real)):
            return f"{z.real:.6g}"
        return f"{z:.6g}"

    print("P(z) in pole-zero-gain form:")
    print(f"  gain  = {P.num.leading:.6g}")
    print("  zeros = " + ", ".join(_fmt_root(z) for z in zeros))
    print("  poles = " + ", ".join(_fmt_root(z) for z in poles))
    path = _out_path(out_dir, "plant.csv")
    lines = ["role,power,coefficient"]
    for i, coef in enumerate(P.num.coeffs):
        lines.append(f"num,{i},{coef:.17g}")
    for i, coef in enumerate(P.den.coeffs):
        lines.append(f"den,{i},{coef:.17g}")
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {path}")
    return EXIT_OK


def _design_report(cfg: ToolConfig) -> tuple[list[str], bool]:
    lines = []
    all_pass = True
    P = cfg.plant_tf()
    for name, weights in zip(_VARIANT_NAMES, cfg.w_variants):
        design = cfg.synthesize(weights, exact_check=True)
        verdict = "PASS" if design.certified else "FAIL"
        all_pass = all_pass and design.certified
        lines.append(f"variant {name}: W weights {_fmt_vec(weights)}")
        lines.append(f"  N = {design.period_samples}, filter advance = {design.advance}")
        lf = design.learning_filter
        lines.append(f"  inverse filter: degree {lf.num.degree}/{lf.den.degree}, "
                     f"T(1)L(1) = {design.comp_sensitivity(1.0).real * design.full_filter_response(1.0).real:.12g}")
        lines.append(f"  small-gain margin (< 1 required) = {design.margin:.9g} -> {verdict}")
        if not design.certified:
            from .design import condition_profile
            theta, vals = condition_profile(P, design, cfg.grid_size)
            worst = int(np.argmax(vals))
            lines.append(f"  violating frequency: omega = {theta[worst] / cfg.Ts:.6g} rad/s "
                         f"(|.| = {vals[worst]:.6g})")
            lines.append(f"  exact closed-loop check: {design.unstable_pole_count} pole(s) "
                         f"with modulus >= 1 - 1e-9")
        elif design.unstable_pole_count is not None:
            lines.append(f"  exact closed-loop check: {design.unstable_pole_count} pole(s) "
                         f"with modulus >= 1 - 1e-9")
    return lines, all_pass


def cmd_design(cfg: ToolConfig, out_dir: str, workers: int) -> int:
    lines, all_pass = _design_report(cfg)
    report = "\n".join(lines)
    print(report)
    path = _out_path(out_dir, "design.txt")
    with open(path, "w", newline="") as fh:
        fh.write(report + "\n")
    print(f"wrote {path}")
    return EXIT_OK if all_pass else EXIT_CHECK_FAILED


def cmd_freqresp(cfg: ToolConfig, out_dir: str, workers: int) -> int:
    P = cfg.plant_tf()
    designs = [cfg.synthesize(w) for w in cfg.w_variants]
    N = designs[0].period_samples
    lo = 2.0 * np.pi / (50.0 * N * cfg.Ts)
    hi = np.pi / cfg.Ts
    omegas = np.logspace(np.log10(lo), np.log10(hi), cfg.freqresp_points)
    series = []
    for idx, (name, design) in enumerate(zip(_VARIANT_NAMES, designs), start=1):
        curve = sensitivity_curve(P, design, omegas, cfg.Ts)
        path = _out_path(out_dir, f"freqresp_w{idx}.csv")
        curve.to_csv(path)
        n_bad = int(np.sum(~np.isfinite(curve.magnitudes)))
        note = f" ({n_bad} pole hit(s) recorded as gaps)" if n_bad else ""
        print(f"variant {name}: margin {design.margin:.6g}, wrote {path}{note}")
        series.append((name, curve.omegas, curve.magnitudes))
    svg = _out_path(out_dir, "freqresp.svg")
    write_line_chart(svg, series, "angular frequency (rad/s)",
                     "error sensitivity magnitude", x_log=True, y_log=True)
    print(f"wrote {svg}")
    return EXIT_OK


def cmd_simulate(cfg: ToolConfig, out_dir: str, workers: int) -> int:
    design = cfg.synthesize(cfg.w_weights)
    if not design.certified:
        print(f"note: design margin {design.margin:.6g} >= 1 "
              f"(running uncertified; see the design report)")
    result = simulate(cfg.sim_config(design))
    path = _out_path(out_dir, "simulate.csv")
    result.to_csv(path)
    print(f"alpha = {cfg.signals.alpha:g}: ultimate bound |y - r| = "
          f"{result.ultimate_bound:.9g} rad over the last "
          f"{cfg.bound_window_periods} period(s)")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_sweep(cfg: ToolConfig, out_dir: str, workers: int) -> int:
    designs = [cfg.synthesize(w) for w in cfg.w_variants]
    base = cfg.sim_config(designs[0])
    result = sweep_alpha(base, cfg.sweep_alphas, designs, workers=workers)
    path = _out_path(out_dir, "sweep.csv")
    result.to_csv(path)
    print("alpha      " + "  ".join(f"{n:>14s}" for n in _VARIANT_NAMES))
    for a, row in zip(result.alphas, result.bounds):
        print(f"{a:+.4f}    " + "  ".join(f"{v:14.6e}" for v in row))
    print(f"wrote {path}")
    svg = _out_path(out_dir, "sweep.svg")
    series = [
        (name, result.alphas, result.bounds[:, j])
        for j, name in enumerate(_VARIANT_NAMES)
    ]
    write_line_chart(svg, series, "period perturbation alpha",
                     "ultimate bound |y - r| (rad)")
    print(f"wrote {svg}")
    if result.failures:
        for alpha, label, err in result.failures:
            print(f"cell failed: alpha={alpha:g} variant={label}: {err}")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_check(cfg: ToolConfig, out_dir: str, workers: int) -> int:
    design = cfg.synthesize(cfg.w_weights)
    sim_cfg = cfg.sim_config(design)
    checks = []

    report = run_exactness(sim_cfg)
    checks.append(("decomposition identity max|x - (xp + xs)|",
                   report.decomposition_error, "< 1e-6",
                   report.decomposition_error < 1e-6))
    checks.append(("observer agreement max|xs_hat - xs|",
                   report.observer_error, "< 1e-6",
                   report.observer_error < 1e-6))

    ratio = rk4_order_ratio(sim_cfg)
    checks.append(("RK4 order: error ratio under step halving",
                   ratio, "in [12, 20]", 12.0 <= ratio <= 20.0))

    rng = np.random.default_rng(20210907)
    n_samples = 50 * design.period_samples
    errors = rng.standard_normal(n_samples)
    ctl = RepetitiveController(design, require_certified=False)
    streamed = ctl.run(errors)
    b, a = expanded_taps(design)
    reference = apply_difference_equation(b, a, errors)
    # normalized: open-loop internal models can legitimately grow to 1e8,
    # where absolute agreement below a fixed threshold is not representable
    rms = float(np.sqrt(np.mean((streamed - reference) ** 2)))
    rms /= max(1.0, float(np.sqrt(np.mean(reference ** 2))))
    checks.append(("streaming vs expanded-filter RMS difference (normalized)",
                   rms, "< 1e-9", rms < 1e-9))

    all_pass = True
    for name, value, band, ok in checks:
        all_pass = all_pass and ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {value:.6g} (required {band})")
    return EXIT_OK if all_pass else EXIT_CHECK_FAILED


_COMMANDS = {
    "discretize": cmd_discretize,
    "design": cmd_design,
    "freqresp": cmd_freqresp,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "check": cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rckit",
        description="Robust repetitive-control synthesis, analysis, and "
                    "sampled-data simulation toolkit")
    parser.add_argument("--config", metavar="PATH",
                        help="JSON configuration (omit for built-in defaults)")
    parser.add_argument("--out", metavar="DIR", default=".",
                        help="output directory for CSV/SVG artifacts")
    parser.add_argument("--workers", metavar="N", type=int, default=1,
                        help="parallel workers for the sweep")
    parser.add_argument("--seed-defaults", action="store_true",
                        help="write the default configuration to <out>/config.json and exit")
    parser.add_argument("command", nargs="?", choices=sorted(_COMMANDS),
                        help="subcommand to run")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed_defaults:
        path = _out_path(args.out, "config.json")
        with open(path, "w", newline="") as fh:
            json.dump(default_config_dict(), fh, indent=2)
            fh.write("\n")
        print(f"wrote {path}")
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        print("rckit: error: a subcommand is required "
              "(or --seed-defaults)", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    if args.workers < 1:
        print("rckit: error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"rckit: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    try:
        return _COMMANDS[args.command](cfg, args.out, args.workers)
    except SimulationDiverged as exc:
        print(f"rckit: simulation diverged: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except ValueError as exc:
        print(f"rckit: error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
