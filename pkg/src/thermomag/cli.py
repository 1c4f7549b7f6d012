"""Command-line front end.

    thermomag decoherence --temperature 300 --radius 1e-7 --delta-x 1e-8 2e-8
    thermomag drag --method both --mass 1.5e-17 --format json
    thermomag ledger

Exit status: 0 on success, 2 on invalid configuration, 3 when any sweep row
failed (the table is still written, failing rows carry an error marker),
1 when the output cannot be written.
"""
from __future__ import annotations

import argparse
import sys

from .errors import ConfigError
from .ledger import ledger
from .sweep import COMMANDS, FORMATS, METHODS, RunConfig, SweepResult, build_config, emit, load_config_file, run

__all__ = ["main", "run", "emit", "ledger", "RunConfig", "SweepResult"]


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="thermomag", description=__doc__.split("\n\n")[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON run configuration; flags override its values")
    ap.add_argument("--format", choices=FORMATS)
    ap.add_argument("--out", help="output path (default: standard output)")
    ap.add_argument("--method", choices=METHODS)
    ap.add_argument("--diagnostics", action="store_true", default=None,
                    help="append the long-wavelength parameter k_B T L / hbar c")
    ap.add_argument("--seed", type=int)

    g = ap.add_argument_group("material")
    g.add_argument("--material", help="preset name")
    g.add_argument("--materials-file", help="JSON materials file replacing the built-in presets")
    g.add_argument("--chi-r", type=float, help="inline material: real susceptibility")
    g.add_argument("--chi-i", type=float, default=None)
    g.add_argument("--epsilon-r", type=float, default=None)

    g = ap.add_argument_group("sweep lists")
    g.add_argument("--temperature", type=float, nargs="+", metavar="K")
    g.add_argument("--radius", type=float, nargs="+", metavar="M")
    g.add_argument("--mass", type=float, nargs="+", metavar="KG")
    g.add_argument("--beta", type=float, nargs="+")
    g.add_argument("--delta-x", type=float, nargs="+", metavar="M")
    g.add_argument("--separation", type=float, nargs="+", metavar="M")

    g = ap.add_argument_group("simulate")
    g.add_argument("--particles", type=int)
    g.add_argument("--relaxation-times", type=float, help="simulated time in units of 1/xi")
    return ap


def _config_from_args(args) -> RunConfig:
    doc = load_config_file(args.config) if args.config else {}
    overrides = {
        "command": args.command,
        "format": args.format,
        "method": args.method,
        "diagnostics": args.diagnostics,
        "seed": args.seed,
        "materials_file": args.materials_file,
        "material": args.material,
        "temperature_T": args.temperature,
        "radius_a": args.radius,
        "mass_m": args.mass,
        "beta": args.beta,
        "delta_x": args.delta_x,
        "separation_d": args.separation,
        "n_particles": args.particles,
        "relaxation_times": args.relaxation_times,
    }
    if args.chi_r is not None:
        overrides["material"] = {"name": args.material or "custom", "chi_r": args.chi_r,
                                 "chi_i": args.chi_i or 0.0, "epsilon_r": args.epsilon_r}
    elif args.chi_i is not None or args.epsilon_r is not None:
        raise ConfigError("material: --chi-i and --epsilon-r need --chi-r")
    return build_config(doc, overrides)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "ledger":
        text = ledger()
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    try:
        cfg = _config_from_args(args)
        result = run(cfg)
    except ConfigError as exc:
        print(f"thermomag: error: {exc}", file=sys.stderr)
        return 2
    try:
        emit(result, cfg.output, args.out)
    except OSError as exc:
        print(f"thermomag: cannot write output: {exc}", file=sys.stderr)
        return 1
    if result.failed:
        bad = sum(1 for r in result.rows if r["error"])
        print(f"thermomag: {bad} of {len(result.rows)} rows failed; see the error column", file=sys.stderr)
        return 3
    return 0
