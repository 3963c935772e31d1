"""Command-line sweeps: grid / phase / dist / validity.

Configuration comes from an optional JSON file plus flag overrides for any
system parameter.  Rates are in units of kappa by default (kappa = 1); with
"units": "absolute" in the config, all rates are divided by kappa on load.

Exit codes: 0 success, 1 config error, 2 some grid points failed, 3 every
point (or the single requested solve) failed.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import fields

from . import export
from .model import SystemParams
from .photostats import UndefinedStatisticsError
from .qnbd import PoissonLimitError
from .steadystate import SingularSteadyStateError
from .sweep import (
    Axis,
    SweepConfig,
    run_distribution_report,
    run_grid,
    run_phase_profile,
    run_validity_map,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PARTIAL = 2
EXIT_TOTAL = 3

_PARAM_FLAGS = ("g", "kappa", "gamma", "eta", "delta", "delta_a", "phi_z", "n_max")
_RATE_FIELDS = ("g", "gamma", "eta", "delta", "delta_a")


class ConfigError(Exception):
    pass


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse reports usage errors with exit code 1 (config error)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser():
    parser = _Parser(
        prog="atomcavity",
        description=(
            "Steady-state photon statistics of two driven atoms coupled "
            "to a lossy cavity mode."
        ),
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add_common(p, with_workers=True):
        p.add_argument("--config", metavar="FILE", help="JSON config file")
        for name in _PARAM_FLAGS:
            flag = "--" + name.replace("_", "-")
            kind = int if name == "n_max" else float
            p.add_argument(flag, type=kind, default=None, metavar="X")
        if with_workers:
            p.add_argument("--workers", type=int, default=None, metavar="N")
        p.add_argument("--out", default=".", metavar="DIR",
                       help="output directory (default: current)")
        p.add_argument("--format", default=None, metavar="LIST",
                       help="comma list from csv,json,svg")
        p.add_argument("--rel-tol", type=float, default=None, metavar="X",
                       help="cutoff-convergence tolerance")

    p_grid = sub.add_parser("grid", help="2-D parameter grid (default: g x eta)")
    add_common(p_grid)

    p_phase = sub.add_parser("phase", help="1-D interatomic-phase scan")
    add_common(p_phase)
    p_phase.add_argument("--steps", type=int, default=None, metavar="N",
                         help="number of phase points (default 64)")

    p_dist = sub.add_parser("dist", help="photon-distribution report at one point")
    add_common(p_dist, with_workers=False)

    p_val = sub.add_parser("validity", help="qnbd validity map over (g2, Q)")
    add_common(p_val, with_workers=False)
    p_val.add_argument("--steps", type=int, default=None, metavar="N")
    p_val.add_argument("--g2-min", type=float, default=None, metavar="X")
    p_val.add_argument("--g2-max", type=float, default=None, metavar="X")
    p_val.add_argument("--q-min", type=float, default=None, metavar="X")
    p_val.add_argument("--q-max", type=float, default=None, metavar="X")
    return parser


def _either(value, fallback):
    """Flag value if given, else the config fallback; 0 is a real value."""
    return fallback if value is None else value


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as handle:
            config = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}")
    if not isinstance(config, dict):
        raise ConfigError("config file must hold a JSON object")
    known = {
        "params", "axes", "steps", "workers", "outputs", "rel_tol",
        "contour_levels", "qnbd_fit", "units", "g2_range", "q_range",
    }
    unknown = set(config) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return config


def _build_params(config, args):
    values = dict(config.get("params", {}))
    unknown = set(values) - {f.name for f in fields(SystemParams)}
    if unknown:
        raise ConfigError(f"unknown system parameters: {sorted(unknown)}")
    for name in _PARAM_FLAGS:
        override = getattr(args, name)
        if override is not None:
            values[name] = override
    units = config.get("units", "kappa")
    if units == "absolute":
        kappa = float(values.get("kappa", 1.0))
        if kappa <= 0:
            raise ConfigError("absolute units need kappa > 0")
        for name in _RATE_FIELDS:
            if name in values:
                values[name] = float(values[name]) / kappa
        values["kappa"] = 1.0
    elif units != "kappa":
        raise ConfigError(f"units must be 'kappa' or 'absolute', got {units!r}")
    try:
        return SystemParams(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid system parameters: {exc}")


def _build_axes(config):
    specs = config.get("axes")
    if specs is None:
        return (Axis("g", 0.1, 10.0, 41), Axis("eta", 0.1, 10.0, 41))
    axes = []
    for spec in specs:
        if not isinstance(spec, dict):
            raise ConfigError("each axis must be an object")
        unknown = set(spec) - {"name", "start", "stop", "steps", "log"}
        if unknown:
            raise ConfigError(f"unknown axis keys: {sorted(unknown)}")
        try:
            axes.append(
                Axis(
                    name=spec["name"],
                    start=float(spec["start"]),
                    stop=float(spec["stop"]),
                    steps=int(spec["steps"]),
                    log=bool(spec.get("log", False)),
                )
            )
        except KeyError as exc:
            raise ConfigError(f"axis is missing key {exc}")
        except ValueError as exc:
            raise ConfigError(f"invalid axis: {exc}")
    return tuple(axes)


def _formats(config, args):
    if args.format is not None:
        formats = tuple(s.strip() for s in args.format.split(",") if s.strip())
    else:
        formats = tuple(config.get("outputs", ("csv", "json")))
    for fmt in formats:
        if fmt not in ("csv", "json", "svg"):
            raise ConfigError(f"unknown format {fmt!r} (use csv, json, svg)")
    if not formats:
        raise ConfigError("no output formats selected")
    return formats


def _write_outputs(result, out_dir, formats, stem):
    os.makedirs(out_dir, exist_ok=True)
    written = []
    writers = {
        "csv": export.write_csv,
        "json": export.write_json,
        "svg": export.write_svg,
    }
    for fmt in formats:
        path = os.path.join(out_dir, f"{stem}.{fmt}")
        writers[fmt](result, path)
        written.append(path)
    return written


def _grid_exit_code(result):
    failed = len(result.failures)
    if failed == len(result.points):
        return EXIT_TOTAL
    if failed:
        return EXIT_PARTIAL
    return EXIT_OK


def _summarize(result, written):
    failed = len(result.failures)
    total = len(result.points)
    print(f"{result.kind}: {total} points, {failed} failed")
    for point in result.failures[:5]:
        print(f"  failed at {point.values}: {point.error}")
    if failed > 5:
        print(f"  ... and {failed - 5} more")
    for path in written:
        print(f"wrote {path}")


def _cmd_grid(args):
    config = _load_config(args.config)
    base = _build_params(config, args)
    try:
        sweep_config = SweepConfig(
            base=base,
            axes=_build_axes(config),
            contour_levels=tuple(config.get("contour_levels", (0.01, 0.1, 1.0))),
            outputs=_formats(config, args),
            workers=_either(args.workers, int(config.get("workers", 1))),
            qnbd_fit=bool(config.get("qnbd_fit", True)),
            rel_tol=_either(args.rel_tol, float(config.get("rel_tol", 1e-6))),
        )
    except ValueError as exc:
        raise ConfigError(str(exc))
    result = run_grid(sweep_config)
    written = _write_outputs(result, args.out, sweep_config.outputs, "grid")
    _summarize(result, written)
    return _grid_exit_code(result)


def _cmd_phase(args):
    config = _load_config(args.config)
    base = _build_params(config, args)
    steps = _either(args.steps, int(config.get("steps", 64)))
    try:
        result = run_phase_profile(
            base,
            steps,
            workers=_either(args.workers, int(config.get("workers", 1))),
            qnbd_fit=bool(config.get("qnbd_fit", True)),
            rel_tol=_either(args.rel_tol, float(config.get("rel_tol", 1e-6))),
        )
    except ValueError as exc:
        raise ConfigError(str(exc))
    written = _write_outputs(result, args.out, _formats(config, args), "phase")
    _summarize(result, written)
    return _grid_exit_code(result)


def _cmd_dist(args):
    config = _load_config(args.config)
    params = _build_params(config, args)
    formats = _formats(config, args)
    try:
        report = run_distribution_report(
            params, rel_tol=_either(args.rel_tol, float(config.get("rel_tol", 1e-6)))
        )
    except (UndefinedStatisticsError, PoissonLimitError,
            SingularSteadyStateError) as exc:
        print(f"distribution report failed: {exc}", file=sys.stderr)
        return EXIT_TOTAL
    os.makedirs(args.out, exist_ok=True)
    writers = {
        "csv": export.write_distribution_csv,
        "json": export.write_distribution_json,
        "svg": export.write_distribution_svg,
    }
    written = []
    for fmt in formats:
        path = os.path.join(args.out, f"dist.{fmt}")
        writers[fmt](report, path)
        written.append(path)
    stats = report.statistics
    fit = report.qnbd_fit
    p = report.params
    print(
        f"dist at g={p.g:g} eta={p.eta:g} gamma={p.gamma:g} "
        f"phi_z={p.phi_z:g}: mean_n={stats.mean_n:.6g} g2={stats.g2:.6g} "
        f"Q={stats.q:.6g} class={stats.classification}"
    )
    print(
        f"qnbd fit: s={fit.s:.6g} p={fit.p:.6g} "
        f"fidelity={report.fidelities['qnbd']:.6g}"
    )
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_validity(args):
    config = _load_config(args.config)
    g2_range = config.get("g2_range", [0.05, 0.95])
    q_range = config.get("q_range", [-0.95, -0.05])
    if args.g2_min is not None:
        g2_range = [args.g2_min, g2_range[1]]
    if args.g2_max is not None:
        g2_range = [g2_range[0], args.g2_max]
    if args.q_min is not None:
        q_range = [args.q_min, q_range[1]]
    if args.q_max is not None:
        q_range = [q_range[0], args.q_max]
    steps = _either(args.steps, int(config.get("steps", 41)))
    try:
        result = run_validity_map(g2_range, q_range, steps)
    except ValueError as exc:
        raise ConfigError(str(exc))
    written = _write_outputs(result, args.out, _formats(config, args), "validity")
    valid = sum(1 for p in result.points if p.extras.get("valid"))
    print(f"validity: {len(result.points)} points, {valid} valid")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


_COMMANDS = {
    "grid": _cmd_grid,
    "phase": _cmd_phase,
    "dist": _cmd_dist,
    "validity": _cmd_validity,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
