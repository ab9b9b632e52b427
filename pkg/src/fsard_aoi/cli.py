"""Command-line front end.

Subcommands::

    analyze   closed-form report for one FSA-RD configuration
    simulate  Monte Carlo run of FSA-RD or slotted ALOHA
    compare   closed form next to simulation for one FSA-RD configuration
    sweep     (M, gamma) sweep of FSA-RD, or tau sweep of slotted ALOHA
    table1    optimised FSA-RD vs slotted ALOHA table with deviations

Exit status is 0 on success, 2 on usage errors and 1 on runtime errors.
Any flag can also come from ``--config FILE`` holding ``key = value``
lines (flag names without the leading dashes); command-line flags win.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import records
from .analytic import SystemConfig, average_aoi
from .simulation import DEFAULT_SEED, DEFAULT_WARMUP_FRAMES, SimConfig, simulate_fsard, simulate_slotted_aloha
from .sweep import GridSpec, grid_values, optimize_aloha, reproduce_table1, sweep_fsard
from .trace import trace_fsard, write_trace_csv


class UsageError(Exception):
    pass


def _typed(kind, name, check=None, expect=""):
    def parse(text):
        try:
            value = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name}: cannot parse {text!r} as {kind.__name__}")
        if check is not None and not check(value):
            raise argparse.ArgumentTypeError(f"{name} must be {expect}, got {text}")
        return value

    parse.__name__ = name
    return parse


def prob(name):
    return _typed(float, name, lambda x: 0.0 < x <= 1.0, "in (0,1]")


def count(name, low):
    return _typed(int, name, lambda x: x >= low, f">= {low}")


def _grid(name):
    """``start:stop:step`` or a comma-separated list of probabilities."""

    def parse(text):
        try:
            if ":" in text:
                start, stop, step = (float(x) for x in text.split(":"))
                values = grid_values(start, stop, step)
            else:
                values = tuple(float(x) for x in text.split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name}: cannot parse grid {text!r}")
        if not values or any(not 0.0 < x <= 1.0 for x in values):
            raise argparse.ArgumentTypeError(f"{name} values must be in (0,1]")
        return values

    return parse


def _m_range(text):
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"frames-range: expected LO:HI, got {text!r}")
    if lo < 2 or hi < lo:
        raise argparse.ArgumentTypeError(f"frames-range must satisfy 2 <= LO <= HI, got {text}")
    return lo, hi


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _add_network(p, frame=True, gamma=True):
    p.add_argument("--users", type=count("users", 1), required=True)
    if frame:
        p.add_argument("--frame", type=count("frame", 2), required=True, help="slots per frame M")
    p.add_argument("--minislots", type=count("minislots", 1), default=4, help="mini-slots V")
    p.add_argument("--rho", type=prob("rho"), required=True, help="per-slot arrival probability")
    if gamma:
        p.add_argument("--gamma", type=prob("gamma"), required=True, help="reservation probability")


def _add_sim(p):
    p.add_argument("--frames", type=count("frames", 1), default=100_000, help="measured frames")
    p.add_argument("--warmup", type=count("warmup", 0), default=DEFAULT_WARMUP_FRAMES)
    p.add_argument("--seed", type=count("seed", 0), default=DEFAULT_SEED)
    p.add_argument("--replications", type=count("replications", 1), default=1)
    p.add_argument("--threads", type=count("threads", 1), default=1)


def _add_output(p):
    p.add_argument("--format", choices=records.FORMATS, default="json")
    p.add_argument("--output", type=Path, default=None, help="write here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fsard-aoi", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", type=Path, help="key=value file supplying flag values")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="closed-form report for one configuration")
    _add_network(p)
    _add_output(p)

    p = sub.add_parser("simulate", help="Monte Carlo simulation")
    p.add_argument("--protocol", choices=("fsard", "aloha"), default="fsard")
    p.add_argument("--users", type=count("users", 1), required=True)
    p.add_argument("--frame", type=count("frame", 2), help="slots per frame M (fsard)")
    p.add_argument("--minislots", type=count("minislots", 1), default=4)
    p.add_argument("--rho", type=prob("rho"), required=True)
    p.add_argument("--gamma", type=prob("gamma"), help="reservation probability (fsard)")
    p.add_argument("--tau", type=prob("tau"), help="transmission probability (aloha)")
    p.add_argument("--trace", type=Path, help="write a slot,user,aoi,event CSV (fsard, short runs)")
    _add_sim(p)
    _add_output(p)

    p = sub.add_parser("compare", help="closed form vs simulation for one FSA-RD configuration")
    _add_network(p)
    _add_sim(p)
    _add_output(p)

    p = sub.add_parser("sweep", help="grid sweep with argmin")
    p.add_argument("--protocol", choices=("fsard", "aloha"), default="fsard")
    _add_network(p, frame=False, gamma=False)
    p.add_argument("--frames-range", type=_m_range, help="LO:HI frame sizes (default 2:max(2V+2,40))")
    p.add_argument("--gamma-grid", type=_grid("gamma-grid"), help="start:stop:step or list")
    p.add_argument("--tau-grid", type=_grid("tau-grid"), help="start:stop:step or list")
    _add_sim(p)
    _add_output(p)

    p = sub.add_parser("table1", help="optimised FSA-RD vs slotted ALOHA table")
    p.add_argument("--no-aloha", action="store_true", help="skip the simulated ALOHA cells")
    p.add_argument("--tau-grid", type=_grid("tau-grid"), help="start:stop:step or list")
    p.add_argument("--frames", type=count("frames", 1), default=1_000_000,
                   help="measured slots per ALOHA grid point")
    p.add_argument("--warmup", type=count("warmup", 0), default=DEFAULT_WARMUP_FRAMES)
    p.add_argument("--seed", type=count("seed", 0), default=DEFAULT_SEED)
    p.add_argument("--replications", type=count("replications", 1), default=1)
    p.add_argument("--threads", type=count("threads", 1), default=1)
    _add_output(p)
    return parser


def _config_args(path: Path) -> list[str]:
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}")
    out = []
    for number, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{number}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        out += [f"--{key}"] if value.lower() == "true" else [f"--{key}", value]
    return out


COMMANDS = ("analyze", "simulate", "compare", "sweep", "table1")


def _parse(argv: list[str]) -> argparse.Namespace:
    argv = list(argv)
    config = None
    for i, token in enumerate(argv):
        if token.startswith("--config="):
            config = token.split("=", 1)[1]
            del argv[i]
            break
        if token == "--config":
            if i + 1 >= len(argv):
                raise UsageError("fsard-aoi: error: argument --config: expected a file path")
            config = argv[i + 1]
            del argv[i : i + 2]
            break
    if config is not None:
        # file values go right after the subcommand so explicit flags override them
        extra = _config_args(Path(config))
        at = next((i + 1 for i, tok in enumerate(argv) if tok in COMMANDS), len(argv))
        argv = argv[:at] + extra + argv[at:]
    return build_parser().parse_args(argv)


def _sim_config(args) -> SimConfig:
    return SimConfig(args.frames, args.warmup, args.seed, args.replications)


def _emit(result, args, out) -> None:
    if args.format == "json":
        doc = list(result) if isinstance(result, records.Rows) else records.to_document(result)
    else:
        doc = result if isinstance(result, records.Rows) else records.to_rows(result)
    data = records.emit_records(doc, args.format, args.output)
    if args.output is None:
        out.write(data.decode())


def _run(args, out) -> None:
    if args.command == "analyze":
        cfg = SystemConfig(args.users, args.frame, args.minislots, args.rho, args.gamma)
        _emit(average_aoi(cfg), args, out)

    elif args.command == "simulate":
        sim = _sim_config(args)
        if args.protocol == "aloha":
            if args.tau is None:
                raise UsageError("simulate --protocol aloha requires --tau")
            stats = simulate_slotted_aloha(args.users, args.rho, args.tau, sim, args.threads)
        else:
            if args.frame is None or args.gamma is None:
                raise UsageError("simulate --protocol fsard requires --frame and --gamma")
            cfg = SystemConfig(args.users, args.frame, args.minislots, args.rho, args.gamma)
            if args.trace is not None:
                rows, _ = trace_fsard(cfg, sim.horizon_frames, sim.seed, sim.warmup_frames)
                write_trace_csv(rows, args.trace)
            stats = simulate_fsard(cfg, sim, args.threads)
        _emit(stats, args, out)

    elif args.command == "compare":
        cfg = SystemConfig(args.users, args.frame, args.minislots, args.rho, args.gamma)
        report = average_aoi(cfg)
        stats = simulate_fsard(cfg, _sim_config(args), args.threads)
        rows = records.Rows([
            {"quantity": name, "analytic": a, "simulated": s, "ci": ci,
             "rel_dev": (s - a) / a}
            for name, a, s, ci in (
                ("aaoi", report.aaoi, stats.mean_aoi, stats.ci_halfwidth),
                ("e_s", report.e_s, stats.mean_service, None),
                ("e_y", report.e_y, stats.mean_y, None),
                ("e_y2", report.e_y2, stats.mean_y2, None),
            )
        ])
        _emit(rows, args, out)

    elif args.command == "sweep":
        kwargs = {}
        if args.frames_range is not None:
            kwargs["m_range"] = args.frames_range
        if args.gamma_grid is not None:
            kwargs["gamma_grid"] = args.gamma_grid
        if args.tau_grid is not None:
            kwargs["tau_grid"] = args.tau_grid
        grid = GridSpec(args.users, args.rho, args.minislots, **kwargs)
        if args.protocol == "aloha":
            result = optimize_aloha(args.users, args.rho, grid, _sim_config(args), args.threads)
        else:
            result = sweep_fsard(grid)
        _emit(result, args, out)

    elif args.command == "table1":
        kwargs = {"tau_grid": args.tau_grid} if args.tau_grid else {}
        cells = reproduce_table1(_sim_config(args), include_aloha=not args.no_aloha,
                                 threads=args.threads, **kwargs)
        _emit(cells, args, out)


def run_command(argv: list[str] | None = None, out=None, err=None) -> int:
    """Parse ``argv``, run the command and return the exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = _parse(argv)
    except UsageError as exc:
        print(exc, file=err)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        _run(args, out)
    except UsageError as exc:
        print(f"fsard-aoi: error: {exc}", file=err)
        return 2
    except (ValueError, TypeError) as exc:
        # configuration errors surfacing from the library name their field
        print(f"fsard-aoi: error: {exc}", file=err)
        return 2
    except Exception as exc:  # noqa: BLE001 - any other failure is a runtime error
        print(f"fsard-aoi: runtime error: {type(exc).__name__}: {exc}", file=err)
        return 1
    return 0


def main() -> None:
    sys.exit(run_command())
