"""Command-line front end: ``relureach reach|verify|simulate|plot``.

Exit codes
----------
0  success (``verify``: Safe)
1  ``verify``: Uncertain; ``simulate --result``: containment misses
2  piece cap exceeded in exact enumeration
3  usage or model error
4  numerical failure (LP iteration cap, unbounded or empty set)
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .exceptions import ModelError, PieceCapExceeded, ReachError
from .model import load_model
from .serialize import (dump_result, dumps, load_result, trajectories_from_csv, trajectories_to_csv,
                        verdict_to_dict, write_atomic)
from .svg import render
from .system import reach_interval
from .verify import check_safety, simulate_grid, validate_containment

EXIT_OK = 0
EXIT_UNCERTAIN = 1
EXIT_CAP = 2
EXIT_USAGE = 3
EXIT_NUMERIC = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _reach_args(p):
    p.add_argument("model", help="model JSON file (or the bundled name 'paper_sec4')")
    p.add_argument("--horizon", "-k", type=int, required=True)
    p.add_argument("--mode", choices=("exact", "hull"), default="hull")
    p.add_argument("--coupling", choices=("coupled", "decoupled"), default=None,
                   help="successor rule (default: coupled for exact, decoupled for hull)")
    p.add_argument("--sigma0", type=int, default=None, help="initial mode of a periodic signal")
    p.add_argument("--piece-cap", type=int, default=None,
                   help="max affine pieces per step (default: $NNREACH_PIECE_CAP or 1e6)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="relureach", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("reach", help="compute reach sets and write them as JSON")
    _reach_args(p)
    p.add_argument("--out", "-o", required=True)

    p = sub.add_parser("verify", help="reach + safety check against the model's unsafe set")
    _reach_args(p)
    p.add_argument("--out", "-o", default=None)

    p = sub.add_parser("simulate", help="simulate grid trajectories from the initial set")
    p.add_argument("model")
    p.add_argument("--horizon", "-k", type=int, required=True)
    p.add_argument("--grid", type=float, default=0.1, help="grid spacing")
    p.add_argument("--grid-style", choices=("inclusive", "centered"), default="inclusive")
    p.add_argument("--sigma0", type=int, default=None)
    p.add_argument("--out", "-o", required=True)
    p.add_argument("--result", default=None, help="reach result JSON to check containment against")
    p.add_argument("--tau", type=float, default=1e-6)

    p = sub.add_parser("plot", help="render a 2-D reach result as SVG")
    p.add_argument("result")
    p.add_argument("trajectories", nargs="?", default=None)
    p.add_argument("--svg", required=True)
    p.add_argument("--steps", default="all", help="'all' or 'last'")
    return parser


def _run_reach(args, model=None):
    if args.horizon < 0:
        raise UsageError("--horizon must be non-negative")
    model = (model or load_model(args.model)).with_sigma0(args.sigma0)
    result = reach_interval(model.system, model.switching, model.network, model.initial_set,
                            args.horizon, mode=args.mode, piece_cap=args.piece_cap, coupling=args.coupling)
    return model, result


def cmd_reach(args) -> int:
    model, result = _run_reach(args)
    dump_result(result, args.out, model_name=model.name, sigma0=model.switching.sigma0, unsafe=model.unsafe)
    print(f"wrote {args.out}: {result.horizon + 1} steps, parts per step {result.piece_counts}")
    return EXIT_OK


def cmd_verify(args) -> int:
    model = load_model(args.model)
    if model.unsafe is None:
        raise UsageError(f"{args.model}: model has no unsafe set to verify against")
    model, result = _run_reach(args, model)
    verdict = check_safety(result, model.unsafe)
    doc = verdict_to_dict(verdict, result.mode, result.coupling, model.switching.sigma0, model.name,
                          model.unsafe.label)
    text = dumps(doc) + "\n"
    if args.out:
        write_atomic(args.out, text)
    print(f"{verdict.status} over [0, {result.horizon}]"
          + ("" if verdict.safe else f": first intersection at step {verdict.first_violation_step}"
             + ("" if verdict.conclusive else " (over-approximation, inconclusive)")))
    return EXIT_OK if verdict.safe else EXIT_UNCERTAIN


def cmd_simulate(args) -> int:
    if args.grid <= 0:
        raise UsageError("--grid must be positive")
    model = load_model(args.model).with_sigma0(args.sigma0)
    trajs = simulate_grid(model.system, model.switching, model.network, model.initial_set,
                          args.grid, args.horizon, style=args.grid_style)
    write_atomic(args.out, trajectories_to_csv(trajs))
    print(f"wrote {args.out}: {len(trajs)} trajectories x {args.horizon + 1} states")
    if args.result:
        result, _ = load_result(args.result)
        report = validate_containment(trajs, result, args.tau)
        print(f"containment: {report.summary()}")
        return EXIT_OK if report.ok else EXIT_UNCERTAIN
    return EXIT_OK


def cmd_plot(args) -> int:
    result, meta = load_result(args.result)
    if result.per_step[0].dim != 2:
        raise UsageError("2D plotting only")
    steps = result.per_step if args.steps == "all" else result.per_step[-1:]
    parts = [P for X in steps for P in X]
    unsafe = list(meta["unsafe"].unsafe) if meta["unsafe"] is not None else []
    trajs = None
    if args.trajectories:
        trajs = trajectories_from_csv(Path(args.trajectories).read_text())
    title = f"{meta['model']} {result.mode} reach set over [0, {result.horizon}]"
    write_atomic(args.svg, render(parts, unsafe, trajs, title=title))
    print(f"wrote {args.svg}")
    return EXIT_OK


COMMANDS = {"reach": cmd_reach, "verify": cmd_verify, "simulate": cmd_simulate, "plot": cmd_plot}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except PieceCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, ModelError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ReachError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

if __name__ == "__main__":
    sys.exit(main())
