"""Command-line front end.

Exit codes: 0 success, 2 usage or validation error, 3 internal invariant
breach.  ``--out`` defaults to ``$GRESILIENCE_OUT`` or ``./out``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import game
from .errors import DomainError, InvariantError, ValidationError
from .metrics import aggregate, build_report
from .reportio import SCHEMA_VERSION, reports_to_csv, summary_json
from .scenario import ScenarioConfig, load_scenario, with_override, with_policy
from .sim import run_scenario

EXIT_OK, EXIT_USAGE, EXIT_INTERNAL = 0, 2, 3

_FACTOR_FLAGS = {"t_h": "--th", "t_a": "--ta", "h": "--h", "co2": "--co2"}


class UsageError(Exception):
    pass


def _default_out() -> str:
    return os.environ.get("GRESILIENCE_OUT", "out")


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _seed(s: str) -> int:
    v = int(s)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"must be a 64-bit unsigned integer, got {v}")
    return v


def parse_range(spec: str) -> list[float]:
    """``start:stop:step`` with an inclusive stop, e.g. ``0.5:0.9:0.1`` -> 5 values."""
    try:
        start, stop, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {spec!r}") from None
    if step <= 0 or start > stop:
        raise argparse.ArgumentTypeError(f"need step > 0 and start <= stop, got {spec!r}")
    n = int((stop - start) / step + 1e-9) + 1
    return [round(start + i * step, 12) for i in range(n)]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gresilience", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve a single game")
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--th", type=float, required=True)
    s.add_argument("--ta", type=float, required=True)
    s.add_argument("--h", type=float, required=True)
    s.add_argument("--co2", type=float, required=True)
    s.add_argument("--scale", choices=[m.value for m in game.P2ScaleMode], default="complement")
    s.add_argument("--json", action="store_true", help="print JSON instead of a table")

    r = sub.add_parser("run", help="simulate one scenario")
    r.add_argument("scenario_path")
    r.add_argument("--seed", type=_seed)
    r.add_argument("--policy")
    r.add_argument("--out", default=None)
    r.add_argument("--format", choices=["text", "json", "both"], default="text",
                   help="event log format: events.log, events.json or both")

    w = sub.add_parser("sweep", help="sweep one scenario parameter")
    w.add_argument("scenario_path")
    w.add_argument("--param", required=True, help="dotted field path, e.g. policy.eps_high")
    w.add_argument("--range", dest="range_", type=parse_range, required=True, metavar="START:STOP:STEP")
    w.add_argument("--replications", type=_positive_int, default=1)
    w.add_argument("--out", default=None)
    w.add_argument("--jobs", type=_positive_int, default=1)

    c = sub.add_parser("compare", help="compare policies on one scenario")
    c.add_argument("scenario_path")
    c.add_argument("--policies", required=True,
                   help="comma-separated: gresilience, always-robot, always-human, threshold[:cutoff]")
    c.add_argument("--replications", type=_positive_int, default=1)
    c.add_argument("--out", default=None)
    c.add_argument("--jobs", type=_positive_int, default=1)
    return p


# -- solve --------------------------------------------------------------------


def solution_dict(sol: game.EquilibriumSolution) -> dict:
    m = sol.bimatrix
    return {
        "schema_version": SCHEMA_VERSION,
        "payoffs": {k: getattr(m, k) for k in "ABCDabcd"},
        "cells": {str(pr): list(m.cell(pr)) for pr in game.PROFILES},
        "psne": [str(pr) for pr in sol.psne],
        "msne": {"sigma_p1_a1": sol.msne.sigma_p1_a1, "sigma_p2_a1": sol.msne.sigma_p2_a1},
        "msne_payoffs": {"p1": sol.msne_payoff_p1, "p2": sol.msne_payoff_p2},
    }


def format_solution(sol: game.EquilibriumSolution) -> str:
    m = sol.bimatrix
    w = 22
    lines = [
        f"{'':8}{'p2: a1 (robot)':>{w}}{'p2: a2 (human)':>{w}}",
        f"{'p1: a1':8}{f'({m.A:.6g}, {m.b:.6g})':>{w}}{f'({m.C:.6g}, {m.d:.6g})':>{w}}",
        f"{'p1: a2':8}{f'({m.D:.6g}, {m.c:.6g})':>{w}}{f'({m.B:.6g}, {m.a:.6g})':>{w}}",
        "",
        "PSNE: " + ", ".join(str(pr) for pr in sol.psne),
        f"MSNE: sigma_p1_a1 = {sol.msne.sigma_p1_a1:.6g}, sigma_p2_a1 = {sol.msne.sigma_p2_a1:.6g}",
        f"MSNE payoffs: p1 = {sol.msne_payoff_p1:.6g}, p2 = {sol.msne_payoff_p2:.6g}",
    ]
    return "\n".join(lines)


def cmd_solve(args) -> int:
    try:
        game._check_eps(args.eps)
    except DomainError as err:
        raise UsageError(f"argument --eps: {err}") from None
    try:
        factors = game.SystemFactors(t_h=args.th, t_a=args.ta, h=args.h, co2=args.co2)
    except ValidationError as err:
        raise UsageError(f"argument {_FACTOR_FLAGS.get(err.path, err.path)}: {err}") from None
    sol = game.solve(factors, args.eps, game.P2ScaleMode(args.scale))
    if args.json:
        print(json.dumps(solution_dict(sol), indent=2))
    else:
        print(format_solution(sol))
    return EXIT_OK


# -- simulation commands --------------------------------------------------------


def _load(path: str) -> ScenarioConfig:
    try:
        return load_scenario(path)
    except FileNotFoundError:
        raise UsageError(f"scenario file not found: {path}") from None
    except IsADirectoryError:
        raise UsageError(f"scenario path is a directory: {path}") from None


def simulate(cfg: ScenarioConfig):
    """Run one replication and return ``(report, event log)``.  Picklable for worker pools."""
    result = run_scenario(cfg)
    report = build_report(result.log, cfg, result.policy)
    return report, result.log


def _run_all(cfgs: list[ScenarioConfig], jobs: int):
    if jobs > 1 and len(cfgs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(simulate, cfgs))
    return [simulate(c) for c in cfgs]


def _out_dir(args) -> Path:
    out = Path(args.out or _default_out())
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_run(args) -> int:
    cfg = _load(args.scenario_path)
    if args.seed is not None:
        cfg = with_override(cfg, "seed", args.seed)
    if args.policy:
        cfg = with_policy(cfg, args.policy)
    report, log = simulate(cfg)
    out = _out_dir(args)
    _write(out / "report.csv", reports_to_csv([report]))
    if args.format in ("text", "both"):
        _write(out / "events.log", log.to_text())
    if args.format in ("json", "both"):
        _write(out / "events.json", log.to_json())
    _write(out / "summary.json", summary_json("run", cfg.scenario_id, aggregate([report])))
    print(f"wrote {out / 'report.csv'}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    base = _load(args.scenario_path)
    cfgs = []
    for value in args.range_:
        point = with_override(base, args.param, value)
        for i in range(args.replications):
            cfgs.append(with_override(point, "seed", (base.seed + i) % 2**64))
    results = _run_all(cfgs, args.jobs)
    reports = [r for r, _ in results]
    out = _out_dir(args)
    _write(out / "report.csv", reports_to_csv(reports))
    points = []
    for j, value in enumerate(args.range_):
        chunk = reports[j * args.replications:(j + 1) * args.replications]
        summ = next(iter(aggregate(chunk).values())).to_dict()
        points.append({"value": value, **summ})
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "sweep",
        "scenario_id": base.scenario_id,
        "parameter": args.param,
        "replications": args.replications,
        "points": points,
    }
    _write(out / "summary.json", json.dumps(doc, indent=2) + "\n")
    print(f"wrote {out / 'report.csv'} ({len(reports)} rows)")
    return EXIT_OK


def cmd_compare(args) -> int:
    base = _load(args.scenario_path)
    names = [n.strip() for n in args.policies.split(",") if n.strip()]
    if not names:
        raise UsageError("argument --policies: no policy given")
    cfgs = []
    for name in names:
        try:
            pcfg = with_policy(base, name)
        except ValidationError as err:
            raise UsageError(f"argument --policies: {err}") from None
        for i in range(args.replications):
            cfgs.append(with_override(pcfg, "seed", (base.seed + i) % 2**64))
    results = _run_all(cfgs, args.jobs)
    reports = [r for r, _ in results]
    out = _out_dir(args)
    _write(out / "report.csv", reports_to_csv(reports))
    _write(out / "summary.json", summary_json(
        "compare", base.scenario_id, aggregate(reports), {"replications": args.replications}))
    print(f"wrote {out / 'report.csv'} ({len(reports)} rows)")
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "run": cmd_run, "sweep": cmd_sweep, "compare": cmd_compare}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as err:
        print(f"gresilience {args.command}: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as err:
        print(f"gresilience {args.command}: error: invalid scenario: {err}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantError as err:
        print(f"gresilience {args.command}: internal invariant breach: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as err:
        print(f"gresilience {args.command}: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as err:  # noqa: BLE001 - exit codes are a closed set
        print(f"gresilience {args.command}: internal error: {err!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
