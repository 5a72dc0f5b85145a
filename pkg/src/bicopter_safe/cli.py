"""Command-line front end.

Subcommands: simulate, check, verify-derivatives, plan. Exit codes follow the
scriptable convention 0 = success/clean, 1 = verification failure, 2 = input
error, 3 = runtime error. Relative output paths can be redirected with the
BICOPTER_SAFE_OUT_DIR environment variable.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import oracles
from .errors import BicopterError, ConfigError, LogSchemaError, SimulationError
from .sim import monitor_invariants, read_log, run_scenario, write_log
from .traj import sample_reference

OUT_DIR_ENV = "BICOPTER_SAFE_OUT_DIR"
ORACLE_TOLERANCE = 1e-5

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_INPUT = 2
EXIT_RUNTIME = 3


def _resolve_out(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUT_DIR_ENV)
    if base and not p.is_absolute():
        return Path(base) / p
    return p


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def cmd_simulate(args) -> int:
    try:
        doc = cfgmod.load_config(args.config)
        sc = cfgmod.scenario_from_config(doc)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out_path = _resolve_out(args.out or doc.get("output") or "scenario_log.csv")

    try:
        log = run_scenario(sc)
    except SimulationError as exc:
        if exc.partial_log is not None and len(exc.partial_log):
            write_log(exc.partial_log, out_path)
            print(f"partial log ({len(exc.partial_log)} rows): {out_path}",
                  file=sys.stderr)
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    write_log(log, out_path)
    report = monitor_invariants(log, sc)
    final_err = float(np.linalg.norm(log.states[-1, 0:2] - log.references[-1]))
    print(f"rows: {len(log)} (dt={sc.dt:g} s, t_end={sc.t_end:g} s)")
    print(f"final position error [m]: {final_err:.6g}")
    print(f"max |r1|,|r2| [m]: {np.max(np.abs(log.states[:, 0])):.6g}, "
          f"{np.max(np.abs(log.states[:, 1])):.6g}")
    print(f"max |v1|,|v2| [m/s]: {np.max(np.abs(log.states[:, 2])):.6g}, "
          f"{np.max(np.abs(log.states[:, 3])):.6g}")
    print(f"min |det Psi|: {np.min(np.abs(log.det_psi)):.6g}")
    safe_ok = report.checks[0].passed and report.checks[1].passed
    lyap_ok = all(c.passed for c in report.checks[2:])
    print(f"safe-set: {'OK' if safe_ok else 'VIOLATED'}")
    print(f"lyapunov: {'OK' if lyap_ok else 'VIOLATED'}")
    print(f"log: {out_path}")
    return EXIT_OK if report.ok else EXIT_VERIFICATION


def cmd_check(args) -> int:
    try:
        doc = cfgmod.load_config(args.config)
        sc = cfgmod.scenario_from_config(doc)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        log = read_log(args.log)
    except LogSchemaError as exc:
        print(f"log schema error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"cannot read log: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if len(log) == 0:
        print("log is empty", file=sys.stderr)
        return EXIT_INPUT
    report = monitor_invariants(log, sc)
    print(report.summary())
    return EXIT_OK if report.ok else EXIT_VERIFICATION


def cmd_verify_derivatives(args) -> int:
    worst = oracles.run_derivative_checks(args.seed, args.count)
    failed = []
    for name in oracles.QUANTITIES:
        err = worst[name]
        status = "ok" if err < ORACLE_TOLERANCE else "FAIL"
        print(f"{name:12s} worst rel err {err:.3e}  {status}")
        if err >= ORACLE_TOLERANCE:
            failed.append(name)
    if failed:
        print(f"FAILED: {', '.join(failed)} (tolerance {ORACLE_TOLERANCE:g})")
        return EXIT_VERIFICATION
    print(f"all {len(oracles.QUANTITIES)} derivative checks below "
          f"{ORACLE_TOLERANCE:g} over {args.count} states (seed {args.seed})")
    return EXIT_OK


def cmd_plan(args) -> int:
    try:
        doc = cfgmod.load_config(args.config)
        sc = cfgmod.scenario_from_config(doc)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    plan = sc.plan
    print(f"waypoints: {len(plan.waypoints)}")
    for i, p in enumerate(plan.waypoints):
        print(f"  {i:2d}: ({p[0]:.6g}, {p[1]:.6g})")
    print(f"reference duration [s]: {plan.duration:.6g}")
    print(f"hold value after t={plan.duration:.6g}: "
          f"({sample_reference(plan, plan.duration).x_d1[0]:.6g}, "
          f"{sample_reference(plan, plan.duration).x_d1[1]:.6g})")
    print("plan section:")
    print(json.dumps({"plan": cfgmod.plan_to_config(plan)}, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bicopter-safe",
        description="Safety-constrained bicopter control: simulate, verify, plan.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a scenario and write its log")
    p_sim.add_argument("--config", required=True, help="scenario config (JSON)")
    p_sim.add_argument("--out", default=None, help="log output path (CSV)")
    p_sim.set_defaults(func=cmd_simulate)

    p_check = sub.add_parser("check", help="re-run the invariant monitors on a log")
    p_check.add_argument("--log", required=True, help="log file (CSV)")
    p_check.add_argument("--config", required=True, help="scenario config (JSON)")
    p_check.set_defaults(func=cmd_check)

    p_verify = sub.add_parser(
        "verify-derivatives",
        help="finite-difference validation of every closed-form derivative")
    p_verify.add_argument("--seed", type=int, default=42)
    p_verify.add_argument("--count", type=_positive_int, default=100)
    p_verify.set_defaults(func=cmd_verify_derivatives)

    p_plan = sub.add_parser("plan", help="resolve and print the waypoint plan")
    p_plan.add_argument("--config", required=True, help="scenario config (JSON)")
    p_plan.set_defaults(func=cmd_plan)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BicopterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
