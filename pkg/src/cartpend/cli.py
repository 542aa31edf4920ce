"""Command line front end.

Verbs:
  run <config>...   simulate scenario files, write CSV trajectories + reports
  analyze <csv>     step metrics for an existing trajectory file
  lqr-gain <config> print the synthesized K, N, and Riccati solution P
  repro             rerun the built-in study matrix against published values

``run`` writes one ``<scenario>.csv`` per config plus ``report.txt`` and
``report.csv`` into ``--out`` (or ``$CARTPEND_OUT_DIR``, or ``./out``).
Exit codes: 0 success, 1 a simulation diverged, 2 bad input.
"""
from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
from pathlib import Path

import numpy as np

from .classic import LqrWeights, lqr_synthesize, solve_care
from .metrics import overshoot_pct, settling_time, steady_state_error, summarize
from .plant import linearize_at
from .repro import run_comparison
from .scenario import ConfigError, parse_scenario, run_scenario
from .sim import SimulationFault, Trajectory


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cartpend",
        description="cart-pendulum control study: simulate, analyze, reproduce")
    sub = parser.add_subparsers(dest="verb", required=True)

    run_p = sub.add_parser("run", help="simulate scenario config files")
    run_p.add_argument("configs", nargs="+", help="scenario config paths")
    run_p.add_argument("--out", default=None, help="output directory")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override the disturbance seed of every run")

    an_p = sub.add_parser("analyze", help="metrics for a trajectory CSV")
    an_p.add_argument("csv")
    an_p.add_argument("--reference", type=float, default=None,
                      help="reference value (default: final logged reference)")
    an_p.add_argument("--band", type=float, default=0.02,
                      help="settling band fraction (default 0.02)")

    gain_p = sub.add_parser("lqr-gain", help="print K, N, P for an lqr config")
    gain_p.add_argument("config")

    sub.add_parser("repro", help="compare the built-in matrix to published values")
    return parser


def _load_scenario(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None
    try:
        return parse_scenario(text)
    except ConfigError as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return None


def _cmd_run(args) -> int:
    scenarios = []
    for path in args.configs:
        s = _load_scenario(path)
        if s is None:
            return 2
        if args.seed is not None:
            s = dataclasses.replace(s, sim=dataclasses.replace(s.sim, seed=args.seed))
        scenarios.append(s)

    out_dir = Path(args.out or os.environ.get("CARTPEND_OUT_DIR") or "out")
    out_dir.mkdir(parents=True, exist_ok=True)

    reports = []
    diverged = []
    for s in scenarios:
        try:
            traj = run_scenario(s)
        except SimulationFault as fault:
            print(f"error: scenario {s.name} diverged at step {fault.step_index}; "
                  f"partial trajectory kept", file=sys.stderr)
            (out_dir / f"{s.name}.csv").write_text(fault.trajectory.to_csv_text())
            diverged.append(s.name)
            continue
        (out_dir / f"{s.name}.csv").write_text(traj.to_csv_text())
        reports.append(summarize([(s.controller_kind, traj)], s.name))

    report_text = "".join(r.to_text() for r in reports)
    (out_dir / "report.txt").write_text(report_text)
    csv_lines = ["controller,scenario,settling_s,overshoot_pct,sse"]
    for r in reports:
        csv_lines.extend(r.to_csv().strip().splitlines()[1:])
    (out_dir / "report.csv").write_text("\n".join(csv_lines) + "\n")
    print(report_text, end="")
    return 1 if diverged else 0


def _cmd_analyze(args) -> int:
    try:
        text = Path(args.csv).read_text()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        traj = Trajectory.from_csv_text(text)
    except ValueError as exc:
        print(f"error: {args.csv}: {exc}", file=sys.stderr)
        return 2
    reference = args.reference if args.reference is not None else float(traj.references[-1])
    position = traj.states[:, 2]
    settle = settling_time(traj.times_s, position, reference, band_fraction=args.band)
    settle_text = f"{settle:.4g} s" if math.isfinite(settle) else "never (outside band)"
    print(f"reference {reference:.4g}")
    print(f"settling {settle_text}")
    print(f"overshoot {overshoot_pct(position, reference):.4g} %")
    print(f"steady-state error {steady_state_error(position, reference):.4g}")
    return 0


def _cmd_lqr_gain(args) -> int:
    s = _load_scenario(args.config)
    if s is None:
        return 2
    if s.controller_kind != "lqr":
        print(f"error: {args.config}: lqr-gain needs an lqr controller, "
              f"got {s.controller_kind!r}", file=sys.stderr)
        return 2
    cc = s.controller_config
    weights = LqrWeights(q=np.diag([cc["q_theta"], cc["q_theta_dot"],
                                    cc["q_x"], cc["q_x_dot"]]), r=cc["r"])
    theta_e = 0.0 if cc["operating_point"] == "upright" else math.pi
    ss = linearize_at(s.plant, theta_e)
    p = solve_care(ss, weights)
    ctrl = lqr_synthesize(ss, weights, tracked_output_index=2)
    print(f"operating point: {cc['operating_point']}")
    print("K =", np.array2string(ctrl.k_gain, precision=6, suppress_small=True))
    print(f"N = {ctrl.n_scale:.6f}")
    print("P =")
    print(np.array2string(p, precision=6, suppress_small=True))
    return 0


def _cmd_repro(_args) -> int:
    def progress(name):
        print(f"running {name} ...", file=sys.stderr, flush=True)

    print(run_comparison(progress=progress), end="")
    return 0


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {"run": _cmd_run, "analyze": _cmd_analyze,
               "lqr-gain": _cmd_lqr_gain, "repro": _cmd_repro}[args.verb]
    return handler(args)


if __name__ == "__main__":
    raise SystemExit(main())
