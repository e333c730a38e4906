"""Command-line front end: single-point evaluations, sweep tables for
the two headline curves, the time-consistency check, the feasibility
estimate, and the selfcheck suite.

Outputs are deterministic; identical invocations write byte-identical
files.  The worker count used by sweeps is capped by the QB_THREADS
environment variable (default: all cores).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import efexample, maxflow
from .results import fmt
from .selfcheck import format_report, run_selfcheck
from .specfun import (
    NoBracketError,
    NonConvergenceError,
    NonFiniteError,
    QuadratureNotConvergedError,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

#: Physics concepts behind each command, included in JSON metadata.
_REFS = {
    "example-current": ["smoothed effective backflow current", "Husimi distribution"],
    "example-sweep": ["smoothed effective backflow current vs precision width"],
    "critical-width": ["sign change of the smoothed effective current"],
    "max-backflow": ["maximal backflow probability transfer",
                     "Bracken-Melloy bound in the sharp limit"],
    "max-sweep": ["maximal backflow probability transfer vs precision width"],
    "time-check": ["time-resolved transfer vs eigenvalue consistency"],
    "feasibility": ["observation-window feasibility condition"],
}


def _write(args, text: str):
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _scalar_output(args, command: str, fields: dict) -> None:
    if args.format == "json":
        payload = {k: (fmt(v) if isinstance(v, float) else v) for k, v in fields.items()}
        payload["paper_refs"] = _REFS[command]
        _write(args, json.dumps(payload, indent=2) + "\n")
    else:
        header = ",".join(fields)
        row = ",".join(fmt(v) if isinstance(v, float) else str(v) for v in fields.values())
        _write(args, f"{header}\n{row}\n")


def _sweep_output(args, command: str, sweep) -> None:
    if args.format == "json":
        _write(args, sweep.to_json(paper_refs=_REFS[command]))
    else:
        _write(args, sweep.to_csv())


def _workers() -> int:
    raw = os.environ.get("QB_THREADS", "")
    if raw:
        return max(1, int(raw))
    return os.cpu_count() or 1


def cmd_example_current(args):
    value = efexample.scaled_effective_current(efexample.ExampleWidth(args.s))
    verdict = "backflow" if value < 0 else "no backflow"
    print(f"scaled effective current at s={fmt(args.s)}: {fmt(value)} ({verdict})")
    if args.out:
        _scalar_output(args, "example-current", {"s": args.s, "J_scaled": value})
    return EXIT_OK


def cmd_example_sweep(args):
    s_values = np.linspace(args.start, args.stop, args.points)
    sweep = efexample.example_sweep(s_values, max_workers=_workers())
    print(f"example sweep: {args.points} widths in [{fmt(args.start)}, {fmt(args.stop)}]")
    _sweep_output(args, "example-sweep", sweep)
    return EXIT_OK


def cmd_critical_width(args):
    s_star = efexample.critical_width(args.tol, lo=args.lo, hi=args.hi)
    print(f"critical precision width s* = {fmt(s_star)} (tol {fmt(args.tol)})")
    if args.out:
        _scalar_output(args, "critical-width", {"s_star": s_star, "tol": args.tol})
    return EXIT_OK


def cmd_max_backflow(args):
    res = maxflow.max_backflow(
        maxflow.MaxflowWidth(args.varsigma),
        nodes=args.nodes,
        u_max=args.umax,
        check_resolution=args.check_resolution,
    )
    print(
        f"maximal transfer at varsigma={fmt(args.varsigma)}: {fmt(res.delta_max)} "
        f"(nodes={args.nodes}, umax={fmt(args.umax)})"
    )
    fields = {
        "varsigma": args.varsigma,
        "delta_max": res.delta_max,
        "raw_eigenvalue": res.eigenvalue,
        "nodes": args.nodes,
        "umax": args.umax,
        "residual": res.diagnostics["residual"],
    }
    if "resolution_shift" in res.diagnostics:
        fields["resolution_shift"] = res.diagnostics["resolution_shift"]
    if args.out:
        _scalar_output(args, "max-backflow", fields)
    if args.eigenvector_out:
        lines = ["u,weight,phi"]
        for u, w, phi in zip(res.grid.nodes, res.grid.weights, res.eigenvector):
            lines.append(f"{fmt(u)},{fmt(w)},{fmt(phi)}")
        with open(args.eigenvector_out, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_max_sweep(args):
    values = np.linspace(args.start, args.stop, args.points)
    sweep = maxflow.varsigma_sweep(
        values, nodes=args.nodes, u_max=args.umax, max_workers=_workers()
    )
    print(f"transfer sweep: {args.points} widths in [{fmt(args.start)}, {fmt(args.stop)}]")
    _sweep_output(args, "max-sweep", sweep)
    return EXIT_OK


def cmd_time_check(args):
    res = maxflow.max_backflow(
        maxflow.MaxflowWidth(args.varsigma), nodes=args.nodes, u_max=args.umax
    )
    transfer = maxflow.integrated_transfer(res, n_tau=args.tau_nodes)
    dev = abs(transfer - res.eigenvalue)
    print(
        f"time-integrated transfer {fmt(transfer)} vs eigenvalue {fmt(res.eigenvalue)}"
        f" (deviation {fmt(dev)})"
    )
    if args.out:
        _scalar_output(args, "time-check", {
            "varsigma": args.varsigma,
            "integrated_transfer": transfer,
            "eigenvalue": res.eigenvalue,
            "deviation": dev,
        })
    return EXIT_OK


def cmd_feasibility(args):
    spec = maxflow.ApparatusSpec(
        mass=args.mass, sigma_tilde=args.sigma, duration=args.time, hbar=args.hbar
    )
    varsigma, ok = maxflow.feasibility(spec)
    print(f"varsigma = {fmt(varsigma)}: {'feasible' if ok else 'not feasible'}")
    if args.out:
        _scalar_output(args, "feasibility", {"varsigma": varsigma, "feasible": ok})
    return EXIT_OK


def cmd_selfcheck(args):
    results = run_selfcheck()
    report = format_report(results)
    sys.stdout.write(report)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(report)
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERICAL


def _add_output_args(sub):
    sub.add_argument("--out", default=None, help="write the result table to this path")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="backflow",
        description="Quantum backflow quantities for free positive-momentum particles",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("example-current",
                       help="scaled effective current of the example state")
    p.add_argument("--s", type=float, required=True, help="dimensionless precision width")
    _add_output_args(p)
    p.set_defaults(fn=cmd_example_current)

    p = sub.add_parser("example-sweep", help="current vs precision width table")
    p.add_argument("--start", type=float, default=0.1)
    p.add_argument("--stop", type=float, default=10.0)
    p.add_argument("--points", type=int, default=100)
    _add_output_args(p)
    p.set_defaults(fn=cmd_example_sweep)

    p = sub.add_parser("critical-width",
                       help="width at which the effective current changes sign")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--lo", type=float, default=4.0, help="lower end of the search bracket")
    p.add_argument("--hi", type=float, default=8.0, help="upper end of the search bracket")
    _add_output_args(p)
    p.set_defaults(fn=cmd_critical_width)

    p = sub.add_parser("max-backflow", help="maximal backflow probability transfer")
    p.add_argument("--varsigma", type=float, required=True)
    p.add_argument("--nodes", type=int, default=800)
    p.add_argument("--umax", type=float, default=12.0)
    p.add_argument("--check-resolution", action="store_true")
    p.add_argument("--eigenvector-out", default=None,
                   help="dump the optimal state (u,weight,phi CSV) to this path")
    _add_output_args(p)
    p.set_defaults(fn=cmd_max_backflow)

    p = sub.add_parser("max-sweep", help="maximal transfer vs precision width table")
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--stop", type=float, default=3.0)
    p.add_argument("--points", type=int, default=25)
    p.add_argument("--nodes", type=int, default=800)
    p.add_argument("--umax", type=float, default=12.0)
    _add_output_args(p)
    p.set_defaults(fn=cmd_max_sweep)

    p = sub.add_parser("time-check",
                       help="compare time-integrated transfer with the eigenvalue")
    p.add_argument("--varsigma", type=float, default=1.0)
    p.add_argument("--nodes", type=int, default=800)
    p.add_argument("--umax", type=float, default=12.0)
    p.add_argument("--tau-nodes", type=int, default=maxflow.TIME_NODES)
    _add_output_args(p)
    p.set_defaults(fn=cmd_time_check)

    p = sub.add_parser("feasibility",
                       help="dimensionless width and observability of an apparatus")
    p.add_argument("--mass", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True, help="momentum precision")
    p.add_argument("--time", type=float, required=True, help="observation window")
    p.add_argument("--hbar", type=float, default=1.0)
    _add_output_args(p)
    p.set_defaults(fn=cmd_feasibility)

    p = sub.add_parser("selfcheck", help="run the reduced-resolution invariant suite")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_selfcheck)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (QuadratureNotConvergedError, NonConvergenceError,
            NoBracketError, NonFiniteError) as exc:
        # NoBracketError subclasses ValueError, so this arm must come first
        print(f"numerical failure in {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
