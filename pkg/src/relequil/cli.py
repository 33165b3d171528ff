"""Command line interface.

Subcommands: analyze, sweep, simulate, presets, selfcheck.  Exit codes:
0 = completed (whatever the verdict), 2 = input error, 3 = internal
consistency failure.  RELEQUIL_OUT_DIR sets the default output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .pipeline import (
    AnalysisRequest,
    ConsistencyError,
    InputError,
    run_analysis,
    run_sweep,
)
from .presets import HOMOGENEOUS_PRESETS, PRESET_NAMES, get_case

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONSISTENCY = 3


def _parse_potential(text):
    """'1:1,1:2' -> ((1.0, 1.0), (1.0, 2.0)) as (coefficient:exponent) pairs."""
    terms = []
    for chunk in text.split(","):
        c, _, a = chunk.partition(":")
        terms.append((float(c), float(a)))
    return tuple(terms)


def _out_path(args, default_name):
    if args.out:
        return args.out
    base = os.environ.get("RELEQUIL_OUT_DIR")
    if base:
        return os.path.join(base, default_name)
    return None


def _emit(args, payload, text, default_name):
    rendered = json.dumps(payload, indent=2) if args.format == "json" else text
    path = _out_path(args, default_name)
    if path:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w") as fh:
            fh.write(rendered + "\n")
    print(rendered)


def _request_from_args(args, alpha=None):
    positions = None
    if getattr(args, "positions", None):
        positions = tuple(float(x) for x in args.positions.split(","))
    potential = _parse_potential(args.potential) if args.potential else None
    return AnalysisRequest(
        case=args.case,
        alpha=alpha if alpha is not None else args.alpha,
        potential=potential,
        positions=positions,
        compare_tol=args.tol if args.tol else 1e-9,
        with_dynamics=getattr(args, "dynamics", False),
        with_timing=getattr(args, "timing", False),
    )


def cmd_analyze(args):
    request = _request_from_args(args)
    report = run_analysis(request)
    _emit(args, report.to_dict(), report.render_table(),
          f"{args.case or 'analysis'}.json")
    return EXIT_OK


def cmd_sweep(args):
    grid = [float(x) for x in args.grid.split(",")]
    base = _request_from_args(args)
    result = run_sweep(base, grid)
    payload = {
        "grid": grid,
        "summary": [{"alpha": a, "label": lab} for a, lab in result.summary],
        "failures": [{"alpha": a, "message": m} for a, m in result.failures],
        "reports": [
            {"alpha": a, "report": (r.to_dict() if r is not None else None)}
            for a, r in result.reports
        ],
    }
    _emit(args, payload, result.render_table(), "sweep.json")
    return EXIT_CONSISTENCY if result.failures else EXIT_OK


def cmd_simulate(args):
    from .dynamics import estimate_growth_rate, integrate_rotating_frame
    from .model import angular_frequency_squared
    from .pipeline import _worst_direction

    request = _request_from_args(args)
    config, spec, _case = request.resolve()
    omega = float(np.sqrt(angular_frequency_squared(config, spec)))
    period = 2.0 * np.pi / omega
    traj = integrate_rotating_frame(
        config, spec,
        duration=args.periods * period,
        dt=period / args.steps_per_period,
        sample_every=max(1, args.steps_per_period // 100),
        reference_equilibrium=config.positions,
    )
    drift = float(np.max(
        np.linalg.norm(traj.positions - config.positions[None, :], axis=1)
    ))
    energy_drift = float(np.max(np.abs(traj.jacobi_energy - traj.jacobi_energy[0])))
    payload = {
        "omega": omega,
        "periods": args.periods,
        "equilibrium_drift": drift,
        "jacobi_energy_drift": energy_drift,
        "blew_up": traj.blew_up,
        "growth": None,
    }
    if args.kick:
        direction = _worst_direction(config, spec)
        est = estimate_growth_rate(config, spec, direction, epsilon=args.epsilon)
        payload["growth"] = {
            "rate": est.rate,
            "no_growth": est.no_growth,
            "window": list(est.window),
        }
    if args.dump:
        payload["trajectory"] = traj.records()
    text = "\n".join(
        f"{k}: {v}" for k, v in payload.items() if k != "trajectory"
    )
    _emit(args, payload, text, "simulate.json")
    return EXIT_OK


def cmd_presets(args):
    rows = []
    for name in PRESET_NAMES:
        case = get_case(name, 1.0 if name in HOMOGENEOUS_PRESETS else None)
        rows.append({
            "name": name,
            "bodies": case.n,
            "potential": case.potential.describe(),
            "takes_alpha": name in HOMOGENEOUS_PRESETS,
            "reference_omega_squared": case.omega_squared.value,
            "suspect_references": case.omega_squared.suspect
            or any(rv.suspect for rv in case.hessian_eigenvalues)
            or case.hessian_entry[1].suspect,
        })
    text = "\n".join(
        f"{r['name']:<24} n={r['bodies']} {r['potential']:<22} "
        f"alpha={'yes' if r['takes_alpha'] else 'no'}"
        + ("  [has suspect reference values]" if r["suspect_references"] else "")
        for r in rows
    )
    _emit(args, rows, text, "presets.json")
    return EXIT_OK


def cmd_selfcheck(args):
    from .checks import run_selfcheck

    ok, results = run_selfcheck(fast=args.fast)
    for name, passed, detail in results:
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
    return EXIT_OK if ok else EXIT_CONSISTENCY


def build_parser():
    parser = argparse.ArgumentParser(
        prog="relequil",
        description="Linear stability of relative equilibria of planar "
                    "n-body configurations under power-law pair potentials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--case", choices=PRESET_NAMES, default=None)
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--potential", default=None,
                       help="explicit terms 'c1:a1,c2:a2'")
        p.add_argument("--positions", default=None,
                       help="flat x1,y1,x2,y2,... for explicit configurations")
        p.add_argument("--tol", type=float, default=None,
                       help="block-vs-oracle comparison tolerance")
        p.add_argument("--out", default=None, help="write output to this path")
        p.add_argument("--format", choices=("json", "table"), default="table")

    p = sub.add_parser("analyze", help="full stability report for one case")
    common(p)
    p.add_argument("--dynamics", action="store_true",
                   help="add the nonlinear growth-rate confirmation")
    p.add_argument("--timing", action="store_true")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("sweep", help="alpha sweep for a homogeneous case")
    common(p)
    p.add_argument("--grid", required=True, help="comma-separated alphas")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("simulate", help="integrate the nonlinear system")
    common(p)
    p.add_argument("--periods", type=float, default=10.0)
    p.add_argument("--steps-per-period", type=int, default=10000)
    p.add_argument("--kick", action="store_true",
                   help="perturb along the worst eigendirection and fit growth")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--dump", action="store_true",
                   help="include the sampled trajectory in the output")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("presets", help="list the preset cases")
    common(p)
    p.set_defaults(fn=cmd_presets)

    p = sub.add_parser("selfcheck", help="run the invariant battery")
    common(p)
    p.add_argument("--fast", action="store_true")
    p.set_defaults(fn=cmd_selfcheck)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY


if __name__ == "__main__":
    sys.exit(main())
