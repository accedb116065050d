"""Command-line interface.

Verbs: solve, gen, simulate, bounds, ts, run.  The DBMC_LOG environment
variable (debug/info/warning/error) sets the logging verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from .bounds import early_termination_time, optimal_q
from .dynamics import PTGainParams, simulate
from .errors import DbmcError, InfeasibleError
from .generate import generate_graph
from .graph import dump_graph, load_graph, solve_shortest_paths
from .harness import (
    bounds_csv,
    compute_bound_curves,
    errors_csv,
    initial_state_vector,
    resolve_graph,
    run_scenario,
    trajectory_csv,
    write_atomic,
)
from .disturbance import build_model
from .graph import minus_graph
from .scenario import load_scenario

log = logging.getLogger("dbmc")


def _configure_logging() -> None:
    level_name = os.environ.get("DBMC_LOG", "warning").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", required=True, help="scenario file")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="disturbance seed override")
    p.add_argument("--q", type=float, default=None, help="free exponent override")
    p.add_argument("--t-end", default=None, help="stop-time override: auto, seconds, or <frac>Ts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dbmc",
        description="biased min-consensus shortest paths under a prescribed-time gain",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("solve", help="shortest paths, parents, diameter, path gap")
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")

    p = sub.add_parser("gen", help="generate a benchmark graph")
    p.add_argument("kind", choices=["line", "hop-random", "grid", "standin13"])
    p.add_argument("--n", type=int, default=13)
    p.add_argument("--extra-edge-prob", type=float, default=0.2)
    p.add_argument("--rows", type=int, default=3)
    p.add_argument("--cols", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write here instead of stdout")

    p = sub.add_parser("simulate", help="integrate a scenario; write trajectory CSVs")
    _add_scenario_flags(p)

    p = sub.add_parser("bounds", help="evaluate bound curves on a time grid")
    _add_scenario_flags(p)
    p.add_argument("--points", type=int, default=600, help="grid resolution")

    p = sub.add_parser("ts", help="guaranteed early stop time calculator")
    p.add_argument("--zeta", type=float, required=True, help="path gap")
    p.add_argument("--u-minus", type=float, required=True)
    p.add_argument("--u-plus", type=float, required=True)
    p.add_argument("--diameter", type=int, required=True)
    p.add_argument("--diameter-minus", type=int, default=None)
    p.add_argument("--chi0", type=float, required=True, help="largest initial error")
    p.add_argument("--q", type=float, default=3.0)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--deadline", type=float, required=True)
    p.add_argument(
        "--gamma", type=float, default=2.0,
        help="gain offset; does not enter the stop-time formula",
    )
    p.add_argument("--sweep-q", action="store_true", help="also minimize over q")

    p = sub.add_parser("run", help="full pipeline: simulate, bound, judge, write artifacts")
    _add_scenario_flags(p)

    return parser


def _cmd_solve(args) -> int:
    with open(args.graph, "r", encoding="utf-8") as fh:
        g = load_graph(fh.read())
    sol = solve_shortest_paths(g)
    if args.json:
        doc = {
            "p": {str(i): sol.p[i - 1] for i in range(1, g.node_count + 1)},
            "true_parents": {
                str(i): sorted(sol.true_parents[i - 1])
                for i in range(1, g.node_count + 1)
            },
            "effective_diameter": sol.effective_diameter,
            "path_gap": sol.path_gap if math.isfinite(sol.path_gap) else None,
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
        return 0
    for i in range(1, g.node_count + 1):
        parents = sorted(sol.true_parents[i - 1])
        tag = "source" if i in g.sources else f"p = {sol.p[i - 1]:.10g}, parents = {parents}"
        print(f"node {i}: {tag}")
    gap = f"{sol.path_gap:.10g}" if math.isfinite(sol.path_gap) else "inf"
    print(f"effective diameter = {sol.effective_diameter}")
    print(f"path gap = {gap}")
    return 0


def _cmd_gen(args) -> int:
    spec = {"kind": args.kind, "n": args.n, "extra_edge_prob": args.extra_edge_prob,
            "rows": args.rows, "cols": args.cols, "seed": args.seed}
    g = generate_graph(spec)
    text = dump_graph(g)
    if args.out:
        write_atomic(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_simulate(args) -> int:
    sc = load_scenario(args.scenario)
    result = run_scenario(sc, args.out, seed=args.seed, q=args.q, t_end=args.t_end)
    print(f"wrote {result.out_dir}/trajectory.csv ({result.summary['steps']} steps)")
    return result.exit_code


def _cmd_bounds(args) -> int:
    sc = load_scenario(args.scenario)
    g = resolve_graph(sc.graph_spec)
    sol = solve_shortest_paths(g)
    seed = sc.seed if args.seed is None else args.seed
    q = sc.q if args.q is None else args.q
    model = build_model(sc.disturbance, g, seed, horizon=sc.params.deadline)
    sol_minus = solve_shortest_paths(minus_graph(g, model.edge_lower))
    x0 = initial_state_vector(g, sc)
    e0_max = float(max(x0[i - 1] - sol.p[i - 1] for i in g.non_sources))
    chi0 = sc.chi0 if sc.chi0 is not None else e0_max

    from .scenario import parse_t_end_rule

    rule = parse_t_end_rule(args.t_end) if args.t_end else sc.t_end_rule
    if rule[0] == "explicit":
        t_stop = rule[1]
    elif rule[0] == "fraction":
        t_stop = rule[1] * sc.params.deadline
    else:
        t_stop = early_termination_time(
            sol.path_gap, model.u_minus, model.u_plus,
            sol.effective_diameter, sol_minus.effective_diameter, chi0, q, sc.params,
        )
    times = np.linspace(0.0, t_stop, args.points)
    kinds = ("chain", "uniform", "envelope")
    if model.proportional_fractions is not None and all(
        f < 1.0 for f in model.proportional_fractions
    ):
        kinds = ("chain", "proportional", "uniform", "envelope")
    curves = compute_bound_curves(
        g, sol, sol_minus, model, x0, q, chi0, sc.params, times, kinds
    )
    out = Path(args.out or "out")
    out.mkdir(parents=True, exist_ok=True)
    write_atomic(out / "bounds.csv", bounds_csv(g, times, curves))
    print(f"wrote {out}/bounds.csv ({args.points} grid points, kinds: {', '.join(kinds)})")
    return 0


def _cmd_ts(args) -> int:
    params = PTGainParams(gamma=args.gamma, h=args.h, deadline=args.deadline)
    dm = args.diameter_minus if args.diameter_minus is not None else args.diameter
    try:
        ts = early_termination_time(
            args.zeta, args.u_minus, args.u_plus, args.diameter, dm,
            args.chi0, args.q, params,
        )
    except InfeasibleError as exc:
        print(f"infeasible: {exc}")
        return 1
    print(f"t_s = {ts:.10g}")
    if args.sweep_q:
        q_best, ts_best = optimal_q(
            args.zeta, args.u_minus, args.u_plus, args.diameter, dm, args.chi0, params
        )
        print(f"best q = {q_best:.6g} giving t_s = {ts_best:.10g}")
    return 0


def _cmd_run(args) -> int:
    sc = load_scenario(args.scenario)
    result = run_scenario(sc, args.out, seed=args.seed, q=args.q, t_end=args.t_end)
    s = result.summary
    ts_txt = "n/a" if s["t_s_guaranteed"] is None else f"{s['t_s_guaranteed']:.6g}"
    print(
        f"nodes={s['nodes']} gap={s['path_gap']} D={s['effective_diameter']} "
        f"u-={s['u_minus']:.6g} u+={s['u_plus']:.6g} "
        f"t_s={ts_txt} t_end={s['t_end']:.6g} overall={s['overall']}"
    )
    print(f"artifacts in {result.out_dir}")
    return result.exit_code


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    handlers = {
        "solve": _cmd_solve,
        "gen": _cmd_gen,
        "simulate": _cmd_simulate,
        "bounds": _cmd_bounds,
        "ts": _cmd_ts,
        "run": _cmd_run,
    }
    try:
        return handlers[args.verb](args)
    except DbmcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
