"""Scenario execution: solve, simulate, bound, judge, and write artifacts.

Artifacts written per run (all files atomically, write-then-rename):

    graph.txt         edge list actually used
    trajectory.csv    t,x_1,...,x_n at every stored step (17 significant digits)
    errors.csv        t,e_1,...,e_n (same rows; per-node error curves)
    bounds.csv        t,node,lower,upper,kind for every enabled bound kind
    focus.csv         t,error,lower,upper for the focus node (single-node overlay)
    termination.json  stop-time report: t_s, overall, per-node parents/verdict/path
    path.json         traced route of the focus node plus the full edge list
    summary.json      scalar diagnostics: gap, diameters, bounds, stop-time status

Exit codes: 0 success, 2 identification failure, 1 any error.
"""

from __future__ import annotations

import io
import json
import logging
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bounds import (
    chain_initial_errors,
    chain_upper_bound,
    early_termination_time,
    power_law_envelope,
    proportional_bounds,
    uniform_bounds,
    worst_case_offset,
)
from .disturbance import build_model
from .dynamics import Trajectory, simulate
from .errors import DbmcError, InfeasibleError, PreconditionError, SpecError
from .generate import generate_graph, synthetic_positions
from .graph import (
    ShortestPathSolution,
    WeightedDigraph,
    dump_graph,
    load_graph,
    minus_graph,
    parent_chain,
    solve_shortest_paths,
)
from .scenario import Scenario, parse_t_end_rule
from .termination import TerminationReport, build_report

log = logging.getLogger("dbmc")

BOUND_KINDS = ("chain", "proportional", "uniform", "envelope")
BRACKET_TOL = 1e-6


@dataclass
class RunResult:
    exit_code: int
    out_dir: Path
    report: TerminationReport
    summary: dict
    trajectory: Trajectory


def write_atomic(path: Path, data: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(data)
    os.replace(tmp, path)


def resolve_graph(spec: dict) -> WeightedDigraph:
    if spec.get("kind") == "file":
        with open(spec["path"], "r", encoding="utf-8") as fh:
            return load_graph(fh.read())
    return generate_graph(spec)


def initial_state_vector(
    g: WeightedDigraph, sc: Scenario
) -> np.ndarray:
    """Materialize the initial-state rule: zeros on sources, rule elsewhere."""
    n = g.node_count
    if sc.initial_states is not None:
        if len(sc.initial_states) != n:
            raise SpecError(
                f"[initial] states: expected {n} entries, got {len(sc.initial_states)}"
            )
        return np.asarray(sc.initial_states, dtype=float)
    x0 = np.full(n, float(sc.initial_value))
    for s in g.sources:
        x0[s - 1] = 0.0
    return x0


def compute_bound_curves(
    g: WeightedDigraph,
    sol: ShortestPathSolution,
    sol_minus: ShortestPathSolution,
    model,
    x0: np.ndarray,
    q: float,
    chi0: float,
    params,
    times: np.ndarray,
    kinds: tuple[str, ...],
) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Per enabled kind, (lower, upper) arrays of shape (len(times), non_sources).

    Columns follow ``g.non_sources`` order.  The chain kind has no lower
    bound and uses -inf; the envelope kind is the network-wide band
    +-(offset + power-law envelope at the largest depth).
    """
    ns = g.non_sources
    curves: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    chains = {i: parent_chain(sol, i) for i in ns}
    e0s = {i: chain_initial_errors(sol, x0, chains[i]) for i in ns}

    if "chain" in kinds:
        lower = np.full((len(times), len(ns)), -np.inf)
        upper = np.empty_like(lower)
        for col, i in enumerate(ns):
            caps = [
                float(model.edge_upper[g.edge_index[(chains[i][k + 1], chains[i][k])]])
                for k in range(len(chains[i]) - 1)
            ]
            upper[:, col] = chain_upper_bound(e0s[i], caps, params, times)
        curves["chain"] = (lower, upper)

    if "proportional" in kinds:
        fr = model.proportional_fractions
        if fr is None:
            raise SpecError("proportional bounds need a proportionally bounded disturbance")
        lower = np.empty((len(times), len(ns)))
        upper = np.empty_like(lower)
        for col, i in enumerate(ns):
            lo, hi = proportional_bounds(sol, x0, fr[0], fr[1], i, params, times)
            lower[:, col] = lo
            upper[:, col] = hi
        curves["proportional"] = (lower, upper)

    if "uniform" in kinds:
        lower = np.empty((len(times), len(ns)))
        upper = np.empty_like(lower)
        for col, i in enumerate(ns):
            lo, hi = uniform_bounds(
                sol, sol_minus, x0, model.u_minus, model.u_plus, i, params, times
            )
            lower[:, col] = lo
            upper[:, col] = hi
        curves["uniform"] = (lower, upper)

    if "envelope" in kinds:
        offset = worst_case_offset(
            model.u_minus, model.u_plus,
            sol.effective_diameter, sol_minus.effective_diameter,
        )
        band = offset + power_law_envelope(
            chi0, sol.effective_diameter - 1, q, params, times
        )
        lower = np.tile(-band[:, None], (1, len(ns)))
        upper = np.tile(band[:, None], (1, len(ns)))
        curves["envelope"] = (lower, upper)

    return curves


def check_brackets(
    g: WeightedDigraph,
    traj: Trajectory,
    curves: dict[str, tuple[np.ndarray, np.ndarray]],
    tol: float = BRACKET_TOL,
) -> None:
    """Every emitted curve must bracket the simulated errors pointwise."""
    ns = g.non_sources
    err = traj.errors[:, [i - 1 for i in ns]]
    for kind, (lower, upper) in curves.items():
        if np.any(err < lower - tol) or np.any(err > upper + tol):
            worst_low = float(np.min(err - lower))
            worst_high = float(np.min(upper - err))
            raise DbmcError(
                f"bound curve {kind!r} fails to bracket the trajectory "
                f"(worst lower slack {worst_low:.3e}, upper slack {worst_high:.3e})"
            )


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def trajectory_csv(traj: Trajectory) -> str:
    n = traj.errors.shape[1]
    buf = io.StringIO()
    buf.write("t," + ",".join(f"x_{i}" for i in range(1, n + 1)) + "\n")
    states = traj.states
    for k in range(len(traj.times)):
        buf.write(_fmt(traj.times[k]) + "," + ",".join(_fmt(v) for v in states[k]) + "\n")
    return buf.getvalue()


def errors_csv(traj: Trajectory) -> str:
    n = traj.errors.shape[1]
    buf = io.StringIO()
    buf.write("t," + ",".join(f"e_{i}" for i in range(1, n + 1)) + "\n")
    for k in range(len(traj.times)):
        buf.write(
            _fmt(traj.times[k]) + "," + ",".join(_fmt(v) for v in traj.errors[k]) + "\n"
        )
    return buf.getvalue()


def bounds_csv(
    g: WeightedDigraph,
    times: np.ndarray,
    curves: dict[str, tuple[np.ndarray, np.ndarray]],
) -> str:
    buf = io.StringIO()
    buf.write("t,node,lower,upper,kind\n")
    ns = g.non_sources
    for kind in BOUND_KINDS:
        if kind not in curves:
            continue
        lower, upper = curves[kind]
        for k, t in enumerate(times):
            ts = _fmt(t)
            for col, i in enumerate(ns):
                buf.write(f"{ts},{i},{_fmt(lower[k, col])},{_fmt(upper[k, col])},{kind}\n")
    return buf.getvalue()


def focus_csv(
    g: WeightedDigraph,
    traj: Trajectory,
    curves: dict[str, tuple[np.ndarray, np.ndarray]],
    focus: int,
    kind: str,
) -> str:
    col = g.non_sources.index(focus)
    lower, upper = curves[kind]
    buf = io.StringIO()
    buf.write("t,error,lower,upper\n")
    err = traj.error_of(focus)
    for k, t in enumerate(traj.times):
        buf.write(
            f"{_fmt(t)},{_fmt(err[k])},{_fmt(lower[k, col])},{_fmt(upper[k, col])}\n"
        )
    return buf.getvalue()


def _json_dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def run_scenario(
    sc: Scenario,
    out_dir: str | os.PathLike | None = None,
    *,
    seed: int | None = None,
    q: float | None = None,
    t_end: str | None = None,
) -> RunResult:
    """Execute one scenario end to end; see the module docstring for artifacts.

    ``seed``, ``q`` and ``t_end`` override the corresponding scenario fields
    (``t_end`` accepts the same syntax as the scenario key).
    """
    out = Path(out_dir if out_dir is not None else (sc.out_dir or "out"))
    out.mkdir(parents=True, exist_ok=True)

    g = resolve_graph(sc.graph_spec)
    sol = solve_shortest_paths(g)
    seed_eff = sc.seed if seed is None else seed
    q_eff = sc.q if q is None else q
    model = build_model(sc.disturbance, g, seed_eff, horizon=sc.params.deadline)
    x0 = initial_state_vector(g, sc)

    sol_minus = solve_shortest_paths(minus_graph(g, model.edge_lower))
    e0_max = float(max(x0[i - 1] - sol.p[i - 1] for i in g.non_sources))
    chi0 = sc.chi0 if sc.chi0 is not None else e0_max
    if chi0 < e0_max:
        raise SpecError(
            f"[run] chi0 = {chi0} is below the actual largest initial error {e0_max}"
        )

    ts_status, ts_value, ts_detail = "ok", None, ""
    if math.isinf(sol.path_gap):
        ts_status = "not_applicable"
        ts_detail = "no node has a competitor edge (infinite path gap)"
    else:
        try:
            ts_value = early_termination_time(
                sol.path_gap, model.u_minus, model.u_plus,
                sol.effective_diameter, sol_minus.effective_diameter,
                chi0, q_eff, sc.params,
            )
        except InfeasibleError as exc:
            ts_status = "infeasible"
            ts_detail = str(exc)

    rule = parse_t_end_rule(t_end) if t_end is not None else sc.t_end_rule
    if rule[0] == "explicit":
        t_stop = rule[1]
    elif rule[0] == "fraction":
        t_stop = rule[1] * sc.params.deadline
    else:
        if ts_status != "ok":
            raise SpecError(f"t_end = auto needs a guaranteed stop time: {ts_detail}")
        t_stop = max(ts_value, 1e-6 * sc.params.deadline)

    traj = simulate(g, model, sc.params, x0, t_stop, sol=sol)

    if sc.bound_kinds == ("none",):
        kinds: tuple[str, ...] = ()
    elif sc.bound_kinds == ("auto",):
        kinds = ("chain", "uniform", "envelope")
        if model.proportional_fractions is not None and all(
            f < 1.0 for f in model.proportional_fractions
        ):
            kinds = ("chain", "proportional", "uniform", "envelope")
    else:
        kinds = sc.bound_kinds
    curves = compute_bound_curves(
        g, sol, sol_minus, model, x0, q_eff, chi0, sc.params, traj.times, kinds
    )
    check_brackets(g, traj, curves)

    report = build_report(g, sol, model, traj.final_states, t_stop)

    focus = sc.focus_node
    if focus is None:
        focus = max(g.non_sources, key=lambda i: sol.p[i - 1])
    elif focus in g.sources or not 1 <= focus <= g.node_count:
        raise SpecError(f"[run] focus_node {focus} must be a non-source node")
    focus_kind = "proportional" if "proportional" in curves else (
        "uniform" if "uniform" in curves else None
    )

    summary = {
        "nodes": g.node_count,
        "sources": sorted(g.sources),
        "path_gap": sol.path_gap if math.isfinite(sol.path_gap) else None,
        "effective_diameter": sol.effective_diameter,
        "effective_diameter_minus": sol_minus.effective_diameter,
        "u_minus": model.u_minus,
        "u_plus": model.u_plus,
        "chi0": chi0,
        "q": q_eff,
        "seed": seed_eff,
        "termination_status": ts_status,
        "termination_detail": ts_detail,
        "t_s_guaranteed": ts_value,
        "t_end": t_stop,
        "steps": int(len(traj.times) - 1),
        "overall": report.overall,
        "bound_kinds": list(kinds),
        "focus_node": focus,
    }

    write_atomic(out / "graph.txt", dump_graph(g))
    write_atomic(out / "trajectory.csv", trajectory_csv(traj))
    write_atomic(out / "errors.csv", errors_csv(traj))
    if curves:
        write_atomic(out / "bounds.csv", bounds_csv(g, traj.times, curves))
        if focus_kind is not None:
            write_atomic(out / "focus.csv", focus_csv(g, traj, curves, focus, focus_kind))
    write_atomic(out / "termination.json", _json_dump(report.to_dict()))

    positions = synthetic_positions(sc.graph_spec, g)
    path = report.paths.get(focus)
    overlay = {
        "focus_node": focus,
        "path": list(path) if path is not None else None,
        "path_edges": (
            [[path[k], path[k + 1]] for k in range(len(path) - 1)]
            if path is not None
            else None
        ),
        "verdict": report.verdicts[focus],
        "edges": [[i, j, w] for i, j, w in g.edges],
        "positions": (
            {str(i): list(xy) for i, xy in positions.items()} if positions else None
        ),
    }
    write_atomic(out / "path.json", _json_dump(overlay))
    write_atomic(out / "summary.json", _json_dump(summary))

    exit_code = 0 if report.overall else 2
    if exit_code:
        log.warning("identification failed for nodes %s",
                    [i for i, v in report.verdicts.items() if v == "incorrect"])
    return RunResult(exit_code, out, report, summary, traj)
