"""Prescribed-time gain schedule and integration of the consensus dynamics.

Every non-source node relaxes toward the minimum of (neighbor state +
disturbed edge weight) under a gain that diverges at a user-chosen deadline:

    dx_i/dt = -gain(t) * (x_i - min_j {x_j + w_ij + u_ij(t)}),   i not a source,

with source states frozen at zero.  The integrator advances the error
coordinates e_i = x_i - p_i instead of x_i: the two systems are identical in
exact arithmetic, but near convergence e_i shrinks below the floating-point
resolution of x_i around p_i, and only the error form keeps those magnitudes
representable.  Reported states are p + e.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .disturbance import DisturbanceModel
from .errors import (
    DomainError,
    IntegrationError,
    PreconditionError,
    ValidationError,
)
from .graph import ShortestPathSolution, WeightedDigraph, solve_shortest_paths


@dataclass(frozen=True)
class PTGainParams:
    """Parameters of the prescribed-time gain schedule.

    gain(t) = gamma + 2 (1 + h) / (deadline - t); finite on [0, deadline)
    and divergent at the deadline.  Requires gamma > 0, h > -1/2,
    deadline > 0.
    """

    gamma: float
    h: float
    deadline: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.gamma) and self.gamma > 0.0):
            raise ValidationError("gamma must be positive")
        if not (math.isfinite(self.h) and self.h > -0.5):
            raise ValidationError("h must exceed -1/2")
        if not (math.isfinite(self.deadline) and self.deadline > 0.0):
            raise ValidationError("deadline must be positive")


def _checked_times(params: PTGainParams, t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0) or np.any(arr >= params.deadline):
        raise DomainError(f"time must lie in [0, {params.deadline}), got {t!r}")
    return arr


def _as_input_shape(template, arr: np.ndarray):
    return float(arr) if np.ndim(template) == 0 else arr


def gain(params: PTGainParams, t):
    """Time-varying feedback gain; strictly increasing, divergent at the deadline."""
    arr = _checked_times(params, t)
    out = params.gamma + 2.0 * (1.0 + params.h) / (params.deadline - arr)
    return _as_input_shape(t, out)


def log_integrating_factor(params: PTGainParams, t):
    """Natural log of the integrating factor: the running integral of the gain."""
    arr = _checked_times(params, t)
    out = params.gamma * arr + (2.0 + 2.0 * params.h) * np.log(
        params.deadline / (params.deadline - arr)
    )
    return _as_input_shape(t, out)


def integrating_factor(params: PTGainParams, t):
    """exp(integral of gain from 0 to t); equals 1 at t = 0 and blows up at the deadline."""
    arr = np.exp(np.asarray(log_integrating_factor(params, t), dtype=float))
    return _as_input_shape(t, arr)


@dataclass(frozen=True)
class IntegratorOptions:
    """Step-size policy for the fixed-order integrator.

    The step never exceeds ``max_step`` (default deadline/5000) nor
    ``remaining_fraction`` of the time left to the deadline, which keeps
    gain * step bounded as the gain blows up.
    """

    max_step: float | None = None
    remaining_fraction: float = 0.01


@dataclass(frozen=True)
class Trajectory:
    """Stored output of one integration: every accepted step, no interpolation."""

    params: PTGainParams
    p: np.ndarray
    source_mask: np.ndarray
    times: np.ndarray
    errors: np.ndarray
    x0: np.ndarray
    t_end: float

    @property
    def states(self) -> np.ndarray:
        return self.errors + self.p

    def error_of(self, node: int) -> np.ndarray:
        return self.errors[:, node - 1]

    def state_of(self, node: int) -> np.ndarray:
        return self.errors[:, node - 1] + self.p[node - 1]

    @property
    def final_errors(self) -> np.ndarray:
        return self.errors[-1]

    @property
    def final_states(self) -> np.ndarray:
        return self.errors[-1] + self.p

    def index_at(self, t: float) -> int:
        """Index of the stored time closest to ``t``."""
        return int(np.argmin(np.abs(self.times - t)))


def make_rhs(
    g: WeightedDigraph,
    sol: ShortestPathSolution,
    model: DisturbanceModel,
    params: PTGainParams,
) -> Callable[[float, np.ndarray], np.ndarray]:
    """Right-hand side f(t, e) of the error dynamics.

    Candidate values are e_j + (p_j + w_ij - p_i) + u_ij(t); the offset term
    vanishes on true-parent edges, so at the solution with zero disturbance
    the right-hand side is exactly zero.
    """
    p = np.asarray(sol.p, dtype=float)
    tails = np.array([i - 1 for i, _, _ in g.edges], dtype=np.intp)
    heads = np.array([j - 1 for _, j, _ in g.edges], dtype=np.intp)
    w = np.array([w for _, _, w in g.edges])
    offsets = p[heads] + w - p[tails]
    src = np.zeros(g.node_count, dtype=bool)
    src[[s - 1 for s in g.sources]] = True
    gamma, two_h2, deadline = params.gamma, 2.0 * (1.0 + params.h), params.deadline

    def rhs(t: float, e: np.ndarray) -> np.ndarray:
        cand = e[heads] + offsets + model.sample_all(t)
        best = np.full(e.shape, np.inf)
        np.minimum.at(best, tails, cand)
        out = (gamma + two_h2 / (deadline - t)) * (best - e)
        out[src] = 0.0
        return out

    return rhs


def simulate(
    g: WeightedDigraph,
    model: DisturbanceModel,
    params: PTGainParams,
    x0: Sequence[float],
    t_end: float,
    options: IntegratorOptions | None = None,
    sol: ShortestPathSolution | None = None,
) -> Trajectory:
    """Integrate the disturbed dynamics on [0, t_end] with classic RK4.

    Preconditions: source states start at exactly 0, every other initial
    state is at or above its shortest-path distance, and t_end stays a
    relative 1e-9 short of the deadline (the gain is singular there).
    Disturbances are sampled at each internal stage time.  Deterministic for
    fixed inputs; every accepted step is stored.
    """
    if sol is None:
        sol = solve_shortest_paths(g)
    opts = options or IntegratorOptions()
    n = g.node_count
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (n,):
        raise PreconditionError(f"x0 must have one entry per node, got shape {x0.shape}")
    p = np.asarray(sol.p, dtype=float)
    for s in sorted(g.sources):
        if x0[s - 1] != 0.0:
            raise PreconditionError(f"source node {s} must start at 0, got {x0[s - 1]!r}")
    for i in g.non_sources:
        if x0[i - 1] < p[i - 1]:
            raise PreconditionError(
                f"initial state of node {i} underestimates its distance "
                f"({x0[i - 1]!r} < {p[i - 1]!r})"
            )
    limit = params.deadline * (1.0 - 1e-9)
    if not 0.0 < t_end < limit:
        raise PreconditionError(f"t_end must lie in (0, {limit!r}), got {t_end!r}")
    if model.horizon < t_end:
        raise PreconditionError(
            f"disturbance model covers [0, {model.horizon}], t_end {t_end} is beyond it"
        )

    h_cap = opts.max_step if opts.max_step is not None else params.deadline / 5000.0
    if h_cap <= 0.0 or opts.remaining_fraction <= 0.0:
        raise PreconditionError("step bounds must be positive")
    rhs = make_rhs(g, sol, model, params)
    floor = 1e-15 * params.deadline
    src_mask = np.zeros(n, dtype=bool)
    src_mask[[s - 1 for s in g.sources]] = True

    e = x0 - p
    t = 0.0
    times = [0.0]
    errors = [e.copy()]
    while t < t_end:
        hs = min(h_cap, opts.remaining_fraction * (params.deadline - t))
        last = (t_end - t) <= hs
        if last:
            hs = t_end - t
        if hs <= floor:
            raise IntegrationError(f"step size underflow at t = {t!r}")
        k1 = rhs(t, e)
        k2 = rhs(t + 0.5 * hs, e + (0.5 * hs) * k1)
        k3 = rhs(t + 0.5 * hs, e + (0.5 * hs) * k2)
        k4 = rhs(t + hs, e + hs * k3)
        e = e + (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t_end if last else t + hs
        times.append(t)
        errors.append(e.copy())

    return Trajectory(
        params=params,
        p=p,
        source_mask=src_mask,
        times=np.array(times),
        errors=np.array(errors),
        x0=x0.copy(),
        t_end=float(t_end),
    )
