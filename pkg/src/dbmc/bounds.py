"""Closed-form error bands for the disturbed dynamics, and the early stop time.

Chains are source-first node sequences as produced by ``graph.parent_chain``;
a chain of ell + 1 nodes has depth ell.  Every evaluator accepts a scalar
time or an array of times and broadcasts accordingly.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .dynamics import PTGainParams, log_integrating_factor
from .errors import DomainError, InfeasibleError
from .graph import ShortestPathSolution, parent_chain


def chain_initial_errors(
    sol: ShortestPathSolution, x0: Sequence[float], chain: Sequence[int]
) -> np.ndarray:
    """Initial errors x0 - p along a chain, source first."""
    x0 = np.asarray(x0, dtype=float)
    return np.array([x0[k - 1] - sol.p[k - 1] for k in chain])


def nominal_envelope(e0_chain: Sequence[float], params: PTGainParams, t):
    """Error ceiling along a parent chain when edge weights are undisturbed.

    With f(t) the integrating factor and L = ln f(t), the chain
    i_0, ..., i_ell (source first, initial errors e0) obeys

        envelope(t) = sum_k e0[k] * L^(ell - k) / (f(t) * (ell - k)!).

    At t = 0 only the k = ell term survives (0^0 = 1), so the envelope
    starts at e0[-1]; the numerator grows logarithmically in f while the
    denominator grows linearly, so the envelope vanishes at the deadline.
    """
    e0 = np.asarray(e0_chain, dtype=float)
    lp = np.asarray(log_integrating_factor(params, t), dtype=float)
    total = np.zeros_like(lp)
    fact = 1.0
    for m, coeff in enumerate(e0[::-1]):  # m counts hops above each chain node
        if m > 0:
            fact *= m
        total = total + coeff * lp**m / fact
    out = total * np.exp(-lp)
    return float(out) if np.ndim(t) == 0 else out


def chain_upper_bound(
    e0_chain: Sequence[float],
    edge_caps: Sequence[float],
    params: PTGainParams,
    t,
):
    """Upper error bound along a chain under per-edge disturbance caps.

    ``edge_caps`` holds the upper envelope of each chain edge (child to
    parent), one per hop; the bound is the nominal envelope plus their sum,
    which is also its limit at the deadline.
    """
    if len(edge_caps) != len(e0_chain) - 1:
        raise DomainError(
            f"expected {len(e0_chain) - 1} edge caps, got {len(edge_caps)}"
        )
    return nominal_envelope(e0_chain, params, t) + float(sum(edge_caps))


def proportional_bounds(
    sol: ShortestPathSolution,
    x0: Sequence[float],
    alpha_lower: float,
    alpha_upper: float,
    node: int,
    params: PTGainParams,
    t,
):
    """(lower, upper) error band when -a1*w <= u <= a2*w on every edge.

    lower = -a1 * p_node (constant); upper = nominal envelope + a2 * p_node.
    Both fractions must lie in [0, 1).
    """
    if not (0.0 <= alpha_lower < 1.0 and 0.0 <= alpha_upper < 1.0):
        raise DomainError("fractional disturbance bounds must lie in [0, 1)")
    chain = parent_chain(sol, node)
    env = nominal_envelope(chain_initial_errors(sol, x0, chain), params, t)
    p_i = sol.p[node - 1]
    upper = env + alpha_upper * p_i
    low = -alpha_lower * p_i
    if np.ndim(t) == 0:
        return low, float(upper)
    return np.full_like(np.asarray(upper), low), upper


def uniform_bounds(
    sol: ShortestPathSolution,
    sol_minus: ShortestPathSolution,
    x0: Sequence[float],
    u_minus: float,
    u_plus: float,
    node: int,
    params: PTGainParams,
    t,
):
    """(lower, upper) error band under uniform disturbance bounds.

    lower = -(D_minus - 1) * u_minus with D_minus the effective diameter of
    the shrunk-weight graph; upper = depth * u_plus + nominal envelope.
    """
    if min(u_minus, u_plus) < 0.0:
        raise DomainError("uniform disturbance bounds must be nonnegative")
    chain = parent_chain(sol, node)
    depth = len(chain) - 1
    env = nominal_envelope(chain_initial_errors(sol, x0, chain), params, t)
    upper = env + depth * u_plus
    low = -(sol_minus.effective_diameter - 1) * u_minus
    if np.ndim(t) == 0:
        return low, float(upper)
    return np.full_like(np.asarray(upper), low), upper


def power_law_envelope(
    max_initial_error: float, depth: int, q: float, params: PTGainParams, t
):
    """Closed-form relaxation of the nominal envelope used to place the stop time.

        max_initial_error * (q^depth - 1)/(q - 1) * ((deadline - t)/deadline)^x,
        x = (2h + 2)(1 - 1/q),  q > 1.

    Strictly dominates the nominal envelope of any depth-``depth`` chain with
    zero source error and initial errors at most ``max_initial_error``, for
    every t in (0, deadline); defined up to t = deadline where it vanishes.
    """
    if not q > 1.0:
        raise DomainError(f"q must exceed 1, got {q!r}")
    if max_initial_error < 0.0:
        raise DomainError("max_initial_error must be nonnegative")
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > params.deadline):
        raise DomainError(f"time must lie in [0, {params.deadline}], got {t!r}")
    geo = (q**depth - 1.0) / (q - 1.0)
    expo = (2.0 * params.h + 2.0) * (1.0 - 1.0 / q)
    out = max_initial_error * geo * ((params.deadline - arr) / params.deadline) ** expo
    return float(out) if np.ndim(t) == 0 else out


def worst_case_offset(
    u_minus: float, u_plus: float, diameter: int, diameter_minus: int
) -> float:
    """Largest steady error offset the disturbances can sustain network-wide:
    max{(diameter_minus - 1) u_minus, (diameter - 1) u_plus}."""
    if min(u_minus, u_plus) < 0.0:
        raise DomainError("uniform disturbance bounds must be nonnegative")
    if min(diameter, diameter_minus) < 1:
        raise DomainError("diameters must be at least 1")
    return max((diameter_minus - 1) * u_minus, (diameter - 1) * u_plus)


def early_termination_time(
    path_gap: float,
    u_minus: float,
    u_plus: float,
    diameter: int,
    diameter_minus: int,
    max_initial_error: float,
    q: float,
    params: PTGainParams,
) -> float:
    """Earliest stop time with a guaranteed correct parent choice at every node.

    Requires the margin condition (u_minus + u_plus)/2 + offset < path_gap/2,
    with offset = :func:`worst_case_offset`; otherwise raises
    :class:`InfeasibleError`.  The returned time is

        deadline * (1 - ratio^(1 / ((2h + 2)(1 - 1/q)))),
        ratio = ((path_gap - u_minus - u_plus)/2 - offset)
                / (max_initial_error * (q^(diameter - 1) - 1)/(q - 1)),

    computed in log space so large diameters cannot overflow.  A nonpositive
    result means stopping is already safe at t = 0.  Strictly below the
    deadline whenever the initial errors are not all zero; when the exact
    value rounds to the deadline it is nudged to the nearest float below.
    """
    if not q > 1.0:
        raise DomainError(f"q must exceed 1, got {q!r}")
    if not (math.isfinite(path_gap) and path_gap > 0.0):
        raise DomainError(f"path gap must be positive and finite, got {path_gap!r}")
    if max_initial_error < 0.0:
        raise DomainError("max_initial_error must be nonnegative")
    offset = worst_case_offset(u_minus, u_plus, diameter, diameter_minus)
    margin = 0.5 * (path_gap - u_minus - u_plus) - offset
    if margin <= 0.0:
        raise InfeasibleError(
            f"margin condition fails: (u- + u+)/2 + {offset} >= {path_gap}/2"
        )
    if max_initial_error == 0.0 or diameter == 1:
        return 0.0
    z = (diameter - 1) * math.log(q)
    log_den = (
        math.log(max_initial_error) + z + math.log1p(-math.exp(-z)) - math.log(q - 1.0)
    )
    expo = 1.0 / ((2.0 * params.h + 2.0) * (1.0 - 1.0 / q))
    value = params.deadline * (1.0 - math.exp(expo * (math.log(margin) - log_den)))
    return min(value, math.nextafter(params.deadline, 0.0))


def optimal_q(
    path_gap: float,
    u_minus: float,
    u_plus: float,
    diameter: int,
    diameter_minus: int,
    max_initial_error: float,
    params: PTGainParams,
    q_grid: Sequence[float] | None = None,
) -> tuple[float, float]:
    """Grid-plus-refinement sweep of q > 1 minimizing the guaranteed stop time.

    Returns (q, stop_time).  Feasibility does not depend on q, so an
    InfeasibleError from the underlying evaluation propagates unchanged.
    """
    grid = (
        np.asarray(q_grid, dtype=float)
        if q_grid is not None
        else np.linspace(1.02, 20.0, 400)
    )
    if np.any(grid <= 1.0):
        raise DomainError("every grid point must exceed 1")

    def ts_of(q: float) -> float:
        return early_termination_time(
            path_gap, u_minus, u_plus, diameter, diameter_minus,
            max_initial_error, q, params,
        )

    values = [ts_of(float(q)) for q in grid]
    k = int(np.argmin(values))
    lo = float(grid[max(0, k - 1)])
    hi = float(grid[min(len(grid) - 1, k + 1)])
    for _ in range(60):  # golden-section refinement on the bracketing interval
        m1 = lo + 0.382 * (hi - lo)
        m2 = lo + 0.618 * (hi - lo)
        if ts_of(m1) <= ts_of(m2):
            hi = m2
        else:
            lo = m1
    q_best = 0.5 * (lo + hi)
    return q_best, ts_of(q_best)
