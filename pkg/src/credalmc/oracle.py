"""Exponential-cost reference computations used to validate the recursion.

Three independent routes are provided: explicit materialisation of the
recursive target on all histories, full backward contraction of a history
function via the extended operators, and brute-force enumeration of extreme
compatible processes for vertex-style rows.  They exist purely to check the
linear-time engine on desk-scale instances; nothing here is performance work.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .core import (
    CapExceededError,
    CredalRow,
    ImpreciseMarkovChain,
    IntervalRow,
    VertexRow,
)
from .engine import RecursiveSpec
from .lp import LpCounter
from .operators import (
    DEFAULT_HISTORY_CAP,
    HistoryFunction,
    check_history_cap,
    extended_lower,
    extended_upper,
)

# Cap on the number of enumerated process assignments (summed over starting
# states), which bounds the cost of the brute-force envelope check.
DEFAULT_ASSIGNMENT_CAP = 1_000_000


def materialize_path_function(
    spec: RecursiveSpec, cap: int = DEFAULT_HISTORY_CAP
) -> HistoryFunction:
    """Evaluate the recursive target explicitly on every state history.

    Step k prepends one time instant: with the accumulated values t on
    suffix histories, the new value on (x, suffix) is h_k(x) * t(suffix)
    + g_k(x).  This is the definition the engine never expands; the result
    has d**horizon entries.
    """
    d = spec.dim
    check_history_cap(d, spec.horizon, cap)
    values = spec.g0.copy()
    for h, g in spec.steps:
        values = (h[:, None] * values[None, :] + g[:, None]).ravel()
    return HistoryFunction(d, spec.horizon, values)


def naive_conditional_bounds(
    model: ImpreciseMarkovChain,
    hist: HistoryFunction,
    counter: LpCounter | None = None,
    cap: int = DEFAULT_HISTORY_CAP,
) -> tuple[np.ndarray, np.ndarray]:
    """Exact conditional bounds of a history function by backward contraction.

    Repeatedly applies the extended upper and lower operators until only the
    first time index remains.  Contracting horizon j+1 to j costs d**j row
    optimisations per side, so the total is 2 * sum of d**i for i = 1..n-1,
    exponential in the horizon.  Exact for every function of finitely many
    time instants, which is what makes it an oracle for the engine.
    """
    if hist.n_states != model.size:
        raise ValueError("history function does not match the model's state count")
    check_history_cap(hist.n_states, hist.horizon, cap)
    upper = hist
    lower = hist
    while upper.horizon > 1:
        upper = extended_upper(model, upper, counter, cap)
        lower = extended_lower(model, lower, counter, cap)
    return upper.values.copy(), lower.values.copy()


def _row_extreme_points(row: CredalRow, where: str) -> list[np.ndarray]:
    if isinstance(row, VertexRow):
        return [np.array(v, copy=True) for v in row.vertices]
    if isinstance(row, IntervalRow) and row.dim == 2:
        # On two states the interval row is a segment; its endpoints are the
        # pmfs with maximal mass on either state.
        lo, up = row.lower, row.upper
        p0_hi = min(up[0], 1.0 - lo[1])
        p0_lo = max(lo[0], 1.0 - up[1])
        points = [np.array([p0_hi, 1.0 - p0_hi])]
        if abs(p0_lo - p0_hi) > 1e-15:
            points.append(np.array([p0_lo, 1.0 - p0_lo]))
        return points
    raise ValueError(
        f"{where}: vertex enumeration needs vertex rows "
        "(or two-state interval rows, which convert to their endpoints)"
    )


def enumerate_vertex_processes(
    model: ImpreciseMarkovChain,
    hist: HistoryFunction,
    cap: int = DEFAULT_ASSIGNMENT_CAP,
) -> tuple[np.ndarray, np.ndarray]:
    """Brute-force envelope over extreme compatible processes, given the start.

    A compatible process may pick a different row element after every
    history, so one assignment attaches an extreme pmf to every history node
    of depth below the horizon.  For each assignment the precise conditional
    expectation of the history function is evaluated by plain forward
    weighting; the componentwise maximum and minimum over assignments are
    returned.  Assignments for different starting states never interact, so
    the enumeration runs per starting state; the cap bounds the total number
    of assignments across all starts.
    """
    d = model.size
    if hist.n_states != d:
        raise ValueError("history function does not match the model's state count")
    n = hist.horizon
    values = hist.values
    if n == 1:
        return values.copy(), values.copy()

    extremes = [
        _row_extreme_points(row, f"row {label!r}")
        for label, row in zip(model.states.labels, model.rows)
    ]

    # History nodes of depth 1..n-1 in the subtree of each starting state,
    # identified by (flat prefix index, depth); node order is deterministic.
    total_assignments = 0
    per_state_nodes: list[list[tuple[int, int]]] = []
    for x in range(d):
        nodes = []
        level = [(x, 1)]
        while level:
            nodes.extend(level)
            level = [
                (idx * d + y, depth + 1)
                for idx, depth in level
                if depth + 1 <= n - 1
                for y in range(d)
            ]
        per_state_nodes.append(nodes)
        count = 1
        for idx, _ in nodes:
            count *= len(extremes[idx % d])
        total_assignments += count
        if total_assignments > cap:
            raise CapExceededError(
                f"process enumeration needs more than {cap} assignments"
            )

    upper = np.empty(d)
    lower = np.empty(d)
    for x in range(d):
        nodes = per_state_nodes[x]
        node_pos = {node: j for j, node in enumerate(nodes)}
        choice_lists = [extremes[idx % d] for idx, _ in nodes]
        best = -np.inf
        worst = np.inf
        for assignment in product(*choice_lists):

            def path_expectation(idx: int, depth: int) -> float:
                if depth == n:
                    return float(values[idx])
                pmf = assignment[node_pos[(idx, depth)]]
                return sum(
                    pmf[y] * path_expectation(idx * d + y, depth + 1)
                    for y in range(d)
                    if pmf[y] != 0.0
                )

            value = path_expectation(x, 1)
            if value > best:
                best = value
            if value < worst:
                worst = value
        upper[x] = best
        lower[x] = worst
    return upper, lower
