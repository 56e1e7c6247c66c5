"""Shared fixtures-by-hand: the worked two-state model, random instance
generators, and small independent oracles used to derive expected values."""

from __future__ import annotations

from itertools import product

import numpy as np

from credalmc import (
    ConstraintRow,
    ImpreciseMarkovChain,
    IntervalRow,
    RecursiveSpec,
    StateSpace,
    VertexRow,
    interval_witness,
)

# The two-state worked model used throughout: out of s0 the chance of moving
# to s1 lies in [0.1, 0.3]; out of s1 the chance of moving to s0 lies in
# [0.4, 0.6].  The "spec" initial set puts mass between 0.2 and 0.5 on s1.
E1_SPACE = StateSpace(("s0", "s1"))
E1_ROW_S0 = IntervalRow(lower=[0.7, 0.1], upper=[0.9, 0.3])
E1_ROW_S1 = IntervalRow(lower=[0.4, 0.4], upper=[0.6, 0.6])
E1_INITIAL = IntervalRow(lower=[0.5, 0.2], upper=[0.8, 0.5])


def e1_model(initial="spec") -> ImpreciseMarkovChain:
    if initial == "spec":
        init = E1_INITIAL
    elif initial == "vacuous":
        init = IntervalRow(lower=[0.0, 0.0], upper=[1.0, 1.0])
    else:
        init = initial
    return ImpreciseMarkovChain(
        states=E1_SPACE, initial=init, rows=(E1_ROW_S0, E1_ROW_S1)
    )


# ---------------------------------------------------------------------------
# random instance generators (all driven by a caller-provided Generator)

def random_pmf(rng, d):
    return rng.dirichlet(np.ones(d))


def random_interval_bounds(rng, d, max_width=0.4):
    center = rng.dirichlet(np.ones(d))
    width = rng.uniform(0.0, max_width, size=d)
    lower = np.maximum(center - width, 0.0)
    upper = np.minimum(center + width, 1.0)
    return lower, upper


def random_interval_row(rng, d):
    lower, upper = random_interval_bounds(rng, d)
    return IntervalRow(lower=lower, upper=upper)


def random_vertex_row(rng, d, max_vertices=3):
    k = int(rng.integers(1, max_vertices + 1))
    return VertexRow(vertices=np.array([random_pmf(rng, d) for _ in range(k)]))


def interval_to_constraints(lower, upper) -> ConstraintRow:
    d = len(lower)
    a = np.vstack([np.eye(d), -np.eye(d)])
    b = np.concatenate([upper, -lower])
    return ConstraintRow(a=a, b=b)


def random_constraint_row(rng, d):
    lower, upper = random_interval_bounds(rng, d)
    a = np.vstack([np.eye(d), -np.eye(d)])
    b = np.concatenate([upper, -lower])
    if rng.random() < 0.5:
        # One extra halfspace through a strictly interior margin of a point
        # known to be feasible, so the row stays nonempty.
        witness = interval_witness(IntervalRow(lower=lower, upper=upper))
        extra = rng.normal(size=d)
        a = np.vstack([a, extra])
        b = np.append(b, float(extra @ witness) + 0.05)
    return ConstraintRow(a=a, b=b)


ROW_KINDS = ("intervals", "vertices", "constraints")


def random_row(rng, d, kinds=ROW_KINDS, max_vertices=3):
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "intervals":
        return random_interval_row(rng, d)
    if kind == "vertices":
        return random_vertex_row(rng, d, max_vertices)
    return random_constraint_row(rng, d)


def random_model(rng, d, kinds=ROW_KINDS, max_vertices=3) -> ImpreciseMarkovChain:
    space = StateSpace(tuple(f"s{i}" for i in range(d)))
    rows = tuple(random_row(rng, d, kinds, max_vertices) for _ in range(d))
    initial = random_row(rng, d, kinds, max_vertices)
    return ImpreciseMarkovChain(states=space, initial=initial, rows=rows)


def random_gamble(rng, d, scale=2.0):
    return rng.uniform(-scale, scale, size=d)


def random_spec(rng, d, max_horizon=5, min_horizon=1) -> RecursiveSpec:
    n = int(rng.integers(min_horizon, max_horizon + 1))
    steps = tuple(
        (random_gamble(rng, d), random_gamble(rng, d)) for _ in range(n - 1)
    )
    return RecursiveSpec(g0=random_gamble(rng, d), steps=steps)


def singleton_model(rng, d):
    """A precise chain wrapped as singleton credal rows, plus its matrices."""
    space = StateSpace(tuple(f"s{i}" for i in range(d)))
    t = np.array([random_pmf(rng, d) for _ in range(d)])
    p0 = random_pmf(rng, d)
    rows = tuple(VertexRow(vertices=t[i][None, :]) for i in range(d))
    model = ImpreciseMarkovChain(
        states=space, initial=VertexRow(vertices=p0[None, :]), rows=rows
    )
    return model, p0, t


def sample_in_row(rng, row, n_samples=100, max_tries=8000):
    """Sample pmfs lying in (the convex hull of) a credal row by rejection."""
    out = []
    if isinstance(row, VertexRow):
        k = row.vertices.shape[0]
        for _ in range(n_samples):
            w = rng.dirichlet(np.ones(k))
            out.append(w @ row.vertices)
        return out
    if isinstance(row, IntervalRow):
        lower, upper = row.lower, row.upper
        accept = lambda p: bool(np.all(p <= upper + 1e-12))
    elif isinstance(row, ConstraintRow):
        d = row.dim
        lower = np.zeros(d)
        accept = lambda p: bool(np.all(row.a @ p <= row.b + 1e-12))
    else:
        raise TypeError(type(row).__name__)
    d = lower.size
    remaining = 1.0 - float(lower.sum())
    tries = 0
    while len(out) < n_samples and tries < max_tries:
        tries += 1
        p = lower + remaining * rng.dirichlet(np.ones(d))
        if accept(p):
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# small independent oracles

def endpoint_bruteforce_two_step_upper(model, f):
    """Componentwise max of the two-step expectation of f over all per-step,
    per-state interval endpoint choices (two-state interval rows only)."""
    extremes = []
    for row in model.rows:
        assert isinstance(row, IntervalRow) and row.dim == 2
        qs = sorted({float(row.lower[1]), float(row.upper[1])})
        extremes.append([np.array([1.0 - q, q]) for q in qs])
    f = np.asarray(f, dtype=float)
    best = np.full(2, -np.inf)
    for rows1 in product(*extremes):
        t1 = np.vstack(rows1)
        for rows2 in product(*extremes):
            t2 = np.vstack(rows2)
            best = np.maximum(best, t1 @ (t2 @ f))
    return best


def forward_conditional(t, path_value, n):
    """E[g(X_1..X_n) | X_1 = x] for a precise chain, by path enumeration."""
    d = t.shape[0]
    out = np.zeros(d)
    for x in range(d):
        for tail in product(range(d), repeat=n - 1):
            path = (x, *tail)
            prob = 1.0
            for a, b in zip(path[:-1], path[1:]):
                prob *= t[a, b]
            out[x] += prob * path_value(path)
    return out


def forward_unconditional(p0, t, path_value, n):
    return float(p0 @ forward_conditional(t, path_value, n))


def path_value_single_instant(f):
    return lambda path: float(f[path[-1]])


def path_value_sum(fs):
    return lambda path: float(sum(f[x] for f, x in zip(fs, path)))


def path_value_product(fs):
    return lambda path: float(np.prod([f[x] for f, x in zip(fs, path)]))


def path_value_hitting_probability(mask):
    return lambda path: 1.0 if any(mask[x] for x in path) else 0.0


def path_value_hitting_time(mask):
    def value(path):
        for i, x in enumerate(path):
            if mask[x]:
                return float(i)
        return float(len(path))

    return value
