"""Builders that express standard inference families as recursive targets,
plus the growing-horizon approximation loop for unbounded-horizon hitting
inferences.

Builders cover functions of a single time instant, sums, time averages,
products, hitting probabilities and hitting times.  The hitting time follows
the recursion-consistent convention: it counts the steps strictly before the
first entry into the target set, is 0 when the chain starts inside the set,
and is capped at the horizon when the set is not reached within it.
"""

from __future__ import annotations

import warnings
from concurrent.futures import Executor
from dataclasses import dataclass

import numpy as np

from .core import ImpreciseMarkovChain, StateSpace, as_vector
from .engine import RecursiveSpec, recursion_step, unconditional_bounds
from .lp import LpCounter
from .operators import lower_transition, upper_transition


class ConvergenceCaveatWarning(UserWarning):
    """The growing-horizon limit is only guaranteed to converge to the
    unbounded-horizon value when every transition credal set is closed and
    convex."""


@dataclass(frozen=True)
class LimitResult:
    """Outcome of the growing-horizon loop, including the per-horizon traces."""

    upper: float
    lower: float
    upper_conditional: np.ndarray
    lower_conditional: np.ndarray
    horizon_reached: int
    converged: bool
    upper_trace: tuple[float, ...]
    lower_trace: tuple[float, ...]
    lp_calls: int


def spec_single_instant(f, n: int) -> RecursiveSpec:
    """Target f(X_n): the bound vectors are the (n-1)-fold operator iterates of f."""
    f = as_vector(f, name="gamble")
    if n < 1:
        raise ValueError("horizon must be at least 1")
    ones = np.ones(f.size)
    zeros = np.zeros(f.size)
    return RecursiveSpec(g0=f, steps=((ones, zeros),) * (n - 1))


def spec_sum(fs) -> RecursiveSpec:
    """Target sum of f_k(X_k) over k = 1..n for the given list of gambles."""
    fs = [as_vector(f, name="gamble") for f in fs]
    if not fs:
        raise ValueError("need at least one gamble")
    d = fs[0].size
    ones = np.ones(d)
    # The seed holds the last gamble; each step folds in the one before it.
    return RecursiveSpec(g0=fs[-1], steps=tuple((ones, f) for f in fs[-2::-1]))


def spec_time_average(f, n: int) -> tuple[RecursiveSpec, float]:
    """Target (1/n) * sum of f(X_k): a sum target plus a scale to apply to
    all four resulting bounds (bounds scale linearly under nonnegative
    factors)."""
    f = as_vector(f, name="gamble")
    if n < 1:
        raise ValueError("horizon must be at least 1")
    return spec_sum([f] * n), 1.0 / n


def spec_product(fs) -> RecursiveSpec:
    """Target product of f_k(X_k) over k = 1..n.

    Sign-changing factors are handled by the two-track recursion, so the
    gambles may take negative values.
    """
    fs = [as_vector(f, name="gamble") for f in fs]
    if not fs:
        raise ValueError("need at least one gamble")
    zeros = np.zeros(fs[0].size)
    return RecursiveSpec(g0=fs[-1], steps=tuple((f, zeros) for f in fs[-2::-1]))


def spec_hitting_probability(space: StateSpace, targets, n: int) -> RecursiveSpec:
    """Target: indicator that at least one of the first n states lies in the
    target set."""
    if n < 1:
        raise ValueError("horizon must be at least 1")
    inside = space.indicator(targets)
    outside = 1.0 - inside
    return RecursiveSpec(g0=inside, steps=((outside, inside),) * (n - 1))


def spec_hitting_time(space: StateSpace, targets, n: int) -> RecursiveSpec:
    """Target: number of steps before the first entry into the target set,
    0 when starting inside it, capped at n when unhit within the horizon."""
    if n < 1:
        raise ValueError("horizon must be at least 1")
    inside = space.indicator(targets)
    if not inside.any():
        warnings.warn(
            "hitting time of an empty target set grows linearly with the horizon",
            stacklevel=2,
        )
    outside = 1.0 - inside
    return RecursiveSpec(g0=outside, steps=((outside, outside),) * (n - 1))


_LIMIT_FAMILIES = ("hitting_probability", "hitting_time")


def limit_infer(
    model: ImpreciseMarkovChain,
    family: str,
    targets,
    tol: float = 1e-6,
    max_horizon: int = 100_000,
    executor: Executor | None = None,
) -> LimitResult:
    """Approximate an unbounded-horizon hitting inference by growing the horizon.

    Runs the recursion incrementally, one extra time instant per horizon
    (two operator applications plus two initial-set optimisations each), and
    stops once both unconditional bounds move by less than ``tol`` between
    consecutive horizons.  The per-horizon conditional vectors coincide
    bit-for-bit with a fresh fixed-horizon computation, since the hitting
    families use the same step weights at every instant.
    """
    if family not in _LIMIT_FAMILIES:
        raise ValueError(f"family must be one of {_LIMIT_FAMILIES}, got {family!r}")
    if tol <= 0.0:
        raise ValueError("tolerance must be positive")
    if max_horizon < 2:
        raise ValueError("max_horizon must be at least 2")
    warnings.warn(
        "the growing-horizon limit is guaranteed to converge to the "
        "unbounded-horizon value only for closed convex transition sets",
        ConvergenceCaveatWarning,
        stacklevel=2,
    )

    inside = model.states.indicator(targets)
    outside = 1.0 - inside
    if family == "hitting_probability":
        g0, h, g = inside, outside, inside
    else:
        g0, h, g = outside, outside, outside

    counter = LpCounter()
    upper_cond = g0.copy()
    lower_cond = g0.copy()
    upper, lower = unconditional_bounds(model, upper_cond, lower_cond, counter)
    upper_trace = [upper]
    lower_trace = [lower]
    converged = False
    horizon = 1
    while horizon < max_horizon:
        horizon += 1
        upper_next = upper_transition(model, upper_cond, counter, executor)
        lower_next = lower_transition(model, lower_cond, counter, executor)
        upper_cond, lower_cond = recursion_step(h, g, upper_next, lower_next)
        upper, lower = unconditional_bounds(model, upper_cond, lower_cond, counter)
        upper_trace.append(upper)
        lower_trace.append(lower)
        if not (np.isfinite(upper) and np.isfinite(lower)):
            break
        if (
            abs(upper_trace[-1] - upper_trace[-2]) < tol
            and abs(lower_trace[-1] - lower_trace[-2]) < tol
        ):
            converged = True
            break
    return LimitResult(
        upper=upper_trace[-1],
        lower=lower_trace[-1],
        upper_conditional=upper_cond,
        lower_conditional=lower_cond,
        horizon_reached=horizon,
        converged=converged,
        upper_trace=tuple(upper_trace),
        lower_trace=tuple(lower_trace),
        lp_calls=counter.calls,
    )
