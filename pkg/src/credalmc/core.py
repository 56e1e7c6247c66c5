"""Core domain types: state spaces, gambles, probability mass functions and
credal rows, plus whole-model validation.

A gamble is a real-valued function on the state space and is represented as a
plain 1-D float array.  A credal row is a nonempty set of probability mass
functions on the state space; three representations are supported (per-state
probability intervals, an explicit vertex list, and a system of linear
inequality constraints on the simplex).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

# Tolerance for normalisation and nonnegativity checks on probability vectors.
EPS_PROB = 1e-9
# Tolerance for membership tests of optimiser output in a credal row.
EPS_FEAS = 1e-8


class CapExceededError(RuntimeError):
    """A size or enumeration cap would be exceeded on an exponential code path."""


class NumericalError(RuntimeError):
    """A computation produced values that violate basic sanity bounds."""


class InfeasibleRowError(ValueError):
    """A credal row contains no probability mass function."""


def as_vector(values, size: int | None = None, name: str = "vector") -> np.ndarray:
    """Coerce to a finite 1-D float array, optionally checking its length."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if size is not None and arr.size != size:
        raise ValueError(f"{name} has length {arr.size}, expected {size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class StateSpace:
    """Ordered finite set of distinct state names."""

    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        if not self.labels:
            raise ValueError("state space must contain at least one state")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("state labels must be pairwise distinct")

    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown state {label!r}") from None

    def indicator(self, subset: Iterable[str]) -> np.ndarray:
        """Indicator gamble of a subset of states, given by their labels."""
        out = np.zeros(len(self.labels))
        for label in subset:
            out[self.index(label)] = 1.0
        return out


@dataclass(frozen=True)
class IntervalRow:
    """Credal row given by componentwise probability bounds.

    The row is the set of pmfs p with lower <= p <= upper.  Feasibility
    (lower <= upper, sum(lower) <= 1 <= sum(upper)) is checked by
    ``validate_model`` / ``lp.feasible``, not at construction time.
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = as_vector(self.lower, name="lower bounds")
        up = as_vector(self.upper, size=lo.size, name="upper bounds")
        object.__setattr__(self, "lower", _freeze(lo))
        object.__setattr__(self, "upper", _freeze(up))

    @property
    def dim(self) -> int:
        return self.lower.size


@dataclass(frozen=True)
class VertexRow:
    """Credal row given by an explicit, nonempty list of pmfs.

    Linear objectives attain their extrema on the listed vertices, so the
    row behaves like the convex hull of the list for every purpose here.
    """

    vertices: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.vertices, dtype=float)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValueError("vertex list must be a nonempty 2-D array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("vertex list contains non-finite entries")
        object.__setattr__(self, "vertices", _freeze(arr))

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]


@dataclass(frozen=True)
class ConstraintRow:
    """Credal row {p : a @ p <= b, p >= 0, sum(p) = 1}."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.ndim != 2:
            raise ValueError("constraint matrix must be two-dimensional")
        b = as_vector(self.b, size=a.shape[0], name="constraint bounds")
        if not np.all(np.isfinite(a)):
            raise ValueError("constraint matrix contains non-finite entries")
        object.__setattr__(self, "a", _freeze(a))
        object.__setattr__(self, "b", _freeze(b))

    @property
    def dim(self) -> int:
        return self.a.shape[1]


CredalRow = Union[IntervalRow, VertexRow, ConstraintRow]


@dataclass(frozen=True)
class ImpreciseMarkovChain:
    """A credal set of initial distributions plus one credal row per state.

    ``rows[i]`` constrains the one-step transition distribution out of state
    ``states.labels[i]``; the rows are specified separately, so every
    optimisation decomposes per state.  Instances are immutable; use
    ``validate_model`` to collect invariant violations.
    """

    states: StateSpace
    initial: CredalRow
    rows: tuple[CredalRow, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))

    @property
    def size(self) -> int:
        return self.states.size


def expectation(p, f) -> float:
    """Expectation of gamble ``f`` under pmf ``p``: sum over states of p*f."""
    p = as_vector(p, name="pmf")
    f = as_vector(f, size=p.size, name="gamble")
    return float(np.dot(p, f))


def is_pmf(p, tol: float = EPS_PROB) -> bool:
    """True iff ``p`` is a probability mass function within tolerance."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size == 0 or not np.all(np.isfinite(arr)):
        return False
    if np.any(arr < -tol) or np.any(arr > 1.0 + tol):
        return False
    return abs(float(arr.sum()) - 1.0) <= tol


def interval_witness(row: IntervalRow) -> np.ndarray:
    """Greedy feasible pmf of an interval row: start at the lower bounds and
    fill the remaining mass in state order, capped by the upper bounds."""
    p = np.array(row.lower, copy=True)
    remaining = 1.0 - float(p.sum())
    for i in range(p.size):
        if remaining <= 0.0:
            break
        add = min(row.upper[i] - row.lower[i], remaining)
        if add > 0.0:
            p[i] += add
            remaining -= add
    if remaining > EPS_FEAS:
        raise InfeasibleRowError("interval row has total upper mass below 1")
    return p


def row_contains(row: CredalRow, p, tol: float = EPS_FEAS) -> bool:
    """Membership test of a pmf in a credal row, within tolerance.

    Vertex rows test proximity to one of the listed vertices, which is the
    membership notion relevant for optimiser output.
    """
    p = as_vector(p, size=row.dim, name="pmf")
    if abs(float(p.sum()) - 1.0) > tol or np.any(p < -tol):
        return False
    if isinstance(row, IntervalRow):
        return bool(np.all(p >= row.lower - tol) and np.all(p <= row.upper + tol))
    if isinstance(row, VertexRow):
        return bool(np.min(np.max(np.abs(row.vertices - p), axis=1)) <= tol)
    if isinstance(row, ConstraintRow):
        return bool(np.all(row.a @ p <= row.b + tol))
    raise TypeError(f"unsupported credal row type {type(row).__name__}")


def _row_violations(row: CredalRow, size: int, where: str) -> list[str]:
    out: list[str] = []
    if row.dim != size:
        out.append(f"{where}: dimension {row.dim} does not match state count {size}")
        return out
    if isinstance(row, IntervalRow):
        if np.any(row.lower < -EPS_PROB):
            out.append(f"{where}: negative lower bound")
        if np.any(row.upper > 1.0 + EPS_PROB):
            out.append(f"{where}: upper bound above 1")
        if np.any(row.lower > row.upper + EPS_PROB):
            out.append(f"{where}: lower bound exceeds upper bound")
        if float(row.lower.sum()) > 1.0 + EPS_PROB:
            out.append(f"{where}: sum of lower bounds exceeds 1 "
                       f"(sum={float(row.lower.sum()):.6g})")
        if float(row.upper.sum()) < 1.0 - EPS_PROB:
            out.append(f"{where}: sum of upper bounds is below 1 "
                       f"(sum={float(row.upper.sum()):.6g})")
    elif isinstance(row, VertexRow):
        for k, v in enumerate(row.vertices):
            if np.any(v < -EPS_PROB) or np.any(v > 1.0 + EPS_PROB):
                out.append(f"{where}: vertex {k} has entries outside [0, 1]")
            if abs(float(v.sum()) - 1.0) > EPS_PROB:
                out.append(f"{where}: vertex {k} does not sum to 1 "
                           f"(sum={float(v.sum()):.6g})")
    elif isinstance(row, ConstraintRow):
        from . import lp

        if not lp.feasible(row):
            out.append(f"{where}: constraint system admits no pmf")
    else:
        out.append(f"{where}: unsupported row type {type(row).__name__}")
    return out


def validate_model(model: ImpreciseMarkovChain) -> list[str]:
    """Collect every invariant violation of a model; empty means valid."""
    size = model.states.size
    out: list[str] = []
    if len(model.rows) != size:
        out.append(f"model has {len(model.rows)} transition rows, expected {size}")
    for label, row in zip(model.states.labels, model.rows):
        out.extend(_row_violations(row, size, f"row {label!r}"))
    out.extend(_row_violations(model.initial, size, "initial set"))
    return out
