"""Command-line interface: model and query file formats, the three commands
(validate, infer, check) and deterministic result serialisation.

Model and query documents are JSON.  A model document looks like

    {"states": ["s0", "s1"],
     "rows": {"s0": {"intervals": {"lower": [0.7, 0.1], "upper": [0.9, 0.3]}},
              "s1": {"vertices": [[0.4, 0.6], [0.6, 0.4]]}},
     "initial": {"constraints": {"A": [[1.0, 0.0]], "b": [0.8]}}}

and a query document names a kind plus its parameters, e.g.

    {"kind": "hitting_probability", "A": ["s1"], "n": 2}
    {"kind": "custom", "g0": {"s1": 1.0},
     "steps": [{"h": {"s0": 1.0}, "g": {"s1": 1.0}}]}

Gambles are state-name-to-value maps; omitted states default to 0.  Hitting
kinds accept an optional {"limit": {"tol": ..., "max_horizon": ...}} object
to request the growing-horizon approximation instead of a fixed horizon.

Exit codes: 0 success, 2 parse or validation error, 3 numerical failure,
4 size cap exceeded (and 1 for a check that found a discrepancy).
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    CapExceededError,
    ConstraintRow,
    CredalRow,
    ImpreciseMarkovChain,
    IntervalRow,
    NumericalError,
    StateSpace,
    VertexRow,
    validate_model,
)
from .engine import RecursiveSpec, conditional_bounds, infer
from .inferences import (
    limit_infer,
    spec_hitting_probability,
    spec_hitting_time,
    spec_product,
    spec_single_instant,
    spec_sum,
    spec_time_average,
)
from .lp import LpCounter
from .operators import DEFAULT_HISTORY_CAP
from .oracle import materialize_path_function, naive_conditional_bounds

DEFAULT_TOL = 1e-6
DEFAULT_MAX_HORIZON = 100_000
CHECK_TOLERANCE = 1e-8


class DocumentError(ValueError):
    """A model or query document failed to parse or validate."""


# ---------------------------------------------------------------------------
# parsing

def _require(doc: dict, key: str, kind: str):
    if not isinstance(doc, dict):
        raise DocumentError(f"{kind} document must be a JSON object")
    if key not in doc:
        raise DocumentError(f"{kind} document is missing the {key!r} field")
    return doc[key]


def _parse_numbers(values, where: str) -> list[float]:
    if not isinstance(values, list):
        raise DocumentError(f"{where} must be a list of numbers")
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise DocumentError(f"{where} must contain only numbers")
        out.append(float(v))
    return out


def parse_row(doc, where: str) -> CredalRow:
    """Build a credal row from its document form."""
    if not isinstance(doc, dict) or len(doc) != 1:
        raise DocumentError(
            f"{where} must be an object with exactly one of "
            "'intervals', 'vertices' or 'constraints'"
        )
    (key, body), = doc.items()
    try:
        if key == "intervals":
            lower = _parse_numbers(_require(body, "lower", where), f"{where}.lower")
            upper = _parse_numbers(_require(body, "upper", where), f"{where}.upper")
            return IntervalRow(lower=np.array(lower), upper=np.array(upper))
        if key == "vertices":
            if not isinstance(body, list) or not body:
                raise DocumentError(f"{where}.vertices must be a nonempty list")
            rows = [_parse_numbers(v, f"{where}.vertices[{i}]")
                    for i, v in enumerate(body)]
            return VertexRow(vertices=np.array(rows))
        if key == "constraints":
            a = _require(body, "A", where)
            b = _parse_numbers(_require(body, "b", where), f"{where}.b")
            if not isinstance(a, list):
                raise DocumentError(f"{where}.A must be a list of rows")
            mat = [_parse_numbers(r, f"{where}.A[{i}]") for i, r in enumerate(a)]
            return ConstraintRow(a=np.array(mat).reshape(len(mat), -1), b=np.array(b))
    except ValueError as exc:
        raise DocumentError(f"{where}: {exc}") from exc
    raise DocumentError(f"{where}: unknown row representation {key!r}")


def parse_model(doc) -> ImpreciseMarkovChain:
    """Build a model from its document form (structural checks only)."""
    states = _require(doc, "states", "model")
    if not isinstance(states, list) or not all(isinstance(s, str) for s in states):
        raise DocumentError("'states' must be a list of state names")
    try:
        space = StateSpace(tuple(states))
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc
    rows_doc = _require(doc, "rows", "model")
    if not isinstance(rows_doc, dict):
        raise DocumentError("'rows' must map state names to row objects")
    unknown = sorted(set(rows_doc) - set(states))
    if unknown:
        raise DocumentError(f"'rows' mentions unknown states: {', '.join(unknown)}")
    missing = [s for s in states if s not in rows_doc]
    if missing:
        raise DocumentError(f"'rows' is missing states: {', '.join(missing)}")
    rows = tuple(parse_row(rows_doc[s], f"rows[{s!r}]") for s in states)
    initial = parse_row(_require(doc, "initial", "model"), "initial")
    return ImpreciseMarkovChain(states=space, initial=initial, rows=rows)


def row_to_document(row: CredalRow) -> dict:
    if isinstance(row, IntervalRow):
        return {"intervals": {"lower": list(row.lower), "upper": list(row.upper)}}
    if isinstance(row, VertexRow):
        return {"vertices": [list(v) for v in row.vertices]}
    if isinstance(row, ConstraintRow):
        return {"constraints": {"A": [list(r) for r in row.a], "b": list(row.b)}}
    raise TypeError(f"unsupported credal row type {type(row).__name__}")


def model_to_document(model: ImpreciseMarkovChain) -> dict:
    return {
        "states": list(model.states.labels),
        "rows": {
            label: row_to_document(row)
            for label, row in zip(model.states.labels, model.rows)
        },
        "initial": row_to_document(model.initial),
    }


def _parse_gamble(doc, space: StateSpace, where: str) -> np.ndarray:
    if not isinstance(doc, dict):
        raise DocumentError(f"{where} must map state names to numbers")
    out = np.zeros(space.size)
    for name, value in doc.items():
        try:
            idx = space.index(name)
        except KeyError:
            raise DocumentError(f"{where} references unknown state {name!r}") from None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise DocumentError(f"{where}[{name!r}] must be a number")
        out[idx] = float(value)
    return out


def _parse_targets(doc, space: StateSpace, where: str) -> list[str]:
    if not isinstance(doc, list) or not all(isinstance(s, str) for s in doc):
        raise DocumentError(f"{where} must be a list of state names")
    for name in doc:
        try:
            space.index(name)
        except KeyError:
            raise DocumentError(f"{where} references unknown state {name!r}") from None
    return list(doc)


def _parse_horizon(doc, kind: str) -> int:
    n = _require(doc, "n", "query")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DocumentError(f"query kind {kind!r} needs an integer horizon n >= 1")
    return n


@dataclass(frozen=True)
class Query:
    """A parsed query: either a fixed-horizon spec (with an output scale) or
    a limit request for one of the hitting families."""

    kind: str
    spec: RecursiveSpec | None
    scale: float
    limit_family: str | None = None
    limit_targets: tuple[str, ...] = ()
    limit_tol: float | None = None
    limit_max_horizon: int | None = None


_HITTING_KINDS = ("hitting_probability", "hitting_time")
_KINDS = ("single_instant", "sum", "time_average", "product") + _HITTING_KINDS + (
    "custom",
)


def parse_query(doc, space: StateSpace) -> Query:
    kind = _require(doc, "kind", "query")
    if kind not in _KINDS:
        raise DocumentError(
            f"unknown query kind {kind!r}; expected one of {', '.join(_KINDS)}"
        )
    if "limit" in doc and kind not in _HITTING_KINDS:
        raise DocumentError("'limit' is only allowed with the hitting kinds")

    scale = 1.0
    if kind == "single_instant":
        f = _parse_gamble(_require(doc, "f", "query"), space, "f")
        spec = spec_single_instant(f, _parse_horizon(doc, kind))
    elif kind in ("sum", "product"):
        fs_doc = _require(doc, "fs", "query")
        if not isinstance(fs_doc, list) or not fs_doc:
            raise DocumentError("'fs' must be a nonempty list of gambles")
        fs = [_parse_gamble(g, space, f"fs[{i}]") for i, g in enumerate(fs_doc)]
        spec = spec_sum(fs) if kind == "sum" else spec_product(fs)
    elif kind == "time_average":
        f = _parse_gamble(_require(doc, "f", "query"), space, "f")
        spec, scale = spec_time_average(f, _parse_horizon(doc, kind))
    elif kind in _HITTING_KINDS:
        targets = _parse_targets(_require(doc, "A", "query"), space, "A")
        if "limit" in doc:
            limit = doc["limit"]
            if not isinstance(limit, dict):
                raise DocumentError("'limit' must be an object")
            tol = limit.get("tol")
            max_horizon = limit.get("max_horizon")
            if tol is not None and (
                isinstance(tol, bool) or not isinstance(tol, (int, float)) or tol <= 0
            ):
                raise DocumentError("'limit.tol' must be a positive number")
            if max_horizon is not None and (
                isinstance(max_horizon, bool)
                or not isinstance(max_horizon, int)
                or max_horizon < 2
            ):
                raise DocumentError("'limit.max_horizon' must be an integer >= 2")
            return Query(
                kind=kind,
                spec=None,
                scale=1.0,
                limit_family=kind,
                limit_targets=tuple(targets),
                limit_tol=None if tol is None else float(tol),
                limit_max_horizon=max_horizon,
            )
        n = _parse_horizon(doc, kind)
        if kind == "hitting_probability":
            spec = spec_hitting_probability(space, targets, n)
        else:
            spec = spec_hitting_time(space, targets, n)
    else:  # custom
        g0 = _parse_gamble(_require(doc, "g0", "query"), space, "g0")
        steps_doc = doc.get("steps", [])
        if not isinstance(steps_doc, list):
            raise DocumentError("'steps' must be a list of {h, g} objects")
        steps = []
        for i, step in enumerate(steps_doc):
            if not isinstance(step, dict) or "h" not in step or "g" not in step:
                raise DocumentError(
                    f"steps[{i}] must be an object with 'h' and 'g' gambles"
                )
            h = _parse_gamble(step["h"], space, f"steps[{i}].h")
            g = _parse_gamble(step["g"], space, f"steps[{i}].g")
            steps.append((h, g))
        spec = RecursiveSpec(g0=g0, steps=tuple(steps))
    return Query(kind=kind, spec=spec, scale=scale)


# ---------------------------------------------------------------------------
# serialisation

def _format_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    value = float(x)
    if not np.isfinite(value):
        raise NumericalError(f"cannot serialise non-finite value {value}")
    return format(value, ".17g")


def dumps_document(doc, indent: int = 0) -> str:
    """Deterministic JSON emitter: insertion-ordered keys, numbers at 17
    significant digits.  The standard encoder cannot pin float formatting."""
    pad = "  " * indent
    if isinstance(doc, dict):
        if not doc:
            return "{}"
        items = [
            f'{pad}  {json.dumps(str(k))}: {dumps_document(v, indent + 1)}'
            for k, v in doc.items()
        ]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(doc, (list, tuple)):
        if len(doc) == 0:
            return "[]"
        items = [f"{pad}  {dumps_document(v, indent + 1)}" for v in doc]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(doc, str):
        return json.dumps(doc)
    if doc is None:
        return "null"
    return _format_number(doc)


def _conditional_map(space: StateSpace, lower_cond, upper_cond) -> dict:
    return {
        label: [float(lower_cond[i]), float(upper_cond[i])]
        for i, label in enumerate(space.labels)
    }


def _write_output(text: str, output: str | None):
    if output is None:
        sys.stdout.write(text + "\n")
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


# ---------------------------------------------------------------------------
# commands

def _load_json(path: str, kind: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise DocumentError(f"cannot read {kind} file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{kind} file {path} is not valid JSON: {exc}") from exc


def _load_model(path: str) -> ImpreciseMarkovChain:
    model = parse_model(_load_json(path, "model"))
    violations = validate_model(model)
    if violations:
        raise DocumentError(
            "model is invalid:\n" + "\n".join(f"  - {v}" for v in violations)
        )
    return model


def cmd_validate(model_path: str) -> int:
    try:
        model = parse_model(_load_json(model_path, "model"))
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    violations = validate_model(model)
    if violations:
        print("model is invalid:", file=sys.stderr)
        for v in violations:
            print(f"  - {v}", file=sys.stderr)
        return 2
    print(f"model ok: {model.size} states")
    return 0


def cmd_infer(
    model_path: str,
    query_path: str,
    tol: float = DEFAULT_TOL,
    max_horizon: int = DEFAULT_MAX_HORIZON,
    threads: int = 1,
    output: str | None = None,
) -> int:
    try:
        model = _load_model(model_path)
        query = parse_query(_load_json(query_path, "query"), model.states)
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        if query.limit_family is not None:
            result = limit_infer(
                model,
                query.limit_family,
                query.limit_targets,
                tol=query.limit_tol if query.limit_tol is not None else tol,
                max_horizon=(
                    query.limit_max_horizon
                    if query.limit_max_horizon is not None
                    else max_horizon
                ),
                executor=executor,
            )
            doc = {
                "upper": result.upper,
                "lower": result.lower,
                "conditional": _conditional_map(
                    model.states, result.lower_conditional, result.upper_conditional
                ),
                "lp_calls": result.lp_calls,
                "horizon_reached": result.horizon_reached,
                "converged": result.converged,
                "upper_trace": list(result.upper_trace),
                "lower_trace": list(result.lower_trace),
            }
        else:
            result = infer(model, query.spec, executor=executor)
            s = query.scale
            doc = {
                "upper": s * result.upper,
                "lower": s * result.lower,
                "conditional": _conditional_map(
                    model.states,
                    s * result.lower_conditional,
                    s * result.upper_conditional,
                ),
                "lp_calls": result.lp_calls,
            }
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    finally:
        if executor is not None:
            executor.shutdown()
    _write_output(dumps_document(doc), output)
    return 0


def cmd_check(
    model_path: str,
    query_path: str,
    oracle_cap: int = DEFAULT_HISTORY_CAP,
    threads: int = 1,
    output: str | None = None,
) -> int:
    try:
        model = _load_model(model_path)
        query = parse_query(_load_json(query_path, "query"), model.states)
        if query.limit_family is not None:
            raise DocumentError(
                "check needs a fixed horizon; remove the 'limit' object"
            )
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        engine_counter = LpCounter()
        upper_cond, lower_cond = conditional_bounds(
            model, query.spec, engine_counter, executor
        )
        oracle_counter = LpCounter()
        hist = materialize_path_function(query.spec, cap=oracle_cap)
        oracle_upper, oracle_lower = naive_conditional_bounds(
            model, hist, oracle_counter, cap=oracle_cap
        )
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    finally:
        if executor is not None:
            executor.shutdown()
    s = query.scale
    discrepancy = max(
        float(np.max(np.abs(s * upper_cond - s * oracle_upper))),
        float(np.max(np.abs(s * lower_cond - s * oracle_lower))),
    )
    doc = {
        "engine": {
            "conditional": _conditional_map(
                model.states, s * lower_cond, s * upper_cond
            ),
            "lp_calls": engine_counter.calls,
        },
        "oracle": {
            "conditional": _conditional_map(
                model.states, s * oracle_lower, s * oracle_upper
            ),
            "lp_calls": oracle_counter.calls,
        },
        "max_discrepancy": discrepancy,
        "agree": bool(discrepancy < CHECK_TOLERANCE),
    }
    _write_output(dumps_document(doc), output)
    return 0 if discrepancy < CHECK_TOLERANCE else 1


# ---------------------------------------------------------------------------
# entry point

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="credalmc",
        description=(
            "Tight lower and upper expectation bounds for imprecise Markov chains."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="validate a model file")
    p_validate.add_argument("model", help="path to the model JSON file")

    p_infer = sub.add_parser("infer", help="run an inference query")
    p_infer.add_argument("model", help="path to the model JSON file")
    p_infer.add_argument("query", help="path to the query JSON file")
    p_infer.add_argument("--tol", type=float, default=DEFAULT_TOL,
                         help="limit-run stopping tolerance (default 1e-6)")
    p_infer.add_argument("--max-horizon", type=int, default=DEFAULT_MAX_HORIZON,
                         help="limit-run horizon cap (default 100000)")
    p_infer.add_argument("--threads", type=int, default=1,
                         help="parallel row optimisations per operator step")
    p_infer.add_argument("--output", default=None,
                         help="write the result document here instead of stdout")

    p_check = sub.add_parser(
        "check", help="compare the engine against the exponential oracle"
    )
    p_check.add_argument("model", help="path to the model JSON file")
    p_check.add_argument("query", help="path to the query JSON file")
    p_check.add_argument("--oracle-cap", type=float, default=DEFAULT_HISTORY_CAP,
                         help="cap on materialised history entries (default 1e7)")
    p_check.add_argument("--threads", type=int, default=1,
                         help="parallel row optimisations per operator step")
    p_check.add_argument("--output", default=None,
                         help="write the comparison document here instead of stdout")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "validate":
        return cmd_validate(args.model)
    if args.command == "infer":
        return cmd_infer(
            args.model,
            args.query,
            tol=args.tol,
            max_horizon=args.max_horizon,
            threads=args.threads,
            output=args.output,
        )
    if args.command == "check":
        return cmd_check(
            args.model,
            args.query,
            oracle_cap=int(args.oracle_cap),
            threads=args.threads,
            output=args.output,
        )
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
