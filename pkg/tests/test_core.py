import numpy as np
import pytest
from hypothesis import given, strategies as st

from credalmc import (
    ConstraintRow,
    ImpreciseMarkovChain,
    IntervalRow,
    StateSpace,
    VertexRow,
    expectation,
    feasible,
    interval_witness,
    is_pmf,
    row_contains,
    validate_model,
)
from helpers import e1_model, random_model, random_pmf

rng = np.random.default_rng(1001)


class TestStateSpace:
    def test_basic(self):
        space = StateSpace(("a", "b", "c"))
        assert space.size == 3
        assert len(space) == 3
        assert space.index("b") == 1
        assert list(space.indicator(["a", "c"])) == [1.0, 0.0, 1.0]

    def test_single_state_allowed(self):
        assert StateSpace(("only",)).size == 1

    def test_duplicate_labels_rejected(self):
        with pytest.raises(ValueError):
            StateSpace(("a", "a"))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            StateSpace(())

    def test_unknown_label(self):
        with pytest.raises(KeyError):
            StateSpace(("a",)).index("b")


class TestValidation:
    def test_e1_is_valid(self):
        assert validate_model(e1_model()) == []

    def test_interval_lower_sum_exceeds_one(self):
        bad = IntervalRow(lower=[0.6, 0.6], upper=[0.7, 0.7])
        model = ImpreciseMarkovChain(
            states=StateSpace(("s0", "s1")),
            initial=IntervalRow(lower=[0.0, 0.0], upper=[1.0, 1.0]),
            rows=(bad, IntervalRow(lower=[0.4, 0.4], upper=[0.6, 0.6])),
        )
        violations = validate_model(model)
        assert len(violations) == 1
        assert "sum of lower bounds exceeds 1" in violations[0]
        assert "s0" in violations[0]

    def test_vertex_not_normalised(self):
        bad = VertexRow(vertices=[[0.5, 0.6]])
        model = ImpreciseMarkovChain(
            states=StateSpace(("s0", "s1")),
            initial=VertexRow(vertices=[[0.5, 0.5]]),
            rows=(bad, VertexRow(vertices=[[1.0, 0.0]])),
        )
        violations = validate_model(model)
        assert len(violations) == 1
        assert "does not sum to 1" in violations[0]

    def test_dimension_mismatch_reported(self):
        model = ImpreciseMarkovChain(
            states=StateSpace(("s0", "s1")),
            initial=VertexRow(vertices=[[0.5, 0.5]]),
            rows=(
                IntervalRow(lower=[0.2, 0.2, 0.2], upper=[0.5, 0.5, 0.5]),
                VertexRow(vertices=[[1.0, 0.0]]),
            ),
        )
        assert any("dimension" in v for v in validate_model(model))

    def test_row_count_mismatch_reported(self):
        model = ImpreciseMarkovChain(
            states=StateSpace(("s0", "s1")),
            initial=VertexRow(vertices=[[0.5, 0.5]]),
            rows=(VertexRow(vertices=[[1.0, 0.0]]),),
        )
        assert any("transition rows" in v for v in validate_model(model))

    def test_infeasible_constraint_row_reported(self):
        bad = ConstraintRow(a=[[1.0, 0.0], [-1.0, 0.0]], b=[0.2, -0.5])
        model = ImpreciseMarkovChain(
            states=StateSpace(("s0", "s1")),
            initial=VertexRow(vertices=[[0.5, 0.5]]),
            rows=(bad, VertexRow(vertices=[[1.0, 0.0]])),
        )
        assert any("no pmf" in v for v in validate_model(model))

    def test_every_valid_row_has_a_witness(self):
        # Constructive nonemptiness across representations.
        for trial in range(30):
            model = random_model(rng, d=int(rng.integers(2, 5)))
            assert validate_model(model) == []
            for row in (*model.rows, model.initial):
                if isinstance(row, IntervalRow):
                    assert is_pmf(interval_witness(row))
                    assert row_contains(row, interval_witness(row))
                elif isinstance(row, VertexRow):
                    assert all(is_pmf(v) for v in row.vertices)
                else:
                    assert feasible(row)


class TestExpectation:
    def test_uniform_average(self):
        assert expectation([0.5, 0.5], [0.0, 1.0]) == pytest.approx(0.5)

    def test_point_mass(self):
        assert expectation([1.0, 0.0], [3.0, 7.0]) == pytest.approx(3.0)

    def test_constant_gamble(self):
        assert expectation([0.2, 0.8], [1.0, 1.0]) == pytest.approx(1.0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            expectation([0.5, 0.5], [1.0, 2.0, 3.0])

    def test_all_ones_gamble_has_unit_expectation(self):
        for _ in range(50):
            d = int(rng.integers(1, 6))
            p = random_pmf(rng, d)
            assert expectation(p, np.ones(d)) == pytest.approx(1.0, abs=1e-12)

    @given(
        f=st.lists(st.floats(-10, 10), min_size=2, max_size=5),
        g=st.lists(st.floats(-10, 10), min_size=2, max_size=5),
        alpha=st.floats(-5, 5),
        beta=st.floats(-5, 5),
    )
    def test_linearity(self, f, g, alpha, beta):
        d = min(len(f), len(g))
        f, g = np.array(f[:d]), np.array(g[:d])
        p = np.full(d, 1.0 / d)
        combo = expectation(p, alpha * f + beta * g)
        split = alpha * expectation(p, f) + beta * expectation(p, g)
        assert combo == pytest.approx(split, abs=1e-9)


class TestImmutability:
    def test_arrays_are_read_only(self):
        model = e1_model()
        with pytest.raises(ValueError):
            model.rows[0].lower[0] = 0.0
        with pytest.raises(ValueError):
            VertexRow(vertices=[[0.5, 0.5]]).vertices[0, 0] = 0.1
