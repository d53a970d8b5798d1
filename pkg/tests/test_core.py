import numpy as np
import pytest
from hypothesis import given, strategies as st

from atomdfo.core import (
    AtomSet,
    BudgetedObjective,
    BudgetExhausted,
    DfSimplexConfig,
    DropRule,
    NonFiniteValue,
    OrdConfig,
    SimplexWeights,
    combine,
    exchange_point,
    feasible_step_bound,
    is_simplex_point,
)


class TestCombine:
    def test_vertex_weight(self):
        atoms = np.array([[0.0, 0.0], [1.0, 0.0]])
        assert np.array_equal(combine(atoms, np.array([1.0, 0.0])), [0.0, 0.0])

    def test_midpoint(self):
        atoms = np.array([[0.0, 0.0], [2.0, 0.0]])
        assert np.array_equal(combine(atoms, np.array([0.5, 0.5])), [1.0, 0.0])

    def test_three_atom_combination(self):
        # hand dot product: 0.25*(1,1) + 0.25*(3,1) + 0.5*(1,5) = (1.5, 3.0)
        atoms = np.array([[1.0, 1.0], [3.0, 1.0], [1.0, 5.0]])
        w = np.array([0.25, 0.25, 0.5])
        assert np.allclose(combine(atoms, w), [1.5, 3.0], atol=1e-15)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            combine(np.eye(3), np.array([0.5, 0.5]))

    @given(st.integers(0, 10**9))
    def test_linearity(self, seed):
        rng = np.random.default_rng(seed)
        m, n = int(rng.integers(1, 6)), int(rng.integers(1, 5))
        atoms = rng.uniform(-5, 5, (m, n))
        u = rng.dirichlet(np.ones(m))
        v = rng.dirichlet(np.ones(m))
        lam = float(rng.uniform())
        lhs = combine(atoms, lam * u + (1 - lam) * v)
        rhs = lam * combine(atoms, u) + (1 - lam) * combine(atoms, v)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12


class TestFeasibleStepBound:
    def test_bound_is_z_j(self):
        assert feasible_step_bound(np.array([0.5, 0.5]), 0, 1) == 0.5

    def test_full_transfer(self):
        assert feasible_step_bound(np.array([1.0, 0.0]), 1, 0) == 1.0

    def test_three_coordinates(self):
        assert feasible_step_bound(np.array([0.2, 0.5, 0.3]), 0, 2) == 0.3

    def test_same_index_rejected(self):
        with pytest.raises(ValueError):
            feasible_step_bound(np.array([0.5, 0.5]), 1, 1)

    def test_exchange_beyond_bound_is_structural_error(self):
        with pytest.raises(ValueError):
            exchange_point(np.array([0.5, 0.5]), +1, 0, 1, 0.5 + 1e-9)

    @given(st.integers(0, 10**9))
    def test_boundary_property(self, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(2, 7))
        z = rng.dirichlet(np.ones(m))
        i, j = rng.permutation(m)[:2]
        bound = feasible_step_bound(z, int(i), int(j))
        at_bound = exchange_point(z, +1, int(i), int(j), bound)
        assert is_simplex_point(at_bound)
        beyond = z.copy()
        beyond[i] += bound + 1e-9
        beyond[j] -= bound + 1e-9
        assert not is_simplex_point(beyond)


class TestBudgetedObjective:
    def test_counts_and_zero(self):
        obj = BudgetedObjective(lambda x: float(np.sum(x**2)))
        assert obj.eval_count == 0
        assert obj(np.zeros(2)) == 0.0
        assert obj.eval_count == 1

    def test_budget_enforced_without_calling(self):
        calls = []

        def f(x):
            calls.append(1)
            return 1.0

        obj = BudgetedObjective(f, budget=1)
        obj(np.zeros(2))
        with pytest.raises(BudgetExhausted):
            obj(np.zeros(2))
        assert len(calls) == 1
        assert obj.eval_count == 1

    def test_trace_best_monotone(self):
        obj = BudgetedObjective(lambda x: float(np.sum(x**2)))
        obj(np.array([1.0, 0.0]))
        obj(np.array([0.0, 0.0]))
        assert [row[2] for row in obj.trace] == [1.0, 0.0]

    def test_nonfinite_raises(self):
        obj = BudgetedObjective(lambda x: float("nan"))
        with pytest.raises(NonFiniteValue):
            obj(np.zeros(1))

    def test_budget_must_be_positive(self):
        with pytest.raises(ValueError):
            BudgetedObjective(lambda x: 0.0, budget=0)

    @given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=30))
    def test_trace_length_and_monotonicity(self, values):
        it = iter(values)
        obj = BudgetedObjective(lambda x: next(it))
        for _ in values:
            obj(np.zeros(1))
        assert len(obj.trace) == obj.eval_count == len(values)
        best = [row[2] for row in obj.trace]
        assert all(b2 <= b1 for b1, b2 in zip(best, best[1:]))
        assert best == list(np.minimum.accumulate(values))


class TestAtomSet:
    def test_subset_keeps_ids(self):
        atoms = AtomSet(np.arange(12.0).reshape(4, 3))
        sub = atoms.subset([3, 1])
        assert np.array_equal(sub, [[9.0, 10.0, 11.0], [3.0, 4.0, 5.0]])

    def test_validation(self):
        with pytest.raises(ValueError):
            AtomSet(np.zeros((0, 2)))
        with pytest.raises(ValueError):
            AtomSet(np.array([[np.inf, 0.0]]))
        with pytest.raises(IndexError):
            AtomSet(np.eye(2)).subset([2])

    def test_dimensions(self):
        atoms = AtomSet(np.zeros((5, 3)))
        assert atoms.m == 5 and atoms.n == 3 and len(atoms) == 5


class TestSimplexWeights:
    def test_accepts_and_clamps(self):
        w = SimplexWeights(np.array([1.0 + 5e-16, -5e-16]), (4, 7))
        assert w.w[1] == 0.0
        assert w.ids == (4, 7)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            SimplexWeights(np.array([1.1, -0.1]), (0, 1))

    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError):
            SimplexWeights(np.array([0.6, 0.6]), (0, 1))

    def test_rejects_duplicate_ids(self):
        with pytest.raises(ValueError):
            SimplexWeights(np.array([0.5, 0.5]), (2, 2))

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            SimplexWeights(np.array([1.0]), (0, 1))

    def test_point(self):
        atoms = AtomSet(np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]]))
        w = SimplexWeights(np.array([0.5, 0.5]), (1, 2))
        assert np.allclose(w.point(atoms), [2.0, 2.0])


class TestConfigs:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"tau": 0.0},
            {"tau": 1.5},
            {"theta": 1.0},
            {"gamma": 0.0},
            {"delta": 1.0},
            {"alpha0": 0.0},
            {"epsilon": -1.0},
        ],
    )
    def test_dfsimplex_config_ranges(self, kwargs):
        with pytest.raises(ValueError):
            DfSimplexConfig(**kwargs)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"eps0": 0.0},
            {"eps_decay": 1.0},
            {"eps_min": 0.2, "eps0": 0.1},
            {"mu0": 1.0},
            {"theta": 0.0},
            {"stop_factor": 0.0},
        ],
    )
    def test_ord_config_ranges(self, kwargs):
        with pytest.raises(ValueError):
            OrdConfig(**kwargs)

    def test_eps_schedule_decreasing_to_floor(self):
        cfg = OrdConfig(eps0=0.1, eps_decay=0.5, eps_min=1e-3)
        values = [cfg.eps_at(k) for k in range(12)]
        assert all(a >= b for a, b in zip(values, values[1:]))
        assert values[-1] == 1e-3

    def test_benchmark_protocol_defaults(self):
        # the acceptance results depend on these; change them deliberately
        inner = DfSimplexConfig()
        assert (inner.tau, inner.theta, inner.gamma, inner.delta) == (1.0, 0.5, 1e-6, 0.5)
        assert (inner.alpha0, inner.epsilon) == (1.0, 1e-4)
        assert inner.shuffle_directions is False
        outer = OrdConfig()
        assert (outer.eps0, outer.eps_decay, outer.eps_min) == (0.1, 0.85, 1e-4)
        assert (outer.mu0, outer.gamma, outer.theta) == (0.5, 1e-6, 0.5)
        assert outer.stop_factor == 1e-4
        assert outer.memoize is False
        assert outer.drop_rule is DropRule.GRADIENT_FILTERED
