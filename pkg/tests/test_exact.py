import numpy as np
import pytest

from prunekit import exact
from prunekit.instances import gen_coverage, gen_interference
from prunekit.objectives import Modular, counting_wrap
from prunekit.selection import greedy


class TestOptCardinality:
    def test_modular_profile(self):
        prof = exact.opt_cardinality(Modular([5, 3, 1]), range(3), 2)
        assert prof.opt_by_budget == [0.0, 5.0, 8.0]
        assert prof.argmax_by_budget == [(), (0,), (0, 1)]

    def test_triangle_profile(self, triangle):
        prof = exact.opt_cardinality(triangle, range(3), 2)
        assert prof.opt_by_budget == [0.0, 2.0, 2.0]

    def test_full_budget_on_monotone_equals_full_value(self):
        obj = gen_coverage(8, 12, seed=1)
        prof = exact.opt_cardinality(obj, range(8), 8)
        assert prof.opt_by_budget[8] == pytest.approx(obj.eval(range(8)))

    def test_monotone_profile_nondecreasing(self):
        obj = gen_coverage(10, 14, seed=2)
        prof = exact.opt_cardinality(obj, range(10), 6)
        assert all(a <= b + 1e-12 for a, b in
                   zip(prof.opt_by_budget, prof.opt_by_budget[1:]))

    def test_opt_zero_is_empty_value(self, triangle):
        assert exact.opt_cardinality(triangle, range(3), 2).opt_by_budget[0] == 0.0

    def test_restricted_universe_sandwich(self):
        obj = gen_interference(10, 12, seed=3)
        full = exact.opt_cardinality(obj, range(10), 3)
        sub = exact.opt_cardinality(obj, [0, 2, 4, 6], 3)
        for kp in range(4):
            assert sub.opt_by_budget[kp] <= full.opt_by_budget[kp] + 1e-12

    def test_greedy_below_opt_and_modular_tight(self):
        obj = gen_coverage(9, 12, seed=4)
        run = greedy(counting_wrap(obj), range(9), 3)
        opt = exact.opt_cardinality(obj, range(9), 3).opt_by_budget[3]
        assert obj.eval(run.picks) <= opt + 1e-12
        mod = Modular([4, 7, 2, 9])
        run2 = greedy(counting_wrap(mod), range(4), 2)
        assert mod.eval(run2.picks) == exact.opt_cardinality(mod, range(4), 2).opt_by_budget[2]

    def test_lexicographic_canonical_argmax(self):
        # every pair ties; the canonical witness is the lexicographically least
        prof = exact.opt_cardinality(Modular([1, 1, 1]), range(3), 2)
        assert prof.argmax_by_budget[2] == (0, 1)

    def test_ties_at_top_collects_all_optima(self):
        prof = exact.opt_cardinality(Modular([1, 1, 1]), range(3), 2,
                                     collect_ties=True)
        assert prof.ties_at_top == [(0, 1), (0, 2), (1, 2)]

    def test_counts(self):
        prof = exact.opt_cardinality(Modular([1, 1, 1, 1]), range(4), 2)
        assert prof.enumerated_count == 1 + 4 + 6


class TestGuard:
    def test_exceeded_raises(self):
        with pytest.raises(exact.GuardExceeded):
            exact.opt_cardinality(Modular(np.ones(40)), range(40), 10, guard=1000)

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv(exact.GUARD_ENV, "5")
        assert exact.enumeration_guard() == 5
        with pytest.raises(exact.GuardExceeded):
            exact.opt_cardinality(Modular([1, 1, 1]), range(3), 2)
        monkeypatch.setenv(exact.GUARD_ENV, "junk")
        with pytest.raises(ValueError):
            exact.enumeration_guard()

    def test_subset_count(self):
        assert exact.cardinality_subset_count(24, 4) == 1 + 24 + 276 + 2024 + 10626


class TestOptKnapsack:
    def test_unit_costs_match_cardinality(self):
        obj = gen_coverage(8, 12, seed=6)
        card = exact.opt_cardinality(obj, range(8), 3)
        knap = exact.opt_knapsack(obj, range(8), [1.0] * 8, budgets=[1, 2, 3])
        for b in (1, 2, 3):
            assert knap.opt(float(b)) == pytest.approx(card.opt_by_budget[b])

    def test_expensive_item_excluded(self):
        obj = Modular([100, 1])
        prof = exact.opt_knapsack(obj, range(2), [5.0, 1.0], budgets=[2.0])
        assert prof.opt_by_budget[0] == 1.0
        assert prof.argmax_by_budget[0] == (1,)

    def test_against_dp_oracle(self):
        # independent check: classic 0/1 knapsack DP on integer costs
        rng = np.random.default_rng(42)
        values = rng.integers(1, 30, size=12).astype(float)
        costs = rng.integers(1, 9, size=12)
        B = 20
        dp = np.zeros(B + 1)
        for v, c in zip(values, costs):
            for b in range(B, c - 1, -1):
                dp[b] = max(dp[b], dp[b - c] + v)
        obj = Modular(values)
        for b in (5, 11, 20):
            prof = exact.opt_knapsack(obj, range(12), costs.astype(float), budgets=[float(b)])
            assert prof.opt_by_budget[0] == pytest.approx(dp[b])

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            exact.opt_knapsack(Modular([1]), range(1), [1.0], budgets=[])
        with pytest.raises(ValueError):
            exact.opt_knapsack(Modular([1]), range(1), [1.0], budgets=[0.0])

    def test_guard_counts_power_set(self):
        with pytest.raises(exact.GuardExceeded):
            exact.opt_knapsack(Modular(np.ones(12)), range(12), np.ones(12),
                               budgets=[3.0], guard=100)
