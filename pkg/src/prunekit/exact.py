"""Exhaustive optimum oracles.

These provide the denominators for containment ratios and the independent
verification side of every guarantee check.  Enumeration is guarded: a call
that would visit more than the guard's subset count is refused with
:class:`GuardExceeded` so callers can fall back to a greedy reference.  The
guard defaults to 10^8 subsets and can be overridden with the
``PRUNEKIT_GUARD`` environment variable or a keyword argument.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .objectives import Objective, unwrap

__all__ = ["GuardExceeded", "enumeration_guard", "cardinality_subset_count",
           "OptProfile", "opt_cardinality", "opt_knapsack", "check_guard", "fits_guard"]

DEFAULT_GUARD = 10**8
GUARD_ENV = "PRUNEKIT_GUARD"

_CHUNK = 1 << 17


class GuardExceeded(RuntimeError):
    """Raised when an enumeration would exceed the subset-count guard."""

    def __init__(self, needed: int, limit: int):
        super().__init__(f"enumeration of {needed} subsets exceeds guard {limit}")
        self.needed = needed
        self.limit = limit


def enumeration_guard() -> int:
    """Current guard value (env override, else 10^8 subsets)."""
    raw = os.environ.get(GUARD_ENV)
    if raw is None:
        return DEFAULT_GUARD
    try:
        val = int(raw)
    except ValueError as exc:
        raise ValueError(f"{GUARD_ENV} must be an integer, got {raw!r}") from exc
    if val < 1:
        raise ValueError(f"{GUARD_ENV} must be positive")
    return val


def cardinality_subset_count(universe_size: int, k: int) -> int:
    """Number of subsets of size <= k."""
    k = min(k, universe_size)
    return sum(math.comb(universe_size, j) for j in range(k + 1))


@dataclass
class OptProfile:
    """Exact optima per budget with canonical argmax witnesses.

    For cardinality profiles ``budgets`` is 0..k and ``opt_by_budget[j]`` is
    the maximum over subsets of size <= j.  For knapsack profiles ``budgets``
    is the queried cost-budget grid.  The canonical argmax is the
    lexicographically smallest optimal set (as a sorted id tuple); for
    knapsack it is the first optimum in size-ascending lexicographic order.
    """

    budgets: list
    opt_by_budget: list[float]
    argmax_by_budget: list[tuple[int, ...]]
    enumerated_count: int
    ties_at_top: list[tuple[int, ...]] | None = None

    def opt(self, budget) -> float:
        return self.opt_by_budget[self.budgets.index(budget)]

    def to_dict(self) -> dict:
        return {
            "budgets": list(self.budgets),
            "opt_by_budget": [float(v) for v in self.opt_by_budget],
            "argmax_by_budget": [list(s) for s in self.argmax_by_budget],
            "enumerated_count": self.enumerated_count,
        }


def _membership_chunks(universe: Sequence[int], size: int, n_cols: int, chunk: int):
    """Yield (combos, membership matrix) chunks for all ``size``-subsets."""
    combo_iter = itertools.combinations(universe, size)
    while True:
        block = list(itertools.islice(combo_iter, chunk))
        if not block:
            return
        idx = np.asarray(block, dtype=np.int64)
        M = np.zeros((len(block), n_cols), dtype=bool)
        if size:
            M[np.arange(len(block))[:, None], idx] = True
        yield block, M


def check_guard(needed: int, guard: int | None = None) -> None:
    """Raise :class:`GuardExceeded` if ``needed`` subsets exceed the guard."""
    limit = enumeration_guard() if guard is None else int(guard)
    if needed > limit:
        raise GuardExceeded(needed, limit)


def fits_guard(needed: int, guard: int | None = None) -> bool:
    limit = enumeration_guard() if guard is None else int(guard)
    return needed <= limit


def opt_cardinality(obj: Objective, universe: Sequence[int], k: int, *,
                    guard: int | None = None, collect_ties: bool = False,
                    tie_cap: int = 256, chunk: int = _CHUNK) -> OptProfile:
    """Exact OPT_j = max_{|T| <= j} f(T) for every j = 0..k, in one sweep.

    Deterministic: the recorded argmax is the lexicographically smallest
    optimal set.  With ``collect_ties`` the profile also retains every
    optimal set at the top budget (up to ``tie_cap``), which lets callers
    test "any optimal set contained" without tie ambiguity.
    """
    universe = sorted(set(int(e) for e in universe))
    u = len(universe)
    k = min(int(k), u)
    if k < 0:
        raise ValueError("k must be >= 0")
    total = cardinality_subset_count(u, k)
    check_guard(total, guard)
    raw = unwrap(obj)

    empty_val = float(raw.eval(()))
    profile = [empty_val]
    argmax: list[tuple[int, ...]] = [()]
    best_val, best_set = empty_val, ()
    per_size: list[list[tuple[float, tuple[int, ...]]]] = [[(empty_val, ())]]

    for size in range(1, k + 1):
        size_best, size_sets = None, []
        for block, M in _membership_chunks(universe, size, raw.n, chunk):
            vals = np.asarray(raw.eval_membership(M), dtype=float)
            vmax = float(vals.max())
            if size_best is None or vmax > size_best:
                size_best = vmax
                size_sets = []
            if vmax == size_best and collect_ties and len(size_sets) < tie_cap:
                for i in np.flatnonzero(vals == size_best)[:tie_cap]:
                    if len(size_sets) < tie_cap:
                        size_sets.append(tuple(block[int(i)]))
            if vmax == size_best and not collect_ties and not size_sets:
                size_sets.append(tuple(block[int(np.argmax(vals))]))
        per_size.append([(size_best, s) for s in size_sets])
        cand = min(size_sets)
        if size_best > best_val:
            best_val, best_set = size_best, cand
        elif size_best == best_val and cand < best_set:
            best_set = cand
        profile.append(best_val)
        argmax.append(best_set)

    ties = None
    if collect_ties:
        ties = sorted(s for size_list in per_size
                      for (v, s) in size_list if v == best_val)[:tie_cap]
    return OptProfile(list(range(k + 1)), profile, argmax, total, ties)


def opt_knapsack(obj: Objective, universe: Sequence[int], costs, budgets: Sequence[float],
                 *, guard: int | None = None, chunk: int = _CHUNK) -> OptProfile:
    """Exact OPT_B = max {f(T) : c(T) <= B} for every queried budget, in one
    sweep over all subsets of the universe.

    The guard counts the full power set.  Argmax per budget is the first
    optimum in size-ascending lexicographic enumeration order.
    """
    universe = sorted(set(int(e) for e in universe))
    u = len(universe)
    budgets = [float(b) for b in budgets]
    if not budgets:
        raise ValueError("need at least one budget")
    if min(budgets) <= 0:
        raise ValueError("budgets must be positive")
    check_guard(1 << u, guard)
    raw = unwrap(obj)
    cost_vec = np.zeros(raw.n)
    for e in universe:
        cost_vec[e] = float(costs[e])
    if universe and cost_vec[universe].min() <= 0:
        raise ValueError("costs must be positive")

    empty_val = float(raw.eval(()))
    best = {b: (empty_val, ()) for b in budgets}
    for size in range(1, u + 1):
        for block, M in _membership_chunks(universe, size, raw.n, chunk):
            vals = np.asarray(raw.eval_membership(M), dtype=float)
            cvec = M @ cost_vec
            for b in budgets:
                feasible = cvec <= b
                if not feasible.any():
                    continue
                i = int(np.flatnonzero(feasible)[np.argmax(vals[feasible])])
                if vals[i] > best[b][0]:
                    best[b] = (float(vals[i]), tuple(block[i]))
    return OptProfile(budgets, [best[b][0] for b in budgets],
                      [best[b][1] for b in budgets], 1 << u)
