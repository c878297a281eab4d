"""Greedy selection engines shared by the pruners.

All three selectors are deterministic: ties are broken by lowest element id,
and each records a transcript (picks, marginal gains at pick time) that can be
replayed against the oracle.  They accept either a raw objective or a
:class:`~prunekit.objectives.CountingOracle`; pruners pass the latter so that
query accounting covers every scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = ["GreedyRun", "DensityRun", "greedy", "threshold_greedy", "density_greedy"]


@dataclass
class GreedyRun:
    """Transcript of one greedy selection over a fixed candidate pool."""

    picks: list[int]
    gains: list[float]
    pool: tuple[int, ...]

    def prefix_values(self, base: float = 0.0) -> list[float]:
        """Values of f(picks[:i]) for i = 0..len(picks), given f(empty)."""
        vals = [base]
        for g in self.gains:
            vals.append(vals[-1] + g)
        return vals

    def to_dict(self) -> dict:
        return {"picks": self.picks, "gains": self.gains}


@dataclass
class DensityRun:
    """Transcript of one density-greedy selection under a cost cap.

    ``dummy_cost`` is virtual zero-value padding recorded when the pool ran
    out before the stop cost was reached; dummies never become elements.
    """

    picks: list[int]
    gains: list[float]
    costs: list[float]
    densities: list[float]
    dummy_cost: float
    pool: tuple[int, ...]

    @property
    def real_cost(self) -> float:
        return float(sum(self.costs))

    def to_dict(self) -> dict:
        return {"picks": self.picks, "gains": self.gains, "costs": self.costs,
                "dummy_cost": self.dummy_cost}


def greedy(oracle, pool: Iterable[int], size: int, stop_at_zero: bool = False) -> GreedyRun:
    """Plain greedy: repeatedly add the remaining element with the largest
    marginal gain, lowest id on ties.

    Runs for exactly ``min(size, |pool|)`` steps even when the best marginal
    is negative -- the disjoint-run pruner needs exactly-k runs.  Pass
    ``stop_at_zero=True`` to stop once the best gain is <= 0 (monotone use).
    """
    if size < 0:
        raise ValueError("size must be >= 0")
    remaining = sorted(set(int(e) for e in pool))
    run = GreedyRun([], [], tuple(remaining))
    current: set[int] = set()
    base = oracle.eval(current)
    while remaining and len(run.picks) < size:
        best_e, best_gain = None, None
        for e in remaining:
            gain = oracle.eval(current | {e}) - base
            if best_gain is None or gain > best_gain:
                best_e, best_gain = e, gain
        if stop_at_zero and best_gain <= 0:
            break
        current.add(best_e)
        base += best_gain
        remaining.remove(best_e)
        run.picks.append(best_e)
        run.gains.append(best_gain)
    return run


def threshold_greedy(oracle, pool: Iterable[int], size: int, eta: float) -> GreedyRun:
    """Decreasing-threshold greedy for monotone oracles.

    Starts at the maximum singleton value d, sweeps the pool accepting any
    element whose marginal meets the current threshold, then decays the
    threshold by (1 - eta); stops below (eta / |pool|) * d or at ``size``
    picks.  Query cost is O((|pool|/eta) log(|pool|/eta)).
    """
    if not (0 < eta < 1):
        raise ValueError(f"eta must be in (0, 1), got {eta}")
    if size < 0:
        raise ValueError("size must be >= 0")
    remaining = sorted(set(int(e) for e in pool))
    run = GreedyRun([], [], tuple(remaining))
    if not remaining or size == 0:
        return run
    d = max(oracle.eval((e,)) for e in remaining)
    if d <= 0:
        return run
    current: set[int] = set()
    base = oracle.eval(current)
    floor = (eta / len(run.pool)) * d
    tau = d
    while tau >= floor and len(run.picks) < size and remaining:
        for e in list(remaining):
            if len(run.picks) >= size:
                break
            gain = oracle.eval(current | {e}) - base
            if gain >= tau:
                current.add(e)
                base += gain
                remaining.remove(e)
                run.picks.append(e)
                run.gains.append(gain)
        tau *= 1.0 - eta
    return run


def density_greedy(oracle, pool: Iterable[int], costs, stop_cost: float,
                   keep_cap: float) -> DensityRun:
    """Knapsack greedy by marginal gain per unit cost.

    Each step selects the remaining element with the highest density
    (lowest id on ties).  It is accepted if the accumulated cost stays within
    ``keep_cap``; otherwise it is skipped permanently.  The run stops once the
    accepted cost reaches ``stop_cost`` or the pool is exhausted, padding the
    shortfall with virtual zero-value dummy cost.  Negative marginals do not
    stop the run: the containment analysis consumes cost-bounded prefixes of
    the recorded order.
    """
    if stop_cost > keep_cap:
        raise ValueError("stop_cost must be <= keep_cap")
    remaining = sorted(set(int(e) for e in pool))
    cost_of = _cost_lookup(costs, remaining)
    run = DensityRun([], [], [], [], 0.0, tuple(remaining))
    current: set[int] = set()
    base = oracle.eval(current)
    spent = 0.0
    while spent < stop_cost:
        if not remaining:
            run.dummy_cost = stop_cost - spent
            break
        best_e, best_density, best_gain = None, None, None
        for e in remaining:
            gain = oracle.eval(current | {e}) - base
            density = gain / cost_of[e]
            if best_density is None or density > best_density:
                best_e, best_density, best_gain = e, density, gain
        if spent + cost_of[best_e] > keep_cap:
            remaining.remove(best_e)  # permanently skipped
            continue
        current.add(best_e)
        base += best_gain
        spent += cost_of[best_e]
        remaining.remove(best_e)
        run.picks.append(best_e)
        run.gains.append(best_gain)
        run.costs.append(cost_of[best_e])
        run.densities.append(best_density)
    return run


def _cost_lookup(costs, elements: Sequence[int]) -> dict[int, float]:
    lookup = {int(e): float(costs[e]) for e in elements}  # mapping or sequence
    for e, c in lookup.items():
        if not (c > 0) or math.isnan(c):
            raise ValueError(f"cost of element {e} must be positive, got {c}")
    return lookup
