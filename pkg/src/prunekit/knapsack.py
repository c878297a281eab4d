"""Knapsack-constraint pruning and per-budget extraction.

Pruning runs ``ell`` sequential disjoint density-greedy passes, each stopping
at accepted cost 2B while accepting nothing that would push it past 3B, so
the union P costs at most ``3 * ell * B``.  One pruned set then serves every
query budget B' <= B: :func:`extract_budget` finds a feasible subset of P
without re-pruning.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

from . import exact
from .objectives import Objective, OracleStats, counting_wrap
from .prune import PruneParams
from .selection import DensityRun, density_greedy

__all__ = ["KnapsackInstance", "KnapsackPrunedSet", "prune_sdg_density",
           "extract_budget", "extract_budget_grid"]

#: largest |P| for which extraction enumerates all subsets of P exactly
EXHAUSTIVE_CAP = 22


@dataclass(frozen=True)
class KnapsackInstance:
    """Element costs and the master budget B; requires 0 < cost <= B."""

    costs: tuple[float, ...]
    B: float

    def __init__(self, costs, B: float):
        costs = tuple(float(c) for c in costs)
        B = float(B)
        if B <= 0:
            raise ValueError("master budget B must be positive")
        for e, c in enumerate(costs):
            if not (0 < c <= B):
                raise ValueError(f"cost of element {e} must be in (0, B], got {c}")
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return len(self.costs)

    def cost(self, S) -> float:
        return float(sum(self.costs[int(e)] for e in S))

    def to_dict(self) -> dict:
        return {"costs": list(self.costs), "B": self.B}


@dataclass
class KnapsackPrunedSet:
    """Pruned universe for a knapsack instance, with per-run provenance."""

    params: dict
    instance: KnapsackInstance
    elements: list[int]
    runs: list[DensityRun]
    total_cost: float
    stats: OracleStats
    elapsed: float = 0.0

    def element_set(self) -> frozenset[int]:
        return frozenset(self.elements)

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "algorithm": "sdg_density",
            "params": self.params,
            "instance": self.instance.to_dict(),
            "elements": self.elements,
            "runs": [r.to_dict() for r in self.runs],
            "total_cost": self.total_cost,
            "stats": self.stats.to_dict(),
        }
        if include_timing:
            out["elapsed"] = self.elapsed
        return out

    @classmethod
    def from_dict(cls, payload: dict) -> "KnapsackPrunedSet":
        runs = [DensityRun(r["picks"], r["gains"], r["costs"],
                           [g / c for g, c in zip(r["gains"], r["costs"])],
                           r["dummy_cost"], tuple())
                for r in payload["runs"]]
        return cls(
            params=payload["params"],
            instance=KnapsackInstance(**payload["instance"]),
            elements=payload["elements"],
            runs=runs,
            total_cost=payload["total_cost"],
            stats=OracleStats(**payload["stats"]),
            elapsed=payload.get("elapsed", 0.0),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(include_timing=True), fh, indent=1, sort_keys=True)

    @classmethod
    def load(cls, path) -> "KnapsackPrunedSet":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def prune_sdg_density(obj: Objective, instance: KnapsackInstance,
                      ell: int | None = None, epsilon: float | None = None) -> KnapsackPrunedSet:
    """Sequential disjoint density-greedy pruning.

    ``ell`` (or ceil(1/epsilon)) passes over shrinking pools, each with
    stop cost 2B and keep cap 3B; dummy padding fills a pass whose pool runs
    out early.  The union costs at most 3*ell*B and serves every B' <= B.
    """
    if instance.n != obj.n:
        raise ValueError(f"instance has {instance.n} costs, objective has n={obj.n}")
    params = PruneParams(k=1, ell=ell, epsilon=epsilon)
    ell = params.resolved_ell()
    oracle = counting_wrap(obj)
    t0 = time.perf_counter()
    pool = set(range(obj.n))
    runs: list[DensityRun] = []
    for _ in range(ell):
        run = density_greedy(oracle, pool, instance.costs,
                             stop_cost=2.0 * instance.B, keep_cap=3.0 * instance.B)
        runs.append(run)
        pool -= set(run.picks)
    elements = sorted({e for run in runs for e in run.picks})
    return KnapsackPrunedSet(
        params={"ell": ell, "B": instance.B, "n": obj.n},
        instance=instance,
        elements=elements,
        runs=runs,
        total_cost=instance.cost(elements),
        stats=oracle.stats(),
        elapsed=time.perf_counter() - t0,
    )


def extract_budget(pruned: KnapsackPrunedSet, obj: Objective, b_prime: float,
                   exhaustive_cap: int = EXHAUSTIVE_CAP) -> list[int]:
    """Best feasible subset of P found for query budget B' <= B.

    Routes: exact enumeration over P when |P| is small enough, otherwise the
    best prefix of a density-greedy pass over P at stop/keep = B' together
    with the best feasible singleton.  The result always costs at most B'.
    """
    q = _extract_many(pruned, obj, [b_prime], exhaustive_cap)[0]
    return q


def extract_budget_grid(pruned: KnapsackPrunedSet, obj: Objective,
                        budgets, exhaustive_cap: int = EXHAUSTIVE_CAP) -> list[list[int]]:
    """Per-budget extraction sharing one enumeration sweep across the grid."""
    return _extract_many(pruned, obj, list(budgets), exhaustive_cap)


def _extract_many(pruned, obj, budgets, exhaustive_cap):
    inst = pruned.instance
    for b in budgets:
        if not (0 < b <= inst.B):
            raise ValueError(f"query budget must be in (0, B], got {b}")
    P = pruned.elements
    candidates: dict[float, list[tuple[float, list[int]]]] = {b: [] for b in budgets}

    # density route: one pass per budget, scoring every prefix of the run
    oracle = counting_wrap(obj)
    for b in budgets:
        run = density_greedy(oracle, P, inst.costs, stop_cost=b, keep_cap=b)
        empty = float(oracle.eval(()))
        value = empty
        best_val, best_prefix = empty, []
        for i, gain in enumerate(run.gains):
            value += gain
            if value > best_val:
                best_val, best_prefix = value, run.picks[: i + 1]
        candidates[b].append((best_val, list(best_prefix)))
        feas = [e for e in P if inst.costs[e] <= b]
        if feas:
            sv, se = max(((float(oracle.eval((e,))), e) for e in feas),
                         key=lambda t: (t[0], -t[1]))
            candidates[b].append((sv, [se]))

    if len(P) <= exhaustive_cap:
        try:
            profile = exact.opt_knapsack(obj, P, inst.costs, budgets)
            for b, val, s in zip(profile.budgets, profile.opt_by_budget,
                                 profile.argmax_by_budget):
                candidates[b].append((float(val), list(s)))
        except exact.GuardExceeded:
            pass

    out = []
    for b in budgets:
        feasible = [(v, s) for v, s in candidates[b] if inst.cost(s) <= b + 1e-9]
        val, sel = max(feasible, key=lambda t: t[0])
        out.append(sorted(sel))
    return out
