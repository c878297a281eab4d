import numpy as np
import pytest

from prunekit.objectives import (Coverage, Cut, FacilityLocation, InterferenceCoverage,
                                 Modular, PenaltyCurve, Proxy,
                                 RestrictedFacilityLocation, TableObjective)


@pytest.fixture
def triangle():
    """Cut on the 3-cycle: the canonical small non-monotone objective."""
    return Cut(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def small_coverage():
    """covers = {0: {1,2}, 1: {2,3}}, unit weights."""
    return Coverage([{1, 2}, {2, 3}])


def build_variants(n=6, seed=0):
    """One instance of every built-in objective family at ground-set size n."""
    rng = np.random.default_rng(seed)
    covers = [rng.choice(2 * n, size=rng.integers(1, 4), replace=False).tolist()
              for _ in range(n)]
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5]
    sim = rng.uniform(0, 1, size=(n + 2, n))
    theta = np.concatenate([[0.0], np.cumsum(np.linspace(0.0, 0.08, n))])
    intf = {(i, j): float(rng.uniform(1, 5))
            for i in range(n) for j in range(i + 1, n) if rng.random() < 0.25}
    rel = rng.uniform(0, 1, size=n + 2)
    return {
        "coverage": Coverage(covers, m=2 * n),
        "weighted_coverage": Coverage(covers, m=2 * n,
                                      weights=rng.uniform(0.5, 2.0, size=2 * n)),
        "cut": Cut(n, edges),
        "facility_location": FacilityLocation(sim),
        "restricted_fl": RestrictedFacilityLocation(sim, rel, tau=0.5),
        "proxy": Proxy(FacilityLocation(sim), PenaltyCurve(theta)),
        "interference_coverage": InterferenceCoverage(covers, intf, lam=1.5),
        "modular": Modular(rng.uniform(0, 3, size=n)),
    }


def supermodular_counterexample(n=4):
    """f(S) = |S|^2: violates diminishing returns at (A={}, B={0}, x=1)."""
    return TableObjective.from_function(n, lambda s: float(len(s) ** 2))
