"""Set-function value oracles for containment pruning.

Elements of a ground set are dense integer ids ``0..n-1``.  Every objective
exposes ``eval`` (value of a set), ``marginal`` (value gain of one element),
and a vectorized ``eval_membership`` over a boolean membership matrix used by
the exact enumeration engine.  Objectives are pure after construction and safe
to evaluate from multiple threads; the :class:`CountingOracle` wrapper adds
memoization and query accounting with an internal lock.

Built-in families:

* :class:`Coverage` -- weighted set coverage over a universe of items.
* :class:`Cut` -- (weighted) graph cut, the standard non-monotone example.
* :class:`FacilityLocation` -- ``sum_v max_{s in S} sim[v, s]``.
* :class:`Proxy` -- facility location minus a convex non-decreasing size
  penalty; non-monotone but still submodular.
* :class:`RestrictedFacilityLocation` -- facility location over the rows
  whose relevance score exceeds a gate threshold.
* :class:`InterferenceCoverage` -- coverage minus a weighted penalty on
  interfering pairs inside the selection.

:class:`Modular` and :class:`TableObjective` are plain helpers used mainly by
tests and property checkers.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

#: comparison tolerance for real-valued objectives; integer-valued ones compare exactly
REAL_TOL = 1e-9


@dataclass(frozen=True)
class GroundSet:
    """The element universe: ids are 0..n-1, optionally labelled."""

    n: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"ground set needs n >= 1, got {self.n}")
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("labels length must equal n")

    def label(self, e: int) -> str:
        return self.labels[e] if self.labels else str(e)


@dataclass(frozen=True)
class OracleStats:
    """Query accounting snapshot: distinct evaluations vs memo hits."""

    queries: int = 0
    cache_hits: int = 0

    def to_dict(self) -> dict:
        return {"queries": self.queries, "cache_hits": self.cache_hits}


class PenaltyCurve:
    """Convex non-decreasing size penalty theta(0..n), theta(0) = 0."""

    def __init__(self, theta: Sequence[float]):
        arr = np.asarray(theta, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("penalty curve must be a 1-d array of length >= 1")
        if abs(arr[0]) > REAL_TOL:
            raise ValueError(f"theta[0] must be 0, got {arr[0]}")
        steps = np.diff(arr)
        if steps.size and steps.min() < -REAL_TOL:
            raise ValueError("penalty curve must be non-decreasing")
        if steps.size > 1 and np.diff(steps).min() < -REAL_TOL:
            raise ValueError("penalty curve must be convex")
        self.theta = arr

    def __len__(self) -> int:
        return self.theta.size

    def __call__(self, size: int) -> float:
        return float(self.theta[size])

    def __eq__(self, other) -> bool:
        return isinstance(other, PenaltyCurve) and np.array_equal(self.theta, other.theta)

    def to_dict(self) -> dict:
        return {"theta": self.theta.tolist()}


def _as_index_set(S: Iterable[int], n: int) -> frozenset[int]:
    """Canonicalize a selection and reject out-of-range ids."""
    s = frozenset(int(e) for e in S)
    for e in s:
        if e < 0 or e >= n:
            raise IndexError(f"element id {e} out of range [0, {n})")
    return s


class Objective:
    """Base value oracle.  Subclasses set ``n`` and implement ``_value``."""

    n: int
    integer_valued: bool = False

    def eval(self, S: Iterable[int]):
        """Value of the selection ``S``.  Deterministic; non-negative for the
        built-in families except an unshifted :class:`Proxy` and an
        :class:`InterferenceCoverage` whose penalties outweigh coverage."""
        return self._value(_as_index_set(S, self.n))

    def marginal(self, e: int, S: Iterable[int]):
        """``f(S + e) - f(S)``.  Raises if ``e`` is already in ``S``."""
        s = _as_index_set(S, self.n)
        e = int(e)
        if e in s:
            raise ValueError(f"marginal: element {e} already in the set")
        return self.eval(s | {e}) - self.eval(s)

    def eval_membership(self, M: np.ndarray) -> np.ndarray:
        """Vectorized values for a batch of selections.

        ``M`` is a (batch, n) boolean membership matrix.  The default loops
        over rows; subclasses override with array arithmetic.  Must agree
        with ``eval`` row by row.
        """
        M = np.asarray(M, dtype=bool)
        return np.array([float(self.eval(np.flatnonzero(row))) for row in M])

    def _value(self, s: frozenset[int]):
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError(f"{type(self).__name__} has no serial form")


def _cover_masks(covers: Sequence[Iterable[int]]) -> tuple[list[int], int]:
    """Per-element universe bitmasks; returns (masks, universe size)."""
    masks = []
    top = -1
    for i, cov in enumerate(covers):
        mask = 0
        for v in cov:
            v = int(v)
            if v < 0:
                raise ValueError(f"cover of element {i}: negative item {v}")
            mask |= 1 << v
            top = max(top, v)
        masks.append(mask)
    return masks, top + 1


def _incidence_matrix(covers, n: int, m: int) -> np.ndarray:
    inc = np.zeros((n, m), dtype=bool)
    for e, cov in enumerate(covers):
        inc[e, sorted(cov)] = True
    return inc


class Coverage(Objective):
    """Weighted coverage: f(S) = sum of weights of universe items covered by S.

    ``covers[e]`` lists the universe items element ``e`` covers; ``weights``
    (default all-ones) are per universe item and must be non-negative.
    """

    def __init__(self, covers: Sequence[Iterable[int]], weights: Sequence[float] | None = None,
                 m: int | None = None):
        if not covers:
            raise ValueError("coverage needs at least one element")
        self.covers = [frozenset(int(v) for v in cov) for cov in covers]
        self._masks, m_seen = _cover_masks(self.covers)
        self.m = m_seen if m is None else int(m)
        if self.m < m_seen:
            raise ValueError(f"universe size {self.m} smaller than max covered item")
        self.n = len(covers)
        self._incidence = _incidence_matrix(self.covers, self.n, self.m)
        if weights is None:
            self.weights = None
            self.integer_valued = True
        else:
            w = np.asarray(weights, dtype=float)
            if w.size != self.m:
                raise ValueError(f"need {self.m} weights, got {w.size}")
            if w.size and w.min() < 0:
                raise ValueError("coverage weights must be non-negative")
            self.weights = w
            self.integer_valued = bool(np.all(w == np.round(w)))

    def _value(self, s):
        union = 0
        for e in s:
            union |= self._masks[e]
        if self.weights is None:
            return union.bit_count()
        total = 0.0
        v = 0
        while union:
            if union & 1:
                total += self.weights[v]
            union >>= 1
            v += 1
        return total

    def eval_membership(self, M):
        M = np.asarray(M, dtype=bool)
        out = np.zeros(M.shape[0])
        for v in range(self.m):
            covering = self._incidence[:, v]
            if not covering.any():
                continue
            hit = M[:, covering].any(axis=1)
            out += hit * (1.0 if self.weights is None else self.weights[v])
        return out

    def to_dict(self):
        return {
            "variant": "coverage",
            "covers": [sorted(c) for c in self.covers],
            "weights": None if self.weights is None else self.weights.tolist(),
            "m": self.m,
        }


class Cut(Objective):
    """Graph cut value: weight of edges with exactly one endpoint selected.

    Non-monotone (the full vertex set cuts nothing) but submodular.
    """

    def __init__(self, n: int, edges: Sequence[tuple[int, int]],
                 weights: Sequence[float] | None = None):
        self.n = int(n)
        if self.n < 1:
            raise ValueError("cut objective needs n >= 1")
        us, vs = [], []
        for (u, v) in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop ({u},{v}) not allowed")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u},{v}) out of range for n={self.n}")
            us.append(u)
            vs.append(v)
        self._us = np.asarray(us, dtype=np.int64)
        self._vs = np.asarray(vs, dtype=np.int64)
        if weights is None:
            self._ws = None
            self.integer_valued = True
        else:
            w = np.asarray(weights, dtype=float)
            if w.size != len(us):
                raise ValueError("one weight per edge required")
            if w.size and w.min() < 0:
                raise ValueError("edge weights must be non-negative")
            self._ws = w
            self.integer_valued = bool(np.all(w == np.round(w)))

    @property
    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self._us.tolist(), self._vs.tolist()))

    def _value(self, s):
        if not len(self._us):
            return 0 if self._ws is None else 0.0
        mem = np.zeros(self.n, dtype=bool)
        mem[list(s)] = True
        cut = mem[self._us] != mem[self._vs]
        if self._ws is None:
            return int(np.count_nonzero(cut))
        return float(self._ws[cut].sum())

    def eval_membership(self, M):
        M = np.asarray(M, dtype=bool)
        if not len(self._us):
            return np.zeros(M.shape[0])
        cut = M[:, self._us] != M[:, self._vs]
        if self._ws is None:
            return cut.sum(axis=1).astype(float)
        return cut @ self._ws

    def to_dict(self):
        return {
            "variant": "cut",
            "n": self.n,
            "edges": self.edges,
            "weights": None if self._ws is None else self._ws.tolist(),
        }


class FacilityLocation(Objective):
    """f(S) = sum over covered points v of max_{s in S} sim[v, s]; f({}) = 0.

    ``sim`` is an (m, n) non-negative similarity matrix: rows are covered
    points, columns are selectable elements.  Monotone submodular.
    """

    def __init__(self, sim: np.ndarray):
        sim = np.asarray(sim, dtype=float)
        if sim.ndim != 2 or sim.shape[0] < 1 or sim.shape[1] < 1:
            raise ValueError("similarity matrix must be 2-d and non-empty")
        if sim.min() < 0:
            raise ValueError("similarities must be non-negative")
        self.sim = sim
        self.m, self.n = sim.shape

    def _value(self, s):
        if not s:
            return 0.0
        return float(self.sim[:, sorted(s)].max(axis=1).sum())

    def eval_membership(self, M):
        M = np.asarray(M, dtype=bool)
        out = np.zeros(M.shape[0])
        for v in range(self.m):
            out += (M * self.sim[v]).max(axis=1)
        return out

    def to_dict(self):
        return {"variant": "facility_location", "sim": self.sim.tolist()}


class RestrictedFacilityLocation(Objective):
    """Facility location restricted to rows with relevance above a gate.

    f(S) = sum over rows v with rel[v] > tau of max_{s in S} sim[v, s].
    """

    def __init__(self, sim: np.ndarray, rel: Sequence[float], tau: float):
        sim = np.asarray(sim, dtype=float)
        rel = np.asarray(rel, dtype=float)
        if sim.ndim != 2 or sim.shape[0] < 1 or sim.shape[1] < 1:
            raise ValueError("similarity matrix must be 2-d and non-empty")
        if sim.min() < 0:
            raise ValueError("similarities must be non-negative")
        if rel.shape != (sim.shape[0],):
            raise ValueError("one relevance score per similarity row required")
        self.sim, self.rel, self.tau = sim, rel, float(tau)
        self._gated = FacilityLocation(sim[rel > self.tau]) if (rel > self.tau).any() else None
        self.m, self.n = sim.shape

    def _value(self, s):
        return self._gated._value(s) if self._gated is not None else 0.0

    def eval_membership(self, M):
        if self._gated is not None:
            return self._gated.eval_membership(M)
        return np.zeros(np.asarray(M).shape[0])

    def to_dict(self):
        return {"variant": "restricted_fl", "sim": self.sim.tolist(),
                "rel": self.rel.tolist(), "tau": self.tau}


class Proxy(Objective):
    """Facility location minus a convex non-decreasing size penalty.

    ``f(S) = FL(S) - theta(|S|)`` is submodular but non-monotone.  Can dip
    below zero for aggressive penalties; construction verifies
    ``theta(n) <= FL(full set)`` and ``shift=True`` adds the constant that
    restores non-negativity (exact via enumeration for n <= 20, the safe
    bound theta(n) otherwise).
    """

    SHIFT_ENUM_LIMIT = 20

    def __init__(self, fl: FacilityLocation, penalty: PenaltyCurve,
                 shift: bool = False, clamp: bool = False):
        self.fl = fl
        self.penalty = penalty
        self.n = fl.n
        if len(penalty) < self.n + 1:
            raise ValueError(
                f"penalty curve has {len(penalty)} entries, need n+1 = {self.n + 1}")
        full = fl.eval(range(self.n))
        if penalty(self.n) > full + REAL_TOL:
            raise ValueError(
                f"penalty at full size ({penalty(self.n):.6g}) exceeds FL of the "
                f"full set ({full:.6g})")
        self.clamp = bool(clamp)
        self.shift = 0.0
        if shift:
            self.shift = max(0.0, -self._lower_bound())

    def _lower_bound(self) -> float:
        if self.n <= self.SHIFT_ENUM_LIMIT:
            masks = np.arange(1 << self.n, dtype=np.int64)
            M = ((masks[:, None] >> np.arange(self.n)) & 1).astype(bool)
            vals = self.fl.eval_membership(M) - self.penalty.theta[M.sum(axis=1)]
            return float(vals.min())
        return -self.penalty(self.n)

    def _value(self, s):
        val = self.fl._value(s) - self.penalty(len(s)) + self.shift
        return max(val, 0.0) if self.clamp else val

    def eval_membership(self, M):
        M = np.asarray(M, dtype=bool)
        vals = self.fl.eval_membership(M) - self.penalty.theta[M.sum(axis=1)] + self.shift
        return np.maximum(vals, 0.0) if self.clamp else vals

    def to_dict(self):
        return {"variant": "proxy", "sim": self.fl.sim.tolist(),
                "penalty": self.penalty.to_dict(), "shift": self.shift,
                "clamp": self.clamp}


class InterferenceCoverage(Objective):
    """Coverage minus a weighted penalty on interfering pairs.

    f(S) = |union of covers| - lam * sum over selected pairs of intf(i, j).
    ``intf`` maps unordered pairs to non-negative intensities (symmetric,
    zero diagonal).  Non-monotone for lam > 0.
    """

    def __init__(self, covers: Sequence[Iterable[int]],
                 intf: Mapping[tuple[int, int], float], lam: float,
                 m: int | None = None):
        if not covers:
            raise ValueError("needs at least one element")
        self.covers = [frozenset(int(v) for v in cov) for cov in covers]
        self._masks, m_seen = _cover_masks(self.covers)
        self.m = m_seen if m is None else int(m)
        self.n = len(covers)
        self._incidence = _incidence_matrix(self.covers, self.n, self.m)
        self.lam = float(lam)
        if self.lam < 0:
            raise ValueError("interference weight lam must be non-negative")
        pairs: dict[tuple[int, int], float] = {}
        for (i, j), w in intf.items():
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"interference diagonal ({i},{i}) must be absent")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"interference pair ({i},{j}) out of range")
            key = (min(i, j), max(i, j))
            w = float(w)
            if w < 0:
                raise ValueError("interference intensities must be non-negative")
            if key in pairs and pairs[key] != w:
                raise ValueError(f"asymmetric intensities for pair {key}")
            pairs[key] = w
        self.intf = pairs
        self._pi = np.asarray([p[0] for p in pairs], dtype=np.int64)
        self._pj = np.asarray([p[1] for p in pairs], dtype=np.int64)
        self._pw = np.asarray(list(pairs.values()), dtype=float)

    def _value(self, s):
        union = 0
        for e in s:
            union |= self._masks[e]
        val = float(union.bit_count())
        if self.lam and len(s) > 1 and len(self._pw):
            val -= self.lam * sum(w for (i, j), w in self.intf.items()
                                  if i in s and j in s)
        return val

    def eval_membership(self, M):
        M = np.asarray(M, dtype=bool)
        out = np.zeros(M.shape[0])
        for v in range(self.m):
            covering = self._incidence[:, v]
            if covering.any():
                out += M[:, covering].any(axis=1)
        if self.lam and len(self._pw):
            both = M[:, self._pi] & M[:, self._pj]
            out -= self.lam * (both @ self._pw)
        return out

    def to_dict(self):
        return {
            "variant": "interference_coverage",
            "covers": [sorted(c) for c in self.covers],
            "intf": [[i, j, w] for (i, j), w in sorted(self.intf.items())],
            "lam": self.lam,
            "m": self.m,
        }


class Modular(Objective):
    """Additive objective f(S) = sum of per-element weights."""

    def __init__(self, weights: Sequence[float]):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("need a non-empty 1-d weight vector")
        self.weights = w
        self.n = w.size
        self.integer_valued = bool(np.all(w == np.round(w)))

    def _value(self, s):
        return float(self.weights[sorted(s)].sum()) if s else 0.0

    def eval_membership(self, M):
        return np.asarray(M, dtype=float) @ self.weights

    def to_dict(self):
        return {"variant": "modular", "weights": self.weights.tolist()}


class TableObjective(Objective):
    """Explicit value table over all subsets; for tests and counterexamples."""

    def __init__(self, n: int, table: Mapping[frozenset, float]):
        self.n = int(n)
        self.table = {frozenset(k): float(v) for k, v in table.items()}
        if len(self.table) != (1 << self.n):
            raise ValueError(f"table must cover all {1 << self.n} subsets")
        self.integer_valued = all(v == int(v) for v in self.table.values())

    @classmethod
    def from_function(cls, n: int, fn) -> "TableObjective":
        from itertools import combinations

        table = {}
        for size in range(n + 1):
            for combo in combinations(range(n), size):
                table[frozenset(combo)] = fn(frozenset(combo))
        return cls(n, table)

    def _value(self, s):
        return self.table[s]


def objective_from_dict(payload: Mapping) -> Objective:
    """Rebuild an objective from its ``to_dict`` payload."""
    variant = payload["variant"]
    if variant == "coverage":
        return Coverage(payload["covers"], payload.get("weights"), m=payload.get("m"))
    if variant == "cut":
        return Cut(payload["n"], [tuple(e) for e in payload["edges"]], payload.get("weights"))
    if variant == "facility_location":
        return FacilityLocation(np.asarray(payload["sim"]))
    if variant == "restricted_fl":
        return RestrictedFacilityLocation(np.asarray(payload["sim"]),
                                          payload["rel"], payload["tau"])
    if variant == "proxy":
        obj = Proxy(FacilityLocation(np.asarray(payload["sim"])),
                    PenaltyCurve(payload["penalty"]["theta"]),
                    clamp=payload.get("clamp", False))
        obj.shift = float(payload.get("shift", 0.0))
        return obj
    if variant == "interference_coverage":
        intf = {(i, j): w for i, j, w in payload["intf"]}
        return InterferenceCoverage(payload["covers"], intf, payload["lam"],
                                    m=payload.get("m"))
    if variant == "modular":
        return Modular(payload["weights"])
    raise ValueError(f"unknown objective variant {variant!r}")


class CountingOracle:
    """Memoizing wrapper with query accounting.

    ``queries`` counts evaluations of sets never seen before; repeats are
    served from the memo and counted as ``cache_hits``.  Values are identical
    to the wrapped objective's.  Thread-safe: lookups and stat updates happen
    under one lock, so concurrent evaluations see correct values and totals.
    """

    def __init__(self, obj: Objective):
        self.inner = obj
        self.n = obj.n
        self.integer_valued = obj.integer_valued
        self._memo: dict[tuple, float] = {}
        self._queries = 0
        self._hits = 0
        self._lock = threading.Lock()

    def eval(self, S: Iterable[int]):
        key = tuple(sorted(int(e) for e in S))
        with self._lock:
            if key in self._memo:
                self._hits += 1
                return self._memo[key]
        val = self.inner.eval(key)
        with self._lock:
            if key not in self._memo:
                self._memo[key] = val
                self._queries += 1
            else:
                self._hits += 1
        return val

    def marginal(self, e: int, S: Iterable[int]):
        s = set(int(x) for x in S)
        e = int(e)
        if e in s:
            raise ValueError(f"marginal: element {e} already in the set")
        return self.eval(s | {e}) - self.eval(s)

    def stats(self) -> OracleStats:
        with self._lock:
            return OracleStats(self._queries, self._hits)


def counting_wrap(obj: Objective) -> CountingOracle:
    """Wrap an objective for memoized, query-counted evaluation."""
    return CountingOracle(obj)


def unwrap(oracle) -> Objective:
    """Peel counting wrappers off an oracle."""
    while isinstance(oracle, CountingOracle):
        oracle = oracle.inner
    return oracle


def value_table(obj: Objective) -> np.ndarray:
    """Values for all 2^n subsets, indexed by bitmask.  Requires n <= 24."""
    n = obj.n
    if n > 24:
        raise ValueError(f"value table infeasible for n={n}")
    masks = np.arange(1 << n, dtype=np.int64)
    M = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
    return np.asarray(unwrap(obj).eval_membership(M), dtype=float)


@dataclass
class PropertyReport:
    """Result of a randomized or exhaustive structural property check."""

    property: str
    checked: int
    violations: list = field(default_factory=list)
    max_violation: float = 0.0
    exhaustive: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "checked": self.checked,
            "violations": len(self.violations),
            "max_violation": self.max_violation,
            "exhaustive": self.exhaustive,
            "ok": self.ok,
        }


def _default_tol(obj) -> float:
    return 0.0 if getattr(obj, "integer_valued", False) else REAL_TOL


_VIOLATION_CAP = 100


def check_submodular(obj: Objective, trials: int = 1000, seed: int = 0,
                     exhaustive: bool = False, tol: float | None = None) -> PropertyReport:
    """Check diminishing returns: f(x|A) >= f(x|B) for A subset of B, x outside B.

    Sampled mode draws nested pairs uniformly (each element lands in A, B\\A,
    or outside with equal probability) plus a uniform outside x.  Exhaustive
    mode enumerates every (A, B, x) triple; feasible for n <= ~12.
    """
    tol = _default_tol(obj) if tol is None else tol
    n = obj.n
    report = PropertyReport("submodular", 0, exhaustive=exhaustive)

    def record(a_mask: int, b_mask: int, x: int, gap: float):
        if len(report.violations) < _VIOLATION_CAP:
            report.violations.append((_bits(a_mask), _bits(b_mask), x, gap))
        report.max_violation = max(report.max_violation, gap)

    if exhaustive:
        table = value_table(obj)
        bits = np.arange(n)
        for b_mask in range(1 << n):
            outside = bits[((b_mask >> bits) & 1) == 0]
            if outside.size == 0:
                continue
            xbits = (1 << outside).astype(np.int64)
            a_mask = b_mask
            while True:
                # gap = f(x|A) - f(x|B) per outside x; violation when < -tol
                gaps = (table[a_mask | xbits] - table[a_mask]
                        - table[b_mask | xbits] + table[b_mask])
                report.checked += outside.size
                bad = np.flatnonzero(gaps < -tol)
                for idx in bad:
                    record(a_mask, b_mask, int(outside[idx]), float(-gaps[idx]))
                if a_mask == 0:
                    break
                a_mask = (a_mask - 1) & b_mask
        return report

    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    oracle = counting_wrap(obj)
    for _ in range(trials):
        roles = rng.integers(0, 3, size=n)
        b = np.flatnonzero(roles <= 1)
        a = np.flatnonzero(roles == 0)
        outside = np.flatnonzero(roles == 2)
        if outside.size == 0:
            continue
        x = int(rng.choice(outside))
        report.checked += 1
        gap = oracle.marginal(x, a) - oracle.marginal(x, b)
        if gap < -tol:
            record(_mask(a), _mask(b), x, float(-gap))
    return report


def check_monotone(obj: Objective, trials: int = 1000, seed: int = 0,
                   exhaustive: bool = False, tol: float | None = None) -> PropertyReport:
    """Check f(A) <= f(B) over nested pairs A subset of B."""
    tol = _default_tol(obj) if tol is None else tol
    n = obj.n
    report = PropertyReport("monotone", 0, exhaustive=exhaustive)

    def record(a_mask: int, b_mask: int, gap: float):
        if len(report.violations) < _VIOLATION_CAP:
            report.violations.append((_bits(a_mask), _bits(b_mask), gap))
        report.max_violation = max(report.max_violation, gap)

    if exhaustive:
        table = value_table(obj)
        for b_mask in range(1 << n):
            fb = table[b_mask]
            a_mask = b_mask
            while True:
                report.checked += 1
                gap = table[a_mask] - fb
                if gap > tol:
                    record(a_mask, b_mask, float(gap))
                if a_mask == 0:
                    break
                a_mask = (a_mask - 1) & b_mask
        return report

    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    oracle = counting_wrap(obj)
    for _ in range(trials):
        roles = rng.integers(0, 3, size=n)
        b = np.flatnonzero(roles <= 1)
        a = np.flatnonzero(roles == 0)
        report.checked += 1
        gap = oracle.eval(a) - oracle.eval(b)
        if gap > tol:
            record(_mask(a), _mask(b), float(gap))
    return report


def _mask(ids) -> int:
    out = 0
    for e in ids:
        out |= 1 << int(e)
    return out


def _bits(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)
