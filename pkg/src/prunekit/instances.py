"""Instance generators, file loaders, and the size-penalty fitter.

Generators are seed-deterministic.  File formats:

* edge list -- one ``u v [w]`` per line, ``#`` comments, 0-indexed ids;
* coverage list -- ``elem: item item ...`` per line;
* similarity matrix -- dense CSV, rows are covered points;
* costs -- two-column CSV ``element,cost``;
* penalty curve -- two-column CSV ``size,theta``.

Malformed lines raise :class:`InputFormatError` carrying the line number.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .objectives import Coverage, InterferenceCoverage, PenaltyCurve

__all__ = [
    "GenSpec", "InputFormatError",
    "gen_gnm", "gen_planted", "gen_interference", "gen_coverage", "gen_from_spec",
    "load_edge_list", "save_edge_list", "load_coverage_list",
    "load_similarity_csv", "load_costs_csv", "load_scores_csv", "load_penalty_csv",
    "fit_penalty", "pava_nonincreasing",
]

#: fixed parameters of the interference-coverage recipe; universe_m is the
#: one knob left open (an invented default, echoed in serialized output)
INTERFERENCE_DEFAULTS = {
    "interference_prob": 0.25,
    "intensity_range": (1.0, 5.0),
    "lambda_range": (0.5, 2.5),
    "cover_size_range": (3, 8),
}


class InputFormatError(ValueError):
    """A loader hit a malformed line; carries path and 1-based line number."""

    def __init__(self, path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


@dataclass(frozen=True)
class GenSpec:
    """Reproducible instance recipe: family tag, parameters, seed."""

    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def to_dict(self) -> dict:
        return {"family": self.family, "params": dict(self.params), "seed": self.seed}


def gen_gnm(n: int, m: int, seed: int = 0) -> list[tuple[int, int]]:
    """Uniform simple graph with exactly m edges on n vertices."""
    total = n * (n - 1) // 2
    if not (0 <= m <= total):
        raise ValueError(f"m must be in [0, {total}] for n={n}, got {m}")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(total, size=m, replace=False)

    def row_start(u: int) -> int:
        return (u * (2 * n - u - 1)) // 2

    edges = []
    for idx in sorted(chosen.tolist()):
        # decode linear index into the (u < v) pair grid; fix float rounding
        u = int((2 * n - 1 - math.sqrt((2 * n - 1) ** 2 - 8 * idx)) / 2)
        u = max(0, min(u, n - 2))
        while u + 1 <= n - 2 and row_start(u + 1) <= idx:
            u += 1
        while u > 0 and row_start(u) > idx:
            u -= 1
        v = u + 1 + (idx - row_start(u))
        edges.append((u, v))
    return edges


def gen_planted(n: int, communities: int, p_in: float = 0.3, p_out: float = 0.05,
                seed: int = 0, community_size: int | None = None) -> list[tuple[int, int]]:
    """Planted-partition graph: equal-size blocks (last one padded), edge
    probability p_in inside a block and p_out across blocks.

    ``communities`` is the block count; pass ``community_size`` instead to fix
    the block size and derive the count.  The probability defaults are
    invented (the benchmark names only the sizes) and callers should echo
    them in any serialized output.
    """
    if community_size is not None:
        communities = math.ceil(n / community_size)
    if communities < 1 or communities > n:
        raise ValueError(f"communities must be in [1, n], got {communities}")
    if not (0 <= p_in <= 1 and 0 <= p_out <= 1):
        raise ValueError("probabilities must be in [0, 1]")
    rng = np.random.default_rng(seed)
    block_size = math.ceil(n / communities)
    block = [min(i // block_size, communities - 1) for i in range(n)]
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            p = p_in if block[u] == block[v] else p_out
            if rng.random() < p:
                edges.append((u, v))
    return edges


def gen_interference(n: int, universe_m: int, seed: int = 0,
                     interference_prob: float | None = None,
                     intensity_range: tuple[float, float] | None = None,
                     lambda_range: tuple[float, float] | None = None,
                     cover_size_range: tuple[int, int] | None = None,
                     lam: float | None = None) -> InterferenceCoverage:
    """Random interference-coverage objective.

    Every element covers a uniform subset of [universe_m] whose size is
    uniform on the cover-size range; unordered pairs interfere independently
    with the given probability and uniform intensity; the penalty weight is
    uniform on its range unless ``lam`` pins it.  Forcing
    ``interference_prob=0`` yields a plain monotone coverage objective.
    """
    if universe_m < 8:
        raise ValueError("universe_m must be >= 8")
    prob = INTERFERENCE_DEFAULTS["interference_prob"] if interference_prob is None \
        else interference_prob
    lo_i, hi_i = intensity_range or INTERFERENCE_DEFAULTS["intensity_range"]
    lo_l, hi_l = lambda_range or INTERFERENCE_DEFAULTS["lambda_range"]
    lo_c, hi_c = cover_size_range or INTERFERENCE_DEFAULTS["cover_size_range"]
    rng = np.random.default_rng(seed)
    covers = []
    for _ in range(n):
        size = int(rng.integers(lo_c, hi_c + 1))
        covers.append(sorted(rng.choice(universe_m, size=size, replace=False).tolist()))
    intf = {}
    if prob > 0:
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < prob:
                    intf[(i, j)] = float(rng.uniform(lo_i, hi_i))
    if lam is None:
        lam = float(rng.uniform(lo_l, hi_l))
    return InterferenceCoverage(covers, intf, lam, m=universe_m)


def gen_coverage(n: int, universe_m: int, seed: int = 0,
                 cover_size_range: tuple[int, int] | None = None) -> Coverage:
    """Random monotone coverage instance (interference recipe with no pairs)."""
    obj = gen_interference(n, universe_m, seed, interference_prob=0.0,
                           cover_size_range=cover_size_range)
    return Coverage([sorted(c) for c in obj.covers], m=universe_m)


def gen_from_spec(spec: GenSpec):
    """Materialize a :class:`GenSpec`; returns edges or an objective."""
    if spec.family == "gnm":
        return gen_gnm(seed=spec.seed, **spec.params)
    if spec.family == "planted":
        return gen_planted(seed=spec.seed, **spec.params)
    if spec.family == "interference":
        return gen_interference(seed=spec.seed, **spec.params)
    if spec.family == "coverage":
        return gen_coverage(seed=spec.seed, **spec.params)
    raise ValueError(f"unknown generator family {spec.family!r}")


def _data_lines(path):
    with open(path) as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield line_no, line


def load_edge_list(path) -> list[tuple[int, int, float]]:
    """Parse ``u v [w]`` lines into (u, v, weight) triples (weight 1 default)."""
    edges = []
    for line_no, line in _data_lines(path):
        parts = line.split()
        if len(parts) not in (2, 3):
            raise InputFormatError(path, line_no,
                                   f"expected 'u v [w]', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise InputFormatError(path, line_no, f"non-numeric field in {line!r}")
        if u < 0 or v < 0:
            raise InputFormatError(path, line_no, "vertex ids must be >= 0")
        if w < 0:
            raise InputFormatError(path, line_no, "edge weight must be >= 0")
        edges.append((u, v, w))
    return edges


def save_edge_list(path, edges, header_lines: Sequence[str] = ()) -> None:
    """Write an edge list; header lines are emitted as ``#`` comments."""
    with open(path, "w") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for edge in edges:
            if len(edge) == 3 and float(edge[2]) != 1.0:
                fh.write(f"{edge[0]} {edge[1]} {edge[2]}\n")
            else:
                fh.write(f"{edge[0]} {edge[1]}\n")


def load_coverage_list(path) -> list[list[int]]:
    """Parse ``elem: item item ...`` lines into per-element cover lists.

    Elements may appear in any order but must form a dense 0..n-1 range.
    """
    covers: dict[int, list[int]] = {}
    for line_no, line in _data_lines(path):
        if ":" not in line:
            raise InputFormatError(path, line_no, "expected 'elem: item item ...'")
        head, tail = line.split(":", 1)
        try:
            elem = int(head.strip())
            items = [int(tok) for tok in tail.split()]
        except ValueError:
            raise InputFormatError(path, line_no, f"non-integer field in {line!r}")
        if elem < 0 or any(v < 0 for v in items):
            raise InputFormatError(path, line_no, "ids must be >= 0")
        if elem in covers:
            raise InputFormatError(path, line_no, f"duplicate element {elem}")
        covers[elem] = sorted(set(items))
    if not covers:
        return []
    n = max(covers) + 1
    if sorted(covers) != list(range(n)):
        missing = sorted(set(range(n)) - set(covers))
        raise InputFormatError(path, 0, f"element ids not dense; missing {missing}")
    return [covers[e] for e in range(n)]


def load_similarity_csv(path) -> np.ndarray:
    """Parse a dense similarity matrix; must be rectangular with >= 1 row."""
    rows = []
    width = None
    with open(path) as fh:
        for line_no, record in enumerate(csv.reader(fh), start=1):
            if not record or (len(record) == 1 and not record[0].strip()):
                continue
            if record[0].lstrip().startswith("#"):
                continue
            try:
                row = [float(x) for x in record]
            except ValueError:
                raise InputFormatError(path, line_no, f"non-numeric entry in {record!r}")
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise InputFormatError(path, line_no,
                                       f"ragged row: expected {width} columns, got {len(row)}")
            if min(row) < 0:
                raise InputFormatError(path, line_no, "similarities must be >= 0")
            rows.append(row)
    if not rows:
        raise InputFormatError(path, 0, "similarity matrix needs at least one row")
    return np.asarray(rows, dtype=float)


def _load_two_col(path, what: str) -> dict[int, float]:
    out: dict[int, float] = {}
    with open(path) as fh:
        for line_no, record in enumerate(csv.reader(fh), start=1):
            if not record or (len(record) == 1 and not record[0].strip()):
                continue
            if record[0].lstrip().startswith("#"):
                continue
            if len(record) != 2:
                raise InputFormatError(path, line_no, f"expected 'id,{what}'")
            try:
                e, c = int(record[0]), float(record[1])
            except ValueError:
                raise InputFormatError(path, line_no, f"non-numeric field in {record!r}")
            if e < 0:
                raise InputFormatError(path, line_no, "ids must be >= 0")
            if e in out:
                raise InputFormatError(path, line_no, f"duplicate id {e}")
            out[e] = c
    return out


def load_costs_csv(path) -> dict[int, float]:
    """Parse two-column ``element,cost`` records into an id -> cost map."""
    costs = _load_two_col(path, "cost")
    for e, c in costs.items():
        if c <= 0:
            raise InputFormatError(path, 0, f"cost of element {e} must be positive")
    return costs


def load_scores_csv(path) -> dict[int, float]:
    """Parse two-column ``id,score`` records (any real scores allowed)."""
    return _load_two_col(path, "score")


def load_penalty_csv(path) -> PenaltyCurve:
    """Parse two-column ``size,theta`` records into a validated curve.

    Sizes must be the dense range 0..n in any order.
    """
    entries: dict[int, float] = {}
    with open(path) as fh:
        for line_no, record in enumerate(csv.reader(fh), start=1):
            if not record or (len(record) == 1 and not record[0].strip()):
                continue
            if record[0].lstrip().startswith("#"):
                continue
            if len(record) != 2:
                raise InputFormatError(path, line_no, "expected 'size,theta'")
            try:
                s, t = int(record[0]), float(record[1])
            except ValueError:
                raise InputFormatError(path, line_no, f"non-numeric field in {record!r}")
            if s in entries:
                raise InputFormatError(path, line_no, f"duplicate size {s}")
            entries[s] = t
    if not entries:
        raise InputFormatError(path, 0, "penalty curve needs at least one row")
    if sorted(entries) != list(range(max(entries) + 1)):
        raise InputFormatError(path, 0, "sizes must form a dense 0..n range")
    return PenaltyCurve([entries[s] for s in range(max(entries) + 1)])


def pava_nonincreasing(values: Sequence[float], weights: Sequence[float] | None = None) -> np.ndarray:
    """Weighted least-squares non-increasing fit (pool adjacent violators)."""
    y = np.asarray(values, dtype=float)
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    if y.shape != w.shape or y.ndim != 1:
        raise ValueError("values and weights must be matching 1-d arrays")
    # fit non-decreasing on the negated series
    blocks: list[list[float]] = []  # [sum_wy, sum_w, count]
    for yi, wi in zip(-y, w):
        blocks.append([yi * wi, wi, 1])
        while len(blocks) > 1 and blocks[-2][0] / blocks[-2][1] > blocks[-1][0] / blocks[-1][1]:
            b = blocks.pop()
            blocks[-1][0] += b[0]
            blocks[-1][1] += b[1]
            blocks[-1][2] += b[2]
    out = np.empty_like(y)
    pos = 0
    for s_wy, s_w, count in blocks:
        out[pos:pos + count] = -(s_wy / s_w)
        pos += count
    return out


def fit_penalty(points: Sequence[tuple[int, float]], n: int | None = None) -> PenaltyCurve:
    """Fit a convex non-decreasing size penalty from (size, quality) samples.

    Pipeline: (1) mean quality per observed size, (2) non-increasing isotonic
    fit, (3) raw penalty = fitted peak minus fitted quality (zero before the
    first observed size), (4) greatest convex non-decreasing minorant on the
    integer grid 0..n, extended past the data with the final slope.
    """
    pts = [(int(s), float(q)) for s, q in points]
    if not pts:
        raise ValueError("need at least one (size, quality) point")
    if any(s < 0 for s, _ in pts):
        raise ValueError("sizes must be >= 0")
    max_size = max(s for s, _ in pts)
    if n is None:
        n = max_size
    elif max_size > n:
        raise ValueError(f"observed size {max_size} exceeds n={n}")

    by_size: dict[int, list[float]] = {}
    for s, q in pts:
        by_size.setdefault(s, []).append(q)
    sizes = sorted(by_size)
    means = np.array([np.mean(by_size[s]) for s in sizes])
    counts = np.array([len(by_size[s]) for s in sizes], dtype=float)

    fit = pava_nonincreasing(means, counts)
    theta_raw = fit[0] - fit  # non-negative, non-decreasing

    # knots for the minorant: zero up to the first observed size
    xs = [0.0] if sizes[0] > 0 else []
    ys = [0.0] if sizes[0] > 0 else []
    xs += [float(s) for s in sizes]
    ys += [float(t) for t in theta_raw]
    hull_x, hull_y = _lower_convex_hull(xs, ys)

    theta = np.zeros(n + 1)
    slopes = np.zeros(n)  # slope on [s, s+1]
    seg = 0
    for s in range(n):
        while seg + 1 < len(hull_x) - 1 and hull_x[seg + 1] <= s:
            seg += 1
        if s + 1 <= hull_x[-1]:
            slopes[s] = (hull_y[seg + 1] - hull_y[seg]) / (hull_x[seg + 1] - hull_x[seg])
        else:
            # past the data: extend with the final hull slope
            slopes[s] = ((hull_y[-1] - hull_y[-2]) / (hull_x[-1] - hull_x[-2])
                         if len(hull_x) > 1 else 0.0)
    slopes = np.maximum.accumulate(np.clip(slopes, 0.0, None))
    theta[1:] = np.cumsum(slopes)
    return PenaltyCurve(theta)


def _lower_convex_hull(xs: Sequence[float], ys: Sequence[float]):
    """Lower convex hull of points with strictly increasing x."""
    hx: list[float] = []
    hy: list[float] = []
    for x, y in zip(xs, ys):
        while len(hx) >= 2:
            cross = ((hx[-1] - hx[-2]) * (y - hy[-2])
                     - (x - hx[-2]) * (hy[-1] - hy[-2]))
            if cross <= 0:  # middle point is above or on the new segment
                hx.pop()
                hy.pop()
            else:
                break
        hx.append(x)
        hy.append(y)
    return hx, hy
