"""Independent reference implementations the tests check the library against.

Everything here is written for clarity over speed: literal double sums,
full-rescan greedy, exhaustive partition enumeration. None of it imports
from the library's internals beyond the public graph containers.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from polarnet.graph import DirectedGraph, UndirectedView


def parse_edge_lines(lines, delimiter=","):
    """Line-by-line reference parser.

    Returns (arcs, malformed, self_loops) where arcs is a list of
    (source, target, timestamp) triples in input order.
    """
    arcs = []
    malformed = 0
    self_loops = 0
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(delimiter)
        if len(parts) != 3 or not parts[0] or not parts[1]:
            malformed += 1
            continue
        try:
            stamp = int(parts[2])
        except ValueError:
            malformed += 1
            continue
        if stamp < 0:
            malformed += 1
            continue
        if parts[0] == parts[1]:
            self_loops += 1
            continue
        arcs.append((parts[0], parts[1], stamp))
    return arcs, malformed, self_loops


def adjacency_matrix(und: UndirectedView) -> np.ndarray:
    a = np.zeros((und.n, und.n), dtype=np.float64)
    for v in range(und.n):
        for u in und.neighbors(v):
            a[v, u] = 1.0
    return a


def modularity_double_sum(und: UndirectedView, assignment) -> float:
    """Literal double sum over all ordered vertex pairs, diagonal included."""
    a = adjacency_matrix(und)
    d = und.degrees.astype(np.float64)
    two_m = 2.0 * und.m
    terms = []
    for u in range(und.n):
        for v in range(und.n):
            if assignment[u] == assignment[v]:
                terms.append(a[u, v] - d[u] * d[v] / two_m)
    return math.fsum(terms) / two_m


def group_double_sum(und: UndirectedView, assignment, i) -> float:
    """Double sum of the same addends restricted to one group."""
    a = adjacency_matrix(und)
    d = und.degrees.astype(np.float64)
    two_m = 2.0 * und.m
    members = [v for v in range(und.n) if assignment[v] == i]
    terms = []
    for u in members:
        for v in members:
            terms.append(a[u, v] - d[u] * d[v] / two_m)
    return math.fsum(terms) / two_m


def set_partitions(items):
    """All partitions of a list into nonempty blocks (Bell-number many)."""
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for smaller in set_partitions(rest):
        for j in range(len(smaller)):
            yield smaller[:j] + [smaller[j] + [head]] + smaller[j + 1:]
        yield [[head]] + smaller


def max_modularity(und: UndirectedView) -> float:
    """Exhaustive best modularity over every partition; n <= 8 or so."""
    best = -math.inf
    for blocks in set_partitions(list(range(und.n))):
        assignment = [0] * und.n
        for g, block in enumerate(blocks):
            for v in block:
                assignment[v] = g
        best = max(best, modularity_double_sum(und, assignment))
    return best


def closed_out_neighborhood(g: DirectedGraph, v) -> set:
    return set(g.out_neighbors(v).tolist()) | {v}


def greedy_reference(g: DirectedGraph, rho, candidates, cover_targets=None):
    """Greedy cover with spans recomputed from scratch every iteration.

    Mirrors the intended selection semantics exactly: pick the candidate
    whose remaining span is largest, lowest vertex id on ties, stop once
    ceil-adjusted rho * |targets| vertices are covered. Returns
    (selected, covered_after) or None when the pool cannot reach the target.
    """
    targets = set(range(g.n)) if cover_targets is None else set(cover_targets)
    n_target = len(targets)
    scaled = rho * n_target
    nearest = round(scaled)
    target = int(nearest) if abs(scaled - nearest) < 1e-9 else math.ceil(scaled)
    covered = set()
    remaining = sorted(set(candidates))
    selected = []
    covered_after = []
    while len(covered) < target:
        best_v, best_span = None, -1
        for v in remaining:
            span = len((closed_out_neighborhood(g, v) & targets) - covered)
            if span > best_span:
                best_v, best_span = v, span
        if best_v is None or best_span == 0:
            return None
        remaining.remove(best_v)
        covered |= closed_out_neighborhood(g, best_v) & targets
        selected.append(best_v)
        covered_after.append(len(covered))
    return selected, covered_after


def brute_minimum_cover(g: DirectedGraph, rho, candidates, cover_targets=None):
    """Smallest candidate subset reaching the target, by raw enumeration."""
    targets = set(range(g.n)) if cover_targets is None else set(cover_targets)
    n_target = len(targets)
    scaled = rho * n_target
    nearest = round(scaled)
    target = int(nearest) if abs(scaled - nearest) < 1e-9 else math.ceil(scaled)
    if target == 0:
        return 0
    pool = sorted(set(candidates))
    spans = {v: closed_out_neighborhood(g, v) & targets for v in pool}
    for r in range(1, len(pool) + 1):
        for combo in combinations(pool, r):
            union = set()
            for v in combo:
                union |= spans[v]
            if len(union) >= target:
                return r
    return None


def harmonic(x: int) -> float:
    return sum(1.0 / i for i in range(1, x + 1))


def ols_fit(points):
    """Least squares via numpy's solver, independent of the closed form."""
    xs = np.asarray([p[0] for p in points], dtype=np.float64)
    ys = np.asarray([p[1] for p in points], dtype=np.float64)
    design = np.column_stack([xs, np.ones_like(xs)])
    (slope, intercept), *_ = np.linalg.lstsq(design, ys, rcond=None)
    return float(slope), float(intercept)


def random_digraph(n, p, rng) -> DirectedGraph:
    """Independent Bernoulli arcs over ordered pairs; test input helper."""
    from polarnet.graph import directed_from_arcs

    arcs = [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p]
    return directed_from_arcs(n, arcs)


def random_grouping(n, k, rng):
    """Assignment using every index in [0, k); k <= n."""
    assignment = np.concatenate([np.arange(k), rng.integers(0, k, size=n - k)])
    rng.shuffle(assignment)
    return assignment.astype(np.int64)
