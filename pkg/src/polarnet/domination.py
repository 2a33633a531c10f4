"""Greedy partial dominating-set solving on directed graphs.

A vertex v "spans" itself plus its out-neighbors, restricted to whatever
target set needs covering. The greedy rule repeatedly picks the candidate
with the largest uncovered span (ties to the lowest vertex id) until the
requested fraction of targets is covered, which carries the standard
H(delta+1) approximation guarantee for this objective.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, replace
from itertools import combinations
from typing import Sequence, TextIO

import numpy as np

from .community import Partition
from .errors import InfeasibleCoverageError
from .graph import DirectedGraph, induced_subgraph

_INT = np.int64

# candidate pools beyond this are too large to enumerate exactly
BRUTE_FORCE_LIMIT = 25


@dataclass(frozen=True)
class DominationResult:
    """Outcome of a feasible greedy run.

    ``selected`` lists picks in order; ``covered_after_step[j]`` is how many
    targets the first j+1 picks cover together.
    """

    selected: tuple[int, ...]
    covered_after_step: tuple[int, ...]
    rho: float
    target: int
    n_target: int
    candidates: str

    @property
    def covered(self) -> int:
        return self.covered_after_step[-1] if self.covered_after_step else 0

    @property
    def fraction(self) -> float:
        return self.covered / self.n_target if self.n_target else 0.0


def spreaders(g: DirectedGraph) -> np.ndarray:
    """Vertices with at least one outgoing arc; the default candidate pool."""
    return np.flatnonzero(g.out_degrees > 0)


def coverage_target(rho: float, n_target: int) -> int:
    """Smallest integer count satisfying a fractional coverage requirement.

    Products that land within 1e-9 of an integer are snapped to it before
    rounding up, so e.g. 0.3 * 10 asks for 3 picks rather than 4.
    """
    if not (0.0 < rho <= 1.0):
        raise ValueError(f"rho must be in (0, 1], got {rho}")
    scaled = rho * n_target
    nearest = round(scaled)
    if abs(scaled - nearest) < 1e-9:
        return int(nearest)
    return int(math.ceil(scaled))


def _reverse_csr(g: DirectedGraph) -> tuple[np.ndarray, np.ndarray]:
    """CSR over in-neighbors: who points at each vertex."""
    order = np.argsort(g.indices, kind="stable")
    rev_indices = g.arc_sources()[order]
    rev_ptr = np.zeros(g.n + 1, dtype=_INT)
    np.cumsum(np.bincount(g.indices, minlength=g.n), out=rev_ptr[1:])
    return rev_ptr, rev_indices


def _resolve_ids(g: DirectedGraph, ids: Sequence[int] | np.ndarray, what: str) -> np.ndarray:
    arr = np.unique(np.asarray(list(ids) if not isinstance(ids, np.ndarray) else ids, dtype=_INT))
    if len(arr) and (arr[0] < 0 or arr[-1] >= g.n):
        bad = int(arr[0]) if arr[0] < 0 else int(arr[-1])
        raise ValueError(f"{what} id {bad} out of range for graph with {g.n} vertices")
    return arr


def _greedy_run(
    g: DirectedGraph,
    candidate_ids: np.ndarray,
    target_mask: np.ndarray,
    stop_covered: int | None,
    max_picks: int | None,
) -> tuple[list[int], list[int], bool]:
    """Core greedy loop shared by the solver and the curve.

    Returns (selected, covered_after_step, exhausted). ``exhausted`` means the
    candidate pool ran out of useful picks before any stop condition was met.
    """
    n = g.n
    rev_ptr, rev_indices = _reverse_csr(g)

    hits = target_mask[g.indices]
    spans = np.bincount(g.arc_sources()[hits], minlength=n).astype(_INT)
    spans += target_mask.astype(_INT)
    is_cand = np.zeros(n, dtype=bool)
    is_cand[candidate_ids] = True
    spans[~is_cand] = 0

    heap = [(-int(spans[v]), int(v)) for v in candidate_ids if spans[v] > 0]
    heapq.heapify(heap)

    covered = np.zeros(n, dtype=bool)
    picked = np.zeros(n, dtype=bool)
    selected: list[int] = []
    covered_after: list[int] = []
    f = 0

    while True:
        if stop_covered is not None and f >= stop_covered:
            return selected, covered_after, False
        if max_picks is not None and len(selected) >= max_picks:
            return selected, covered_after, False
        v = -1
        while heap:
            neg_span, u = heap[0]
            if picked[u] or spans[u] != -neg_span:
                heapq.heappop(heap)  # stale entry
                continue
            v = u
            heapq.heappop(heap)
            break
        if v < 0:
            return selected, covered_after, True

        picked[v] = True
        closed = np.append(g.indices[g.indptr[v]: g.indptr[v + 1]], v)
        newly = closed[target_mask[closed] & ~covered[closed]]
        covered[newly] = True
        f += int(newly.size)
        selected.append(v)
        covered_after.append(f)

        if newly.size:
            chunks = [rev_indices[rev_ptr[w]: rev_ptr[w + 1]] for w in newly.tolist()]
            chunks.append(newly)
            touch = np.concatenate(chunks)
            touch = touch[is_cand[touch] & ~picked[touch]]
            if touch.size:
                uniq, cnt = np.unique(touch, return_counts=True)
                spans[uniq] -= cnt
                for u, s in zip(uniq.tolist(), spans[uniq].tolist()):
                    if s > 0:
                        heapq.heappush(heap, (-s, u))


def greedy_pdds(
    g: DirectedGraph,
    rho: float,
    candidates: Sequence[int] | np.ndarray | None = None,
    cover_targets: Sequence[int] | np.ndarray | None = None,
) -> DominationResult:
    """Greedy cover of a fraction rho of the targets by candidate spans.

    Candidates default to the spreaders; targets default to every vertex.
    Raises InfeasibleCoverageError, carrying the partial run, when the
    candidate pool cannot reach the requested count at all.
    """
    if cover_targets is None:
        target_mask = np.ones(g.n, dtype=bool)
        n_target = g.n
    else:
        target_ids = _resolve_ids(g, cover_targets, "target")
        target_mask = np.zeros(g.n, dtype=bool)
        target_mask[target_ids] = True
        n_target = len(target_ids)

    if candidates is None:
        cand = spreaders(g)
        desc = f"spreaders ({len(cand)} candidates)"
    else:
        cand = _resolve_ids(g, candidates, "candidate")
        desc = f"restricted pool ({len(cand)} candidates)"

    target = coverage_target(rho, n_target)
    selected, covered_after, exhausted = _greedy_run(g, cand, target_mask, target, None)
    if exhausted:
        reached = covered_after[-1] if covered_after else 0
        raise InfeasibleCoverageError(target, n_target, reached, selected, covered_after)
    return DominationResult(
        selected=tuple(selected),
        covered_after_step=tuple(covered_after),
        rho=rho,
        target=target,
        n_target=n_target,
        candidates=desc,
    )


def coverage_curve(
    g: DirectedGraph,
    candidates: Sequence[int] | np.ndarray | None = None,
    cover_targets: Sequence[int] | np.ndarray | None = None,
    max_spreaders: int = 1,
) -> list[tuple[int, float]]:
    """Fraction covered after 1..max_spreaders greedy picks.

    Stops early once no remaining candidate adds coverage, so the curve never
    pads with useless picks. Fractions are non-decreasing and their marginal
    gains never increase.
    """
    if max_spreaders < 1:
        raise ValueError("max_spreaders must be at least 1")
    if cover_targets is None:
        target_mask = np.ones(g.n, dtype=bool)
        n_target = g.n
    else:
        target_ids = _resolve_ids(g, cover_targets, "target")
        target_mask = np.zeros(g.n, dtype=bool)
        target_mask[target_ids] = True
        n_target = len(target_ids)
    if n_target == 0:
        return []
    cand = spreaders(g) if candidates is None else _resolve_ids(g, candidates, "candidate")
    _, covered_after, _ = _greedy_run(g, cand, target_mask, None, max_spreaders)
    return [(j + 1, c / n_target) for j, c in enumerate(covered_after)]


def brute_force_pdds(
    g: DirectedGraph,
    rho: float,
    candidates: Sequence[int] | np.ndarray,
    cover_targets: Sequence[int] | np.ndarray | None = None,
) -> int | None:
    """Exact minimum number of candidates covering the target fraction.

    Exhaustive over candidate subsets in ascending size, so the pool is
    capped at BRUTE_FORCE_LIMIT. Returns None when even the full pool falls
    short.
    """
    cand = _resolve_ids(g, candidates, "candidate")
    if len(cand) > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force is capped at {BRUTE_FORCE_LIMIT} candidates, got {len(cand)}")
    if cover_targets is None:
        target_ids = np.arange(g.n, dtype=_INT)
    else:
        target_ids = _resolve_ids(g, cover_targets, "target")
    n_target = len(target_ids)
    target = coverage_target(rho, n_target)
    if target == 0:
        return 0

    bit_of = {int(v): j for j, v in enumerate(target_ids)}
    masks: list[int] = []
    for v in cand.tolist():
        mask = 0
        if v in bit_of:
            mask |= 1 << bit_of[v]
        for w in g.indices[g.indptr[v]: g.indptr[v + 1]].tolist():
            if w in bit_of:
                mask |= 1 << bit_of[w]
        masks.append(mask)

    masks.sort(key=lambda x: -x.bit_count())
    best_prefix = [0]
    for mask in masks:
        best_prefix.append(best_prefix[-1] + mask.bit_count())
    for r in range(1, len(masks) + 1):
        if best_prefix[r] < target:
            continue
        for combo in combinations(masks, r):
            union = 0
            for mask in combo:
                union |= mask
            if union.bit_count() >= target:
                return r
    return None


def group_spreaders(g: DirectedGraph, p: Partition, i: int) -> np.ndarray:
    """Members of group i that are spreaders in the full graph."""
    if p.n != g.n:
        raise ValueError(f"partition covers {p.n} vertices, graph has {g.n}")
    members = p.members(i)
    return members[g.out_degrees[members] > 0]


def in_group_domination(g: DirectedGraph, p: Partition, i: int, rho: float) -> DominationResult:
    """Cover a fraction of group i using only its own spreader members.

    Spreader status comes from the full graph, so a member whose arcs all
    leave the group still qualifies but covers only itself here. Vertex ids
    in the result refer to the full graph.
    """
    members = p.members(i)
    cand_global = group_spreaders(g, p, i)
    sub, gids = induced_subgraph(g, members)
    local_cand = np.searchsorted(gids, cand_global)
    desc = f"group {i} spreaders, in-group targets ({len(cand_global)} candidates)"
    try:
        result = greedy_pdds(sub, rho, candidates=local_cand)
    except InfeasibleCoverageError as err:
        raise InfeasibleCoverageError(
            err.target,
            err.n_target,
            err.max_coverable,
            [int(gids[v]) for v in err.selected],
            err.covered_after_step,
        ) from None
    return replace(
        result,
        selected=tuple(int(gids[v]) for v in result.selected),
        candidates=desc,
    )


def network_domination_by_group(g: DirectedGraph, p: Partition, i: int, rho: float) -> DominationResult:
    """Cover a fraction of the whole network using only group i spreaders."""
    cand = group_spreaders(g, p, i)
    result = greedy_pdds(g, rho, candidates=cand)
    return replace(
        result,
        candidates=f"group {i} spreaders, network targets ({len(cand)} candidates)",
    )


def _name(v: int, labels: Sequence[str] | None) -> str:
    return labels[v] if labels is not None else str(v)


def write_domination_csv(
    result: DominationResult, stream: TextIO, labels: Sequence[str] | None = None
) -> None:
    stream.write("step,vertex,covered,fraction\n")
    for j, (v, c) in enumerate(zip(result.selected, result.covered_after_step), start=1):
        stream.write(f"{j},{_name(v, labels)},{c},{c / result.n_target:.6f}\n")


def domination_to_dict(result: DominationResult, labels: Sequence[str] | None = None) -> dict:
    return {
        "feasible": True,
        "rho": result.rho,
        "target": result.target,
        "n_target": result.n_target,
        "candidates": result.candidates,
        "selected": [_name(v, labels) for v in result.selected],
        "covered_after_step": list(result.covered_after_step),
        "covered": result.covered,
        "fraction": result.fraction,
    }


def infeasible_to_dict(
    err: InfeasibleCoverageError, rho: float, labels: Sequence[str] | None = None
) -> dict:
    return {
        "feasible": False,
        "rho": rho,
        "target": err.target,
        "n_target": err.n_target,
        "candidates": None,
        "selected": [_name(v, labels) for v in err.selected],
        "covered_after_step": list(err.covered_after_step),
        "max_coverable": err.max_coverable,
        "max_fraction": err.max_coverable / err.n_target if err.n_target else 0.0,
        "error": str(err),
    }


def write_curve_csv(curve: Sequence[tuple[int, float]], stream: TextIO) -> None:
    stream.write("spreaders,fraction\n")
    for count, frac in curve:
        stream.write(f"{count},{frac:.6f}\n")


def write_domination_json(payload: dict, stream: TextIO) -> None:
    json.dump(payload, stream, indent=2, sort_keys=True)
    stream.write("\n")
