"""Synthetic graph families with known structure, for verification.

Each generator either has closed-form expected behavior (star, cycle,
cliques, planted blocks) or preserves a chosen property of a real graph
(degree-preserving rewire), so downstream measurements can be checked
against ground truth. All randomness flows through numpy's seeded
default_rng, making every family reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .community import Partition
from .graph import (
    DirectedGraph,
    UndirectedView,
    directed_from_arcs,
    undirected_from_edges,
)

_INT = np.int64

FAMILIES = (
    "figure2",
    "planted-partition",
    "configuration-model",
    "star",
    "directed-cycle",
    "disjoint-cliques",
)

# three groups of four: a clique plus two cycles, lightly tied together
_FIG2_EDGES = (
    (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3),
    (4, 5), (5, 6), (6, 7), (4, 7),
    (8, 9), (9, 10), (10, 11), (8, 11),
    (0, 4), (1, 8), (5, 9), (6, 10), (7, 11),
)


def figure2_instance() -> tuple[UndirectedView, Partition]:
    """Fixed 12-vertex, 19-edge instance with three planted groups.

    Group 0 ("black", vertices 0-3) is a clique carrying two of the five
    cross-group edges; groups 1 ("red", 4-7) and 2 ("blue", 8-11) are
    4-cycles whose members carry exactly one cross edge each. The clique
    group contributes visibly more to modularity than either cycle.
    """
    und = undirected_from_edges(12, _FIG2_EDGES)
    assignment = [0] * 4 + [1] * 4 + [2] * 4
    part = Partition.from_assignment(assignment, {0: "black", 1: "red", 2: "blue"})
    return und, part


def planted_partition(
    block_sizes: Sequence[int], p_in: float, p_out: float, seed: int = 0
) -> tuple[DirectedGraph, Partition]:
    """Directed blocks: each ordered pair gets an arc independently, with
    probability p_in inside a block and p_out across blocks."""
    sizes = [int(s) for s in block_sizes]
    if not sizes or any(s <= 0 for s in sizes):
        raise ValueError("block sizes must be positive integers")
    for name, prob in (("p_in", p_in), ("p_out", p_out)):
        if not (0.0 <= prob <= 1.0):
            raise ValueError(f"{name} must be in [0, 1], got {prob}")
    n = sum(sizes)
    assignment = np.repeat(np.arange(len(sizes), dtype=_INT), sizes)
    rng = np.random.default_rng(seed)

    # row-chunked so the dense draw stays within a modest memory budget;
    # draws are consecutive, so the chunk size never changes the output
    chunk = max(1, 4_000_000 // n)
    counts = np.zeros(n, dtype=_INT)
    parts: list[np.ndarray] = []
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        draws = rng.random((stop - start, n))
        thresholds = np.where(assignment[start:stop, None] == assignment[None, :], p_in, p_out)
        hit = draws < thresholds
        hit[np.arange(stop - start), np.arange(start, stop)] = False
        ri, ci = np.nonzero(hit)
        parts.append(ci.astype(_INT))
        counts[start:stop] = np.bincount(ri, minlength=stop - start)
    indices = np.concatenate(parts) if parts else np.zeros(0, dtype=_INT)
    indptr = np.zeros(n + 1, dtype=_INT)
    np.cumsum(counts, out=indptr[1:])
    g = DirectedGraph(n=n, indptr=indptr, indices=indices,
                      multiplicity=np.ones(len(indices), dtype=_INT))
    meta = {i: f"block{i}" for i in range(len(sizes))}
    return g, Partition.from_assignment(assignment, meta)


def configuration_rewire(g: UndirectedView, swaps: int, seed: int = 0) -> UndirectedView:
    """Degree-preserving randomization by repeated double-edge swaps.

    Swaps that would create a self-loop or a duplicate edge are rejected and
    retried; ``swaps`` counts accepted ones. Zero swaps returns the graph
    unchanged. Raises RuntimeError if the acceptance rate collapses (e.g. on
    a complete graph, where no legal swap exists).
    """
    if swaps < 0:
        raise ValueError("swaps must be non-negative")
    if swaps == 0:
        return g
    if g.m < 2:
        raise ValueError("rewiring needs at least two edges")
    edges = [tuple(e) for e in g.edge_pairs().tolist()]
    present = set(edges)
    rng = np.random.default_rng(seed)
    accepted = 0
    attempts = 0
    budget = max(1000, 200 * swaps)
    while accepted < swaps:
        attempts += 1
        if attempts > budget:
            raise RuntimeError(
                f"degree-preserving rewire stalled: {accepted}/{swaps} swaps "
                f"accepted after {budget} attempts"
            )
        i, j = rng.integers(0, g.m, size=2)
        if i == j:
            continue
        a, b = edges[i]
        c, d = edges[j]
        if rng.integers(0, 2) == 1:
            c, d = d, c
        if a == d or c == b:
            continue
        p = (a, d) if a < d else (d, a)
        q = (c, b) if c < b else (b, c)
        if p == q or p in present or q in present:
            continue
        present.discard(edges[i])
        present.discard(edges[j])
        present.add(p)
        present.add(q)
        edges[i] = p
        edges[j] = q
        accepted += 1
    return undirected_from_edges(g.n, edges)


def star(n_leaves: int) -> DirectedGraph:
    """Hub vertex 0 with an arc to each of n_leaves leaves."""
    if n_leaves < 1:
        raise ValueError("a star needs at least one leaf")
    arcs = [(0, i) for i in range(1, n_leaves + 1)]
    return directed_from_arcs(n_leaves + 1, arcs)


def directed_cycle(n: int) -> DirectedGraph:
    """Arcs i -> (i+1) mod n; every vertex spans exactly itself plus one."""
    if n < 2:
        raise ValueError("a directed cycle needs at least two vertices")
    arcs = [(i, (i + 1) % n) for i in range(n)]
    return directed_from_arcs(n, arcs)


def disjoint_cliques(sizes: Sequence[int]) -> tuple[DirectedGraph, Partition]:
    """Bidirectional cliques with no arcs between them, one group each."""
    block_sizes = [int(s) for s in sizes]
    if not block_sizes or any(s <= 0 for s in block_sizes):
        raise ValueError("clique sizes must be positive integers")
    n = sum(block_sizes)
    arcs = []
    start = 0
    for size in block_sizes:
        vs = range(start, start + size)
        arcs.extend((u, v) for u in vs for v in vs if u != v)
        start += size
    assignment = np.repeat(np.arange(len(block_sizes), dtype=_INT), block_sizes)
    meta = {i: f"clique{i}" for i in range(len(block_sizes))}
    g = directed_from_arcs(n, arcs)
    return g, Partition.from_assignment(assignment, meta)


@dataclass(frozen=True)
class GeneratorSpec:
    """A named family plus its parameters and seed; the unit of reproducibility."""

    family: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(
                f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}"
            )


@dataclass(frozen=True)
class SynthOutput:
    """Arc list plus optional ground-truth partition, ready to serialize."""

    n: int
    arc_pairs: np.ndarray
    partition: Partition | None

    @property
    def vertex_labels(self) -> list[str]:
        return [f"v{i}" for i in range(self.n)]


def _arcs_of_directed(g: DirectedGraph) -> np.ndarray:
    return np.column_stack([g.arc_sources(), g.indices])


def _arcs_of_undirected(und: UndirectedView) -> np.ndarray:
    rows = np.repeat(np.arange(und.n, dtype=_INT), und.degrees)
    return np.column_stack([rows, und.indices])


_ALLOWED_PARAMS = {
    "figure2": set(),
    "planted-partition": {"block_sizes", "p_in", "p_out"},
    "configuration-model": {"swaps"},
    "star": {"n_leaves"},
    "directed-cycle": {"n"},
    "disjoint-cliques": {"sizes"},
}


def generate(spec: GeneratorSpec, base: UndirectedView | None = None) -> SynthOutput:
    """Materialize a family; undirected families serialize one arc per direction.

    The configuration-model family rewires ``base`` and is the only one that
    needs it.
    """
    unknown = set(spec.parameters) - _ALLOWED_PARAMS[spec.family]
    if unknown:
        raise ValueError(
            f"unknown parameter(s) {sorted(unknown)} for family {spec.family!r}"
        )
    params = spec.parameters
    if spec.family == "figure2":
        und, part = figure2_instance()
        return SynthOutput(n=und.n, arc_pairs=_arcs_of_undirected(und), partition=part)
    if spec.family == "planted-partition":
        for req in ("block_sizes", "p_in", "p_out"):
            if req not in params:
                raise ValueError(f"planted-partition requires parameter {req!r}")
        g, part = planted_partition(
            params["block_sizes"], params["p_in"], params["p_out"], seed=spec.seed
        )
        return SynthOutput(n=g.n, arc_pairs=_arcs_of_directed(g), partition=part)
    if spec.family == "configuration-model":
        if base is None:
            raise ValueError("configuration-model requires a base graph to rewire")
        swaps = params.get("swaps", 10 * base.m)
        rewired = configuration_rewire(base, swaps=swaps, seed=spec.seed)
        return SynthOutput(n=rewired.n, arc_pairs=_arcs_of_undirected(rewired), partition=None)
    if spec.family == "star":
        if "n_leaves" not in params:
            raise ValueError("star requires parameter 'n_leaves'")
        g = star(params["n_leaves"])
        return SynthOutput(n=g.n, arc_pairs=_arcs_of_directed(g), partition=None)
    if spec.family == "directed-cycle":
        if "n" not in params:
            raise ValueError("directed-cycle requires parameter 'n'")
        g = directed_cycle(params["n"])
        return SynthOutput(n=g.n, arc_pairs=_arcs_of_directed(g), partition=None)
    g, part = disjoint_cliques(params.get("sizes", ()))
    return SynthOutput(n=g.n, arc_pairs=_arcs_of_directed(g), partition=part)
