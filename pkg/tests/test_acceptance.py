"""Acceptance gate: end-to-end checks with fixed tolerances and time budgets.

Each test prints one summary line (visible with -s or on failure) and asserts
both the numeric contract and its runtime budget.
"""

from __future__ import annotations

import time

import numpy as np
import pytest

import oracles
from polarnet.community import Partition, detect_communities, relabel_by_size
from polarnet.domination import (
    brute_force_pdds,
    coverage_curve,
    coverage_target,
    greedy_pdds,
    in_group_domination,
    network_domination_by_group,
)
from polarnet.errors import InfeasibleCoverageError
from polarnet.graph import (
    IngestOptions,
    build_directed_graph,
    directed_from_arcs,
    ingest_edge_list,
    slice_windows,
    underlying_undirected,
)
from polarnet.polarization import (
    d_modularity,
    group_contributions,
    linear_trend,
    modularity,
    window_series,
)
from polarnet.synth import configuration_rewire, figure2_instance, planted_partition


def _report(number: int, elapsed: float, budget: float, detail: str) -> None:
    print(f"criterion {number:02d} PASS in {elapsed:.2f}s (budget {budget:g}s): {detail}")


def _agreement(detected: Partition, truth: Partition) -> float:
    """Fraction of vertices matched under the best group-label alignment."""
    from scipy.optimize import linear_sum_assignment

    confusion = np.zeros((detected.k, truth.k), dtype=np.int64)
    np.add.at(confusion, (detected.assignment, truth.assignment), 1)
    rows, cols = linear_sum_assignment(-confusion)
    return confusion[rows, cols].sum() / detected.n


def test_criterion_01_reference_instance_values():
    budget = 1.0
    start = time.perf_counter()
    und, part = figure2_instance()
    q = modularity(und, part)
    contribs = group_contributions(und, part)
    shares = [d_modularity(und, part, i) for i in range(part.k)]
    elapsed = time.perf_counter() - start

    assert q == pytest.approx(0.401662, abs=1e-3)
    assert contribs[0] == pytest.approx(0.180055, abs=2e-3)
    assert contribs[1] == pytest.approx(0.110803, abs=2e-3)
    assert contribs[2] == pytest.approx(0.110803, abs=2e-3)
    assert shares[0] == pytest.approx(0.448276, abs=2e-3)
    assert shares[1] == pytest.approx(0.275862, abs=2e-3)
    assert shares[2] == pytest.approx(0.275862, abs=2e-3)
    assert elapsed < budget
    _report(1, elapsed, budget, f"q={q:.6f}, shares={[round(s, 6) for s in shares]}")


def test_criterion_02_decomposition_identity_on_random_inputs():
    budget = 10.0
    rng = np.random.default_rng(202)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(5, 201))
        g = underlying_undirected(oracles.random_digraph(n, float(rng.uniform(0.02, 0.2)), rng))
        if g.m == 0:
            continue
        part = Partition.from_assignment(oracles.random_grouping(n, int(rng.integers(2, 7)), rng))
        gap = abs(sum(group_contributions(g, part)) - modularity(g, part))
        worst = max(worst, gap)
    elapsed = time.perf_counter() - start

    assert worst <= 1e-9
    assert elapsed < budget
    _report(2, elapsed, budget, f"200 graphs, worst |sum(q_i) - q| = {worst:.2e}")


def test_criterion_03_aggregate_matches_literal_double_sum():
    budget = 10.0
    rng = np.random.default_rng(303)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(4, 51))
        g = underlying_undirected(oracles.random_digraph(n, float(rng.uniform(0.1, 0.5)), rng))
        if g.m == 0:
            continue
        part = Partition.from_assignment(oracles.random_grouping(n, int(rng.integers(2, 5)), rng))
        worst = max(worst, abs(modularity(g, part)
                               - oracles.modularity_double_sum(g, part.assignment)))
        for i, q_i in enumerate(group_contributions(g, part)):
            worst = max(worst, abs(q_i - oracles.group_double_sum(g, part.assignment, i)))
    elapsed = time.perf_counter() - start

    assert worst <= 1e-12
    assert elapsed < budget
    _report(3, elapsed, budget, f"100 graphs, worst aggregate-vs-double-sum gap = {worst:.2e}")


def test_criterion_04_greedy_quality_against_exhaustive_optimum():
    budget = 60.0
    rng = np.random.default_rng(404)
    start = time.perf_counter()
    checks = 0
    worst_ratio = 0.0
    for _ in range(200):
        n = int(rng.integers(3, 13))
        g = oracles.random_digraph(n, float(rng.uniform(0.1, 0.5)), rng)
        delta = int(g.out_degrees.max()) if g.m else 0
        bound = oracles.harmonic(delta + 1)
        for rho in (0.5, 0.75, 1.0):
            result = greedy_pdds(g, rho, candidates=range(n))
            optimum = brute_force_pdds(g, rho, range(n))
            assert result.covered >= coverage_target(rho, n)
            assert len(result.selected) <= bound * optimum
            worst_ratio = max(worst_ratio, len(result.selected) / optimum)
            checks += 1
    elapsed = time.perf_counter() - start

    assert checks == 600
    assert elapsed < budget
    _report(4, elapsed, budget, f"600 greedy-vs-optimum checks, worst ratio {worst_ratio:.3f}")


def test_criterion_05_curves_monotone_and_solutions_nested():
    budget = 30.0
    rng = np.random.default_rng(505)
    start = time.perf_counter()
    for _ in range(100):
        n = int(rng.integers(5, 60))
        g = oracles.random_digraph(n, float(rng.uniform(0.03, 0.25)), rng)
        curve = coverage_curve(g, candidates=range(n), max_spreaders=n)
        fractions = [f for _, f in curve]
        assert all(b >= a for a, b in zip(fractions, fractions[1:]))
        half = greedy_pdds(g, 0.5, candidates=range(n))
        full = greedy_pdds(g, 1.0, candidates=range(n))
        assert full.selected[: len(half.selected)] == half.selected
    elapsed = time.perf_counter() - start

    assert elapsed < budget
    _report(5, elapsed, budget, "100 digraphs: curves monotone, rho=0.5 picks prefix rho=1.0")


def test_criterion_06_planted_structure_recovery():
    budget = 60.0
    start = time.perf_counter()
    agreements = []
    q_gaps = []
    for seed in range(10):
        g, truth = planted_partition([100, 100, 100], 0.3, 0.01, seed=seed)
        und = underlying_undirected(g)
        detected = relabel_by_size(detect_communities(und, seed=seed))
        agreements.append(_agreement(detected, truth))
        q_gaps.append(abs(modularity(und, detected) - modularity(und, truth)))
    elapsed = time.perf_counter() - start

    assert min(agreements) >= 0.95
    assert max(q_gaps) <= 0.05
    assert elapsed < budget
    _report(6, elapsed, budget,
            f"10 seeds: min agreement {min(agreements):.3f}, max q gap {max(q_gaps):.4f}")


def test_criterion_07_degree_preserving_null_centers_on_zero():
    budget = 30.0
    start = time.perf_counter()
    g, part = figure2_instance()
    sums = np.zeros(part.k)
    n_seeds = 100
    for seed in range(n_seeds):
        shuffled = configuration_rewire(g, 10 * g.m, seed=seed)
        sums += np.array(group_contributions(shuffled, part))
    means = sums / n_seeds
    elapsed = time.perf_counter() - start

    assert np.all(np.abs(means) < 0.05)
    assert elapsed < budget
    _report(7, elapsed, budget,
            f"null-model mean contributions {[round(float(v), 4) for v in means]}")


def _inversion_instance():
    """Fixed 400-vertex digraph where in-group and network reach disagree.

    Group A (0..99) is a dense two-step ring, so many members are needed to
    dominate it internally, yet vertex 0 alone reaches half the network.
    Group B (100..199) has two hubs that dominate B in two picks, but B's
    spreaders reach barely a quarter of the network.
    """
    arcs = []
    for i in range(100):
        arcs.append((i, (i + 1) % 100))
        arcs.append((i, (i + 2) % 100))
    arcs.extend((0, 200 + j) for j in range(170))
    arcs.extend((0, 101 + j) for j in range(29))
    arcs.extend((100, 101 + j) for j in range(49))
    arcs.extend((150, 151 + j) for j in range(49))
    g = directed_from_arcs(400, arcs)
    part = Partition.from_assignment(
        [0] * 100 + [1] * 100 + [2] * 200, {0: "A", 1: "B", 2: "C"}
    )
    return g, part


def test_criterion_08_in_group_and_network_reach_invert():
    budget = 60.0
    start = time.perf_counter()
    g, part = _inversion_instance()

    a_internal = in_group_domination(g, part, 0, 0.7)
    b_internal = in_group_domination(g, part, 1, 0.7)
    a_network = network_domination_by_group(g, part, 0, 0.5)
    with pytest.raises(InfeasibleCoverageError) as info:
        network_domination_by_group(g, part, 1, 0.5)
    b_max_fraction = info.value.max_coverable / info.value.n_target
    elapsed = time.perf_counter() - start

    # B dominates itself with strictly fewer spreaders than A needs
    assert len(b_internal.selected) < len(a_internal.selected)
    assert len(a_internal.selected) == 24
    assert len(b_internal.selected) == 2
    # yet A reaches half the network with one spreader while B cannot at all
    assert len(a_network.selected) == 1
    assert a_network.fraction >= 0.5
    assert b_max_fraction < 0.5
    assert b_max_fraction == pytest.approx(0.25)
    assert elapsed < budget
    _report(8, elapsed, budget,
            f"in-group picks A={len(a_internal.selected)} B={len(b_internal.selected)}; "
            f"network A fraction {a_network.fraction:.3f}, B max {b_max_fraction:.3f}")


def test_criterion_09_trend_recovery_from_noisy_series():
    budget = 1.0
    start = time.perf_counter()
    rng = np.random.default_rng(909)
    xs = np.arange(44, dtype=float)
    noise = rng.uniform(-0.001, 0.001, size=44)
    ys = 0.5 - 0.01 * xs + noise
    fit = linear_trend(list(zip(xs, ys)))
    elapsed = time.perf_counter() - start

    assert fit.slope == pytest.approx(-0.01, abs=1e-3)
    assert elapsed < budget
    _report(9, elapsed, budget, f"44 points, recovered slope {fit.slope:+.6f}")


def test_criterion_10_large_pipeline_within_budget(tmp_path):
    budget = 300.0
    start = time.perf_counter()

    g, truth = planted_partition([2000, 2000, 2000], 0.08, 0.004, seed=7)
    n_arcs = g.m
    assert n_arcs >= 1_000_000

    stamps = np.random.default_rng([7, 1]).integers(0, 10 * 86400, size=n_arcs)
    path = tmp_path / "big.csv"
    sources = g.arc_sources()
    with open(path, "w", encoding="utf-8") as fh:
        fh.writelines(
            f"v{s},v{t},{ts}\n"
            for s, t, ts in zip(sources.tolist(), g.indices.tolist(), stamps.tolist())
        )

    with open(path, "r", encoding="utf-8") as fh:
        edges = ingest_edge_list(fh, IngestOptions())
    assert edges.n_arcs == n_arcs

    digraph = build_directed_graph(edges)
    und = underlying_undirected(digraph)
    detected = relabel_by_size(detect_communities(und, seed=0))

    # edge labels sort lexicographically, so remap the planted assignment
    remap = np.array([int(lbl[1:]) for lbl in edges.labels])
    truth_on_labels = Partition.from_assignment(truth.assignment[remap])
    assert _agreement(detected, truth_on_labels) >= 0.95

    windows = slice_windows(edges, 86400)
    report = window_series(edges, detected, windows)
    assert len(report.windows) == 10
    assert all(w.q is not None for w in report.windows)

    curve = coverage_curve(digraph, max_spreaders=5)
    fractions = [f for _, f in curve]
    assert all(b >= a for a, b in zip(fractions, fractions[1:]))

    elapsed = time.perf_counter() - start
    assert elapsed < budget
    _report(10, elapsed, budget,
            f"{n_arcs} arcs end to end; detected k={detected.k}, "
            f"{len(report.windows)} windows")
