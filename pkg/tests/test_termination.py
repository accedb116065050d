import math

import numpy as np
import pytest

from dbmc import (
    CycleError,
    DisturbanceSpec,
    MissingParentError,
    VERDICT_CORRECT,
    VERDICT_INCORRECT,
    VERDICT_SOURCE,
    build_model,
    build_report,
    check_identification,
    current_parents,
    load_graph,
    reconstruct_path,
    solve_shortest_paths,
    standin13,
)

from helpers import random_weighted_graph

LINE3 = "nodes 3\nsources 1\n3 2 1.0\n2 1 1.0\n"


def zero_model(g):
    return build_model(DisturbanceSpec(kind="zero"), g, 0, 5.0)


class TestCurrentParents:
    def test_at_solution_without_disturbance_equals_true_parents(self):
        for seed in range(10):
            g = random_weighted_graph(seed)
            sol = solve_shortest_paths(g)
            got = current_parents(g, zero_model(g), np.array(sol.p), 1.0)
            for i in g.non_sources:
                assert got[i] == sol.parents(i)

    def test_tie_window(self):
        g = load_graph("nodes 3\nsources 1 2\n3 1 3.0\n3 2 3.0000005\n")
        x = np.zeros(3)
        strict = current_parents(g, zero_model(g), x, 0.0, tie_tol=0.0)
        wide = current_parents(g, zero_model(g), x, 0.0, tie_tol=1e-6)
        assert strict[3] == frozenset({1})
        assert wide[3] == frozenset({1, 2})

    def test_matches_defining_minimum_with_disturbance(self):
        rng = np.random.default_rng(4)
        for seed in range(8):
            g = random_weighted_graph(seed)
            m = build_model(
                DisturbanceSpec(kind="piecewise", amplitude=0.3), g, seed, 5.0
            )
            x = rng.uniform(0.0, 12.0, g.node_count)
            t = float(rng.uniform(0.0, 5.0))
            got = current_parents(g, m, x, t, tie_tol=0.0)
            for i in g.non_sources:
                values = {
                    j: x[j - 1] + w + m.sample((i, j), t)
                    for j, w in g.out_adjacency[i - 1]
                }
                best = min(values.values())
                assert got[i] == frozenset(
                    j for j, v in values.items() if v <= best
                )

    def test_covers_exactly_non_sources(self):
        g = standin13()
        sol = solve_shortest_paths(g)
        got = current_parents(g, zero_model(g), np.array(sol.p), 0.5)
        assert set(got) == set(g.non_sources)


class TestReconstructPath:
    def test_source_is_singleton(self):
        g = load_graph(LINE3)
        assert reconstruct_path(g, 1, {}) == [1]

    def test_line_traces_to_source(self):
        g = load_graph(LINE3)
        parents = {3: frozenset({2}), 2: frozenset({1})}
        assert reconstruct_path(g, 3, parents) == [3, 2, 1]

    def test_smallest_id_member_is_chosen(self):
        g = load_graph("nodes 3\nsources 1\n3 2 1.0\n2 1 1.0\n3 1 2.0\n")
        parents = {3: frozenset({1, 2}), 2: frozenset({1})}
        assert reconstruct_path(g, 3, parents) == [3, 1]

    def test_cycle_detected(self):
        g = load_graph("nodes 3\nsources 1\n3 2 1.0\n2 3 1.0\n2 1 1.0\n")
        parents = {3: frozenset({2}), 2: frozenset({3})}
        with pytest.raises(CycleError):
            reconstruct_path(g, 3, parents)

    def test_missing_parent_detected(self):
        g = load_graph(LINE3)
        with pytest.raises(MissingParentError):
            reconstruct_path(g, 3, {3: frozenset()})

    def test_path_length_under_true_parents_equals_distance(self):
        for seed in range(10):
            g = random_weighted_graph(seed)
            sol = solve_shortest_paths(g)
            truth = {i: sol.parents(i) for i in g.non_sources}
            for i in g.non_sources:
                path = reconstruct_path(g, i, truth)
                total = sum(
                    g.weight(path[k], path[k + 1]) for k in range(len(path) - 1)
                )
                assert total == pytest.approx(sol.p[i - 1], abs=1e-12)


class TestCheckIdentification:
    def test_exact_match_is_correct(self):
        truth = {2: frozenset({1}), 3: frozenset({2})}
        verdicts, overall = check_identification(truth, truth)
        assert overall and all(v == VERDICT_CORRECT for v in verdicts.values())

    def test_strict_subset_is_correct(self):
        truth = {3: frozenset({1, 2})}
        verdicts, overall = check_identification({3: frozenset({1})}, truth)
        assert overall and verdicts[3] == VERDICT_CORRECT

    def test_foreign_member_fails_that_node(self):
        truth = {2: frozenset({1}), 3: frozenset({2})}
        current = {2: frozenset({1}), 3: frozenset({1})}
        verdicts, overall = check_identification(current, truth)
        assert not overall
        assert verdicts[2] == VERDICT_CORRECT
        assert verdicts[3] == VERDICT_INCORRECT

    def test_empty_set_is_incorrect(self):
        verdicts, overall = check_identification(
            {2: frozenset()}, {2: frozenset({1})}
        )
        assert not overall and verdicts[2] == VERDICT_INCORRECT


class TestSmallErrorGuarantee:
    def test_identification_holds_below_threshold(self):
        # whenever max |e| < (gap - u- - u+)/2, strict verdicts are all correct
        rng = np.random.default_rng(21)
        checked = 0
        for seed in range(40):
            g = random_weighted_graph(seed)
            sol = solve_shortest_paths(g)
            if not math.isfinite(sol.path_gap):
                continue
            m = build_model(
                DisturbanceSpec(kind="sinusoid", amplitude=0.05), g, seed, 5.0
            )
            threshold = (sol.path_gap - m.u_minus - m.u_plus) / 2.0
            if threshold <= 0:
                continue
            e = rng.uniform(-0.95 * threshold, 0.95 * threshold, g.node_count)
            for s in g.sources:
                e[s - 1] = 0.0
            x = np.array(sol.p) + e
            t = float(rng.uniform(0.0, 5.0))
            current = current_parents(g, m, x, t, tie_tol=0.0)
            truth = {i: sol.parents(i) for i in g.non_sources}
            _, overall = check_identification(current, truth)
            assert overall
            checked += 1
        assert checked >= 10


class TestBuildReport:
    def test_report_at_solution(self):
        g = standin13()
        sol = solve_shortest_paths(g)
        report = build_report(g, sol, zero_model(g), np.array(sol.p), 3.0)
        assert report.overall
        assert report.t_s == 3.0
        assert report.verdicts[1] == VERDICT_SOURCE
        assert report.paths[1] == (1,)
        assert report.paths[13] == tuple(range(13, 0, -1))
        doc = report.to_dict()
        assert doc["overall"] is True
        assert doc["nodes"]["8"]["current_parents"] == [7]
        assert doc["nodes"]["8"]["path"] == [8, 7, 6, 5, 4, 3, 2, 1]

    def test_report_flags_misidentification(self):
        g = load_graph("nodes 3\nsources 1\n3 2 1.0\n2 1 1.0\n3 1 3.0\n")
        sol = solve_shortest_paths(g)
        x = np.array([0.0, 12.0, 12.0])  # untouched initial states: 3 prefers 3->1
        report = build_report(g, sol, zero_model(g), x, 0.1)
        assert not report.overall
        assert report.verdicts[3] == VERDICT_INCORRECT
        assert report.verdicts[2] == VERDICT_CORRECT
