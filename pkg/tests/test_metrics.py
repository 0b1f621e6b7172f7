import random

import pytest
from hypothesis import given, strategies as st

from capweave import metrics
from capweave.errors import AncestorOverlapError, EmptySetError, InvalidCandidateError, NotInternalNodeError
from capweave.graph import RiskCategory, build_graph
from capweave.metrics import ScoreWeights
from capweave.samples import demo_graph, overlap_graph

from graphgen import random_fd_nodes_edges

ALL_ONES = {f"d{i}": 1.0 for i in range(1, 15)}


def graphs(max_internal=8):
    return st.builds(
        lambda seed: build_graph(*random_fd_nodes_edges(random.Random(seed), max_internal=max_internal)),
        st.integers(min_value=0, max_value=10_000),
    )


class TestRelevanceFromCategory:
    @pytest.mark.parametrize(
        "category,expected",
        [
            (RiskCategory.CATASTROPHIC, 1.0),
            (RiskCategory.CRITICAL, 0.7),
            (RiskCategory.MARGINAL, 0.4),
            (RiskCategory.NEGLIGIBLE, 0.1),
        ],
    )
    def test_defaults(self, category, expected):
        assert metrics.relevance_from_category(category) == expected


class TestCohesion:
    def test_uniform_weights(self):
        graph = demo_graph(relevance=ALL_ONES)
        assert metrics.cohesion(graph, "n7") == 1.0

    def test_mean_of_mixed_weights(self):
        graph = demo_graph(relevance={"d6": 1.0, "d7": 0.7, "d8": 0.4, "d9": 0.1})
        assert metrics.cohesion(graph, "n7") == pytest.approx(0.55)

    def test_equal_weights_on_branch(self):
        graph = demo_graph(relevance={d: 0.7 for d in ("d10", "d11", "d12", "d13", "d14")})
        assert metrics.cohesion(graph, "n3") == pytest.approx(0.7)

    def test_mission_and_directive_rejected(self):
        graph = demo_graph()
        with pytest.raises(NotInternalNodeError):
            metrics.cohesion(graph, "m")
        with pytest.raises(NotInternalNodeError):
            metrics.cohesion(graph, "d1")


class TestCoupling:
    def test_disjoint_sets(self):
        assert metrics.coupling(demo_graph(), "n1", "n7") == 0.0

    def test_shared_directive_jaccard(self):
        graph = overlap_graph()
        assert metrics.coupling(graph, "n7", "n3") == pytest.approx(1 / 9)

    def test_self_rejected(self):
        with pytest.raises(AncestorOverlapError):
            metrics.coupling(demo_graph(), "n1", "n1")

    def test_ancestor_rejected(self):
        with pytest.raises(AncestorOverlapError):
            metrics.coupling(demo_graph(), "n2", "n7")


class TestAbstractionImbalance:
    def test_equal_levels(self):
        assert metrics.abstraction_imbalance(demo_graph(), {"n1", "n3"}) == 0.0

    def test_spread_over_depth(self):
        assert metrics.abstraction_imbalance(demo_graph(), {"n1", "n7"}) == pytest.approx(1 / 3)

    def test_singleton(self):
        assert metrics.abstraction_imbalance(demo_graph(), {"n8"}) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(EmptySetError):
            metrics.abstraction_imbalance(demo_graph(), set())


class TestScoreSet:
    def test_balanced_candidate(self):
        graph = demo_graph(relevance=ALL_ONES)
        score = metrics.score_set(graph, {"n1", "n2", "n3"})
        assert score.cohesion == 1.0
        assert score.coupling == 0.0
        assert score.abstraction_imbalance == 0.0
        assert score.composite == pytest.approx(1.0)

    def test_uneven_candidate(self):
        graph = demo_graph(relevance=ALL_ONES)
        score = metrics.score_set(graph, {"n1", "n7", "n3"})
        assert score.cohesion == 1.0
        assert score.coupling == 0.0
        assert score.abstraction_imbalance == pytest.approx(1 / 3)
        assert score.composite == pytest.approx(1.0 - 0.5 * (1 / 3))

    def test_coupling_averaged_over_pairs(self):
        graph = overlap_graph(relevance=ALL_ONES)
        score = metrics.score_set(graph, {"n1", "n7", "n3"})
        assert score.coupling == pytest.approx(1 / 27)

    def test_invalid_candidate_rejected(self):
        with pytest.raises(InvalidCandidateError):
            metrics.score_set(demo_graph(), {"n1", "n7"})


class TestMetricLaws:
    @given(graphs())
    def test_bounds(self, graph):
        internal = graph.internal_node_ids
        for nid in internal:
            assert 0.0 <= metrics.cohesion(graph, nid) <= 1.0
        for i, a in enumerate(internal):
            for b in internal[i + 1:]:
                if graph.is_ancestor(a, b) or graph.is_ancestor(b, a):
                    continue
                value = metrics.coupling(graph, a, b)
                assert 0.0 <= value <= 1.0
        if internal:
            assert 0.0 <= metrics.abstraction_imbalance(graph, internal) <= 1.0

    @given(graphs())
    def test_coupling_symmetry_and_zero_iff_disjoint(self, graph):
        internal = graph.internal_node_ids
        for i, a in enumerate(internal):
            for b in internal[i + 1:]:
                if graph.is_ancestor(a, b) or graph.is_ancestor(b, a):
                    continue
                ab = metrics.coupling(graph, a, b)
                assert ab == metrics.coupling(graph, b, a)
                disjoint = not (graph.directive_set(a) & graph.directive_set(b))
                assert (ab == 0.0) == disjoint

    @given(st.integers(min_value=0, max_value=10_000), st.sampled_from([0.25, 0.5, 2.0, 4.0, 8.0]))
    def test_weight_scaling_preserves_ranking(self, seed, scale):
        # Dyadic values keep the float arithmetic exact, so the argsort
        # comparison is meaningful even through ties.
        rng = random.Random(seed)
        dyadic = [i / 8 for i in range(9)]
        weights = ScoreWeights(rng.choice(dyadic[1:]), rng.choice(dyadic), rng.choice(dyadic))
        scaled = ScoreWeights(weights.cohesion * scale, weights.coupling * scale, weights.abstraction * scale)
        triples = [(rng.choice(dyadic), rng.choice(dyadic), rng.choice(dyadic)) for _ in range(20)]

        def argsort(ws):
            scores = [metrics.composite_score(c, x, i, ws) for c, x, i in triples]
            return sorted(range(len(scores)), key=lambda k: (-scores[k], k))

        assert argsort(scaled) == argsort(weights)

    def test_raising_relevance_never_decreases_cohesion(self):
        rng = random.Random(7)
        for _ in range(50):
            rel = {f"d{i}": rng.choice([0.1, 0.4, 0.7]) for i in range(1, 15)}
            graph = demo_graph(relevance=rel)
            before = metrics.cohesion(graph, "n7")
            target = rng.choice(["d6", "d7", "d8", "d9"])
            bumped = dict(rel)
            bumped[target] = min(1.0, rel[target] + 0.3)
            after = metrics.cohesion(demo_graph(relevance=bumped), "n7")
            assert after >= before - 1e-12
