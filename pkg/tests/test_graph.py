import random

import pytest
from hypothesis import given, strategies as st

from capweave import graph as g
from capweave.errors import UnknownEntityError, ValidationError
from capweave.samples import demo_edges, demo_graph, demo_nodes, overlap_graph

from graphgen import random_fd_nodes_edges
from oracles import (
    closure_down,
    closure_up,
    edge_triples,
    node_kinds,
    oracle_directive_set,
    oracle_levels,
)


def graphs(max_internal=8):
    return st.builds(
        lambda seed: random_fd_nodes_edges(random.Random(seed), max_internal=max_internal),
        st.integers(min_value=0, max_value=10_000),
    )


class TestBuildGraph:
    def test_demo_graph_is_valid(self):
        graph = demo_graph()
        assert len(graph.directive_ids) == 14
        assert graph.depth == 3
        assert graph.mission_id == "m"

    def test_mission_without_children_is_internal_leaf(self):
        with pytest.raises(ValidationError) as exc:
            g.build_graph([g.mission("m", "alone")], [])
        assert exc.value.has(g.INTERNAL_LEAF)

    def test_back_edge_is_a_cycle(self):
        edges = demo_edges() + [g.Edge("n9", "n3", g.EdgeKind.DECOMPOSITION)]
        with pytest.raises(ValidationError) as exc:
            g.build_graph(demo_nodes(), edges)
        assert exc.value.has(g.CYCLE_DETECTED)

    def test_duplicate_ids_rejected(self):
        nodes = demo_nodes() + [g.functional("n1", "again", {"nd1"})]
        with pytest.raises(ValidationError) as exc:
            g.build_graph(nodes, demo_edges())
        assert exc.value.has(g.DUPLICATE_NODE_ID)

    def test_edge_to_unknown_node_rejected(self):
        edges = demo_edges() + [g.Edge("n1", "ghost", g.EdgeKind.DECOMPOSITION)]
        with pytest.raises(ValidationError) as exc:
            g.build_graph(demo_nodes(), edges)
        assert exc.value.has(g.UNKNOWN_ENDPOINT)


class TestValidateGraph:
    def test_demo_graph_has_empty_report(self):
        assert g.validate_graph(demo_nodes(), demo_edges()) == []

    def test_directive_with_child(self):
        edges = demo_edges() + [g.Edge("d1", "d2", g.EdgeKind.DECOMPOSITION)]
        report = g.validate_graph(demo_nodes(), edges)
        codes = [v.code for v in report]
        assert codes == [g.DIRECTIVE_WITH_CHILDREN]
        assert "d1" in report[0].entities

    def test_second_parentless_node_is_one_violation(self):
        nodes = demo_nodes() + [g.functional("x1", "floating", {"nd1"})]
        edges = demo_edges() + [
            g.Edge("x1", "n1", g.EdgeKind.DECOMPOSITION),
            g.Edge("x1", "n3", g.EdgeKind.DECOMPOSITION),
        ]
        report = g.validate_graph(nodes, edges)
        assert [v.code for v in report] == [g.MULTIPLE_ROOTS]
        assert report[0].entities == ("x1",)

    def test_single_child_decomposition_flagged(self):
        nodes = [
            g.mission("m", "root"),
            g.functional("a", "only child", {"nd1"}),
            g.directive("da", "leaf", {"nd1"}),
            g.directive("db", "leaf", {"nd1"}),
        ]
        edges = [
            g.Edge("m", "a", g.EdgeKind.DECOMPOSITION),
            g.Edge("m", "db", g.EdgeKind.DECOMPOSITION),
            g.Edge("a", "da", g.EdgeKind.DECOMPOSITION),
        ]
        report = g.validate_graph(nodes, edges)
        assert [v.code for v in report] == [g.DECOMPOSITION_UNDERFLOW]

    def test_refinement_fanout_flagged(self):
        nodes = demo_nodes()
        edges = [
            e if not (e.source == "n2") else g.Edge("n2", "n7", g.EdgeKind.REFINEMENT)
            for e in demo_edges()
        ] + [g.Edge("n2", "d1", g.EdgeKind.REFINEMENT)]
        report = g.validate_graph(nodes, edges)
        assert any(v.code == g.REFINEMENT_FANOUT for v in report)

    def test_intersection_needs_second_parent(self):
        nodes = [
            g.mission("m", "root"),
            g.functional("a", "left", {"nd1"}),
            g.directive("da", "leaf", {"nd1"}),
            g.directive("db", "leaf", {"nd1"}),
        ]
        edges = [
            g.Edge("m", "a", g.EdgeKind.DECOMPOSITION),
            g.Edge("m", "db", g.EdgeKind.DECOMPOSITION),
            g.Edge("a", "da", g.EdgeKind.INTERSECTION),
            g.Edge("a", "db", g.EdgeKind.DECOMPOSITION),
        ]
        report = g.validate_graph(nodes, edges)
        assert any(v.code == g.INTERSECTION_SINGLE_PARENT for v in report)

    def test_missing_need_refs_reported(self):
        nodes = [n if n.id != "n1" else g.functional("n1", "Manage customer accounts") for n in demo_nodes()]
        report = g.validate_graph(nodes, demo_edges())
        assert [v.code for v in report] == [g.MISSING_NEED_REFS]


class TestDirectivePayload:
    def test_category_default_relevance(self):
        d = g.Directive(risk_category=g.RiskCategory.MARGINAL)
        assert d.relevance == 0.4

    def test_relevance_derives_category(self):
        assert g.Directive(relevance=0.95).risk_category is g.RiskCategory.CATASTROPHIC
        assert g.Directive(relevance=0.6).risk_category is g.RiskCategory.CRITICAL
        assert g.Directive(relevance=0.0).risk_category is g.RiskCategory.NEGLIGIBLE

    def test_band_mismatch_rejected(self):
        with pytest.raises(ValueError):
            g.Directive(relevance=0.2, risk_category=g.RiskCategory.CATASTROPHIC)

    def test_bounds(self):
        with pytest.raises(ValueError):
            g.Directive(relevance=1.2)
        with pytest.raises(ValueError):
            g.Directive(relevance=0.5, effort=-1)
        with pytest.raises(ValueError):
            g.Directive(relevance=0.5, tech_readiness=0)


class TestQueries:
    def test_directive_sets_of_branches(self):
        graph = demo_graph()
        assert graph.directive_set("n1") == frozenset({"d1", "d2", "d3", "d4", "d5"})
        assert graph.directive_set("n7") == frozenset({"d6", "d7", "d8", "d9"})
        assert graph.directive_set("d14") == frozenset({"d14"})

    def test_levels(self):
        graph = demo_graph()
        assert graph.level("m") == 0
        assert graph.level("n3") == 1
        assert graph.level("n7") == 2
        assert graph.level("d10") == 3

    def test_descendants_by_kind(self):
        graph = demo_graph()
        assert graph.descendants("n3", {g.EdgeKind.DECOMPOSITION}) == frozenset(
            {"n8", "n9", "d10", "d11", "d12", "d13", "d14"}
        )
        assert graph.descendants("d1") == frozenset()
        assert graph.descendants("n2", {g.EdgeKind.REFINEMENT}) == frozenset({"n7"})

    def test_ancestors(self):
        graph = demo_graph()
        assert graph.ancestors("d7") == frozenset({"n7", "n2", "m"})
        assert graph.ancestors("m") == frozenset()

    def test_ancestors_through_intersection(self):
        graph = overlap_graph()
        assert graph.ancestors("d9") == frozenset({"n7", "n2", "n8", "n3", "m"})

    def test_shared_directive_in_both_sets(self):
        graph = overlap_graph()
        assert "d9" in graph.directive_set("n8")
        assert graph.directive_set("n3") == frozenset({"d9", "d10", "d11", "d12", "d13", "d14"})

    def test_unknown_node(self):
        graph = demo_graph()
        with pytest.raises(UnknownEntityError):
            graph.directive_set("nope")
        with pytest.raises(UnknownEntityError):
            graph.level("nope")
        with pytest.raises(UnknownEntityError):
            graph.descendants("nope")

    def test_empty_kind_set_rejected(self):
        graph = demo_graph()
        with pytest.raises(ValueError):
            graph.descendants("n1", frozenset())


class TestGraphProperties:
    @given(graphs())
    def test_generated_graphs_validate(self, nodes_edges):
        nodes, edges = nodes_edges
        graph = g.build_graph(nodes, edges)
        assert g.validate_graph(graph.nodes, graph.edges) == []

    @given(graphs())
    def test_union_semantics(self, nodes_edges):
        nodes, edges = nodes_edges
        graph = g.build_graph(nodes, edges)
        kinds = node_kinds(graph)
        triples = edge_triples(graph)
        for node in graph.nodes:
            if node.kind is g.NodeKind.DIRECTIVE:
                continue
            union = set()
            for child in graph.children(node.id):
                union |= oracle_directive_set(kinds, triples, child)
            assert graph.directive_set(node.id) == union

    @given(graphs())
    def test_leaf_directive_bijection(self, nodes_edges):
        nodes, edges = nodes_edges
        graph = g.build_graph(nodes, edges)
        for node in graph.nodes:
            is_leaf = not graph.out_edges(node.id)
            assert is_leaf == (node.kind is g.NodeKind.DIRECTIVE)

    @given(graphs())
    def test_levels_match_oracle_and_are_monotone(self, nodes_edges):
        nodes, edges = nodes_edges
        graph = g.build_graph(nodes, edges)
        levels = oracle_levels(node_kinds(graph), edge_triples(graph), "m")
        for node in graph.nodes:
            assert graph.level(node.id) == levels[node.id]
        for edge in graph.edges:
            assert graph.level(edge.target) <= graph.level(edge.source) + 1
            assert graph.level(edge.target) >= 1

    @given(graphs(max_internal=5))
    def test_descendant_ancestor_duality_exhaustive(self, nodes_edges):
        nodes, edges = nodes_edges
        graph = g.build_graph(nodes, edges)
        triples = edge_triples(graph)
        for a in graph.node_ids:
            down = graph.descendants(a)
            assert down == closure_down(triples, a)
            assert graph.ancestors(a) == closure_up(triples, a)
            for b in graph.node_ids:
                assert (b in down) == (a in graph.ancestors(b))
