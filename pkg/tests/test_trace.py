import pytest

from capweave import trace
from capweave.errors import NoSourceNeedError, UnknownEntityError
from capweave.graph import SpaceTag
from capweave.samples import demo_project, demo_project_selected
from capweave.store import apply_mutation
from capweave.transformation import transform_capability

from oracles import forward_rows


@pytest.fixture
def transformed():
    """Demo project with the top candidate chosen and every directive transformed."""
    project = demo_project_selected()
    for member in project.selection.chosen.members:
        drafts = {
            d: [f"requirement for {d}"]
            for d in project.selection.chosen.assignment[member]
        }
        project, _ = transform_capability(project, member, drafts)
    return project


@pytest.fixture
def overlap_transformed():
    project = demo_project_selected(overlap=True, members={"n1", "n7", "n3"})
    for member in project.selection.chosen.members:
        drafts = {
            d: [f"requirement for {d}"]
            for d in project.selection.chosen.assignment[member]
        }
        project, _ = transform_capability(project, member, drafts)
    return project


class TestTraceForward:
    def test_unknown_need(self, transformed):
        with pytest.raises(UnknownEntityError):
            trace.trace_forward(transformed, "ghost")

    def test_unreferenced_need_gives_empty_set(self):
        project = apply_mutation(
            demo_project(), {"kind": "addNeed", "id": "nd9", "text": "unused wish"}
        )
        assert trace.trace_forward(project, "nd9") == []

    def test_paths_reach_requirements(self, transformed):
        paths = trace.trace_forward(transformed, "nd2")
        finals = {p.last.id for p in paths if p.last.kind == "requirement"}
        assert finals == {"d6-r1", "d7-r1", "d8-r1", "d9-r1"}

    def test_spaces_monotone_along_forward_paths(self, transformed):
        order = {SpaceTag.PROBLEM: 0, SpaceTag.TRANSITION: 1, SpaceTag.SOLUTION: 2}
        for need in transformed.needs:
            for path in trace.trace_forward(transformed, need.id):
                ranks = [order[s.space] for s in path.steps]
                assert ranks == sorted(ranks)

    def test_branch_scoped_need_reaches_its_branch_only(self, transformed):
        # nd3 attaches to the inventory branch only, so its paths end in the
        # requirements of d10..d14 and nothing else.
        paths = trace.trace_forward(transformed, "nd3")
        finals = {p.last.id for p in paths}
        assert finals == {"d10-r1", "d11-r1", "d12-r1", "d13-r1", "d14-r1"}


class TestCourseFixtureTrace:
    def test_need_reaches_forum_requirement(self):
        from capweave.samples import course_project

        project = course_project()
        paths = trace.trace_forward(project, "need-discuss")
        full = [p for p in paths if p.last.kind == "requirement"]
        assert {p.last.id for p in full} == {"forum-announce-r1"}
        for path in full:
            kinds = {s.entity.kind: s.entity.id for s in path.steps}
            assert kinds["capability"] == "forum"
            assert project.graph.node("forum").label == "Discussion Forum"


class TestTraceBackward:
    def test_full_chain(self, transformed):
        path = trace.trace_backward(transformed, "d14-r1")
        ids = path.entity_ids()
        assert ids[0] == "d14-r1"
        assert "d14" in ids
        node_steps = [s.entity.id for s in path.steps if s.entity.kind == "node"]
        assert node_steps == ["n9", "n3", "m"]
        assert ids[-1] == "nd3"

    def test_unknown_requirement(self, transformed):
        with pytest.raises(UnknownEntityError):
            trace.trace_backward(transformed, "ghost")

    def test_orphan_surfaces_as_no_source_need(self, transformed):
        mutated = apply_mutation(transformed, {"kind": "removeNode", "id": "d6"})
        with pytest.raises(NoSourceNeedError):
            trace.trace_backward(mutated, "d6-r1")


class TestRoundTrip:
    def test_forward_backward_round_trip(self, transformed):
        for requirement in transformed.requirements:
            back = trace.trace_backward(transformed, requirement.id)
            needs = [s.entity.id for s in back.steps if s.entity.kind == "need"]
            assert needs
            for need_id in needs:
                forward = trace.trace_forward(transformed, need_id)
                finals = {p.last.id for p in forward}
                assert requirement.id in finals


class TestNeedNeighborhood:
    def test_same_branch_needs_are_neighbors(self):
        project = demo_project()
        neighborhood = trace.need_neighborhood(project, "nd2")
        assert "nd2" not in neighborhood
        # nd1/nd3 share only the mission node's subtree boundaries with nd2;
        # in this sample the branches are disjoint, so no neighbors.
        assert neighborhood == {}

    def test_shared_subtree_makes_neighbors(self):
        # A coordination node that shares directives from two branches links
        # the branch needs into one neighborhood.
        mutated = apply_mutation(
            demo_project(),
            {
                "kind": "addNode",
                "node": {
                    "id": "n4",
                    "kind": "functional",
                    "label": "Coordinate everything",
                    "needRefs": ["nd1"],
                },
                "edges": [
                    {"source": "m", "target": "n4", "kind": "decomposition"},
                    {"source": "n4", "target": "d1", "kind": "intersection"},
                    {"source": "n4", "target": "d13", "kind": "intersection"},
                ],
            },
        )
        neighborhood = trace.need_neighborhood(mutated, "nd1")
        assert set(neighborhood) == {"nd3"}
        assert neighborhood["nd3"] == ("d13",)

    def test_need_on_mission_neighbors_everything(self):
        from capweave.graph import Need, build_graph, mission
        from capweave.samples import demo_edges, demo_needs, demo_nodes
        from capweave.project import Project, ProjectMeta

        nodes = [
            mission("m", "Run the field-service operation", {"nd0"})
            if n.id == "m" else n
            for n in demo_nodes()
        ]
        project = Project(
            meta=ProjectMeta(name="rooted need"),
            graph=build_graph(nodes, demo_edges()),
            needs=tuple(demo_needs()) + (Need("nd0", "overall mission expectation"),),
        )
        neighborhood = trace.need_neighborhood(project, "nd0")
        assert set(neighborhood) == {"nd1", "nd2", "nd3"}

    def test_unknown_need(self):
        with pytest.raises(UnknownEntityError):
            trace.need_neighborhood(demo_project(), "ghost")


class TestNodeImpact:
    def test_down_covers_decomposition_children(self, transformed):
        report = trace.impact_of_node_change(transformed, "n3", "down")
        assert {"n8", "n9"} <= set(report.affected_nodes)
        assert set(report.affected_directives) == {"d10", "d11", "d12", "d13", "d14"}
        assert report.rationale["n8"].link == "decomposition"
        assert report.rationale["n8"].severity == "affected"

    def test_directive_trigger_affects_only_its_requirements(self, transformed):
        report = trace.impact_of_node_change(transformed, "d1", "down")
        assert report.affected_nodes == ()
        assert set(report.affected_directives) == {"d1"}
        assert report.affected_requirements == ("d1-r1",)

    def test_up_is_review_only(self, transformed):
        report = trace.impact_of_node_change(transformed, "n8", "up")
        assert set(report.affected_nodes) == {"n3", "m"}
        assert all(report.rationale[nid].severity == "review" for nid in ("n3", "m"))
        assert report.affected_directives == {}

    def test_shared_directive_flags_other_capability(self, overlap_transformed):
        report = trace.impact_of_node_change(overlap_transformed, "n7", "down")
        assert "d9" in report.affected_directives
        assert "n3" in report.affected_capabilities
        assert "n7" in report.affected_capabilities

    def test_unknown_node(self, transformed):
        with pytest.raises(UnknownEntityError):
            trace.impact_of_node_change(transformed, "ghost")


class TestDirectiveImpact:
    def test_weight_is_relevance(self, transformed):
        report = trace.impact_of_directive_change(transformed, "d7")
        assert report.affected_capabilities == {"n2": 0.7}
        assert report.affected_requirements == ("d7-r1",)
        assert report.affected_directives == {"d7": 0.7}

    def test_weight_follows_owner_under_uneven_selection(self):
        project = demo_project_selected(members={"n1", "n7", "n3"})
        report = trace.impact_of_directive_change(project, "d7")
        assert report.affected_capabilities == {"n7": 0.7}

    def test_shared_directive_lists_both_owners(self, overlap_transformed):
        report = trace.impact_of_directive_change(overlap_transformed, "d9")
        assert set(report.affected_capabilities) == {"n7", "n3"}

    def test_untransformed_directive_has_capability_impact_only(self):
        project = demo_project_selected()
        report = trace.impact_of_directive_change(project, "d1")
        assert report.affected_requirements == ()
        assert set(report.affected_capabilities) == {"n1"}

    def test_non_directive_rejected(self, transformed):
        with pytest.raises(UnknownEntityError):
            trace.impact_of_directive_change(transformed, "n3")


class TestCapabilityImpact:
    def test_no_coupling_on_tree(self, transformed):
        report = trace.impact_of_capability_change(transformed, "n2")
        assert set(report.affected_requirements) == {"d6-r1", "d7-r1", "d8-r1", "d9-r1"}
        assert report.affected_capabilities == {}

    def test_coupled_capability_listed_with_value(self, overlap_transformed):
        report = trace.impact_of_capability_change(overlap_transformed, "n7")
        assert report.affected_capabilities == {"n3": pytest.approx(1 / 9)}

    def test_capability_without_requirements(self):
        project = demo_project_selected()
        report = trace.impact_of_capability_change(project, "n1")
        assert report.affected_requirements == ()

    def test_unchosen_capability_rejected(self, transformed):
        with pytest.raises(UnknownEntityError):
            trace.impact_of_capability_change(transformed, "n7")


class TestRequirementImpact:
    def test_siblings_are_strong(self, transformed):
        from capweave.transformation import transform_directive

        project, _ = transform_directive(transformed, "d6", "n2", ["another"])
        report = trace.impact_of_requirement_change(project, "d6-r1")
        assert report.rationale["d6-r2"].severity == "strong"

    def test_capability_peers_are_moderate(self, transformed):
        report = trace.impact_of_requirement_change(transformed, "d6-r1")
        assert report.rationale["d8-r1"].severity == "moderate"

    def test_disjoint_capabilities_absent(self, transformed):
        report = trace.impact_of_requirement_change(transformed, "d1-r1")
        assert "d13-r1" not in report.entity_ids()
        reverse = trace.impact_of_requirement_change(transformed, "d13-r1")
        assert "d1-r1" not in reverse.entity_ids()


class TestCriticalTraces:
    def test_zero_threshold_keeps_all_links(self, transformed):
        assert trace.critical_traces(transformed, 0.0) == trace.all_trace_links(transformed)

    def test_full_threshold_keeps_only_top_band(self, transformed):
        links = trace.critical_traces(transformed, 1.0)
        graph = transformed.graph
        for link in links:
            if link.kind in (trace.LinkKind.CAPABILITY_MEMBERSHIP, trace.LinkKind.TRANSFORMATION):
                assert graph.node(link.source).directive.relevance == 1.0

    def test_antitone_in_threshold(self, transformed):
        previous = None
        for threshold in (0.0, 0.3, 0.6, 0.85, 1.0):
            links = set(
                (l.kind, l.source, l.target) for l in trace.critical_traces(transformed, threshold)
            )
            if previous is not None:
                assert links <= previous
            previous = links


class TestTraceMatrix:
    def test_empty_project_has_no_rows(self):
        assert trace.trace_matrix(demo_project()) == []

    def test_rows_match_independent_oracle(self, transformed):
        rows = trace.trace_matrix(transformed)
        assert len(rows) >= 14
        got = {(r[0], r[1], r[2], r[3], r[4]) for r in rows}
        assert got == forward_rows(transformed)
        assert rows == sorted(rows)

    def test_overlap_rows_match_oracle(self, overlap_transformed):
        rows = trace.trace_matrix(overlap_transformed)
        got = {(r[0], r[1], r[2], r[3], r[4]) for r in rows}
        assert got == forward_rows(overlap_transformed)


class TestImpactReachability:
    def test_all_reported_entities_reachable_from_trigger(self, overlap_transformed):
        project = overlap_transformed
        for trigger in ("n3", "n7", "d9", "d1"):
            if project.entity_kind(trigger) == "directive":
                report = trace.impact_of_directive_change(project, trigger)
            else:
                report = trace.impact_of_node_change(project, trigger, "both")
            assert _reachable_via_links(project, trigger) >= report.entity_ids()


def _reachable_via_links(project, trigger):
    """Independent BFS over the recorded-link graph, both directions."""
    links = trace.all_trace_links(project)
    adjacency: dict[str, set[str]] = {}
    for link in links:
        adjacency.setdefault(link.source, set()).add(link.target)
        adjacency.setdefault(link.target, set()).add(link.source)
    seen = {trigger}
    stack = [trigger]
    while stack:
        current = stack.pop()
        for neighbor in adjacency.get(current, ()):
            if neighbor not in seen:
                seen.add(neighbor)
                stack.append(neighbor)
    return seen
