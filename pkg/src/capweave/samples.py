"""Built-in sample projects used by the docs, the scripts and the test suite.

The main sample models a small field-service dispatch system: a mission node
``m``, functional nodes ``n1``/``n2``/``n3`` (with ``n7``, ``n8``, ``n9``
below them) and fourteen directive leaves ``d1``..``d14``. A second variant
adds an intersection edge so that one directive is shared between two
branches. A third, smaller sample covers a course-management system and
carries one fully transformed requirement.
"""

from __future__ import annotations

from dataclasses import replace

from .formulation import enumerate_candidates, rank_candidates
from .graph import Edge, EdgeKind, FDGraph, FDNode, Need, build_graph, directive, functional, mission
from .optimization import Constraints, optimize
from .project import Project, ProjectMeta
from .transformation import Requirement

_DEMO_RELEVANCE = {
    "d1": 1.0, "d2": 0.7, "d3": 0.4, "d4": 0.1, "d5": 0.85,
    "d6": 1.0, "d7": 0.7, "d8": 0.4, "d9": 0.6,
    "d10": 1.0, "d11": 0.7, "d12": 0.3, "d13": 0.1, "d14": 1.0,
}

_DEMO_DIRECTIVE_LABELS = {
    "d1": "Register new customer accounts",
    "d2": "Merge duplicate customer records",
    "d3": "Archive dormant accounts",
    "d4": "Export account summaries",
    "d5": "Flag accounts with overdue balances",
    "d6": "Assign visits to technicians by skill",
    "d7": "Re-plan routes when a visit overruns",
    "d8": "Notify customers of arrival windows",
    "d9": "Record travel time per route leg",
    "d10": "Log received parts against purchase orders",
    "d11": "Bin parts by storage location",
    "d12": "Cycle-count high-value bins",
    "d13": "Reserve parts when a visit is booked",
    "d14": "Deduct issued parts from stock",
}


def demo_needs() -> list[Need]:
    return [
        Need("nd1", "Keep customer records accurate and complete"),
        Need("nd2", "Plan daily technician routes efficiently"),
        Need("nd3", "Never run out of critical spare parts"),
    ]


_NEED_OF_NODE = {
    "n1": "nd1", "d1": "nd1", "d2": "nd1", "d3": "nd1", "d4": "nd1", "d5": "nd1",
    "n2": "nd2", "n7": "nd2", "d6": "nd2", "d7": "nd2", "d8": "nd2", "d9": "nd2",
    "n3": "nd3", "n8": "nd3", "n9": "nd3",
    "d10": "nd3", "d11": "nd3", "d12": "nd3", "d13": "nd3", "d14": "nd3",
}


def demo_nodes(
    relevance: dict[str, float] | None = None,
    effort: float | dict[str, float] = 10.0,
    tech_readiness: int | dict[str, int] = 9,
) -> list[FDNode]:
    """Nodes of the dispatch sample.

    ``relevance``, ``effort`` and ``tech_readiness`` override per-directive
    attributes; the latter two also accept a single value applied everywhere.
    """
    weights = dict(_DEMO_RELEVANCE)
    if relevance is not None:
        weights.update(relevance)

    def per_directive(value, did, default):
        if isinstance(value, dict):
            return value.get(did, default)
        return value

    nodes = [
        mission("m", "Run the field-service operation"),
        functional("n1", "Manage customer accounts", {"nd1"}),
        functional("n2", "Schedule service visits", {"nd2"}),
        functional("n3", "Track spare-part inventory", {"nd3"}),
        functional("n7", "Plan technician routes", {"nd2"}),
        functional("n8", "Receive and stock parts", {"nd3"}),
        functional("n9", "Issue parts to jobs", {"nd3"}),
    ]
    for did, label in _DEMO_DIRECTIVE_LABELS.items():
        nodes.append(
            directive(
                did,
                label,
                {_NEED_OF_NODE[did]},
                relevance=weights[did],
                effort=per_directive(effort, did, 10.0),
                tech_readiness=per_directive(tech_readiness, did, 9),
            )
        )
    return nodes


def demo_edges() -> list[Edge]:
    d, r = EdgeKind.DECOMPOSITION, EdgeKind.REFINEMENT
    edges = [
        Edge("m", "n1", d), Edge("m", "n2", d), Edge("m", "n3", d),
        Edge("n1", "d1", d), Edge("n1", "d2", d), Edge("n1", "d3", d),
        Edge("n1", "d4", d), Edge("n1", "d5", d),
        Edge("n2", "n7", r),
        Edge("n7", "d6", d), Edge("n7", "d7", d), Edge("n7", "d8", d), Edge("n7", "d9", d),
        Edge("n3", "n8", d), Edge("n3", "n9", d),
        Edge("n8", "d10", d), Edge("n8", "d11", d), Edge("n8", "d12", d),
        Edge("n9", "d13", d), Edge("n9", "d14", d),
    ]
    return edges


def demo_graph(**node_kwargs) -> FDGraph:
    """The dispatch sample: 7 structural nodes, 14 directives, depth 3."""
    return build_graph(demo_nodes(**node_kwargs), demo_edges())


def overlap_graph(**node_kwargs) -> FDGraph:
    """Dispatch sample plus an intersection edge: d9 shared by n7 and n8."""
    edges = demo_edges() + [Edge("n8", "d9", EdgeKind.INTERSECTION)]
    return build_graph(demo_nodes(**node_kwargs), edges)


def demo_project(**node_kwargs) -> Project:
    """The dispatch sample as a pristine project: no selection, no requirements."""
    return Project(
        meta=ProjectMeta(
            name="Field-service dispatch",
            problem_domain="field service operations",
            solution_domain="web application",
        ),
        graph=demo_graph(**node_kwargs),
        needs=tuple(demo_needs()),
    )


def overlap_project(**node_kwargs) -> Project:
    """The shared-directive variant, with the uneven candidate recorded as chosen.

    Choosing the deeper set (n1, n7, n3) keeps both owners of the shared
    directive d9 in play, which is what the overlap scenarios exercise.
    """
    graph = overlap_graph(**node_kwargs)
    base = Project(
        meta=ProjectMeta(
            name="Field-service dispatch (shared directive)",
            problem_domain="field service operations",
            solution_domain="web application",
        ),
        graph=graph,
        needs=tuple(demo_needs()),
    )
    candidates = rank_candidates(enumerate_candidates(graph), base.weights)
    picked = next(c for c in candidates if set(c.members) == {"n1", "n3", "n7"})
    selection = optimize(graph, [picked], base.constraints)
    return replace(base, selection=selection)


def demo_project_selected(
    members: set[str] | None = None,
    constraints: Constraints = Constraints(),
    overlap: bool = False,
    **node_kwargs,
) -> Project:
    """Demo project with a recorded selection; top-ranked candidate by default."""
    base = overlap_project(**node_kwargs) if overlap else demo_project(**node_kwargs)
    graph = base.graph
    candidates = rank_candidates(enumerate_candidates(graph), base.weights)
    if members is not None:
        candidates = [c for c in candidates if set(c.members) == set(members)]
    selection = optimize(graph, candidates, constraints)
    return replace(base, selection=selection, constraints=constraints)


def course_project() -> Project:
    """A compact course-management project with one transformed requirement."""
    needs = (
        Need("need-discuss", "Need a facility for students and faculty to share ideas, discuss questions"),
        Need("need-grades", "Need to record course grades and let students view them"),
    )
    nodes = [
        mission("m", "Run the course management system"),
        functional("forum", "Discussion Forum", {"need-discuss"}),
        functional("gradebook", "Gradebook", {"need-grades"}),
        directive(
            "forum-announce",
            "Provide a separate section for faculty to post important announcements",
            {"need-discuss"},
            relevance=1.0,
            effort=5.0,
        ),
        directive(
            "forum-threads",
            "Support threaded discussion of questions",
            {"need-discuss"},
            relevance=0.7,
            effort=8.0,
        ),
        directive(
            "grade-entry",
            "Let faculty enter grades per assignment",
            {"need-grades"},
            relevance=0.85,
            effort=6.0,
        ),
        directive(
            "grade-view",
            "Let students view their own grades",
            {"need-grades"},
            relevance=0.7,
            effort=4.0,
        ),
    ]
    d = EdgeKind.DECOMPOSITION
    edges = [
        Edge("m", "forum", d), Edge("m", "gradebook", d),
        Edge("forum", "forum-announce", d), Edge("forum", "forum-threads", d),
        Edge("gradebook", "grade-entry", d), Edge("gradebook", "grade-view", d),
    ]
    graph = build_graph(nodes, edges)
    base = Project(
        meta=ProjectMeta(
            name="Course management",
            problem_domain="education",
            solution_domain="web application",
        ),
        graph=graph,
        needs=needs,
    )
    candidates = rank_candidates(enumerate_candidates(graph), base.weights)
    selection = optimize(graph, candidates, Constraints())
    requirement = Requirement(
        id="forum-announce-r1",
        text=(
            "For the announcement section, the write permission must be "
            "enabled only for users designated as faculty."
        ),
        source_directive_id="forum-announce",
        capability_id="forum",
        criticality=1.0,
    )
    return replace(base, selection=selection, requirements=(requirement,))
