"""Trace queries and change-impact reports over a project snapshot.

Forward traces walk need -> node -> directive -> owning capability ->
requirement along recorded links; backward traces invert that walk from a
requirement to its contributing needs. Impact reports are deterministic
reachability sets with severity labels: downward effects are "affected",
upward (ancestor) effects are "review" only. All queries are read-only over an
immutable project, so any number can run concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import NoSourceNeedError, UnknownEntityError
from .graph import EdgeKind, FDGraph, NodeKind, SpaceTag
from .metrics import coupling
from .project import Project


class LinkKind(str, Enum):
    NEED_REF = "needRef"
    GRAPH_EDGE = "graphEdge"
    CAPABILITY_MEMBERSHIP = "capabilityMembership"
    TRANSFORMATION = "transformation"


@dataclass(frozen=True)
class EntityRef:
    kind: str
    id: str


@dataclass(frozen=True)
class TraceStep:
    """One entity on a trace path; ``link`` tells how it connects to the
    previous step (None on the first step)."""

    entity: EntityRef
    space: SpaceTag
    link: LinkKind | None = None
    edge_kind: EdgeKind | None = None


@dataclass(frozen=True)
class TracePath:
    steps: tuple[TraceStep, ...]

    @property
    def last(self) -> EntityRef:
        return self.steps[-1].entity

    def entity_ids(self) -> tuple[str, ...]:
        return tuple(s.entity.id for s in self.steps)


@dataclass(frozen=True)
class Rationale:
    link: str
    severity: str


@dataclass(frozen=True)
class ImpactReport:
    trigger: EntityRef
    direction: str | None
    affected_nodes: tuple[str, ...]
    affected_directives: dict[str, float]
    affected_capabilities: dict[str, float]
    affected_requirements: tuple[str, ...]
    rationale: dict[str, Rationale]

    def entity_ids(self) -> frozenset[str]:
        return frozenset(
            list(self.affected_nodes)
            + list(self.affected_directives)
            + list(self.affected_capabilities)
            + list(self.affected_requirements)
        )


@dataclass(frozen=True)
class TraceLink:
    """One recorded link of the project's trace graph."""

    kind: LinkKind
    source: str
    target: str
    edge_kind: EdgeKind | None = None


def _shortest_route(graph: FDGraph, src: str, dst: str) -> list[tuple[str, EdgeKind | None]]:
    """Shortest edge route src..dst, deterministic by sorted exploration."""
    if src == dst:
        return [(src, None)]
    parent: dict[str, tuple[str, EdgeKind]] = {}
    frontier = [src]
    seen = {src}
    while frontier and dst not in parent:
        nxt = []
        for nid in frontier:
            for edge in sorted(graph.out_edges(nid)):
                if edge.target not in seen:
                    seen.add(edge.target)
                    parent[edge.target] = (nid, edge.kind)
                    nxt.append(edge.target)
        frontier = sorted(nxt)
    route: list[tuple[str, EdgeKind | None]] = [(dst, parent[dst][1])]
    cursor = dst
    while parent[cursor][0] != src:
        cursor = parent[cursor][0]
        route.append((cursor, parent[cursor][1]))
    route.append((src, None))
    return list(reversed(route))


def _node_space(node_kind: NodeKind) -> SpaceTag:
    # The decomposition structure itself lives in the problem space; a node
    # only enters the transition space in its role as a chosen capability.
    return SpaceTag.PROBLEM


def trace_forward(project: Project, need_id: str) -> list[TracePath]:
    """Every maximal forward path rooted at the need.

    Paths extend as far as recorded links allow: to directives when nothing is
    chosen yet, through owning capabilities and into requirements once
    transformation happened.
    """
    project.need(need_id)
    graph = project.graph
    paths: list[TracePath] = []
    for node in graph.nodes:
        if need_id not in node.need_refs:
            continue
        for directive_id in sorted(graph.directive_set(node.id)):
            base = [
                TraceStep(EntityRef("need", need_id), SpaceTag.PROBLEM),
                TraceStep(
                    EntityRef("node", node.id),
                    _node_space(node.kind),
                    LinkKind.NEED_REF,
                ),
            ]
            for nid, kind in _shortest_route(graph, node.id, directive_id)[1:]:
                base.append(
                    TraceStep(
                        EntityRef("node", nid),
                        SpaceTag.PROBLEM,
                        LinkKind.GRAPH_EDGE,
                        edge_kind=kind,
                    )
                )
            owners = project.owners_of_directive(directive_id)
            if not owners:
                paths.append(TracePath(tuple(base)))
                continue
            requirements = project.requirements_of_directive(directive_id)
            for owner in owners:
                with_owner = base + [
                    TraceStep(
                        EntityRef("capability", owner),
                        SpaceTag.TRANSITION,
                        LinkKind.CAPABILITY_MEMBERSHIP,
                    )
                ]
                if not requirements:
                    paths.append(TracePath(tuple(with_owner)))
                    continue
                for req in requirements:
                    paths.append(
                        TracePath(
                            tuple(
                                with_owner
                                + [
                                    TraceStep(
                                        EntityRef("requirement", req.id),
                                        SpaceTag.SOLUTION,
                                        LinkKind.TRANSFORMATION,
                                    )
                                ]
                            )
                        )
                    )
    return paths


def trace_backward(project: Project, requirement_id: str) -> TracePath:
    """Requirement back to its contributing needs through directive ancestry."""
    requirement = project.requirement(requirement_id)
    graph = project.graph
    directive_id = requirement.source_directive_id
    if not graph.has_node(directive_id):
        raise NoSourceNeedError(requirement_id)

    steps = [
        TraceStep(EntityRef("requirement", requirement_id), SpaceTag.SOLUTION),
        TraceStep(
            EntityRef("directive", directive_id),
            SpaceTag.PROBLEM,
            LinkKind.TRANSFORMATION,
        ),
    ]
    if graph.has_node(requirement.capability_id):
        steps.append(
            TraceStep(
                EntityRef("capability", requirement.capability_id),
                SpaceTag.TRANSITION,
                LinkKind.CAPABILITY_MEMBERSHIP,
            )
        )

    ancestors = sorted(graph.ancestors(directive_id), key=lambda nid: (-graph.level(nid), nid))
    upward_kinds = _first_reached_kinds(graph, directive_id, downward=False)
    for nid in ancestors:
        steps.append(
            TraceStep(
                EntityRef("node", nid),
                SpaceTag.PROBLEM,
                LinkKind.GRAPH_EDGE,
                edge_kind=upward_kinds.get(nid),
            )
        )

    contributing = set(graph.node(directive_id).need_refs)
    for nid in ancestors:
        contributing |= graph.node(nid).need_refs
    if not contributing:
        raise NoSourceNeedError(requirement_id)
    for need_id in sorted(contributing):
        steps.append(
            TraceStep(EntityRef("need", need_id), SpaceTag.PROBLEM, LinkKind.NEED_REF)
        )
    return TracePath(tuple(steps))


def need_neighborhood(project: Project, need_id: str) -> dict[str, tuple[str, ...]]:
    """Other needs sharing structure with this one, with the shared nodes.

    The neighborhood zone is the union of the need's attachment nodes with all
    of their ancestors and descendants; any other need attached inside the
    zone is a neighbor.
    """
    project.need(need_id)
    graph = project.graph
    zone: set[str] = set()
    for node in graph.nodes:
        if need_id in node.need_refs:
            zone.add(node.id)
            zone |= graph.descendants(node.id)
            zone |= graph.ancestors(node.id)
    neighbors: dict[str, set[str]] = {}
    for node in graph.nodes:
        if node.id not in zone:
            continue
        for other in node.need_refs:
            if other != need_id:
                neighbors.setdefault(other, set()).add(node.id)
    return {nid: tuple(sorted(nodes)) for nid, nodes in sorted(neighbors.items())}


def _first_reached_kinds(graph: FDGraph, start: str, downward: bool) -> dict[str, EdgeKind]:
    """Edge kind by which BFS first reaches each node from ``start``."""
    kinds: dict[str, EdgeKind] = {}
    frontier = [start]
    seen = {start}
    while frontier:
        nxt = []
        for nid in sorted(frontier):
            edges = graph.out_edges(nid) if downward else graph.in_edges(nid)
            for edge in sorted(edges):
                neighbor = edge.target if downward else edge.source
                if neighbor not in seen:
                    seen.add(neighbor)
                    kinds[neighbor] = edge.kind
                    nxt.append(neighbor)
        frontier = nxt
    return kinds


def impact_of_node_change(
    project: Project, node_id: str, direction: str = "down"
) -> ImpactReport:
    """Ripple of a change at a graph node.

    ``down`` follows all outgoing edge kinds and marks entities affected;
    ``up`` lists ancestors for review only; ``both`` combines the two.
    """
    if direction not in ("down", "up", "both"):
        raise ValueError(f"direction must be down, up or both, got {direction!r}")
    graph = project.graph
    node = graph.node(node_id)

    down = graph.descendants(node_id) if direction in ("down", "both") else frozenset()
    up = graph.ancestors(node_id) if direction in ("up", "both") else frozenset()
    down_kinds = _first_reached_kinds(graph, node_id, downward=True)
    up_kinds = _first_reached_kinds(graph, node_id, downward=False)

    rationale: dict[str, Rationale] = {}
    affected_nodes: list[str] = []
    affected_directives: dict[str, float] = {}

    for nid in sorted(down):
        kind = down_kinds[nid].value
        if graph.node(nid).kind is NodeKind.DIRECTIVE:
            affected_directives[nid] = graph.node(nid).directive.relevance
        else:
            affected_nodes.append(nid)
        rationale[nid] = Rationale(link=kind, severity="affected")
    if node.kind is NodeKind.DIRECTIVE and direction in ("down", "both"):
        affected_directives[node_id] = node.directive.relevance
        rationale[node_id] = Rationale(link="trigger", severity="affected")
    for nid in sorted(up):
        affected_nodes.append(nid)
        rationale[nid] = Rationale(link=up_kinds[nid].value, severity="review")

    affected_capabilities: dict[str, float] = {}
    if project.selection is not None:
        touched = set(down) | set(up) | {node_id}
        for member in project.chosen_members:
            if member in touched:
                affected_capabilities[member] = 1.0
                severity = "review" if member in up else "affected"
                rationale[member] = Rationale(link="member", severity=severity)
        for directive_id in affected_directives:
            weight = affected_directives[directive_id]
            for owner in project.owners_of_directive(directive_id):
                if affected_capabilities.get(owner) == 1.0:
                    continue
                affected_capabilities[owner] = max(
                    affected_capabilities.get(owner, 0.0), weight
                )
                rationale.setdefault(owner, Rationale(link="ownership", severity="affected"))

    affected_requirements = sorted(
        r.id
        for r in project.requirements
        if r.source_directive_id in affected_directives
    )
    for rid in affected_requirements:
        rationale[rid] = Rationale(link="transformation", severity="affected")

    return ImpactReport(
        trigger=EntityRef("node", node_id),
        direction=direction,
        affected_nodes=tuple(sorted(affected_nodes)),
        affected_directives=affected_directives,
        affected_capabilities=affected_capabilities,
        affected_requirements=tuple(affected_requirements),
        rationale=rationale,
    )


def impact_of_directive_change(project: Project, directive_id: str) -> ImpactReport:
    """Impact of changing one directive: owners weighted by its relevance."""
    graph = project.graph
    if not graph.has_node(directive_id) or graph.node(directive_id).kind is not NodeKind.DIRECTIVE:
        raise UnknownEntityError("directive", directive_id)
    relevance = graph.node(directive_id).directive.relevance

    rationale: dict[str, Rationale] = {directive_id: Rationale("trigger", "affected")}
    capabilities: dict[str, float] = {}
    for owner in project.owners_of_directive(directive_id):
        capabilities[owner] = relevance
        rationale[owner] = Rationale("ownership", "affected")
    requirements = tuple(r.id for r in project.requirements_of_directive(directive_id))
    for rid in requirements:
        rationale[rid] = Rationale("transformation", "affected")

    return ImpactReport(
        trigger=EntityRef("directive", directive_id),
        direction=None,
        affected_nodes=(),
        affected_directives={directive_id: relevance},
        affected_capabilities=capabilities,
        affected_requirements=requirements,
        rationale=rationale,
    )


def impact_of_capability_change(project: Project, capability_id: str) -> ImpactReport:
    """Impact of changing a chosen capability: its requirements, plus coupled peers."""
    if project.selection is None or capability_id not in project.chosen_members:
        raise UnknownEntityError("capability", capability_id)
    graph = project.graph

    rationale: dict[str, Rationale] = {}
    requirements = tuple(r.id for r in project.requirements_of_capability(capability_id))
    for rid in requirements:
        rationale[rid] = Rationale("capability_requirement", "affected")

    coupled: dict[str, float] = {}
    for member in project.chosen_members:
        if member == capability_id:
            continue
        value = coupling(graph, capability_id, member)
        if value > 0:
            coupled[member] = value
            rationale[member] = Rationale("shared_directive", "affected")

    return ImpactReport(
        trigger=EntityRef("capability", capability_id),
        direction=None,
        affected_nodes=(),
        affected_directives={},
        affected_capabilities=coupled,
        affected_requirements=requirements,
        rationale=rationale,
    )


def impact_of_requirement_change(project: Project, requirement_id: str) -> ImpactReport:
    """Siblings from the same directive are strong; capability peers moderate."""
    requirement = project.requirement(requirement_id)
    rationale: dict[str, Rationale] = {}
    affected: list[str] = []

    siblings = [
        r.id
        for r in project.requirements_of_directive(requirement.source_directive_id)
        if r.id != requirement_id
    ]
    for rid in siblings:
        affected.append(rid)
        rationale[rid] = Rationale("sibling_requirement", "strong")

    capability_id = requirement.capability_id
    if project.selection is not None and capability_id in project.chosen_members:
        peer_pool = project.requirements_of_capability(capability_id)
    else:
        peer_pool = tuple(
            r for r in project.requirements if r.capability_id == capability_id
        )
    for peer in peer_pool:
        if peer.id == requirement_id or peer.id in rationale:
            continue
        if peer.source_directive_id == requirement.source_directive_id:
            continue
        affected.append(peer.id)
        rationale[peer.id] = Rationale("capability_requirement", "moderate")

    return ImpactReport(
        trigger=EntityRef("requirement", requirement_id),
        direction=None,
        affected_nodes=(),
        affected_directives={},
        affected_capabilities={},
        affected_requirements=tuple(sorted(affected)),
        rationale=rationale,
    )


def all_trace_links(project: Project) -> list[TraceLink]:
    """Every recorded link: need refs, graph edges, memberships, transformations."""
    graph = project.graph
    links: list[TraceLink] = []
    for node in graph.nodes:
        for need_id in sorted(node.need_refs):
            links.append(TraceLink(LinkKind.NEED_REF, need_id, node.id))
    for edge in graph.edges:
        links.append(TraceLink(LinkKind.GRAPH_EDGE, edge.source, edge.target, edge.kind))
    if project.selection is not None:
        for member in project.chosen_members:
            for directive_id in project.selection.chosen.assignment[member]:
                links.append(
                    TraceLink(LinkKind.CAPABILITY_MEMBERSHIP, directive_id, member)
                )
    for requirement in project.requirements:
        links.append(
            TraceLink(LinkKind.TRANSFORMATION, requirement.source_directive_id, requirement.id)
        )
    return links


def _link_relevance(project: Project, link: TraceLink) -> float | None:
    """Highest relevance among the directives a link passes through."""
    graph = project.graph
    if link.kind in (LinkKind.CAPABILITY_MEMBERSHIP, LinkKind.TRANSFORMATION):
        directive_id = link.source
        if not graph.has_node(directive_id):
            return None
        return graph.node(directive_id).directive.relevance
    target = link.target
    if not graph.has_node(target):
        return None
    directives = graph.directive_set(target)
    if not directives:
        return None
    return max(graph.node(d).directive.relevance for d in directives)


def critical_traces(project: Project, threshold: float) -> list[TraceLink]:
    """Links passing through directives at or above the relevance threshold.

    Antitone in the threshold; a zero threshold keeps every link.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    links = all_trace_links(project)
    if threshold == 0.0:
        return links
    kept = []
    for link in links:
        relevance = _link_relevance(project, link)
        if relevance is not None and relevance >= threshold:
            kept.append(link)
    return kept


MATRIX_HEADER = (
    "need_id",
    "node_id",
    "directive_id",
    "capability_id",
    "requirement_id",
    "relevance",
)


def trace_matrix(project: Project) -> list[tuple[str, str, str, str, str, float]]:
    """One row per complete forward path, in lexicographic order.

    A complete path is a (need, node, directive, capability, requirement)
    tuple where the need attaches to the node, the directive is reachable from
    it, the capability owns the directive, and the requirement derives from
    the directive. The relevance column carries the directive's weight.
    """
    graph = project.graph
    rows: list[tuple[str, str, str, str, str, float]] = []
    for need in project.needs:
        for node in graph.nodes:
            if need.id not in node.need_refs:
                continue
            for directive_id in sorted(graph.directive_set(node.id)):
                relevance = graph.node(directive_id).directive.relevance
                for owner in project.owners_of_directive(directive_id):
                    for requirement in project.requirements_of_directive(directive_id):
                        rows.append(
                            (need.id, node.id, directive_id, owner, requirement.id, relevance)
                        )
    return sorted(rows)
