"""Function-decomposition graph: entity types, structural validation, ancestry queries.

The graph is a rooted DAG. A single mission node sits at the top, functional
abstractions fill the middle, and directive leaves carry the detailed system
characteristics. Edges are typed (decomposition, intersection, refinement) and
each type comes with structural rules that are enforced before a graph value
can exist: every accepted ``FDGraph`` satisfies all invariants, so downstream
modules never re-check them.

Graph values are immutable; every query is safe under concurrent reads.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .errors import UnknownEntityError, ValidationError, Violation


class NodeKind(str, Enum):
    MISSION = "mission"
    FUNCTIONAL = "functional"
    DIRECTIVE = "directive"


class EdgeKind(str, Enum):
    DECOMPOSITION = "decomposition"
    INTERSECTION = "intersection"
    REFINEMENT = "refinement"


ALL_EDGE_KINDS: frozenset[EdgeKind] = frozenset(EdgeKind)


class SpaceTag(str, Enum):
    """Which of the three spaces an entity lives in.

    Needs, directives and the decomposition structure itself belong to the
    problem space; a node acting as a chosen capability belongs to the
    transition space; requirements belong to the solution space.
    """

    PROBLEM = "problem"
    TRANSITION = "transition"
    SOLUTION = "solution"


class RiskCategory(str, Enum):
    CATASTROPHIC = "Catastrophic"
    CRITICAL = "Critical"
    MARGINAL = "Marginal"
    NEGLIGIBLE = "Negligible"


# Relevance band per category: closed below, open above, except Catastrophic
# which closes at 1.0. A directive's relevance must sit inside its category's
# band.
RISK_BANDS: dict[RiskCategory, tuple[float, float]] = {
    RiskCategory.CATASTROPHIC: (0.85, 1.0),
    RiskCategory.CRITICAL: (0.6, 0.85),
    RiskCategory.MARGINAL: (0.3, 0.6),
    RiskCategory.NEGLIGIBLE: (0.0, 0.3),
}

# Default relevance assigned when only a category is supplied.
DEFAULT_RELEVANCE: dict[RiskCategory, float] = {
    RiskCategory.CATASTROPHIC: 1.0,
    RiskCategory.CRITICAL: 0.7,
    RiskCategory.MARGINAL: 0.4,
    RiskCategory.NEGLIGIBLE: 0.1,
}


def category_for_relevance(relevance: float) -> RiskCategory:
    """Risk category whose band contains ``relevance``."""
    if not 0.0 <= relevance <= 1.0:
        raise ValueError(f"relevance must be in [0, 1], got {relevance}")
    for category, (lo, hi) in RISK_BANDS.items():
        if lo <= relevance < hi or (category is RiskCategory.CATASTROPHIC and relevance == hi):
            return category
    raise AssertionError("risk bands cover [0, 1]")  # pragma: no cover


def relevance_in_band(relevance: float, category: RiskCategory) -> bool:
    lo, hi = RISK_BANDS[category]
    if category is RiskCategory.CATASTROPHIC:
        return lo <= relevance <= hi
    return lo <= relevance < hi


class NeedStatus(str, Enum):
    ACTIVE = "active"
    RETIRED = "retired"


@dataclass(frozen=True)
class Need:
    """A natural-language expectation stated from a stakeholder's viewpoint."""

    id: str
    text: str
    user_view: str = "direct"
    status: NeedStatus = NeedStatus.ACTIVE

    def __post_init__(self):
        if not self.id:
            raise ValueError("need id must be non-empty")
        if not self.text or not self.text.strip():
            raise ValueError(f"need {self.id!r} must have non-empty text")


@dataclass(frozen=True)
class Directive:
    """Leaf payload: a requirement-with-context plus planning attributes.

    ``relevance`` weighs how essential the directive is, on [0, 1]; the risk
    category bands that weight. When only one of the pair is given, the other
    is derived (band default / containing band). ``effort`` is in person-days;
    ``tech_readiness`` is a TRL on the usual 1..9 scale.
    """

    relevance: float | None = None
    risk_category: RiskCategory | None = None
    effort: float = 0.0
    tech_readiness: int = 9

    def __post_init__(self):
        relevance, category = self.relevance, self.risk_category
        if relevance is None and category is None:
            raise ValueError("directive needs a relevance value or a risk category")
        if relevance is None:
            relevance = DEFAULT_RELEVANCE[category]
        if category is None:
            category = category_for_relevance(relevance)
        if not 0.0 <= relevance <= 1.0:
            raise ValueError(f"relevance must be in [0, 1], got {relevance}")
        if not relevance_in_band(relevance, category):
            lo, hi = RISK_BANDS[category]
            raise ValueError(
                f"relevance {relevance} is outside the {category.value} band [{lo}, {hi})"
            )
        if self.effort < 0:
            raise ValueError(f"effort must be nonnegative, got {self.effort}")
        if not isinstance(self.tech_readiness, int) or not 1 <= self.tech_readiness <= 9:
            raise ValueError(f"tech readiness must be an integer in 1..9, got {self.tech_readiness}")
        object.__setattr__(self, "relevance", float(relevance))
        object.__setattr__(self, "risk_category", category)
        object.__setattr__(self, "effort", float(self.effort))


@dataclass(frozen=True)
class FDNode:
    """One vertex of the decomposition graph.

    ``need_refs`` records which needs the node was derived from; it may be
    empty only on the mission node. ``directive`` is present exactly when
    ``kind`` is DIRECTIVE (checked by graph validation so that malformed
    inputs are reportable rather than unrepresentable).
    """

    id: str
    kind: NodeKind
    label: str
    need_refs: frozenset[str] = frozenset()
    directive: Directive | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("node id must be non-empty")
        object.__setattr__(self, "need_refs", frozenset(self.need_refs))


@dataclass(frozen=True, order=True)
class Edge:
    source: str
    target: str
    kind: EdgeKind


def mission(node_id: str, label: str, need_refs: Iterable[str] = ()) -> FDNode:
    return FDNode(node_id, NodeKind.MISSION, label, frozenset(need_refs))


def functional(node_id: str, label: str, need_refs: Iterable[str] = ()) -> FDNode:
    return FDNode(node_id, NodeKind.FUNCTIONAL, label, frozenset(need_refs))


def directive(
    node_id: str,
    label: str,
    need_refs: Iterable[str] = (),
    relevance: float | None = 1.0,
    risk_category: RiskCategory | None = None,
    effort: float = 0.0,
    tech_readiness: int = 9,
) -> FDNode:
    payload = Directive(relevance, risk_category, effort, tech_readiness)
    return FDNode(node_id, NodeKind.DIRECTIVE, label, frozenset(need_refs), payload)


# Violation codes used by graph validation. The codes are part of the module's
# contract: reports are machine-readable.
CYCLE_DETECTED = "cycle_detected"
MULTIPLE_ROOTS = "multiple_roots"
MISSING_MISSION = "missing_mission"
UNREACHABLE_NODE = "unreachable_node"
DIRECTIVE_WITH_CHILDREN = "directive_with_children"
INTERNAL_LEAF = "internal_leaf"
REFINEMENT_FANOUT = "refinement_fanout"
DECOMPOSITION_UNDERFLOW = "decomposition_underflow"
INTERSECTION_SINGLE_PARENT = "intersection_single_parent"
MISSION_WITH_PARENT = "mission_with_parent"
EMPTY_LABEL = "empty_label"
MISSING_NEED_REFS = "missing_need_refs"
DIRECTIVE_PAYLOAD_MISMATCH = "directive_payload_mismatch"
DUPLICATE_NODE_ID = "duplicate_node_id"
DUPLICATE_EDGE = "duplicate_edge"
UNKNOWN_ENDPOINT = "unknown_endpoint"


def _normalize_edges(edges: Iterable[Edge | tuple]) -> list[Edge]:
    out = []
    for e in edges:
        if isinstance(e, Edge):
            out.append(e)
        else:
            source, target, kind = e
            out.append(Edge(source, target, EdgeKind(kind)))
    return out


def validate_graph(nodes: Iterable[FDNode], edges: Iterable[Edge | tuple]) -> list[Violation]:
    """Check every structural invariant; return the violations found.

    An empty report means ``build_graph`` would accept the same input.
    Violations are data, not failures: callers that want errors use
    ``build_graph``.
    """
    nodes = list(nodes)
    edges = _normalize_edges(edges)
    violations: list[Violation] = []

    by_id: dict[str, FDNode] = {}
    for node in nodes:
        if node.id in by_id:
            violations.append(Violation(DUPLICATE_NODE_ID, (node.id,), f"node id {node.id!r} appears more than once"))
        else:
            by_id[node.id] = node

    seen_pairs: set[tuple[str, str]] = set()
    usable_edges: list[Edge] = []
    for edge in edges:
        bad = False
        for endpoint in (edge.source, edge.target):
            if endpoint not in by_id:
                violations.append(Violation(UNKNOWN_ENDPOINT, (edge.source, edge.target), f"edge references unknown node {endpoint!r}"))
                bad = True
        if (edge.source, edge.target) in seen_pairs:
            violations.append(Violation(DUPLICATE_EDGE, (edge.source, edge.target), "more than one edge between the same pair of nodes"))
            bad = True
        seen_pairs.add((edge.source, edge.target))
        if not bad:
            usable_edges.append(edge)

    # Node-level invariants.
    for node in sorted(by_id.values(), key=lambda n: n.id):
        if not node.label or not node.label.strip():
            violations.append(Violation(EMPTY_LABEL, (node.id,), f"node {node.id!r} has an empty label"))
        if node.kind is NodeKind.DIRECTIVE and node.directive is None:
            violations.append(Violation(DIRECTIVE_PAYLOAD_MISMATCH, (node.id,), f"directive node {node.id!r} is missing its payload"))
        if node.kind is not NodeKind.DIRECTIVE and node.directive is not None:
            violations.append(Violation(DIRECTIVE_PAYLOAD_MISMATCH, (node.id,), f"non-directive node {node.id!r} carries a directive payload"))
        if node.kind is not NodeKind.MISSION and not node.need_refs:
            violations.append(Violation(MISSING_NEED_REFS, (node.id,), f"node {node.id!r} references no needs"))

    out_edges: dict[str, list[Edge]] = {nid: [] for nid in by_id}
    in_edges: dict[str, list[Edge]] = {nid: [] for nid in by_id}
    for edge in usable_edges:
        out_edges[edge.source].append(edge)
        in_edges[edge.target].append(edge)

    mission_ids = sorted(nid for nid, n in by_id.items() if n.kind is NodeKind.MISSION)
    if not mission_ids:
        violations.append(Violation(MISSING_MISSION, (), "graph has no mission node"))
    for extra in mission_ids[1:]:
        violations.append(Violation(MULTIPLE_ROOTS, (extra,), f"second mission node {extra!r}"))
    for mid in mission_ids:
        if in_edges[mid]:
            violations.append(Violation(MISSION_WITH_PARENT, (mid,), f"mission node {mid!r} has incoming edges"))

    # A parentless non-mission node is a second root; report it as such and
    # do not additionally flag it unreachable.
    extra_roots = sorted(
        nid for nid, n in by_id.items()
        if n.kind is not NodeKind.MISSION and not in_edges[nid]
    )
    for nid in extra_roots:
        violations.append(Violation(MULTIPLE_ROOTS, (nid,), f"node {nid!r} has no parent"))

    # Edge-kind rules per node.
    for nid in sorted(by_id):
        node = by_id[nid]
        outs = out_edges[nid]
        if node.kind is NodeKind.DIRECTIVE:
            if outs:
                targets = tuple(sorted(e.target for e in outs))
                violations.append(Violation(DIRECTIVE_WITH_CHILDREN, (nid,) + targets, f"directive {nid!r} has children"))
            continue
        if not outs:
            violations.append(Violation(INTERNAL_LEAF, (nid,), f"internal node {nid!r} has no children"))
            continue
        refinement = [e for e in outs if e.kind is EdgeKind.REFINEMENT]
        decomposition = [e for e in outs if e.kind is EdgeKind.DECOMPOSITION]
        if refinement and len(outs) != 1:
            violations.append(Violation(REFINEMENT_FANOUT, (nid,), f"node {nid!r} refines into more than one child"))
        if len(decomposition) == 1:
            violations.append(Violation(DECOMPOSITION_UNDERFLOW, (nid,), f"node {nid!r} decomposes into a single child; use refinement"))

    for edge in sorted(usable_edges):
        if edge.kind is EdgeKind.INTERSECTION and len(in_edges[edge.target]) < 2:
            violations.append(Violation(INTERSECTION_SINGLE_PARENT, (edge.source, edge.target), f"intersection target {edge.target!r} has a single parent"))

    # Cycle detection (Kahn). Only report when no structural problem already
    # explains it: self-contained check over usable edges.
    indegree = {nid: len(in_edges[nid]) for nid in by_id}
    queue = sorted(nid for nid, d in indegree.items() if d == 0)
    visited = 0
    order = list(queue)
    while order:
        nid = order.pop()
        visited += 1
        for e in out_edges[nid]:
            indegree[e.target] -= 1
            if indegree[e.target] == 0:
                order.append(e.target)
    if visited != len(by_id):
        cyclic = tuple(sorted(nid for nid, d in indegree.items() if d > 0))
        violations.append(Violation(CYCLE_DETECTED, cyclic, "graph contains a cycle"))

    # Reachability from the mission node(s); nodes already reported as extra
    # roots are skipped.
    reachable: set[str] = set()
    stack = list(mission_ids)
    while stack:
        nid = stack.pop()
        if nid in reachable:
            continue
        reachable.add(nid)
        stack.extend(e.target for e in out_edges[nid])
    for nid in sorted(by_id):
        if nid not in reachable and nid not in extra_roots and nid not in mission_ids:
            violations.append(Violation(UNREACHABLE_NODE, (nid,), f"node {nid!r} is not reachable from the mission node"))

    return violations


@dataclass(frozen=True)
class FDGraph:
    """A validated decomposition graph. Construct through ``build_graph``."""

    nodes: tuple[FDNode, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        by_id = {n.id: n for n in self.nodes}
        out_map: dict[str, tuple[Edge, ...]] = {nid: () for nid in by_id}
        in_map: dict[str, tuple[Edge, ...]] = {nid: () for nid in by_id}
        for edge in self.edges:
            out_map[edge.source] += (edge,)
            in_map[edge.target] += (edge,)
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_out", out_map)
        object.__setattr__(self, "_in", in_map)
        object.__setattr__(self, "_dirset_cache", {})

        mission_id = next(n.id for n in self.nodes if n.kind is NodeKind.MISSION)
        object.__setattr__(self, "_mission_id", mission_id)

        # Shortest-path distance from the mission node, by BFS.
        levels = {mission_id: 0}
        frontier = [mission_id]
        while frontier:
            nxt = []
            for nid in frontier:
                for e in out_map[nid]:
                    if e.target not in levels:
                        levels[e.target] = levels[nid] + 1
                        nxt.append(e.target)
            frontier = nxt
        object.__setattr__(self, "_levels", levels)

    # -- lookups -------------------------------------------------------

    @property
    def mission_id(self) -> str:
        return self._mission_id

    def node(self, node_id: str) -> FDNode:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise UnknownEntityError("node", node_id) from None

    def has_node(self, node_id: str) -> bool:
        return node_id in self._by_id

    @property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes)

    @property
    def directive_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes if n.kind is NodeKind.DIRECTIVE)

    @property
    def internal_node_ids(self) -> tuple[str, ...]:
        """Functional abstractions: neither the mission root nor directive leaves."""
        return tuple(n.id for n in self.nodes if n.kind is NodeKind.FUNCTIONAL)

    def out_edges(self, node_id: str) -> tuple[Edge, ...]:
        self.node(node_id)
        return self._out[node_id]

    def in_edges(self, node_id: str) -> tuple[Edge, ...]:
        self.node(node_id)
        return self._in[node_id]

    def children(self, node_id: str, kinds: Iterable[EdgeKind] = ALL_EDGE_KINDS) -> list[str]:
        kinds = frozenset(kinds)
        return sorted(e.target for e in self.out_edges(node_id) if e.kind in kinds)

    def parents(self, node_id: str, kinds: Iterable[EdgeKind] = ALL_EDGE_KINDS) -> list[str]:
        kinds = frozenset(kinds)
        return sorted(e.source for e in self.in_edges(node_id) if e.kind in kinds)

    # -- traversal -----------------------------------------------------

    def descendants(self, node_id: str, kinds: Iterable[EdgeKind] = ALL_EDGE_KINDS) -> frozenset[str]:
        """Transitive closure below ``node_id`` following only ``kinds`` edges."""
        kinds = frozenset(kinds)
        if not kinds:
            raise ValueError("edge-kind set must be non-empty")
        self.node(node_id)
        seen: set[str] = set()
        stack = [e.target for e in self._out[node_id] if e.kind in kinds]
        while stack:
            nid = stack.pop()
            if nid in seen:
                continue
            seen.add(nid)
            stack.extend(e.target for e in self._out[nid] if e.kind in kinds)
        return frozenset(seen)

    def ancestors(self, node_id: str, kinds: Iterable[EdgeKind] = ALL_EDGE_KINDS) -> frozenset[str]:
        """Transitive closure above ``node_id``; dual of ``descendants``."""
        kinds = frozenset(kinds)
        if not kinds:
            raise ValueError("edge-kind set must be non-empty")
        self.node(node_id)
        seen: set[str] = set()
        stack = [e.source for e in self._in[node_id] if e.kind in kinds]
        while stack:
            nid = stack.pop()
            if nid in seen:
                continue
            seen.add(nid)
            stack.extend(e.source for e in self._in[nid] if e.kind in kinds)
        return frozenset(seen)

    def is_ancestor(self, a: str, b: str) -> bool:
        """True when ``a`` lies strictly above ``b``."""
        return a in self.ancestors(b)

    def directive_set(self, node_id: str) -> frozenset[str]:
        """Directive leaves reachable from ``node_id``; a directive maps to itself."""
        cached = self._dirset_cache.get(node_id)
        if cached is not None:
            return cached
        node = self.node(node_id)
        if node.kind is NodeKind.DIRECTIVE:
            result = frozenset({node_id})
        else:
            result = frozenset(
                nid for nid in self.descendants(node_id)
                if self._by_id[nid].kind is NodeKind.DIRECTIVE
            )
        self._dirset_cache[node_id] = result
        return result

    def level(self, node_id: str) -> int:
        """Abstraction level: edge count of the shortest path from the mission node."""
        self.node(node_id)
        return self._levels[node_id]

    @property
    def depth(self) -> int:
        return max(self._levels.values(), default=0)

    def graph_key(self) -> str:
        """Structural digest: stable across attribute-only changes (relevance etc.)."""
        h = hashlib.sha256()
        for node in self.nodes:
            h.update(f"{node.id}\x00{node.kind.value}\x1f".encode())
        for edge in self.edges:
            h.update(f"{edge.source}\x00{edge.target}\x00{edge.kind.value}\x1f".encode())
        return h.hexdigest()[:16]


def build_graph(nodes: Iterable[FDNode], edges: Iterable[Edge | tuple]) -> FDGraph:
    """Validate and construct a graph; raises ``ValidationError`` on any violation."""
    nodes = sorted(nodes, key=lambda n: n.id)
    edges = sorted(_normalize_edges(edges))
    violations = validate_graph(nodes, edges)
    if violations:
        raise ValidationError(violations)
    return FDGraph(tuple(nodes), tuple(edges))


def candidate_invalid_reason(graph: FDGraph, node_ids: Iterable[str]) -> str | None:
    """Why ``node_ids`` is not a valid candidate capability set, or None.

    A valid candidate is a non-empty antichain of functional nodes whose
    directive sets jointly cover every directive of the graph. Unknown ids
    raise; any other defect is returned as a human-readable reason.
    """
    members = sorted(set(node_ids))
    for nid in members:
        graph.node(nid)
    if not members:
        return "candidate has no members"
    wrong_kind = [nid for nid in members if graph.node(nid).kind is not NodeKind.FUNCTIONAL]
    if wrong_kind:
        return f"members must be functional nodes: {', '.join(wrong_kind)}"
    for a in members:
        below = graph.descendants(a)
        for b in members:
            if a != b and b in below:
                return f"{a} is an ancestor of {b}"
    covered: set[str] = set()
    for nid in members:
        covered |= graph.directive_set(nid)
    missing = sorted(set(graph.directive_ids) - covered)
    if missing:
        return f"directives not covered: {', '.join(missing)}"
    return None
