"""Candidate capability sets: enumeration, validity and deterministic ranking.

A candidate is an antichain of functional nodes that jointly covers every
directive of the graph. Exact enumeration walks the functional nodes in id
order, branching on take/skip, and prunes branches that are either not
antichains or can no longer reach full coverage. The greedy strategy starts
from the mission node's functional children and repeatedly replaces the member
whose expansion into its own functional children improves the composite most.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable

from .errors import (
    GraphTooLargeForExactError,
    MixedGraphCandidatesError,
    NoValidCandidateError,
)
from .graph import FDGraph, NodeKind, candidate_invalid_reason
from .metrics import ScoreWeights, SetScore, composite_score, score_set


class Strategy(str, Enum):
    EXACT = "exact"
    GREEDY = "greedy"


@dataclass(frozen=True)
class EnumerationLimits:
    max_internal_nodes_exact: int = 20
    max_candidates: int = 10_000
    strategy: Strategy = Strategy.EXACT

    def __post_init__(self):
        if self.max_internal_nodes_exact <= 0 or self.max_candidates <= 0:
            raise ValueError("enumeration limits must be positive")
        object.__setattr__(self, "strategy", Strategy(self.strategy))


@dataclass(frozen=True)
class CapabilitySet:
    """An antichain of functional nodes covering all directives, with its score.

    ``assignment`` maps each member to the directives it owns (its directive
    set at formulation time). ``graph_key`` pins the candidate to the graph it
    was formulated against.
    """

    members: tuple[str, ...]
    score: SetScore
    assignment: dict[str, tuple[str, ...]]
    graph_key: str

    def rescored(self, weights: ScoreWeights) -> "CapabilitySet":
        new_composite = composite_score(
            self.score.cohesion,
            self.score.coupling,
            self.score.abstraction_imbalance,
            weights,
        )
        return replace(self, score=replace(self.score, composite=new_composite))


def is_valid_candidate(graph: FDGraph, node_ids: Iterable[str]) -> tuple[bool, str | None]:
    """Whether the node set forms a valid candidate, with the failure reason."""
    reason = candidate_invalid_reason(graph, node_ids)
    return reason is None, reason


def make_candidate(
    graph: FDGraph,
    node_ids: Iterable[str],
    weights: ScoreWeights = ScoreWeights(),
) -> CapabilitySet:
    """Score a member set into a ``CapabilitySet``; raises on invalid sets."""
    members = tuple(sorted(set(node_ids)))
    score = score_set(graph, members, weights)
    assignment = {nid: tuple(sorted(graph.directive_set(nid))) for nid in members}
    return CapabilitySet(members, score, assignment, graph.graph_key())


def _exact_member_sets(graph: FDGraph, limits: EnumerationLimits) -> list[tuple[str, ...]]:
    internal = sorted(graph.internal_node_ids)
    if len(internal) > limits.max_internal_nodes_exact:
        raise GraphTooLargeForExactError(len(internal), limits.max_internal_nodes_exact)

    universe = frozenset(graph.directive_ids)
    dirsets = {nid: graph.directive_set(nid) for nid in internal}
    comparable = {
        nid: (graph.ancestors(nid) | graph.descendants(nid)) & set(internal)
        for nid in internal
    }
    # Union of directive sets from position i onward: coverage bound for pruning.
    suffix_union: list[frozenset[str]] = [frozenset()] * (len(internal) + 1)
    for i in range(len(internal) - 1, -1, -1):
        suffix_union[i] = suffix_union[i + 1] | dirsets[internal[i]]

    results: list[tuple[str, ...]] = []

    def walk(i: int, chosen: list[str], covered: frozenset[str], blocked: frozenset[str]):
        if i == len(internal):
            # Supersets of a covering antichain are themselves valid
            # candidates, so a subset only counts once all take/skip
            # decisions are made.
            if chosen and covered == universe:
                results.append(tuple(chosen))
                if len(results) > limits.max_candidates:
                    raise GraphTooLargeForExactError(
                        len(results), limits.max_candidates, what="candidates"
                    )
            return
        if not (covered | suffix_union[i]) >= universe:
            return
        node = internal[i]
        if node not in blocked:
            walk(i + 1, chosen + [node], covered | dirsets[node], blocked | comparable[node])
        walk(i + 1, chosen, covered, blocked)

    walk(0, [], frozenset(), frozenset())
    return results


def _greedy_member_sets(graph: FDGraph, weights: ScoreWeights) -> list[tuple[str, ...]]:
    seed = [
        nid for nid in graph.children(graph.mission_id)
        if graph.node(nid).kind is NodeKind.FUNCTIONAL
    ]
    # Mission children may be comparable through shared substructure; keep the
    # topmost of each comparable pair.
    seed = [
        nid for nid in seed
        if not any(other != nid and graph.is_ancestor(other, nid) for other in seed)
    ]
    seed = tuple(sorted(set(seed)))
    ok, _reason = is_valid_candidate(graph, seed) if seed else (False, "empty")
    if not ok:
        raise NoValidCandidateError("mission's functional children do not cover all directives")

    visited: list[tuple[str, ...]] = []
    seen: set[tuple[str, ...]] = set()

    def remember(members: tuple[str, ...]):
        if members not in seen:
            seen.add(members)
            visited.append(members)

    current = seed
    current_score = score_set(graph, current, weights).composite
    remember(current)
    while True:
        best_replacement: tuple[str, ...] | None = None
        best_score = current_score
        for member in current:
            expansion = [
                c for c in graph.children(member)
                if graph.node(c).kind is NodeKind.FUNCTIONAL
            ]
            if not expansion:
                continue
            candidate = tuple(sorted((set(current) - {member}) | set(expansion)))
            ok, _ = is_valid_candidate(graph, candidate)
            if not ok:
                continue
            remember(candidate)
            composite = score_set(graph, candidate, weights).composite
            if composite > best_score:
                best_score = composite
                best_replacement = candidate
        if best_replacement is None:
            return visited
        current, current_score = best_replacement, best_score


def enumerate_candidates(
    graph: FDGraph,
    limits: EnumerationLimits = EnumerationLimits(),
    weights: ScoreWeights = ScoreWeights(),
) -> list[CapabilitySet]:
    """All valid candidates (exact) or a useful subset of them (greedy).

    Raises ``NoValidCandidateError`` on graphs that admit none, e.g. when a
    directive hangs directly below the mission node.
    """
    if limits.strategy is Strategy.EXACT:
        member_sets = _exact_member_sets(graph, limits)
        if not member_sets:
            raise NoValidCandidateError()
    else:
        member_sets = _greedy_member_sets(graph, weights)
    return [make_candidate(graph, members, weights) for members in member_sets]


def rank_candidates(
    candidates: Iterable[CapabilitySet],
    weights: ScoreWeights = ScoreWeights(),
) -> list[CapabilitySet]:
    """Deterministic total order: composite desc, then coupling asc, cohesion
    desc, member count asc, member ids."""
    rescored = [c.rescored(weights) for c in candidates]
    if len({c.graph_key for c in rescored}) > 1:
        raise MixedGraphCandidatesError()
    return sorted(
        rescored,
        key=lambda c: (
            -c.score.composite,
            c.score.coupling,
            -c.score.cohesion,
            len(c.members),
            c.members,
        ),
    )
