"""Scoring of candidate capability sets: cohesion, coupling, abstraction balance.

The three raw metrics are each bounded to [0, 1] and monotone in the intended
direction; the composite is a weighted linear combination so that any
alternative formula can be dropped in behind the same interface:

    composite = w_cohesion * cohesion
              - w_coupling * coupling
              - w_abstraction * abstraction_imbalance

All functions are pure over immutable graph values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import (
    AncestorOverlapError,
    EmptySetError,
    InvalidCandidateError,
    NotInternalNodeError,
)
from .graph import (
    DEFAULT_RELEVANCE,
    FDGraph,
    NodeKind,
    RiskCategory,
    candidate_invalid_reason,
)


@dataclass(frozen=True)
class ScoreWeights:
    cohesion: float = 1.0
    coupling: float = 1.0
    abstraction: float = 0.5

    def __post_init__(self):
        values = (self.cohesion, self.coupling, self.abstraction)
        if any(v < 0 for v in values):
            raise ValueError(f"weights must be nonnegative, got {values}")
        if all(v == 0 for v in values):
            raise ValueError("at least one weight must be positive")


@dataclass(frozen=True)
class SetScore:
    cohesion: float
    coupling: float
    abstraction_imbalance: float
    composite: float


def relevance_from_category(category: RiskCategory) -> float:
    """Default relevance weight for a risk category."""
    return DEFAULT_RELEVANCE[RiskCategory(category)]


def _require_internal(graph: FDGraph, node_id: str) -> None:
    if graph.node(node_id).kind is not NodeKind.FUNCTIONAL:
        raise NotInternalNodeError(node_id)


def cohesion(graph: FDGraph, node_id: str) -> float:
    """Mean relevance of the node's directive set; 0 for an empty set."""
    _require_internal(graph, node_id)
    directives = graph.directive_set(node_id)
    if not directives:
        return 0.0
    # Summed in id order: float addition is not associative, and set iteration
    # order varies per process, which would break byte-stable outputs.
    total = sum(graph.node(d).directive.relevance for d in sorted(directives))
    return total / len(directives)


def coupling(graph: FDGraph, a: str, b: str) -> float:
    """Jaccard overlap of the two nodes' directive sets.

    The nodes must be incomparable: coupling between a node and its own
    ancestor (or itself) is rejected rather than reported as total overlap.
    """
    _require_internal(graph, a)
    _require_internal(graph, b)
    if a == b or graph.is_ancestor(a, b) or graph.is_ancestor(b, a):
        raise AncestorOverlapError(a, b)
    set_a, set_b = graph.directive_set(a), graph.directive_set(b)
    union = set_a | set_b
    if not union:
        return 0.0
    return len(set_a & set_b) / len(union)


def abstraction_imbalance(graph: FDGraph, node_ids: Iterable[str]) -> float:
    """Spread of abstraction levels, normalized by overall graph depth."""
    ids = sorted(set(node_ids))
    if not ids:
        raise EmptySetError("node set")
    for nid in ids:
        _require_internal(graph, nid)
    levels = [graph.level(nid) for nid in ids]
    return (max(levels) - min(levels)) / max(1, graph.depth)


def composite_score(
    cohesion_value: float,
    coupling_value: float,
    imbalance_value: float,
    weights: ScoreWeights,
) -> float:
    return (
        weights.cohesion * cohesion_value
        - weights.coupling * coupling_value
        - weights.abstraction * imbalance_value
    )


def score_set(
    graph: FDGraph,
    node_ids: Iterable[str],
    weights: ScoreWeights = ScoreWeights(),
) -> SetScore:
    """Score a valid candidate set.

    Cohesion is averaged over members, coupling over unordered member pairs
    (0 for a singleton), and the imbalance over the whole member set.
    """
    members = sorted(set(node_ids))
    reason = candidate_invalid_reason(graph, members)
    if reason is not None:
        raise InvalidCandidateError(reason)
    cohesion_value = sum(cohesion(graph, nid) for nid in members) / len(members)
    pair_values = [
        coupling(graph, members[i], members[j])
        for i in range(len(members))
        for j in range(i + 1, len(members))
    ]
    coupling_value = sum(pair_values) / len(pair_values) if pair_values else 0.0
    imbalance_value = abstraction_imbalance(graph, members)
    return SetScore(
        cohesion=cohesion_value,
        coupling=coupling_value,
        abstraction_imbalance=imbalance_value,
        composite=composite_score(cohesion_value, coupling_value, imbalance_value, weights),
    )
