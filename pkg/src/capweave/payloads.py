"""JSON-safe payload builders shared by the CLI and the HTTP API.

Both shells render these dicts through ``store.canonical_json_bytes``, which
is what makes their outputs byte-identical for the same query on the same
project version.
"""

from __future__ import annotations

from typing import Iterable

from .errors import ParseError, UnknownEntityError, Violation
from .formulation import CapabilitySet, EnumerationLimits, Strategy, enumerate_candidates, rank_candidates
from .metrics import ScoreWeights
from .optimization import OptimizedSelection
from .project import Project
from .trace import (
    ImpactReport,
    TracePath,
    impact_of_capability_change,
    impact_of_directive_change,
    impact_of_node_change,
    impact_of_requirement_change,
    trace_backward,
    trace_forward,
)
from .transformation import Requirement


def violations_payload(violations: Iterable[Violation]) -> dict:
    items = [v.to_payload() for v in violations]
    return {"valid": not items, "violations": items}


def weights_payload(weights: ScoreWeights) -> dict:
    return {
        "wCohesion": weights.cohesion,
        "wCoupling": weights.coupling,
        "wAbstraction": weights.abstraction,
    }


def graph_payload(project: Project) -> dict:
    """Graph view with per-node abstraction levels for layered layouts."""
    graph = project.graph
    nodes = []
    for node in graph.nodes:
        doc = {
            "id": node.id,
            "kind": node.kind.value,
            "label": node.label,
            "needRefs": sorted(node.need_refs),
            "level": graph.level(node.id),
        }
        if node.directive is not None:
            doc["directive"] = {
                "relevance": node.directive.relevance,
                "riskCategory": node.directive.risk_category.value,
                "effort": node.directive.effort,
                "techReadiness": node.directive.tech_readiness,
            }
        nodes.append(doc)
    return {
        "mission": graph.mission_id,
        "depth": graph.depth,
        "nodes": nodes,
        "edges": [
            {"source": e.source, "target": e.target, "kind": e.kind.value}
            for e in graph.edges
        ],
        "chosenMembers": list(project.chosen_members),
    }


def candidate_payload(candidate: CapabilitySet) -> dict:
    return {
        "members": list(candidate.members),
        "score": {
            "cohesion": candidate.score.cohesion,
            "coupling": candidate.score.coupling,
            "abstractionImbalance": candidate.score.abstraction_imbalance,
            "composite": candidate.score.composite,
        },
        "assignment": {m: list(ds) for m, ds in candidate.assignment.items()},
    }


def candidates_payload(
    project: Project,
    strategy: Strategy = Strategy.EXACT,
    weights: ScoreWeights | None = None,
) -> dict:
    effective = weights if weights is not None else project.weights
    limits = EnumerationLimits(strategy=strategy)
    ranked = rank_candidates(enumerate_candidates(project.graph, limits, effective), effective)
    return {
        "strategy": strategy.value,
        "weights": weights_payload(effective),
        "candidates": [candidate_payload(c) for c in ranked],
    }


def selection_payload(selection: OptimizedSelection) -> dict:
    from .store import selection_document

    return selection_document(selection)


def requirements_payload(requirements: Iterable[Requirement]) -> dict:
    return {
        "requirements": [
            {
                "id": r.id,
                "text": r.text,
                "sourceDirectiveId": r.source_directive_id,
                "capabilityId": r.capability_id,
                "criticality": r.criticality,
                "status": r.status.value,
            }
            for r in requirements
        ]
    }


def trace_step_payload(step) -> dict:
    return {
        "entity": {"kind": step.entity.kind, "id": step.entity.id},
        "space": step.space.value,
        "link": step.link.value if step.link is not None else None,
        "edgeKind": step.edge_kind.value if step.edge_kind is not None else None,
    }


def trace_payload(project: Project, entity_id: str, backward: bool) -> dict:
    """Forward traces start at a need; backward traces start at a requirement."""
    if backward:
        paths: list[TracePath] = [trace_backward(project, entity_id)]
        entity_kind = "requirement"
    else:
        paths = trace_forward(project, entity_id)
        entity_kind = "need"
    return {
        "query": {"entity": {"kind": entity_kind, "id": entity_id}, "direction": "backward" if backward else "forward"},
        "paths": [{"steps": [trace_step_payload(s) for s in p.steps]} for p in paths],
    }


def impact_payload(report: ImpactReport) -> dict:
    return {
        "trigger": {"kind": report.trigger.kind, "id": report.trigger.id},
        "direction": report.direction,
        "affectedNodes": list(report.affected_nodes),
        "affectedDirectives": dict(sorted(report.affected_directives.items())),
        "affectedCapabilities": dict(sorted(report.affected_capabilities.items())),
        "affectedRequirements": list(report.affected_requirements),
        "rationale": {
            entity: {"link": r.link, "severity": r.severity}
            for entity, r in sorted(report.rationale.items())
        },
    }


IMPACT_KINDS = ("node", "directive", "capability", "requirement")


def resolve_impact(
    project: Project,
    entity_id: str,
    direction: str = "down",
    as_kind: str | None = None,
) -> ImpactReport:
    """Dispatch an impact query to the right operation.

    Without ``as_kind`` the entity's own kind decides; a chosen member still
    reports as a graph node unless queried with ``as_kind='capability'``.
    """
    kind = as_kind
    if kind is None:
        kind = project.entity_kind(entity_id)
        if kind == "need":
            raise ParseError(
                "impact queries start from nodes, directives, capabilities or requirements; "
                "trace the need forward instead",
                field="entity",
            )
        if kind is None:
            raise UnknownEntityError("entity", entity_id)
    if kind not in IMPACT_KINDS:
        raise ParseError(f"unknown impact kind {kind!r}", field="as")
    if kind == "node":
        return impact_of_node_change(project, entity_id, direction)
    if kind == "directive":
        return impact_of_directive_change(project, entity_id)
    if kind == "capability":
        return impact_of_capability_change(project, entity_id)
    return impact_of_requirement_change(project, entity_id)


def parse_weights_csv(raw: str) -> ScoreWeights:
    """Parse 'a,b,c' into score weights."""
    parts = raw.split(",")
    if len(parts) != 3:
        raise ParseError("weights must be three comma-separated numbers", field="weights")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ParseError("weights must be numbers", field="weights") from None
    try:
        return ScoreWeights(*values)
    except ValueError as exc:
        raise ParseError(str(exc), field="weights") from None


def error_payload(exc: Exception) -> dict:
    doc: dict = {"error": {"type": type(exc).__name__, "message": str(exc)}}
    violations = getattr(exc, "violations", None)
    if violations:
        doc["error"]["violations"] = [v.to_payload() for v in violations]
    return doc
