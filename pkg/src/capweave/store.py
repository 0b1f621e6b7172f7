"""Project persistence: canonical JSON documents, transactional mutations, exports.

The on-disk format is a single UTF-8 JSON object with sorted keys and a
``formatVersion`` field (currently "1"), written identically for identical
projects so the files diff and golden-test cleanly. Mutations are pure: a
rejected mutation raises and the prior project value stays untouched; a
committed one returns a new value with exactly one audit entry.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import replace
from datetime import datetime
from pathlib import Path
from typing import Any, Mapping

from . import transformation
from .errors import ParseError, UnknownEntityError, ValidationError, Violation
from .formulation import CapabilitySet
from .graph import (
    Directive,
    Edge,
    EdgeKind,
    FDGraph,
    FDNode,
    Need,
    NeedStatus,
    NodeKind,
    RiskCategory,
    build_graph,
    category_for_relevance,
    DEFAULT_RELEVANCE,
    validate_graph,
)
from .metrics import ScoreWeights, SetScore
from .optimization import Constraints, Increment, MemberFeasibility, OptimizedSelection, feasibility, member_effort
from .project import AuditEntry, Project, ProjectMeta
from .trace import MATRIX_HEADER, trace_matrix
from .transformation import Requirement, RequirementStatus

FORMAT_VERSION = "1"

_TOP_LEVEL_KEYS = {
    "formatVersion", "meta", "needs", "nodes", "edges",
    "weights", "constraints", "selection", "requirements", "auditLog",
}


def canonical_json_bytes(payload: Any) -> bytes:
    """Stable bytes for a JSON-safe payload: sorted keys, 2-space indent, LF."""
    text = json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)
    return (text + "\n").encode("utf-8")


# -- serialization ------------------------------------------------------


def _directive_to_doc(d: Directive) -> dict:
    return {
        "relevance": d.relevance,
        "riskCategory": d.risk_category.value,
        "effort": d.effort,
        "techReadiness": d.tech_readiness,
    }


def _node_to_doc(node: FDNode) -> dict:
    doc = {
        "id": node.id,
        "kind": node.kind.value,
        "label": node.label,
        "needRefs": sorted(node.need_refs),
    }
    if node.directive is not None:
        doc["directive"] = _directive_to_doc(node.directive)
    return doc


def _selection_to_doc(selection: OptimizedSelection | None) -> dict | None:
    if selection is None:
        return None
    chosen = selection.chosen
    return {
        "members": list(chosen.members),
        "score": {
            "cohesion": chosen.score.cohesion,
            "coupling": chosen.score.coupling,
            "abstractionImbalance": chosen.score.abstraction_imbalance,
            "composite": chosen.score.composite,
        },
        "assignment": {m: list(ds) for m, ds in chosen.assignment.items()},
        "feasibility": {
            m: {"feasible": v.feasible, "blockedBy": list(v.blocked_by)}
            for m, v in selection.feasibility.items()
        },
        "increments": [
            {"index": inc.index, "members": list(inc.members), "totalEffort": inc.total_effort}
            for inc in selection.increments
        ],
        "constraints": {
            "scheduleBudget": selection.constraints.schedule_budget,
            "minTechReadiness": selection.constraints.min_tech_readiness,
        },
    }


def to_document(project: Project) -> dict:
    """The canonical JSON-safe document for a project."""
    return {
        "formatVersion": FORMAT_VERSION,
        "meta": {
            "name": project.meta.name,
            "version": project.meta.version,
            "problemDomain": project.meta.problem_domain,
            "solutionDomain": project.meta.solution_domain,
        },
        "needs": [
            {"id": n.id, "text": n.text, "userView": n.user_view, "status": n.status.value}
            for n in project.needs
        ],
        "nodes": [_node_to_doc(n) for n in project.graph.nodes],
        "edges": [
            {"source": e.source, "target": e.target, "kind": e.kind.value}
            for e in project.graph.edges
        ],
        "weights": {
            "wCohesion": project.weights.cohesion,
            "wCoupling": project.weights.coupling,
            "wAbstraction": project.weights.abstraction,
        },
        "constraints": {
            "scheduleBudget": project.constraints.schedule_budget,
            "minTechReadiness": project.constraints.min_tech_readiness,
        },
        "selection": _selection_to_doc(project.selection),
        "requirements": [
            {
                "id": r.id,
                "text": r.text,
                "sourceDirectiveId": r.source_directive_id,
                "capabilityId": r.capability_id,
                "criticality": r.criticality,
                "status": r.status.value,
            }
            for r in project.requirements
        ],
        "auditLog": [
            {"at": entry.at, "kind": entry.kind, "entities": list(entry.entities)}
            for entry in project.audit_log
        ],
    }


def save_project(project: Project) -> bytes:
    return canonical_json_bytes(to_document(project))


# -- parsing ------------------------------------------------------------


def _expect(obj: Any, field: str, kind: type | tuple, *, path: str) -> Any:
    if not isinstance(obj, dict):
        raise ParseError("expected an object", field=path)
    if field not in obj:
        raise ParseError("missing required field", field=f"{path}.{field}")
    value = obj[field]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError("expected a number", field=f"{path}.{field}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParseError("expected an integer", field=f"{path}.{field}")
        return value
    if not isinstance(value, kind):
        expected = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise ParseError(f"expected {expected}", field=f"{path}.{field}")
    return value


def _str_list(obj: dict, field: str, *, path: str) -> list[str]:
    values = _expect(obj, field, list, path=path)
    for i, v in enumerate(values):
        if not isinstance(v, str):
            raise ParseError("expected a string", field=f"{path}.{field}[{i}]")
    return values


def _enum_value(obj: dict, field: str, enum_cls, *, path: str):
    raw = _expect(obj, field, str, path=path)
    try:
        return enum_cls(raw)
    except ValueError:
        choices = ", ".join(e.value for e in enum_cls)
        raise ParseError(f"expected one of: {choices}", field=f"{path}.{field}") from None


def _parse_directive(doc: dict, *, path: str) -> Directive:
    relevance = _expect(doc, "relevance", float, path=path)
    category = _enum_value(doc, "riskCategory", RiskCategory, path=path)
    effort = _expect(doc, "effort", float, path=path)
    trl = _expect(doc, "techReadiness", int, path=path)
    try:
        return Directive(relevance, category, effort, trl)
    except ValueError as exc:
        raise ParseError(str(exc), field=path) from None


def _parse_node(doc: dict, *, path: str) -> FDNode:
    kind = _enum_value(doc, "kind", NodeKind, path=path)
    payload = None
    if "directive" in doc and doc["directive"] is not None:
        payload = _parse_directive(
            _expect(doc, "directive", dict, path=path), path=f"{path}.directive"
        )
    return FDNode(
        id=_expect(doc, "id", str, path=path),
        kind=kind,
        label=_expect(doc, "label", str, path=path),
        need_refs=frozenset(_str_list(doc, "needRefs", path=path)),
        directive=payload,
    )


def _parse_constraints(doc: dict, *, path: str) -> Constraints:
    budget = _expect(doc, "scheduleBudget", float, path=path)
    trl = _expect(doc, "minTechReadiness", int, path=path)
    try:
        return Constraints(budget, trl)
    except ValueError as exc:
        raise ParseError(str(exc), field=path) from None


def _parse_selection(doc: dict, graph: FDGraph, *, path: str) -> OptimizedSelection:
    members = tuple(_str_list(doc, "members", path=path))
    score_doc = _expect(doc, "score", dict, path=path)
    score = SetScore(
        cohesion=_expect(score_doc, "cohesion", float, path=f"{path}.score"),
        coupling=_expect(score_doc, "coupling", float, path=f"{path}.score"),
        abstraction_imbalance=_expect(score_doc, "abstractionImbalance", float, path=f"{path}.score"),
        composite=_expect(score_doc, "composite", float, path=f"{path}.score"),
    )
    assignment_doc = _expect(doc, "assignment", dict, path=path)
    assignment = {
        m: tuple(_str_list(assignment_doc, m, path=f"{path}.assignment"))
        for m in sorted(assignment_doc)
    }
    feasibility_doc = _expect(doc, "feasibility", dict, path=path)
    verdicts = {}
    for m in sorted(feasibility_doc):
        v = _expect(feasibility_doc, m, dict, path=f"{path}.feasibility")
        verdicts[m] = MemberFeasibility(
            feasible=_expect(v, "feasible", bool, path=f"{path}.feasibility.{m}"),
            blocked_by=tuple(_str_list(v, "blockedBy", path=f"{path}.feasibility.{m}")),
        )
    increments = []
    for i, inc_doc in enumerate(_expect(doc, "increments", list, path=path)):
        inc_path = f"{path}.increments[{i}]"
        if not isinstance(inc_doc, dict):
            raise ParseError("expected an object", field=inc_path)
        if "index" not in inc_doc:
            raise ParseError("missing required field", field=f"{inc_path}.index")
        index = inc_doc["index"]
        if index is not None and (isinstance(index, bool) or not isinstance(index, int)):
            raise ParseError("expected an integer or null", field=f"{inc_path}.index")
        increments.append(
            Increment(
                index=index,
                members=tuple(_str_list(inc_doc, "members", path=inc_path)),
                total_effort=_expect(inc_doc, "totalEffort", float, path=inc_path),
            )
        )
    constraints = _parse_constraints(
        _expect(doc, "constraints", dict, path=path), path=f"{path}.constraints"
    )
    chosen = CapabilitySet(
        members=members,
        score=score,
        assignment=assignment,
        graph_key=graph.graph_key(),
    )
    return OptimizedSelection(
        chosen=chosen,
        feasibility=verdicts,
        increments=tuple(increments),
        constraints=constraints,
    )


def parse_document(data: bytes | str) -> dict:
    """Decode and schema-check the document; semantic validation comes later."""
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not valid UTF-8: {exc}") from None
    else:
        text = data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    unknown = sorted(set(doc) - _TOP_LEVEL_KEYS)
    if unknown:
        raise ParseError("unknown field", field=unknown[0])
    version = _expect(doc, "formatVersion", str, path="$")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported formatVersion {version!r}", field="$.formatVersion")
    for key in sorted(_TOP_LEVEL_KEYS - {"formatVersion"}):
        if key not in doc:
            raise ParseError("missing required field", field=f"$.{key}")
    return doc


def _document_pieces(doc: dict):
    meta_doc = _expect(doc, "meta", dict, path="$")
    meta = ProjectMeta(
        name=_expect(meta_doc, "name", str, path="$.meta"),
        version=_expect(meta_doc, "version", int, path="$.meta"),
        problem_domain=_expect(meta_doc, "problemDomain", str, path="$.meta"),
        solution_domain=_expect(meta_doc, "solutionDomain", str, path="$.meta"),
    )
    needs = []
    for i, need_doc in enumerate(_expect(doc, "needs", list, path="$")):
        path = f"$.needs[{i}]"
        if not isinstance(need_doc, dict):
            raise ParseError("expected an object", field=path)
        try:
            needs.append(
                Need(
                    id=_expect(need_doc, "id", str, path=path),
                    text=_expect(need_doc, "text", str, path=path),
                    user_view=_expect(need_doc, "userView", str, path=path),
                    status=_enum_value(need_doc, "status", NeedStatus, path=path),
                )
            )
        except ValueError as exc:
            raise ParseError(str(exc), field=path) from None
    nodes = []
    for i, node_doc in enumerate(_expect(doc, "nodes", list, path="$")):
        path = f"$.nodes[{i}]"
        if not isinstance(node_doc, dict):
            raise ParseError("expected an object", field=path)
        try:
            nodes.append(_parse_node(node_doc, path=path))
        except ValueError as exc:
            raise ParseError(str(exc), field=path) from None
    edges = []
    for i, edge_doc in enumerate(_expect(doc, "edges", list, path="$")):
        path = f"$.edges[{i}]"
        if not isinstance(edge_doc, dict):
            raise ParseError("expected an object", field=path)
        edges.append(
            Edge(
                source=_expect(edge_doc, "source", str, path=path),
                target=_expect(edge_doc, "target", str, path=path),
                kind=_enum_value(edge_doc, "kind", EdgeKind, path=path),
            )
        )
    weights_doc = _expect(doc, "weights", dict, path="$")
    try:
        weights = ScoreWeights(
            cohesion=_expect(weights_doc, "wCohesion", float, path="$.weights"),
            coupling=_expect(weights_doc, "wCoupling", float, path="$.weights"),
            abstraction=_expect(weights_doc, "wAbstraction", float, path="$.weights"),
        )
    except ValueError as exc:
        raise ParseError(str(exc), field="$.weights") from None
    constraints = _parse_constraints(
        _expect(doc, "constraints", dict, path="$"), path="$.constraints"
    )
    requirements = []
    for i, req_doc in enumerate(_expect(doc, "requirements", list, path="$")):
        path = f"$.requirements[{i}]"
        if not isinstance(req_doc, dict):
            raise ParseError("expected an object", field=path)
        try:
            requirements.append(
                Requirement(
                    id=_expect(req_doc, "id", str, path=path),
                    text=_expect(req_doc, "text", str, path=path),
                    source_directive_id=_expect(req_doc, "sourceDirectiveId", str, path=path),
                    capability_id=_expect(req_doc, "capabilityId", str, path=path),
                    criticality=_expect(req_doc, "criticality", float, path=path),
                    status=_enum_value(req_doc, "status", RequirementStatus, path=path),
                )
            )
        except ValueError as exc:
            raise ParseError(str(exc), field=path) from None
    audit = []
    for i, entry_doc in enumerate(_expect(doc, "auditLog", list, path="$")):
        path = f"$.auditLog[{i}]"
        if not isinstance(entry_doc, dict):
            raise ParseError("expected an object", field=path)
        audit.append(
            AuditEntry(
                at=_expect(entry_doc, "at", str, path=path),
                kind=_expect(entry_doc, "kind", str, path=path),
                entities=tuple(_str_list(entry_doc, "entities", path=path)),
            )
        )
    return meta, needs, nodes, edges, weights, constraints, requirements, audit


def document_violations(data: bytes | str) -> list[Violation]:
    """Full validation report for a document; parse failures still raise."""
    doc = parse_document(data)
    meta, needs, nodes, edges, weights, constraints, requirements, audit = _document_pieces(doc)
    violations = validate_graph(nodes, edges)
    if violations:
        return violations
    graph = build_graph(nodes, edges)
    selection = None
    if doc["selection"] is not None:
        selection_doc = _expect(doc, "selection", dict, path="$")
        selection = _parse_selection(selection_doc, graph, path="$.selection")
    try:
        Project(
            meta=meta,
            graph=graph,
            needs=tuple(needs),
            weights=weights,
            constraints=constraints,
            selection=selection,
            requirements=tuple(requirements),
            audit_log=tuple(audit),
        )
    except ValidationError as exc:
        return list(exc.violations)
    return []


def load_project(data: bytes | str) -> Project:
    """Parse, validate and assemble a project; raises ParseError or ValidationError."""
    doc = parse_document(data)
    meta, needs, nodes, edges, weights, constraints, requirements, audit = _document_pieces(doc)
    graph_violations = validate_graph(nodes, edges)
    if graph_violations:
        raise ValidationError(graph_violations)
    graph = build_graph(nodes, edges)
    selection = None
    if doc["selection"] is not None:
        selection = _parse_selection(
            _expect(doc, "selection", dict, path="$"), graph, path="$.selection"
        )
    return Project(
        meta=meta,
        graph=graph,
        needs=tuple(needs),
        weights=weights,
        constraints=constraints,
        selection=selection,
        requirements=tuple(requirements),
        audit_log=tuple(audit),
    )


def load_project_file(path: str | os.PathLike) -> Project:
    return load_project(Path(path).read_bytes())


def save_project_file(project: Project, path: str | os.PathLike) -> None:
    """Atomic write: temp file in the same directory, then rename."""
    target = Path(path)
    tmp = target.with_name(target.name + ".tmp")
    tmp.write_bytes(save_project(project))
    tmp.replace(target)


# -- mutations ----------------------------------------------------------

MUTATION_KINDS = (
    "addNeed", "retireNeed", "addNode", "removeNode", "addEdge", "removeEdge",
    "setDirective", "setWeights", "setConstraints", "recordSelection",
    "transform", "editRequirement",
)


def _rebuild_graph(project: Project, nodes, edges) -> FDGraph:
    violations = validate_graph(nodes, edges)
    if violations:
        raise ValidationError(violations)
    return build_graph(nodes, edges)


def _verify_selection(graph: FDGraph, selection: OptimizedSelection) -> None:
    """Cross-check a selection document against the graph it claims to plan."""
    problems: list[Violation] = []
    chosen = selection.chosen
    for member in chosen.members:
        if not graph.has_node(member):
            problems.append(Violation("selection_unknown_member", (member,), f"unknown member {member!r}"))
    if problems:
        raise ValidationError(problems)
    for member in chosen.members:
        expected = tuple(sorted(graph.directive_set(member)))
        if chosen.assignment.get(member) != expected:
            problems.append(
                Violation(
                    "selection_inconsistent",
                    (member,),
                    f"assignment for {member!r} does not match its directive set",
                )
            )
    expected_verdicts = feasibility(graph, chosen, selection.constraints)
    if selection.feasibility != expected_verdicts:
        problems.append(
            Violation("selection_inconsistent", chosen.members, "feasibility verdicts do not replay")
        )
    budget = selection.constraints.schedule_budget
    for inc in selection.increments:
        actual = sum(member_effort(graph, chosen, m) for m in inc.members)
        if not math.isclose(actual, inc.total_effort, rel_tol=0, abs_tol=1e-9):
            problems.append(
                Violation("selection_inconsistent", inc.members, "increment effort totals do not replay")
            )
        if inc.index is not None and budget > 0 and inc.total_effort > budget + 1e-9:
            problems.append(
                Violation("selection_inconsistent", inc.members, "increment exceeds the schedule budget")
            )
    if problems:
        raise ValidationError(problems)


def apply_mutation(
    project: Project,
    mutation: Mapping[str, Any],
    at: datetime | str | None = None,
) -> Project:
    """Apply one mutation transactionally; returns the new project version.

    Raises ParseError for malformed payloads, UnknownEntityError for missing
    targets and ValidationError when the result would break an invariant. The
    input project is immutable, so a raise leaves it untouched by construction.
    """
    if not isinstance(mutation, Mapping):
        raise ParseError("mutation must be an object")
    kind = mutation.get("kind")
    if kind not in MUTATION_KINDS:
        raise ParseError(
            f"unknown mutation kind {kind!r}; expected one of: {', '.join(MUTATION_KINDS)}",
            field="kind",
        )
    handler = _MUTATION_HANDLERS[kind]
    return handler(project, dict(mutation), at)


def _mutate_add_need(project: Project, m: dict, at) -> Project:
    need_id = _expect(m, "id", str, path="mutation")
    text = _expect(m, "text", str, path="mutation")
    user_view = m.get("userView", "direct")
    if not isinstance(user_view, str):
        raise ParseError("expected a string", field="mutation.userView")
    if project.has_need(need_id):
        raise ValidationError([Violation("duplicate_id", (need_id,), f"need {need_id!r} already exists")])
    try:
        need = Need(need_id, text, user_view)
    except ValueError as exc:
        raise ParseError(str(exc), field="mutation") from None
    return project.commit("addNeed", [need_id], at=at, needs=project.needs + (need,))


def _mutate_retire_need(project: Project, m: dict, at) -> Project:
    need_id = _expect(m, "id", str, path="mutation")
    need = project.need(need_id)
    updated = replace(need, status=NeedStatus.RETIRED)
    needs = tuple(updated if n.id == need_id else n for n in project.needs)
    return project.commit("retireNeed", [need_id], at=at, needs=needs)


def _mutate_add_node(project: Project, m: dict, at) -> Project:
    node_doc = _expect(m, "node", dict, path="mutation")
    try:
        node = _parse_node(node_doc, path="mutation.node")
    except ValueError as exc:
        raise ParseError(str(exc), field="mutation.node") from None
    edges = list(project.graph.edges)
    new_edges = []
    for i, edge_doc in enumerate(m.get("edges", [])):
        path = f"mutation.edges[{i}]"
        if not isinstance(edge_doc, dict):
            raise ParseError("expected an object", field=path)
        new_edges.append(
            Edge(
                source=_expect(edge_doc, "source", str, path=path),
                target=_expect(edge_doc, "target", str, path=path),
                kind=_enum_value(edge_doc, "kind", EdgeKind, path=path),
            )
        )
    if project.graph.has_node(node.id):
        raise ValidationError([Violation("duplicate_node_id", (node.id,), f"node {node.id!r} already exists")])
    graph = _rebuild_graph(project, list(project.graph.nodes) + [node], edges + new_edges)
    return project.commit(
        "addNode", [node.id], at=at, graph=graph, selection=None
    )


def _mutate_remove_node(project: Project, m: dict, at) -> Project:
    node_id = _expect(m, "id", str, path="mutation")
    graph = project.graph
    graph.node(node_id)
    removed = {node_id} | set(graph.descendants(node_id))
    nodes = [n for n in graph.nodes if n.id not in removed]
    edges = [e for e in graph.edges if e.source not in removed and e.target not in removed]
    new_graph = _rebuild_graph(project, nodes, edges)
    return project.commit(
        "removeNode", sorted(removed), at=at, graph=new_graph, selection=None
    )


def _mutate_add_edge(project: Project, m: dict, at) -> Project:
    # "kind" is the mutation discriminator, so the edge type travels as "edgeKind".
    edge = Edge(
        source=_expect(m, "source", str, path="mutation"),
        target=_expect(m, "target", str, path="mutation"),
        kind=_enum_value(m, "edgeKind", EdgeKind, path="mutation"),
    )
    graph = _rebuild_graph(project, project.graph.nodes, list(project.graph.edges) + [edge])
    return project.commit(
        "addEdge", [edge.source, edge.target], at=at, graph=graph, selection=None
    )


def _mutate_remove_edge(project: Project, m: dict, at) -> Project:
    source = _expect(m, "source", str, path="mutation")
    target = _expect(m, "target", str, path="mutation")
    edges = [e for e in project.graph.edges if not (e.source == source and e.target == target)]
    if len(edges) == len(project.graph.edges):
        raise UnknownEntityError("edge", f"{source}->{target}")
    graph = _rebuild_graph(project, project.graph.nodes, edges)
    return project.commit(
        "removeEdge", [source, target], at=at, graph=graph, selection=None
    )


def _mutate_set_directive(project: Project, m: dict, at) -> Project:
    node_id = _expect(m, "id", str, path="mutation")
    graph = project.graph
    if not graph.has_node(node_id) or graph.node(node_id).kind is not NodeKind.DIRECTIVE:
        raise UnknownEntityError("directive", node_id)
    node = graph.node(node_id)
    payload = node.directive

    relevance = m.get("relevance")
    category_raw = m.get("riskCategory")
    if relevance is not None and (isinstance(relevance, bool) or not isinstance(relevance, (int, float))):
        raise ParseError("expected a number", field="mutation.relevance")
    category = None
    if category_raw is not None:
        try:
            category = RiskCategory(category_raw)
        except ValueError:
            raise ParseError("unknown risk category", field="mutation.riskCategory") from None

    new_relevance, new_category = payload.relevance, payload.risk_category
    if relevance is not None and category is not None:
        new_relevance, new_category = float(relevance), category
    elif relevance is not None:
        new_relevance = float(relevance)
        try:
            new_category = category_for_relevance(new_relevance)
        except ValueError as exc:
            raise ParseError(str(exc), field="mutation.relevance") from None
    elif category is not None:
        new_category = category
        new_relevance = DEFAULT_RELEVANCE[category]

    effort = m.get("effort", payload.effort)
    if isinstance(effort, bool) or not isinstance(effort, (int, float)):
        raise ParseError("expected a number", field="mutation.effort")
    trl = m.get("techReadiness", payload.tech_readiness)
    if isinstance(trl, bool) or not isinstance(trl, int):
        raise ParseError("expected an integer", field="mutation.techReadiness")

    try:
        new_payload = Directive(new_relevance, new_category, float(effort), trl)
    except ValueError as exc:
        raise ValidationError([Violation("directive_invalid", (node_id,), str(exc))]) from None

    plan_inputs_changed = (
        new_payload.effort != payload.effort
        or new_payload.tech_readiness != payload.tech_readiness
    )
    new_node = replace(node, directive=new_payload)
    nodes = [new_node if n.id == node_id else n for n in graph.nodes]
    new_graph = _rebuild_graph(project, nodes, graph.edges)
    changes: dict[str, Any] = {"graph": new_graph}
    if plan_inputs_changed:
        # Effort/TRL feed the recorded increment plan; relevance-only edits
        # keep the selection and surface as criticality drift instead.
        changes["selection"] = None
    return project.commit("setDirective", [node_id], at=at, **changes)


def _mutate_set_weights(project: Project, m: dict, at) -> Project:
    try:
        weights = ScoreWeights(
            cohesion=_expect(m, "wCohesion", float, path="mutation"),
            coupling=_expect(m, "wCoupling", float, path="mutation"),
            abstraction=_expect(m, "wAbstraction", float, path="mutation"),
        )
    except ValueError as exc:
        raise ValidationError([Violation("weights_invalid", (), str(exc))]) from None
    return project.commit("setWeights", [], at=at, weights=weights)


def _mutate_set_constraints(project: Project, m: dict, at) -> Project:
    try:
        constraints = Constraints(
            schedule_budget=_expect(m, "scheduleBudget", float, path="mutation"),
            min_tech_readiness=_expect(m, "minTechReadiness", int, path="mutation"),
        )
    except ValueError as exc:
        raise ValidationError([Violation("constraints_invalid", (), str(exc))]) from None
    return project.commit("setConstraints", [], at=at, constraints=constraints)


def _mutate_record_selection(project: Project, m: dict, at) -> Project:
    selection_doc = _expect(m, "selection", dict, path="mutation")
    selection = _parse_selection(selection_doc, project.graph, path="mutation.selection")
    _verify_selection(project.graph, selection)
    return project.commit(
        "recordSelection", list(selection.chosen.members), at=at, selection=selection
    )


def _mutate_transform(project: Project, m: dict, at) -> Project:
    capability_id = _expect(m, "capability", str, path="mutation")
    drafts_doc = _expect(m, "drafts", dict, path="mutation")
    drafts: dict[str, list[str]] = {}
    for directive_id in sorted(drafts_doc):
        drafts[directive_id] = _str_list(drafts_doc, directive_id, path="mutation.drafts")
    updated, _created = transformation.transform_capability(project, capability_id, drafts, at=at)
    return updated


def _mutate_edit_requirement(project: Project, m: dict, at) -> Project:
    requirement_id = _expect(m, "id", str, path="mutation")
    requirement = project.requirement(requirement_id)
    text = m.get("text", requirement.text)
    if not isinstance(text, str):
        raise ParseError("expected a string", field="mutation.text")
    status = requirement.status
    if "status" in m:
        try:
            status = RequirementStatus(m["status"])
        except ValueError:
            raise ParseError("unknown requirement status", field="mutation.status") from None
    try:
        updated = replace(requirement, text=text, status=status)
    except ValueError as exc:
        raise ValidationError([Violation("requirement_invalid", (requirement_id,), str(exc))]) from None
    requirements = tuple(updated if r.id == requirement_id else r for r in project.requirements)
    return project.commit("editRequirement", [requirement_id], at=at, requirements=requirements)


_MUTATION_HANDLERS = {
    "addNeed": _mutate_add_need,
    "retireNeed": _mutate_retire_need,
    "addNode": _mutate_add_node,
    "removeNode": _mutate_remove_node,
    "addEdge": _mutate_add_edge,
    "removeEdge": _mutate_remove_edge,
    "setDirective": _mutate_set_directive,
    "setWeights": _mutate_set_weights,
    "setConstraints": _mutate_set_constraints,
    "recordSelection": _mutate_record_selection,
    "transform": _mutate_transform,
    "editRequirement": _mutate_edit_requirement,
}


# -- exports ------------------------------------------------------------


def export_matrix(project: Project) -> str:
    """The trace matrix as RFC-4180 CSV with LF line endings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(MATRIX_HEADER)
    for row in trace_matrix(project):
        writer.writerow([row[0], row[1], row[2], row[3], row[4], repr(row[5])])
    return buffer.getvalue()


def selection_document(selection: OptimizedSelection) -> dict:
    """JSON-safe selection payload, also used as the recordSelection body."""
    doc = _selection_to_doc(selection)
    assert doc is not None
    return doc
