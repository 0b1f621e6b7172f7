"""Turning directives of chosen capabilities into solution-space requirements.

Requirement text is always human-authored; this module stores it, links it
back to its source directive and owning capability, and audits the result. A
directive maps to one or more requirements. Criticality is snapshotted from
the directive's relevance at transformation time; later relevance edits show
up as drift findings rather than silently rewriting history.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from typing import Iterable, Mapping

from .errors import (
    CapabilityDeferredError,
    DirectiveNotInChosenCapabilityError,
    EmptyRequirementListError,
    NoSelectionError,
    UnknownEntityError,
)
from .project import Project


class RequirementStatus(str, Enum):
    DRAFT = "draft"
    SPECIFIED = "specified"


@dataclass(frozen=True)
class Requirement:
    """A solution-domain statement derived from exactly one directive."""

    id: str
    text: str
    source_directive_id: str
    capability_id: str
    criticality: float
    status: RequirementStatus = RequirementStatus.DRAFT

    def __post_init__(self):
        if not self.id:
            raise ValueError("requirement id must be non-empty")
        if not self.text or not self.text.strip():
            raise ValueError(f"requirement {self.id!r} must have non-empty text")
        if not 0.0 <= self.criticality <= 1.0:
            raise ValueError(f"criticality must be in [0, 1], got {self.criticality}")


def _require_chosen_feasible(project: Project, capability_id: str) -> None:
    if project.selection is None:
        raise NoSelectionError()
    if capability_id not in project.selection.chosen.members:
        raise UnknownEntityError("capability", capability_id)
    if not project.selection.feasibility[capability_id].feasible:
        raise CapabilityDeferredError(capability_id)


def _next_requirement_ids(project: Project, directive_id: str, count: int) -> list[str]:
    taken = {r.id for r in project.requirements}
    ids: list[str] = []
    k = len(project.requirements_of_directive(directive_id))
    while len(ids) < count:
        k += 1
        rid = f"{directive_id}-r{k}"
        if rid not in taken:
            ids.append(rid)
    return ids


def transform_directive(
    project: Project,
    directive_id: str,
    capability_id: str,
    texts: Iterable[str],
    at: datetime | str | None = None,
) -> tuple[Project, list[Requirement]]:
    """One requirement per text, all sourced from the same directive.

    The directive must be assigned to the named capability, and that
    capability must be chosen and feasible.
    """
    _require_chosen_feasible(project, capability_id)
    assignment = project.selection.chosen.assignment[capability_id]
    if directive_id not in assignment:
        raise DirectiveNotInChosenCapabilityError(directive_id, capability_id)
    texts = list(texts)
    if not texts:
        raise EmptyRequirementListError(directive_id)
    criticality = project.graph.node(directive_id).directive.relevance
    created = [
        Requirement(
            id=rid,
            text=text,
            source_directive_id=directive_id,
            capability_id=capability_id,
            criticality=criticality,
        )
        for rid, text in zip(_next_requirement_ids(project, directive_id, len(texts)), texts)
    ]
    updated = project.commit(
        "transform",
        [directive_id] + [r.id for r in created],
        at=at,
        requirements=project.requirements + tuple(created),
    )
    return updated, created


def transform_capability(
    project: Project,
    capability_id: str,
    drafts: Mapping[str, Iterable[str]],
    at: datetime | str | None = None,
) -> tuple[Project, list[Requirement]]:
    """Batch transformation over a capability's directives.

    ``drafts`` maps directive ids to requirement texts and must stay within
    the capability's assignment. An empty mapping is a permitted no-op. The
    whole batch commits as one audit entry.
    """
    _require_chosen_feasible(project, capability_id)
    assignment = project.selection.chosen.assignment[capability_id]
    drafts = {d: list(texts) for d, texts in drafts.items()}
    for directive_id in drafts:
        if directive_id not in assignment:
            raise DirectiveNotInChosenCapabilityError(directive_id, capability_id)
        if not drafts[directive_id]:
            raise EmptyRequirementListError(directive_id)
    if not drafts:
        return project, []

    created: list[Requirement] = []
    working = project
    for directive_id in sorted(drafts):
        criticality = working.graph.node(directive_id).directive.relevance
        ids = _next_requirement_ids(working, directive_id, len(drafts[directive_id]))
        batch = [
            Requirement(
                id=rid,
                text=text,
                source_directive_id=directive_id,
                capability_id=capability_id,
                criticality=criticality,
            )
            for rid, text in zip(ids, drafts[directive_id])
        ]
        created.extend(batch)
        working = replace(working, requirements=working.requirements + tuple(batch))
    updated = project.commit(
        "transform",
        [capability_id] + [r.id for r in created],
        at=at,
        requirements=working.requirements,
    )
    return updated, created


@dataclass(frozen=True)
class IncompleteFinding:
    capability_id: str
    directive_id: str


@dataclass(frozen=True)
class DriftFinding:
    requirement_id: str
    recorded: float
    current: float


@dataclass(frozen=True)
class TransformationReport:
    incomplete: tuple[IncompleteFinding, ...]
    orphans: tuple[str, ...]
    drift: tuple[DriftFinding, ...]

    @property
    def clean(self) -> bool:
        return not (self.incomplete or self.orphans or self.drift)


def validate_transformation(project: Project) -> TransformationReport:
    """Report untransformed directives, orphaned requirements and criticality drift."""
    incomplete: list[IncompleteFinding] = []
    if project.selection is not None:
        transformed = {r.source_directive_id for r in project.requirements}
        for member in project.selection.chosen.members:
            if not project.selection.feasibility[member].feasible:
                continue
            for directive_id in project.selection.chosen.assignment[member]:
                if directive_id not in transformed:
                    incomplete.append(IncompleteFinding(member, directive_id))

    orphans = tuple(
        r.id for r in project.requirements
        if not project.graph.has_node(r.source_directive_id)
    )

    drift: list[DriftFinding] = []
    for r in project.requirements:
        if not project.graph.has_node(r.source_directive_id):
            continue
        current = project.graph.node(r.source_directive_id).directive.relevance
        if current != r.criticality:
            drift.append(DriftFinding(r.id, recorded=r.criticality, current=current))

    return TransformationReport(tuple(incomplete), orphans, tuple(drift))
