"""The persistent project aggregate: needs, graph, weights, selection, requirements.

Projects are immutable; every committed change produces a new value with a
bumped version and one appended audit entry, which keeps readers safe under
the single-writer/multi-reader contract and makes audit length equal the
version delta by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import TYPE_CHECKING, Iterable

from .errors import UnknownEntityError, ValidationError, Violation
from .graph import FDGraph, Need, NodeKind
from .metrics import ScoreWeights
from .optimization import Constraints, OptimizedSelection

if TYPE_CHECKING:  # pragma: no cover
    from .transformation import Requirement

# Referential-integrity violation codes.
DANGLING_NEED_REF = "dangling_need_ref"
DUPLICATE_ID = "duplicate_id"
SELECTION_UNKNOWN_MEMBER = "selection_unknown_member"
SELECTION_INVALID_CANDIDATE = "selection_invalid_candidate"
SELECTION_INCONSISTENT = "selection_inconsistent"


@dataclass(frozen=True)
class ProjectMeta:
    name: str
    version: int = 1
    problem_domain: str = ""
    solution_domain: str = ""


@dataclass(frozen=True)
class AuditEntry:
    at: str
    kind: str
    entities: tuple[str, ...] = ()


def now_stamp(at: datetime | None = None) -> str:
    dt = at or datetime.now(timezone.utc)
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class Project:
    meta: ProjectMeta
    graph: FDGraph
    needs: tuple[Need, ...] = ()
    weights: ScoreWeights = ScoreWeights()
    constraints: Constraints = Constraints()
    selection: OptimizedSelection | None = None
    requirements: tuple["Requirement", ...] = ()
    audit_log: tuple[AuditEntry, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "needs", tuple(sorted(self.needs, key=lambda n: n.id)))
        object.__setattr__(
            self, "requirements", tuple(sorted(self.requirements, key=lambda r: r.id))
        )
        object.__setattr__(self, "_needs_by_id", {n.id: n for n in self.needs})
        object.__setattr__(self, "_reqs_by_id", {r.id: r for r in self.requirements})
        violations = validate_project(self)
        if violations:
            raise ValidationError(violations)

    # -- lookups -------------------------------------------------------

    def need(self, need_id: str) -> Need:
        try:
            return self._needs_by_id[need_id]
        except KeyError:
            raise UnknownEntityError("need", need_id) from None

    def has_need(self, need_id: str) -> bool:
        return need_id in self._needs_by_id

    def requirement(self, requirement_id: str) -> "Requirement":
        try:
            return self._reqs_by_id[requirement_id]
        except KeyError:
            raise UnknownEntityError("requirement", requirement_id) from None

    def has_requirement(self, requirement_id: str) -> bool:
        return requirement_id in self._reqs_by_id

    def entity_kind(self, entity_id: str) -> str | None:
        """'need', 'node', 'directive' or 'requirement' for a known id, else None."""
        if entity_id in self._needs_by_id:
            return "need"
        if self.graph.has_node(entity_id):
            if self.graph.node(entity_id).kind is NodeKind.DIRECTIVE:
                return "directive"
            return "node"
        if entity_id in self._reqs_by_id:
            return "requirement"
        return None

    # -- selection-derived views ----------------------------------------

    @property
    def chosen_members(self) -> tuple[str, ...]:
        return self.selection.chosen.members if self.selection else ()

    def owners_of_directive(self, directive_id: str) -> tuple[str, ...]:
        """Chosen members whose assignment includes the directive."""
        if self.selection is None:
            return ()
        return tuple(
            m for m in self.selection.chosen.members
            if directive_id in self.selection.chosen.assignment[m]
        )

    def requirements_of_directive(self, directive_id: str) -> tuple["Requirement", ...]:
        return tuple(r for r in self.requirements if r.source_directive_id == directive_id)

    def requirements_of_capability(self, capability_id: str) -> tuple["Requirement", ...]:
        if self.selection is None:
            return ()
        assigned = set(self.selection.chosen.assignment.get(capability_id, ()))
        return tuple(r for r in self.requirements if r.source_directive_id in assigned)

    # -- commit ----------------------------------------------------------

    def commit(
        self,
        kind: str,
        entities: Iterable[str],
        at: datetime | str | None = None,
        **changes,
    ) -> "Project":
        """New project version with one audit entry and the given field changes."""
        stamp = at if isinstance(at, str) else now_stamp(at)
        entry = AuditEntry(at=stamp, kind=kind, entities=tuple(entities))
        meta = replace(self.meta, version=self.meta.version + 1)
        return replace(
            self,
            meta=meta,
            audit_log=self.audit_log + (entry,),
            **changes,
        )


def validate_project(project: Project) -> list[Violation]:
    """Referential integrity across the aggregate.

    Requirements are allowed to reference directives or capabilities that no
    longer exist; those are orphan findings for the transformation report, not
    hard failures, so that history survives graph edits.
    """
    violations: list[Violation] = []
    need_ids = {n.id for n in project.needs}
    node_ids = set(project.graph.node_ids)
    req_ids = {r.id for r in project.requirements}

    if len(need_ids) != len(project.needs):
        violations.append(Violation(DUPLICATE_ID, (), "duplicate need ids"))
    if len(req_ids) != len(project.requirements):
        violations.append(Violation(DUPLICATE_ID, (), "duplicate requirement ids"))
    for pool_a, pool_b, what in (
        (need_ids, node_ids, "need/node"),
        (need_ids, req_ids, "need/requirement"),
        (node_ids, req_ids, "node/requirement"),
    ):
        clash = sorted(pool_a & pool_b)
        if clash:
            violations.append(
                Violation(DUPLICATE_ID, tuple(clash), f"{what} ids must not collide")
            )

    for node in project.graph.nodes:
        for ref in sorted(node.need_refs):
            if ref not in need_ids:
                violations.append(
                    Violation(DANGLING_NEED_REF, (node.id, ref), f"node {node.id!r} references unknown need {ref!r}")
                )

    selection = project.selection
    if selection is not None:
        members = selection.chosen.members
        unknown = sorted(m for m in members if m not in node_ids)
        if unknown:
            violations.append(
                Violation(SELECTION_UNKNOWN_MEMBER, tuple(unknown), "selection references removed nodes")
            )
        else:
            from .graph import candidate_invalid_reason

            reason = candidate_invalid_reason(project.graph, members)
            if reason is not None:
                violations.append(
                    Violation(SELECTION_INVALID_CANDIDATE, tuple(members), reason)
                )
            else:
                assigned_ids = {d for ds in selection.chosen.assignment.values() for d in ds}
                if not assigned_ids <= node_ids:
                    violations.append(
                        Violation(
                            SELECTION_INCONSISTENT,
                            tuple(sorted(assigned_ids - node_ids)),
                            "selection assignment references removed directives",
                        )
                    )
        if set(selection.feasibility) != set(members):
            violations.append(
                Violation(SELECTION_INCONSISTENT, tuple(members), "feasibility verdicts must cover exactly the members")
            )
        placed = sorted(m for inc in selection.increments for m in inc.members)
        if placed != sorted(members):
            violations.append(
                Violation(SELECTION_INCONSISTENT, tuple(members), "increments must place every member exactly once")
            )

    return violations
