"""Exception types raised across the capweave modules."""

from __future__ import annotations

from dataclasses import dataclass


class CapweaveError(Exception):
    """Base class for every error raised by this package."""


@dataclass(frozen=True)
class Violation:
    """A single invariant violation, identified by a machine-readable code.

    ``entities`` lists the node/edge/field identifiers involved, in a
    deterministic order.
    """

    code: str
    entities: tuple[str, ...] = ()
    message: str = ""

    def to_payload(self) -> dict:
        return {
            "code": self.code,
            "entities": list(self.entities),
            "message": self.message,
        }


class ValidationError(CapweaveError):
    """One or more invariant violations; carries the full violation list."""

    def __init__(self, violations):
        self.violations = list(violations)
        codes = ", ".join(sorted({v.code for v in self.violations}))
        super().__init__(f"validation failed: {codes}")

    def has(self, code: str) -> bool:
        return any(v.code == code for v in self.violations)


class ParseError(CapweaveError):
    """Malformed project document; ``line`` or ``field`` locates the problem."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = ""
        if line is not None:
            where = f" (line {line})"
        elif field is not None:
            where = f" (field {field})"
        super().__init__(message + where)


class UnknownEntityError(CapweaveError):
    """A referenced entity id does not exist (or is of the wrong kind)."""

    def __init__(self, kind: str, entity_id: str):
        self.kind = kind
        self.entity_id = entity_id
        super().__init__(f"unknown {kind}: {entity_id!r}")


class NotInternalNodeError(CapweaveError):
    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"node {node_id!r} is not a functional (internal) node")


class AncestorOverlapError(CapweaveError):
    """Two nodes are comparable (one is an ancestor of the other, or equal)."""

    def __init__(self, a: str, b: str):
        self.a, self.b = a, b
        super().__init__(f"nodes {a!r} and {b!r} overlap by ancestry")


class EmptySetError(CapweaveError):
    def __init__(self, what: str = "node set"):
        super().__init__(f"{what} must be non-empty")


class InvalidCandidateError(CapweaveError):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"invalid candidate: {reason}")


class GraphTooLargeForExactError(CapweaveError):
    def __init__(self, count: int, limit: int, what: str = "internal nodes"):
        super().__init__(
            f"exact enumeration refused: {count} {what} exceeds limit {limit}"
        )


class NoValidCandidateError(CapweaveError):
    def __init__(self, detail: str = ""):
        super().__init__("graph admits no valid candidate capability set"
                         + (f": {detail}" if detail else ""))


class MixedGraphCandidatesError(CapweaveError):
    def __init__(self):
        super().__init__("candidates were formulated against different graphs")


class NoFeasibleSelectionError(CapweaveError):
    def __init__(self):
        super().__init__("every member of every candidate is infeasible under the constraints")


class MemberExceedsBudgetError(CapweaveError):
    def __init__(self, member: str, effort: float, budget: float):
        self.member = member
        self.effort = effort
        self.budget = budget
        super().__init__(
            f"member {member!r} needs {effort} effort units, above the per-increment budget {budget}"
        )


class NoSelectionError(CapweaveError):
    def __init__(self):
        super().__init__("project has no recorded capability selection")


class DirectiveNotInChosenCapabilityError(CapweaveError):
    def __init__(self, directive_id: str, capability_id: str):
        self.directive_id = directive_id
        self.capability_id = capability_id
        super().__init__(
            f"directive {directive_id!r} is not assigned to chosen capability {capability_id!r}"
        )


class CapabilityDeferredError(CapweaveError):
    def __init__(self, capability_id: str):
        self.capability_id = capability_id
        super().__init__(f"capability {capability_id!r} is deferred; transform its directives later")


class EmptyRequirementListError(CapweaveError):
    def __init__(self, directive_id: str):
        super().__init__(f"no requirement texts supplied for directive {directive_id!r}")


class NoSourceNeedError(CapweaveError):
    def __init__(self, requirement_id: str):
        self.requirement_id = requirement_id
        super().__init__(f"requirement {requirement_id!r} cannot be traced back to any need")
