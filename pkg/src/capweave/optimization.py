"""Selection among ranked candidates under schedule and technology constraints.

A member is feasible when every directive assigned to it meets the minimum
technology-readiness level. Feasible members are packed into increments by
first-fit-decreasing on member effort (the sum of its directives' efforts);
deferred members land in a trailing increment with no index. The selection is
a pure function of its inputs, so recorded selections replay deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import MemberExceedsBudgetError, NoFeasibleSelectionError
from .formulation import CapabilitySet
from .graph import FDGraph


@dataclass(frozen=True)
class Constraints:
    """Schedule and technology limits; a zero budget disables schedule packing."""

    schedule_budget: float = 0.0
    min_tech_readiness: int = 1

    def __post_init__(self):
        if self.schedule_budget < 0:
            raise ValueError(f"schedule budget must be >= 0, got {self.schedule_budget}")
        if not 1 <= int(self.min_tech_readiness) <= 9:
            raise ValueError(f"minimum TRL must be in 1..9, got {self.min_tech_readiness}")
        object.__setattr__(self, "schedule_budget", float(self.schedule_budget))
        object.__setattr__(self, "min_tech_readiness", int(self.min_tech_readiness))

    @property
    def unbounded_budget(self) -> bool:
        return self.schedule_budget == 0 or math.isinf(self.schedule_budget)


@dataclass(frozen=True)
class MemberFeasibility:
    feasible: bool
    blocked_by: tuple[str, ...] = ()


@dataclass(frozen=True)
class Increment:
    """One delivery increment; ``index`` is None for the deferred bucket."""

    index: int | None
    members: tuple[str, ...]
    total_effort: float


@dataclass(frozen=True)
class OptimizedSelection:
    chosen: CapabilitySet
    feasibility: dict[str, MemberFeasibility]
    increments: tuple[Increment, ...]
    constraints: Constraints

    @property
    def feasible_members(self) -> tuple[str, ...]:
        return tuple(m for m in self.chosen.members if self.feasibility[m].feasible)

    @property
    def deferred_members(self) -> tuple[str, ...]:
        return tuple(m for m in self.chosen.members if not self.feasibility[m].feasible)


def member_effort(graph: FDGraph, candidate: CapabilitySet, member: str) -> float:
    return sum(graph.node(d).directive.effort for d in candidate.assignment[member])


def feasibility(
    graph: FDGraph,
    candidate: CapabilitySet,
    constraints: Constraints,
) -> dict[str, MemberFeasibility]:
    """Verdict per member: feasible, or deferred with the violating directives."""
    verdicts: dict[str, MemberFeasibility] = {}
    for member in candidate.members:
        blocked = tuple(
            d for d in candidate.assignment[member]
            if graph.node(d).directive.tech_readiness < constraints.min_tech_readiness
        )
        verdicts[member] = MemberFeasibility(feasible=not blocked, blocked_by=blocked)
    return verdicts


def _pack_first_fit_decreasing(
    efforts: dict[str, float],
    budget: float,
) -> list[tuple[list[str], float]]:
    bins: list[tuple[list[str], float]] = []
    for member in sorted(efforts, key=lambda m: (-efforts[m], m)):
        placed = False
        for i, (members, total) in enumerate(bins):
            if total + efforts[member] <= budget:
                bins[i] = (members + [member], total + efforts[member])
                placed = True
                break
        if not placed:
            bins.append(([member], efforts[member]))
    return bins


def optimize(
    graph: FDGraph,
    ranked_candidates: Sequence[CapabilitySet],
    constraints: Constraints = Constraints(),
) -> OptimizedSelection:
    """Choose the best-ranked candidate with at least one feasible member and
    plan its increments.

    Raises ``NoFeasibleSelectionError`` when the constraints block every
    member of every candidate, and ``MemberExceedsBudgetError`` when a single
    feasible member of the chosen candidate cannot fit any increment.
    """
    if not ranked_candidates:
        raise ValueError("ranked candidate list must be non-empty")

    chosen: CapabilitySet | None = None
    verdicts: dict[str, MemberFeasibility] = {}
    for candidate in ranked_candidates:
        verdicts = feasibility(graph, candidate, constraints)
        if any(v.feasible for v in verdicts.values()):
            chosen = candidate
            break
    if chosen is None:
        raise NoFeasibleSelectionError()

    efforts = {
        m: member_effort(graph, chosen, m)
        for m in chosen.members
        if verdicts[m].feasible
    }
    if constraints.unbounded_budget:
        packed = [(sorted(efforts), sum(efforts.values()))] if efforts else []
    else:
        budget = constraints.schedule_budget
        for member, effort in sorted(efforts.items()):
            if effort > budget:
                raise MemberExceedsBudgetError(member, effort, budget)
        packed = _pack_first_fit_decreasing(efforts, budget)

    increments = [
        Increment(index=i + 1, members=tuple(sorted(members)), total_effort=total)
        for i, (members, total) in enumerate(packed)
    ]
    deferred = sorted(m for m in chosen.members if not verdicts[m].feasible)
    if deferred:
        deferred_effort = sum(member_effort(graph, chosen, m) for m in deferred)
        increments.append(Increment(index=None, members=tuple(deferred), total_effort=deferred_effort))
    return OptimizedSelection(
        chosen=chosen,
        feasibility=verdicts,
        increments=tuple(increments),
        constraints=constraints,
    )
