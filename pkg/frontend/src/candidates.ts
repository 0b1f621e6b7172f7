// Candidate list rendering. Order and numbers come from the API payload
// verbatim; re-weighting means re-fetching, never recomputing locally.

import type { CandidatesPayload, SelectionPayload } from "./types.js";

export interface CandidateRow {
  members: string[];
  cohesion: number;
  coupling: number;
  abstractionImbalance: number;
  composite: number;
}

export function candidateRows(payload: CandidatesPayload): CandidateRow[] {
  return payload.candidates.map((candidate) => ({
    members: [...candidate.members],
    cohesion: candidate.score.cohesion,
    coupling: candidate.score.coupling,
    abstractionImbalance: candidate.score.abstractionImbalance,
    composite: candidate.score.composite,
  }));
}

export function renderCandidateList(
  container: Element,
  payload: CandidatesPayload,
  onInspect?: (members: string[]) => void,
): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const list = doc.createElement("ol");
  list.className = "candidate-list";
  for (const row of candidateRows(payload)) {
    const item = doc.createElement("li");
    item.className = "candidate";
    item.dataset.members = row.members.join(",");

    const title = doc.createElement("strong");
    title.textContent = row.members.join(", ");
    item.appendChild(title);

    const scores = doc.createElement("span");
    scores.className = "candidate__scores";
    scores.textContent =
      ` composite ${row.composite} | cohesion ${row.cohesion}` +
      ` | coupling ${row.coupling} | imbalance ${row.abstractionImbalance}`;
    item.appendChild(scores);

    if (onInspect) {
      item.addEventListener("click", () => onInspect(row.members));
    }
    list.appendChild(item);
  }
  container.appendChild(list);
}

export function renderSelection(container: Element, selection: SelectionPayload): void {
  const doc = container.ownerDocument;
  container.replaceChildren();

  const heading = doc.createElement("h3");
  heading.textContent = `Chosen: ${selection.members.join(", ")}`;
  container.appendChild(heading);

  const plan = doc.createElement("ul");
  plan.className = "increment-plan";
  for (const increment of selection.increments) {
    const item = doc.createElement("li");
    const label = increment.index === null ? "deferred" : `increment ${increment.index}`;
    item.textContent = `${label}: ${increment.members.join(", ")} (${increment.totalEffort} effort)`;
    plan.appendChild(item);
  }
  container.appendChild(plan);

  const deferred = Object.entries(selection.feasibility).filter(([, v]) => !v.feasible);
  if (deferred.length > 0) {
    const reasons = doc.createElement("ul");
    reasons.className = "deferral-reasons";
    for (const [member, verdict] of deferred) {
      const item = doc.createElement("li");
      item.textContent = `${member} deferred: directives below the TRL floor: ${verdict.blockedBy.join(", ")}`;
      reasons.appendChild(item);
    }
    container.appendChild(reasons);
  }
}
