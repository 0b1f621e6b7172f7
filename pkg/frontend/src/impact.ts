// Overlay state derived from an impact report. The entity set is taken from
// the payload verbatim; no entity is added or dropped on the way to the view.

import type { ImpactReportPayload } from "./types.js";

export interface Overlay {
  trigger: string;
  entities: Set<string>;
  severity: Map<string, string>;
  weights: Map<string, number>;
}

export function overlayFromImpact(report: ImpactReportPayload): Overlay {
  const entities = new Set<string>([
    ...report.affectedNodes,
    ...Object.keys(report.affectedDirectives),
    ...Object.keys(report.affectedCapabilities),
    ...report.affectedRequirements,
  ]);
  const severity = new Map<string, string>();
  for (const id of entities) {
    severity.set(id, report.rationale[id]?.severity ?? "affected");
  }
  const weights = new Map<string, number>();
  for (const [id, weight] of Object.entries(report.affectedDirectives)) {
    weights.set(id, weight);
  }
  for (const [id, weight] of Object.entries(report.affectedCapabilities)) {
    weights.set(id, weight);
  }
  return { trigger: report.trigger.id, entities, severity, weights };
}
