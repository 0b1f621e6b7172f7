// Small graph/impact payloads shaped exactly like the API's responses.

import type { GraphPayload, ImpactReportPayload } from "../src/types.js";

export function smallGraph(): GraphPayload {
  return {
    mission: "m",
    depth: 2,
    chosenMembers: [],
    nodes: [
      { id: "m", kind: "mission", label: "mission", needRefs: [], level: 0 },
      { id: "a", kind: "functional", label: "left branch", needRefs: ["nd1"], level: 1 },
      { id: "b", kind: "functional", label: "right branch", needRefs: ["nd2"], level: 1 },
      { id: "d1", kind: "directive", label: "first leaf", needRefs: ["nd1"], level: 2,
        directive: { relevance: 1.0, riskCategory: "Catastrophic", effort: 5, techReadiness: 9 } },
      { id: "d2", kind: "directive", label: "second leaf", needRefs: ["nd1"], level: 2,
        directive: { relevance: 0.4, riskCategory: "Marginal", effort: 5, techReadiness: 9 } },
      { id: "d3", kind: "directive", label: "third leaf", needRefs: ["nd2"], level: 2,
        directive: { relevance: 0.7, riskCategory: "Critical", effort: 5, techReadiness: 9 } },
      { id: "d4", kind: "directive", label: "fourth leaf", needRefs: ["nd2"], level: 2,
        directive: { relevance: 0.1, riskCategory: "Negligible", effort: 5, techReadiness: 9 } },
    ],
    edges: [
      { source: "m", target: "a", kind: "decomposition" },
      { source: "m", target: "b", kind: "decomposition" },
      { source: "a", target: "d1", kind: "decomposition" },
      { source: "a", target: "d2", kind: "decomposition" },
      { source: "b", target: "d3", kind: "decomposition" },
      { source: "b", target: "d4", kind: "decomposition" },
      { source: "b", target: "d2", kind: "intersection" },
    ],
  };
}

export function impactOfA(): ImpactReportPayload {
  return {
    trigger: { kind: "node", id: "a" },
    direction: "down",
    affectedNodes: [],
    affectedDirectives: { d1: 1.0, d2: 0.4 },
    affectedCapabilities: {},
    affectedRequirements: ["d1-r1"],
    rationale: {
      d1: { link: "decomposition", severity: "affected" },
      d2: { link: "decomposition", severity: "affected" },
      "d1-r1": { link: "transformation", severity: "affected" },
    },
  };
}
