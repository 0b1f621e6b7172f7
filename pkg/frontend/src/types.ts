// Payload types mirroring the workbench HTTP API. The UI never computes
// metrics locally: every number rendered comes verbatim from these shapes.

export type NodeKind = "mission" | "functional" | "directive";
export type EdgeKind = "decomposition" | "intersection" | "refinement";

export interface DirectivePayload {
  relevance: number;
  riskCategory: string;
  effort: number;
  techReadiness: number;
}

export interface GraphNodePayload {
  id: string;
  kind: NodeKind;
  label: string;
  needRefs: string[];
  level: number;
  directive?: DirectivePayload;
}

export interface GraphEdgePayload {
  source: string;
  target: string;
  kind: EdgeKind;
}

export interface GraphPayload {
  mission: string;
  depth: number;
  nodes: GraphNodePayload[];
  edges: GraphEdgePayload[];
  chosenMembers: string[];
}

export interface ScorePayload {
  cohesion: number;
  coupling: number;
  abstractionImbalance: number;
  composite: number;
}

export interface CandidatePayload {
  members: string[];
  score: ScorePayload;
  assignment: Record<string, string[]>;
}

export interface WeightsPayload {
  wCohesion: number;
  wCoupling: number;
  wAbstraction: number;
}

export interface CandidatesPayload {
  strategy: string;
  weights: WeightsPayload;
  candidates: CandidatePayload[];
}

export interface ConstraintsPayload {
  scheduleBudget: number;
  minTechReadiness: number;
}

export interface FeasibilityPayload {
  feasible: boolean;
  blockedBy: string[];
}

export interface IncrementPayload {
  index: number | null;
  members: string[];
  totalEffort: number;
}

export interface SelectionPayload {
  members: string[];
  score: ScorePayload;
  assignment: Record<string, string[]>;
  feasibility: Record<string, FeasibilityPayload>;
  increments: IncrementPayload[];
  constraints: ConstraintsPayload;
}

export interface RationalePayload {
  link: string;
  severity: string;
}

export interface ImpactReportPayload {
  trigger: { kind: string; id: string };
  direction: string | null;
  affectedNodes: string[];
  affectedDirectives: Record<string, number>;
  affectedCapabilities: Record<string, number>;
  affectedRequirements: string[];
  rationale: Record<string, RationalePayload>;
}

export interface TraceStepPayload {
  entity: { kind: string; id: string };
  space: string;
  link: string | null;
  edgeKind: string | null;
}

export interface TracePayload {
  query: { entity: { kind: string; id: string }; direction: string };
  paths: { steps: TraceStepPayload[] }[];
}

export interface ErrorPayload {
  error: {
    type: string;
    message: string;
    violations?: { code: string; entities: string[]; message: string }[];
  };
}

export type ImpactDirection = "down" | "up" | "both";
