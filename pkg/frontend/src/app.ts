// Workbench wiring: graph view, impact exploration, candidate tuning.
//
// One project session against one API instance. View refreshes are
// on-action (the API has no push channel); in-flight responses resolve
// last-write-wins, and mutations re-render only after the server commits.

import { WorkbenchClient, ApiError } from "./client.js";
import { GraphView } from "./graphView.js";
import { overlayFromImpact, type Overlay } from "./impact.js";
import { renderCandidateList, renderSelection } from "./candidates.js";
import type { ImpactDirection } from "./types.js";

export interface AppElements {
  graph: Element;
  candidates: Element;
  selection: Element;
  status: Element;
  direction: HTMLSelectElement;
  wCohesion: HTMLInputElement;
  wCoupling: HTMLInputElement;
  wAbstraction: HTMLInputElement;
  budget: HTMLInputElement;
  minTrl: HTMLInputElement;
  commit: HTMLButtonElement;
}

export class WorkbenchApp {
  private view: GraphView | null = null;
  private overlay: Overlay | null = null;
  private requestSeq = 0;

  constructor(
    private client: WorkbenchClient,
    private elements: AppElements,
  ) {}

  weightsParam(): string {
    const { wCohesion, wCoupling, wAbstraction } = this.elements;
    return `${wCohesion.value},${wCoupling.value},${wAbstraction.value}`;
  }

  async start(): Promise<void> {
    await this.refreshGraph();
    await this.refreshCandidates();
    const refetch = () => void this.refreshCandidates();
    this.elements.wCohesion.addEventListener("input", refetch);
    this.elements.wCoupling.addEventListener("input", refetch);
    this.elements.wAbstraction.addEventListener("input", refetch);
    this.elements.commit.addEventListener("click", () => void this.commitSelection());
  }

  async refreshGraph(): Promise<void> {
    try {
      const graph = await this.client.getGraph();
      this.view = new GraphView(this.elements.graph, graph, {
        onNodeClick: (id) => void this.exploreImpact(id),
      });
      this.view.applyOverlay(this.overlay);
      this.setStatus("");
    } catch (error) {
      this.setStatus(this.describe(error), true);
    }
  }

  /** Fetch the impact of changing an entity and highlight it; clicking a
   * highlighted node re-roots the exploration there. */
  async exploreImpact(entityId: string, direction?: ImpactDirection): Promise<void> {
    const chosen = direction ?? (this.elements.direction.value as ImpactDirection);
    try {
      const report = await this.client.postImpact(entityId, chosen);
      this.overlay = overlayFromImpact(report);
      this.view?.applyOverlay(this.overlay);
      const size = this.overlay.entities.size;
      this.setStatus(`impact of ${entityId} (${chosen}): ${size} entities affected`);
    } catch (error) {
      this.setStatus(this.describe(error), true);
    }
  }

  async refreshCandidates(): Promise<void> {
    const seq = ++this.requestSeq;
    try {
      const payload = await this.client.getCandidates(this.weightsParam());
      if (seq !== this.requestSeq) return; // a newer request won
      renderCandidateList(this.elements.candidates, payload);
      this.setStatus(`${payload.candidates.length} candidate sets ranked`);
    } catch (error) {
      if (seq !== this.requestSeq) return;
      this.setStatus(this.describe(error), true);
    }
  }

  async commitSelection(): Promise<void> {
    const constraints = {
      scheduleBudget: Number(this.elements.budget.value),
      minTechReadiness: Number(this.elements.minTrl.value),
    };
    try {
      const selection = await this.client.postSelection(constraints, this.weightsParam());
      renderSelection(this.elements.selection, selection);
      await this.refreshGraph(); // chosen members changed styling
      this.setStatus(`selection committed: ${selection.members.join(", ")}`);
    } catch (error) {
      this.setStatus(this.describe(error), true);
    }
  }

  currentOverlay(): Overlay | null {
    return this.overlay;
  }

  graphView(): GraphView | null {
    return this.view;
  }

  private describe(error: unknown): string {
    if (error instanceof ApiError) {
      if (error.status === 422) return `infeasible: ${error.message}`;
      if (error.status === 404) return `not found: ${error.message}`;
      return `error ${error.status}: ${error.message}`;
    }
    return `cannot reach the API: ${String(error)}`;
  }

  private setStatus(text: string, isError = false): void {
    this.elements.status.textContent = text;
    this.elements.status.classList.toggle("status--error", isError);
  }
}

export function mount(document: Document, baseUrl: string): WorkbenchApp {
  const byId = <T extends Element>(id: string): T => {
    const element = document.getElementById(id);
    if (!element) throw new Error(`missing #${id}`);
    return element as unknown as T;
  };
  const app = new WorkbenchApp(new WorkbenchClient(baseUrl), {
    graph: byId("graph"),
    candidates: byId("candidates"),
    selection: byId("selection"),
    status: byId("status"),
    direction: byId<HTMLSelectElement>("direction"),
    wCohesion: byId<HTMLInputElement>("w-cohesion"),
    wCoupling: byId<HTMLInputElement>("w-coupling"),
    wAbstraction: byId<HTMLInputElement>("w-abstraction"),
    budget: byId<HTMLInputElement>("budget"),
    minTrl: byId<HTMLInputElement>("min-trl"),
    commit: byId<HTMLButtonElement>("commit"),
  });
  void app.start();
  return app;
}
