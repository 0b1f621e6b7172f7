// SVG rendering of the decomposition graph with impact overlays.
//
// Nodes are styled by kind (mission / functional / directive), edges by kind
// (decomposition solid, refinement dashed, intersection dotted), and the
// vertical layer equals the abstraction level from the API. Clicking a node
// re-roots the impact exploration through the supplied callback.

import { layoutGraph, NODE_HEIGHT, NODE_WIDTH } from "./layout.js";
import type { Overlay } from "./impact.js";
import type { GraphPayload } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface GraphViewHandlers {
  onNodeClick?: (nodeId: string) => void;
}

export class GraphView {
  readonly svg: SVGSVGElement | null = null;
  private nodeElements = new Map<string, SVGGElement>();
  private document: Document;

  constructor(
    private container: Element,
    graph: GraphPayload,
    handlers: GraphViewHandlers = {},
  ) {
    this.document = container.ownerDocument;
    container.replaceChildren();
    if (graph.nodes.length === 0) {
      const empty = this.document.createElement("p");
      empty.className = "empty-state";
      empty.textContent = "No project loaded yet. Point the workbench at a .capweave.json file.";
      container.appendChild(empty);
      return;
    }

    const layout = layoutGraph(graph);
    const svg = this.document.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    svg.setAttribute("viewBox", `0 0 ${layout.width} ${layout.height}`);
    svg.setAttribute("width", String(layout.width));
    svg.setAttribute("height", String(layout.height));
    svg.classList.add("fd-graph");

    const chosen = new Set(graph.chosenMembers);
    const center = (id: string) => {
      const pos = layout.positions.get(id);
      if (!pos) throw new Error(`node ${id} missing from layout`);
      return { cx: pos.x + NODE_WIDTH / 2, cy: pos.y + NODE_HEIGHT / 2, ...pos };
    };

    for (const edge of graph.edges) {
      const from = center(edge.source);
      const to = center(edge.target);
      const line = this.document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(from.cx));
      line.setAttribute("y1", String(from.y + NODE_HEIGHT));
      line.setAttribute("x2", String(to.cx));
      line.setAttribute("y2", String(to.y));
      line.classList.add("edge", `edge--${edge.kind}`);
      if (edge.kind === "refinement") line.setAttribute("stroke-dasharray", "8 4");
      if (edge.kind === "intersection") line.setAttribute("stroke-dasharray", "2 4");
      line.dataset.source = edge.source;
      line.dataset.target = edge.target;
      svg.appendChild(line);
    }

    for (const node of graph.nodes) {
      const pos = layout.positions.get(node.id);
      if (!pos) continue;
      const group = this.document.createElementNS(SVG_NS, "g") as SVGGElement;
      group.classList.add("node", `node--${node.kind}`);
      if (chosen.has(node.id)) group.classList.add("node--chosen");
      group.dataset.nodeId = node.id;
      group.setAttribute("transform", `translate(${pos.x}, ${pos.y})`);

      const rect = this.document.createElementNS(SVG_NS, "rect");
      rect.setAttribute("width", String(NODE_WIDTH));
      rect.setAttribute("height", String(NODE_HEIGHT));
      rect.setAttribute("rx", node.kind === "directive" ? "14" : "4");
      group.appendChild(rect);

      const idText = this.document.createElementNS(SVG_NS, "text");
      idText.setAttribute("x", String(NODE_WIDTH / 2));
      idText.setAttribute("y", "17");
      idText.setAttribute("text-anchor", "middle");
      idText.classList.add("node__id");
      idText.textContent = node.id;
      group.appendChild(idText);

      const labelText = this.document.createElementNS(SVG_NS, "text");
      labelText.setAttribute("x", String(NODE_WIDTH / 2));
      labelText.setAttribute("y", "34");
      labelText.setAttribute("text-anchor", "middle");
      labelText.classList.add("node__label");
      labelText.textContent =
        node.label.length > 22 ? node.label.slice(0, 21) + "…" : node.label;
      group.appendChild(labelText);

      if (handlers.onNodeClick) {
        group.addEventListener("click", () => handlers.onNodeClick?.(node.id));
      }
      this.nodeElements.set(node.id, group);
      svg.appendChild(group);
    }

    container.appendChild(svg);
    (this as { svg: SVGSVGElement | null }).svg = svg;
  }

  /** Apply (or clear) an impact overlay; the highlight set mirrors it exactly. */
  applyOverlay(overlay: Overlay | null): void {
    for (const [id, element] of this.nodeElements) {
      element.classList.remove("overlay-affected", "overlay-review", "overlay-trigger");
      if (!overlay) continue;
      if (id === overlay.trigger) {
        element.classList.add("overlay-trigger");
      } else if (overlay.entities.has(id)) {
        const severity = overlay.severity.get(id);
        element.classList.add(severity === "review" ? "overlay-review" : "overlay-affected");
      }
    }
  }

  /** Node ids currently highlighted by the overlay (trigger excluded). */
  highlighted(): Set<string> {
    const out = new Set<string>();
    for (const [id, element] of this.nodeElements) {
      if (
        element.classList.contains("overlay-affected") ||
        element.classList.contains("overlay-review")
      ) {
        out.add(id);
      }
    }
    return out;
  }

  nodeElement(id: string): SVGGElement | undefined {
    return this.nodeElements.get(id);
  }
}
