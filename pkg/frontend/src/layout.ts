// Depth-layered positions for the decomposition graph. The layer IS the
// abstraction level reported by the API; the UI adds no interpretation.

import type { GraphPayload } from "./types.js";

export const NODE_WIDTH = 150;
export const NODE_HEIGHT = 44;
export const H_GAP = 28;
export const V_GAP = 90;
export const PADDING = 24;

export interface NodePosition {
  x: number;
  y: number;
}

export interface GraphLayout {
  positions: Map<string, NodePosition>;
  width: number;
  height: number;
  layers: string[][];
}

export function layoutGraph(graph: GraphPayload): GraphLayout {
  const layers: string[][] = [];
  for (const node of graph.nodes) {
    const layer = layers[node.level] ?? (layers[node.level] = []);
    layer.push(node.id);
  }
  for (const layer of layers) {
    layer?.sort();
  }

  const widest = Math.max(1, ...layers.map((layer) => layer?.length ?? 0));
  const width = PADDING * 2 + widest * NODE_WIDTH + (widest - 1) * H_GAP;
  const height = PADDING * 2 + layers.length * NODE_HEIGHT + (layers.length - 1) * V_GAP;

  const positions = new Map<string, NodePosition>();
  layers.forEach((layer, level) => {
    if (!layer) return;
    const rowWidth = layer.length * NODE_WIDTH + (layer.length - 1) * H_GAP;
    const start = (width - rowWidth) / 2;
    layer.forEach((id, index) => {
      positions.set(id, {
        x: start + index * (NODE_WIDTH + H_GAP),
        y: PADDING + level * (NODE_HEIGHT + V_GAP),
      });
    });
  });
  return { positions, width, height, layers };
}
