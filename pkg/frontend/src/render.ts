/**
 * Canvas renderer for diagrams. Grid coordinates map to pixels through a
 * uniform cell size times the zoom factor; the model stays in grid units.
 * Edges render with arrowheads (the graph is directed, and path hunting
 * needs the direction visible); curved edges are cubic curves through
 * their two control points, which render as draggable handles when the
 * edge is selected.
 */

import { DiagramDoc, DocEdge, DocNode } from "./document.js";

export const CELL = 16;
export const NODE_RADIUS = 0.9; // in grid units

export interface ViewOptions {
  zoom: number;
  panX: number;
  panY: number;
  showGrid: boolean;
  selectedId?: string | null;
  /** hops to overlay as missing (dashed), by node number */
  missingHops?: Array<[number, number]>;
  highlightNumbers?: number[];
}

export function toPixel(view: ViewOptions, gx: number, gy: number): [number, number] {
  const s = CELL * view.zoom;
  return [view.panX + gx * s, view.panY + gy * s];
}

export function toGrid(view: ViewOptions, px: number, py: number): [number, number] {
  const s = CELL * view.zoom;
  return [(px - view.panX) / s, (py - view.panY) / s];
}

export function nodeAt(doc: DiagramDoc, gx: number, gy: number): DocNode | undefined {
  let best: DocNode | undefined;
  let bestDist = NODE_RADIUS * 1.3;
  for (const node of doc.nodes) {
    const d = Math.hypot(node.x - gx, node.y - gy);
    if (d < bestDist) {
      best = node;
      bestDist = d;
    }
  }
  return best;
}

export function controlPointAt(
  doc: DiagramDoc,
  edgeId: string | null | undefined,
  gx: number,
  gy: number,
): { edge: DocEdge; index: 0 | 1 } | undefined {
  if (!edgeId) return undefined;
  const edge = doc.edges.find((e) => e.id === edgeId);
  if (!edge?.cp) return undefined;
  for (const index of [0, 1] as const) {
    if (Math.hypot(edge.cp[index][0] - gx, edge.cp[index][1] - gy) < 0.8) {
      return { edge, index };
    }
  }
  return undefined;
}

export function edgeAt(doc: DiagramDoc, gx: number, gy: number): DocEdge | undefined {
  const byId = new Map(doc.nodes.map((n) => [n.id, n]));
  for (const edge of doc.edges) {
    const a = byId.get(edge.from)!;
    const b = byId.get(edge.to)!;
    const samples = 24;
    for (let i = 0; i <= samples; i++) {
      const [x, y] = pointOnEdge(a, b, edge, i / samples);
      if (Math.hypot(x - gx, y - gy) < 0.5) return edge;
    }
  }
  return undefined;
}

function pointOnEdge(a: DocNode, b: DocNode, edge: DocEdge, t: number): [number, number] {
  if (edge.cp) {
    const [p1, p2] = edge.cp;
    const u = 1 - t;
    const x =
      u * u * u * a.x + 3 * u * u * t * p1[0] + 3 * u * t * t * p2[0] + t * t * t * b.x;
    const y =
      u * u * u * a.y + 3 * u * u * t * p1[1] + 3 * u * t * t * p2[1] + t * t * t * b.y;
    return [x, y];
  }
  return [a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t];
}

export function drawDiagram(
  ctx: CanvasRenderingContext2D,
  doc: DiagramDoc,
  view: ViewOptions,
): void {
  const canvas = ctx.canvas;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const s = CELL * view.zoom;

  if (view.showGrid) {
    ctx.strokeStyle = "#e3e8ef";
    ctx.lineWidth = 1;
    for (let gx = 0; gx <= doc.canvas.w; gx++) {
      const [x] = toPixel(view, gx, 0);
      ctx.beginPath();
      ctx.moveTo(x, view.panY);
      ctx.lineTo(x, view.panY + doc.canvas.h * s);
      ctx.stroke();
    }
    for (let gy = 0; gy <= doc.canvas.h; gy++) {
      const [, y] = toPixel(view, 0, gy);
      ctx.beginPath();
      ctx.moveTo(view.panX, y);
      ctx.lineTo(view.panX + doc.canvas.w * s, y);
      ctx.stroke();
    }
  }

  const byId = new Map(doc.nodes.map((n) => [n.id, n]));
  for (const edge of doc.edges) {
    const a = byId.get(edge.from)!;
    const b = byId.get(edge.to)!;
    const selected = view.selectedId === edge.id;
    ctx.strokeStyle = selected ? "#e8730c" : "#3a4356";
    ctx.lineWidth = selected ? 3 : 2;
    drawEdgePath(ctx, view, a, b, edge);
    drawArrowhead(ctx, view, a, b, edge);
    if (edge.cp && selected) {
      for (const [cx, cy] of edge.cp) {
        const [px, py] = toPixel(view, cx, cy);
        ctx.fillStyle = "#e8730c";
        ctx.beginPath();
        ctx.arc(px, py, 5, 0, Math.PI * 2);
        ctx.fill();
      }
    }
  }

  if (view.missingHops) {
    const byNumber = new Map(
      doc.nodes.filter((n) => n.kind === "process").map((n) => [n.number, n]),
    );
    ctx.setLineDash([6, 6]);
    ctx.strokeStyle = "#d1242f";
    ctx.lineWidth = 2.5;
    for (const [fromNum, toNum] of view.missingHops) {
      const a = byNumber.get(fromNum);
      const b = byNumber.get(toNum);
      if (!a || !b) continue;
      drawEdgePath(ctx, view, a, b, { id: "missing", from: a.id, to: b.id, shape: "straight" });
      drawArrowhead(ctx, view, a, b, { id: "missing", from: a.id, to: b.id, shape: "straight" });
    }
    ctx.setLineDash([]);
  }

  for (const node of doc.nodes) {
    const [px, py] = toPixel(view, node.x, node.y);
    const r = NODE_RADIUS * s;
    const selected = view.selectedId === node.id;
    const highlighted =
      node.kind === "process" && view.highlightNumbers?.includes(node.number as number);
    if (node.kind === "star") {
      drawStar(ctx, px, py, r, selected ? "#e8730c" : "#caa53d");
    } else {
      ctx.fillStyle = highlighted ? "#ffe2e0" : "#f4f7fb";
      ctx.strokeStyle = selected ? "#e8730c" : highlighted ? "#d1242f" : "#2d6cdf";
      ctx.lineWidth = selected || highlighted ? 3 : 2;
      ctx.beginPath();
      ctx.arc(px, py, r, 0, Math.PI * 2);
      ctx.fill();
      ctx.stroke();
      ctx.fillStyle = "#1b2330";
      ctx.font = `${Math.max(10, 0.8 * s)}px system-ui, sans-serif`;
      ctx.textAlign = "center";
      ctx.textBaseline = "middle";
      ctx.fillText(String(node.number), px, py);
    }
  }
}

function drawEdgePath(
  ctx: CanvasRenderingContext2D,
  view: ViewOptions,
  a: DocNode,
  b: DocNode,
  edge: DocEdge,
): void {
  const [ax, ay] = toPixel(view, a.x, a.y);
  const [bx, by] = toPixel(view, b.x, b.y);
  ctx.beginPath();
  if (edge.cp) {
    const [c1x, c1y] = toPixel(view, edge.cp[0][0], edge.cp[0][1]);
    const [c2x, c2y] = toPixel(view, edge.cp[1][0], edge.cp[1][1]);
    ctx.moveTo(ax, ay);
    ctx.bezierCurveTo(c1x, c1y, c2x, c2y, bx, by);
  } else if (a.id === b.id) {
    const r = NODE_RADIUS * CELL * view.zoom;
    ctx.arc(ax + r, ay - r, r, Math.PI, Math.PI * 2.5);
  } else {
    ctx.moveTo(ax, ay);
    ctx.lineTo(bx, by);
  }
  ctx.stroke();
}

function drawArrowhead(
  ctx: CanvasRenderingContext2D,
  view: ViewOptions,
  a: DocNode,
  b: DocNode,
  edge: DocEdge,
): void {
  // angle of approach at the target node
  const [nearX, nearY] = pointOnEdge(a, b, edge, 0.92);
  const [bx, by] = toPixel(view, b.x, b.y);
  const [px, py] = toPixel(view, nearX, nearY);
  const angle = Math.atan2(by - py, bx - px);
  const r = NODE_RADIUS * CELL * view.zoom;
  const tipX = bx - Math.cos(angle) * r;
  const tipY = by - Math.sin(angle) * r;
  const size = Math.max(6, 0.55 * CELL * view.zoom);
  ctx.beginPath();
  ctx.moveTo(tipX, tipY);
  ctx.lineTo(
    tipX - size * Math.cos(angle - Math.PI / 7),
    tipY - size * Math.sin(angle - Math.PI / 7),
  );
  ctx.lineTo(
    tipX - size * Math.cos(angle + Math.PI / 7),
    tipY - size * Math.sin(angle + Math.PI / 7),
  );
  ctx.closePath();
  ctx.fillStyle = ctx.strokeStyle as string;
  ctx.fill();
}

function drawStar(
  ctx: CanvasRenderingContext2D,
  cx: number,
  cy: number,
  r: number,
  color: string,
): void {
  ctx.beginPath();
  for (let i = 0; i < 10; i++) {
    const radius = i % 2 === 0 ? r : r * 0.45;
    const angle = -Math.PI / 2 + (i * Math.PI) / 5;
    const x = cx + radius * Math.cos(angle);
    const y = cy + radius * Math.sin(angle);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  }
  ctx.closePath();
  ctx.fillStyle = color;
  ctx.fill();
}
