/**
 * Editor state for the diagram canvas. All invariants the server checks are
 * enforced right here, so every state the editor can reach serializes to a
 * document the server accepts: numbers stay exactly 1..n (inserts take the
 * smallest free number, deletes slide higher badges down), edges connect
 * process nodes only, one edge per direction, curved edges carry exactly
 * two control points, and positions snap to grid intersections inside the
 * canvas.
 */

import {
  cloneDoc,
  DiagramDoc,
  DocEdge,
  DocNode,
  emptyDoc,
  starCount,
} from "./document.js";

export type Mode = "selection" | "drawing";
export type LineStyle = "straight" | "curved";

export const MIN_ZOOM = 0.25;
export const MAX_ZOOM = 4;

export class EditorState {
  doc: DiagramDoc;
  mode: Mode = "selection";
  lineStyle: LineStyle = "straight";
  zoom = 1;
  selectedId: string | null = null;
  private seq = 0;

  constructor(doc?: DiagramDoc) {
    this.doc = doc ? cloneDoc(doc) : emptyDoc();
    for (const item of [...this.doc.nodes, ...this.doc.edges]) {
      const n = Number(item.id.replace(/^\D+/, ""));
      if (Number.isFinite(n)) this.seq = Math.max(this.seq, n);
    }
  }

  /** The student-facing complexity indicator: the number of stars placed. */
  get ccIndicator(): number {
    return starCount(this.doc);
  }

  /** Grid lines disappear while drawing, per the mode switch. */
  get showGrid(): boolean {
    return this.mode === "selection";
  }

  setMode(mode: Mode): void {
    this.mode = mode;
    if (mode === "drawing") this.selectedId = null;
  }

  setLineStyle(style: LineStyle): void {
    this.lineStyle = style;
  }

  setZoom(zoom: number): void {
    this.zoom = Math.min(MAX_ZOOM, Math.max(MIN_ZOOM, zoom));
  }

  select(id: string | null): void {
    if (this.mode !== "selection") return;
    if (id === null || this.findNode(id) || this.findEdge(id)) {
      this.selectedId = id;
    }
  }

  findNode(id: string): DocNode | undefined {
    return this.doc.nodes.find((n) => n.id === id);
  }

  findEdge(id: string): DocEdge | undefined {
    return this.doc.edges.find((e) => e.id === id);
  }

  nodeByNumber(num: number): DocNode | undefined {
    return this.doc.nodes.find((n) => n.kind === "process" && n.number === num);
  }

  private clampX(x: number): number {
    return Math.min(this.doc.canvas.w, Math.max(0, Math.round(x)));
  }

  private clampY(y: number): number {
    return Math.min(this.doc.canvas.h, Math.max(0, Math.round(y)));
  }

  insertNode(kind: "process" | "star", x: number, y: number): DocNode {
    const node: DocNode = {
      id: `n${++this.seq}`,
      kind,
      x: this.clampX(x),
      y: this.clampY(y),
    };
    if (kind === "process") {
      const used = new Set(
        this.doc.nodes.filter((n) => n.kind === "process").map((n) => n.number),
      );
      let number = 1;
      while (used.has(number)) number++;
      node.number = number;
    }
    this.doc.nodes.push(node);
    return node;
  }

  moveNode(id: string, x: number, y: number): void {
    const node = this.findNode(id);
    if (!node) return;
    node.x = this.clampX(x);
    node.y = this.clampY(y);
  }

  /** Returns the new edge, or null with a reason when the gesture is refused. */
  addEdge(fromId: string, toId: string): { edge: DocEdge | null; reason?: string } {
    const from = this.findNode(fromId);
    const to = this.findNode(toId);
    if (!from || !to) return { edge: null, reason: "no node there" };
    if (from.kind !== "process" || to.kind !== "process") {
      return { edge: null, reason: "stars are not part of the graph" };
    }
    if (this.doc.edges.some((e) => e.from === fromId && e.to === toId)) {
      return { edge: null, reason: "that connection already exists" };
    }
    const edge: DocEdge = { id: `e${++this.seq}`, from: fromId, to: toId, shape: "straight" };
    if (this.lineStyle === "curved") {
      // an almost straight line to begin with; the two handles do the rest
      const third: [number, number] = [
        this.clampX(from.x + (to.x - from.x) / 3),
        this.clampY(from.y + (to.y - from.y) / 3),
      ];
      const twoThirds: [number, number] = [
        this.clampX(from.x + (2 * (to.x - from.x)) / 3),
        this.clampY(from.y + (2 * (to.y - from.y)) / 3),
      ];
      edge.shape = "curved";
      edge.cp = [third, twoThirds];
    }
    this.doc.edges.push(edge);
    return { edge };
  }

  moveControlPoint(edgeId: string, index: 0 | 1, x: number, y: number): void {
    const edge = this.findEdge(edgeId);
    if (edge?.cp) {
      edge.cp[index] = [Math.round(x), Math.round(y)];
    }
  }

  deleteItem(id: string): boolean {
    const node = this.findNode(id);
    if (node) {
      this.doc.edges = this.doc.edges.filter((e) => e.from !== id && e.to !== id);
      this.doc.nodes = this.doc.nodes.filter((n) => n.id !== id);
      if (node.kind === "process") {
        for (const other of this.doc.nodes) {
          if (other.kind === "process" && (other.number as number) > (node.number as number)) {
            other.number = (other.number as number) - 1;
          }
        }
      }
      if (this.selectedId === id) this.selectedId = null;
      return true;
    }
    if (this.findEdge(id)) {
      this.doc.edges = this.doc.edges.filter((e) => e.id !== id);
      if (this.selectedId === id) this.selectedId = null;
      return true;
    }
    return false;
  }

  deleteSelected(): boolean {
    return this.selectedId !== null && this.deleteItem(this.selectedId);
  }

  reset(): void {
    const { w, h } = this.doc.canvas;
    this.doc = emptyDoc(w, h);
    this.selectedId = null;
    this.seq = 0;
  }

  serialize(): DiagramDoc {
    return cloneDoc(this.doc);
  }
}
