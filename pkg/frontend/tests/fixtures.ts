/** Shared test graph: eight numbered nodes, nine directed edges (8->2 but
 * never 2->8), three stars; structural complexity 3. */

import { DiagramDoc } from "../src/document.js";

export const EXAM_EDGES: Array<[number, number]> = [
  [1, 2], [2, 3], [3, 4], [2, 5], [4, 6], [5, 6], [6, 7], [6, 8], [8, 2],
];

export const EXAM_WRONG_PATHS = [
  [1, 2, 8],
  [1, 2, 4],
  [1, 3, 5],
  [2, 6, 7],
];

export function examDoc(stars = 3): DiagramDoc {
  const doc: DiagramDoc = { canvas: { w: 40, h: 60 }, nodes: [], edges: [] };
  for (let v = 1; v <= 8; v++) {
    doc.nodes.push({ id: `n${v}`, kind: "process", number: v, x: (3 * v) % 40, y: (5 * v) % 60 });
  }
  for (let s = 1; s <= stars; s++) {
    doc.nodes.push({ id: `s${s}`, kind: "star", x: (7 * s + 1) % 40, y: (11 * s + 1) % 60 });
  }
  EXAM_EDGES.forEach(([a, b], i) => {
    doc.edges.push({ id: `e${i + 1}`, from: `n${a}`, to: `n${b}`, shape: "straight" });
  });
  return doc;
}

/** Deterministic generator, so failures replay. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}
