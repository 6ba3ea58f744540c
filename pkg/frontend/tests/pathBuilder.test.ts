import { describe, expect, test } from "vitest";

import { PathBuilderState } from "../src/pathBuilder.js";
import { mulberry32 } from "./fixtures.js";

describe("entry rendering", () => {
  test("the looping tap sequence renders dash-joined", () => {
    const builder = new PathBuilderState();
    for (const n of [1, 2, 3, 2, 3, 2, 3, 4]) builder.tap(n);
    expect(builder.entryText).toBe("1-2-3-2-3-2-3-4");
  });

  test("entry is always the dash-join of the taps", () => {
    for (let seed = 0; seed < 50; seed++) {
      const rng = mulberry32(seed + 17);
      const builder = new PathBuilderState();
      const taps: number[] = [];
      for (let i = 0; i < Math.floor(rng() * 12); i++) {
        if (taps.length > 0 && rng() < 0.25) {
          builder.undo();
          taps.pop();
        } else {
          const n = 1 + Math.floor(rng() * 9);
          builder.tap(n);
          taps.push(n);
        }
        expect(builder.entryText).toBe(taps.join("-"));
      }
    }
  });
});

describe("undo / add / remove", () => {
  test("undo after one tap leaves the entry empty", () => {
    const builder = new PathBuilderState();
    builder.tap(5);
    builder.undo();
    expect(builder.entryText).toBe("");
    builder.undo(); // harmless on empty
    expect(builder.entryText).toBe("");
  });

  test("add refuses fewer than two numbers", () => {
    const builder = new PathBuilderState();
    expect(builder.add()).toBe(false);
    builder.tap(1);
    expect(builder.add()).toBe(false);
    expect(builder.committed).toEqual([]);
    builder.tap(2);
    expect(builder.add()).toBe(true);
    expect(builder.committed).toEqual([[1, 2]]);
    expect(builder.entryText).toBe(""); // entry clears on commit
  });

  test("committed paths can be removed by index", () => {
    const builder = new PathBuilderState();
    for (const path of [[1, 2], [2, 3], [3, 4]]) {
      for (const n of path) builder.tap(n);
      builder.add();
    }
    builder.removeAt(1);
    expect(builder.committed).toEqual([[1, 2], [3, 4]]);
  });

  test("serialize copies, not aliases", () => {
    const builder = new PathBuilderState();
    builder.tap(1);
    builder.tap(2);
    builder.add();
    const out = builder.serialize();
    out[0][0] = 99;
    expect(builder.committed[0][0]).toBe(1);
  });
});
