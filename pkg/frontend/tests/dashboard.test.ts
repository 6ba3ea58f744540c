import { describe, expect, test } from "vitest";

import { FullAnswer, MonitorSnapshot, StreamEvent } from "../src/api.js";
import {
  answerViewModel,
  CounterTracker,
  phaseActions,
  renderAnswerPanel,
} from "../src/dashboard.js";
import { mulberry32 } from "./fixtures.js";

// captured verbatim from the server (golden transcripts)
import exampleAnswerJson from "./fixtures/exampleAnswer.json";
import exampleMonitorJson from "./fixtures/exampleMonitor.json";

const exampleAnswer = exampleAnswerJson as unknown as FullAnswer;
const exampleMonitor = exampleMonitorJson as unknown as MonitorSnapshot;

describe("answer rendering", () => {
  test("the walkthrough answer highlights the missing (2,8) hop", () => {
    const vm = answerViewModel(exampleAnswer);
    expect(vm.title).toContain("AM 236138");
    expect(vm.title).toContain("game 1");
    expect(vm.metricsLine).toBe("n=8 e=9 CC=3 stars=3");
    expect(vm.pathRows[0].verdict).toBe("invalid");
    expect(vm.pathRows[0].text).toBe("1-2-8");
    expect(vm.pathRows[0].detail).toBe("no edge 2 -> 8");
    expect(vm.missingHops).toContainEqual([2, 8]);
    expect(vm.badges).toContain("paths: incorrect");
    expect(vm.badges).toContain("count: exceeds_cc");
    expect(vm.badges).toContain("diagram: correct");
  });

  test("DOM output marks the failing hop and is a pure function of the answer", () => {
    const a = document.createElement("div");
    const b = document.createElement("div");
    renderAnswerPanel(a, exampleAnswer);
    renderAnswerPanel(b, exampleAnswer);
    expect(a.innerHTML).toBe(b.innerHTML);
    const firstPath = a.querySelector(".path-list li")!;
    expect(firstPath.className).toContain("invalid");
    expect(firstPath.textContent).toContain("1-2-8");
    expect(firstPath.textContent).toContain("no edge 2 -> 8");
  });

  test("diagram-only answers render without analysis", () => {
    const partial = { ...exampleAnswer, analysis: null, paths: null };
    const vm = answerViewModel(partial);
    expect(vm.pathRows).toEqual([]);
    expect(vm.missingHops).toEqual([]);
  });
});

describe("counter tracking", () => {
  const snapshotEvent = (players: number, diagrams: number, paths: number): StreamEvent => ({
    id: 0,
    type: "monitor_update",
    data: {
      game_id: "g1",
      payload: { ...exampleMonitor, players_count: players, diagrams_submitted: diagrams, paths_submitted: paths },
    },
  });

  test("tracker always shows the latest update (never more than one behind)", () => {
    const tracker = new CounterTracker();
    const rng = mulberry32(99);
    let players = 0;
    let diagrams = 0;
    let paths = 0;
    for (let i = 0; i < 200; i++) {
      if (rng() < 0.5) players++;
      else if (rng() < 0.7) diagrams = Math.min(players, diagrams + 1);
      else paths = Math.min(diagrams, paths + 1);
      const event = snapshotEvent(players, diagrams, paths);
      tracker.applyEvent({ ...event, id: i + 1 });
      expect([tracker.players, tracker.diagrams, tracker.paths]).toEqual([
        players,
        diagrams,
        paths,
      ]);
    }
    expect(tracker.updates).toBe(200);
  });

  test("a resync snapshot lands the same way as an event", () => {
    const tracker = new CounterTracker();
    tracker.applySnapshot(exampleMonitor);
    expect(tracker.line()).toBe("players 1 · diagrams 1 · paths 1");
    expect(tracker.phase).toBe("phase2_open");
  });

  test("phase events move the phase without touching counters", () => {
    const tracker = new CounterTracker();
    tracker.applySnapshot(exampleMonitor);
    tracker.applyEvent({ id: 5, type: "game_closed", data: { game_id: "g1", payload: {} } });
    expect(tracker.phase).toBe("closed");
    expect(tracker.players).toBe(1);
  });
});

describe("phase controls", () => {
  test("buttons enable exactly per state", () => {
    expect(phaseActions("created")).toEqual({ open: true, advance: false, close: false });
    expect(phaseActions("phase1_open")).toEqual({ open: false, advance: true, close: false });
    expect(phaseActions("phase2_open")).toEqual({ open: false, advance: false, close: true });
    expect(phaseActions("closed")).toEqual({ open: false, advance: false, close: false });
  });
});
