/**
 * Pure view models for the management screen. Rendering an answer is a
 * function of (answer, analysis) and nothing else, so the same inputs
 * always produce the same DOM.
 */

import { Analysis, FullAnswer, MonitorSnapshot, StreamEvent } from "./api.js";

export interface PathRow {
  text: string;
  verdict: "valid" | "invalid";
  detail: string;
  introducesNewEdge: boolean;
}

export interface AnswerViewModel {
  title: string;
  metricsLine: string;
  badges: string[];
  pathRows: PathRow[];
  /** Directed hops claimed by invalid paths but absent from the diagram. */
  missingHops: Array<[number, number]>;
  unknownNodes: number[];
}

export function answerViewModel(answer: FullAnswer): AnswerViewModel {
  const when = answer.submitted_at_paths ?? answer.submitted_at_diagram ?? "";
  const title = `AM ${answer.student_id} — ${when} — game ${answer.game_number}`;
  const analysis = answer.analysis;
  if (!analysis) {
    return {
      title,
      metricsLine: answer.diagram_missing ? "no diagram submitted" : "diagram only",
      badges: answer.resubmitted ? ["resubmitted"] : [],
      pathRows: [],
      missingHops: [],
      unknownNodes: [],
    };
  }
  const m = analysis.metrics;
  const cc = m.cc_structural === null ? "undefined" : String(m.cc_structural);
  const metricsLine =
    `n=${m.n} e=${m.e} CC=${cc} stars=${m.cc_declared}` +
    (m.connected ? "" : " (disconnected)");
  const badges = [
    `diagram: ${analysis.overall_diagram}`,
    `paths: ${analysis.overall_paths}`,
    `count: ${analysis.path_count_check}`,
    `structure: ${analysis.structure}`,
  ];
  if (answer.resubmitted) badges.push("resubmitted");
  if (answer.diagram_missing) badges.push("diagram missing");

  const missingHops: Array<[number, number]> = [];
  const unknownNodes: number[] = [];
  const pathRows = analysis.path_reports.map((report) => {
    let detail = "";
    if (report.verdict === "invalid") {
      if (report.missing_pair) {
        detail = `no edge ${report.missing_pair[0]} -> ${report.missing_pair[1]}`;
        missingHops.push([report.missing_pair[0], report.missing_pair[1]]);
      } else if (report.unknown_node !== null) {
        detail = `node ${report.unknown_node} does not exist`;
        unknownNodes.push(report.unknown_node);
      }
    } else if (!report.introduces_new_edge) {
      detail = "adds no new edge";
    }
    return {
      text: report.path.join("-"),
      verdict: report.verdict,
      detail,
      introducesNewEdge: report.introduces_new_edge,
    };
  });
  return { title, metricsLine, badges, pathRows, missingHops, unknownNodes };
}

/** Renders an answer into a container; pure in (answer) -> DOM structure. */
export function renderAnswerPanel(container: HTMLElement, answer: FullAnswer): void {
  const vm = answerViewModel(answer);
  container.textContent = "";
  const title = document.createElement("h3");
  title.textContent = vm.title;
  container.appendChild(title);

  const metrics = document.createElement("p");
  metrics.className = "metrics";
  metrics.textContent = vm.metricsLine;
  container.appendChild(metrics);

  const badges = document.createElement("div");
  badges.className = "badges";
  for (const text of vm.badges) {
    const badge = document.createElement("span");
    badge.className = "badge " + text.replace(/[:\s]+/g, "-");
    badge.textContent = text;
    badges.appendChild(badge);
  }
  container.appendChild(badges);

  const list = document.createElement("ol");
  list.className = "path-list";
  for (const row of vm.pathRows) {
    const item = document.createElement("li");
    item.className = `path ${row.verdict}`;
    const text = document.createElement("span");
    text.className = "path-text";
    text.textContent = row.text;
    item.appendChild(text);
    if (row.detail) {
      const detail = document.createElement("span");
      detail.className = "path-detail";
      detail.textContent = row.detail;
      item.appendChild(detail);
    }
    list.appendChild(item);
  }
  container.appendChild(list);
}

/**
 * Live counter header: folds monitor_update events; a snapshot fetched on
 * resync can be applied the same way. The dashboard is at most one event
 * behind whatever the server last published.
 */
export class CounterTracker {
  players = 0;
  diagrams = 0;
  paths = 0;
  phase = "";
  updates = 0;

  applySnapshot(snapshot: MonitorSnapshot): void {
    this.players = snapshot.players_count;
    this.diagrams = snapshot.diagrams_submitted;
    this.paths = snapshot.paths_submitted;
    this.phase = snapshot.phase;
    this.updates += 1;
  }

  applyEvent(event: StreamEvent): void {
    if (event.type === "monitor_update") {
      this.applySnapshot(event.data.payload as MonitorSnapshot);
    } else if (event.type === "game_opened") {
      this.phase = "phase1_open";
    } else if (event.type === "phase_advanced") {
      this.phase = "phase2_open";
    } else if (event.type === "game_closed") {
      this.phase = "closed";
    }
  }

  line(): string {
    return `players ${this.players} · diagrams ${this.diagrams} · paths ${this.paths}`;
  }
}

/** Legal dashboard actions per game phase; buttons disable on the rest. */
export function phaseActions(phase: string): { open: boolean; advance: boolean; close: boolean } {
  return {
    open: phase === "created",
    advance: phase === "phase1_open",
    close: phase === "phase2_open",
  };
}

export type { Analysis };
