/**
 * Student screens: landing (practice or enter code) -> AM entry -> game list
 * -> phase-1 editor -> waiting -> phase-2 path finder -> done. Practice mode
 * is the same editor with the network left out entirely.
 */

import { GatewayClient, StreamHandle, subscribeEvents } from "./api.js";
import { DiagramDoc } from "./document.js";
import { EditorState } from "./editor.js";
import { PathBuilderState } from "./pathBuilder.js";
import { controlPointAt, drawDiagram, nodeAt, toGrid, ViewOptions } from "./render.js";

const POLL_FALLBACK_MS = 2000;

interface AppContext {
  root: HTMLElement;
  client: GatewayClient;
}

export function startStudentApp(root: HTMLElement, serverUrl = ""): void {
  const ctx: AppContext = { root, client: new GatewayClient(serverUrl) };
  showLanding(ctx);
}

function clear(root: HTMLElement): HTMLElement {
  root.textContent = "";
  const screen = document.createElement("div");
  screen.className = "screen";
  root.appendChild(screen);
  return screen;
}

function button(label: string, onClick: () => void, className = ""): HTMLButtonElement {
  const b = document.createElement("button");
  b.textContent = label;
  b.className = className;
  b.addEventListener("click", onClick);
  return b;
}

function banner(screen: HTMLElement, text: string, kind = "error"): void {
  let note = screen.querySelector<HTMLElement>(".banner");
  if (!note) {
    note = document.createElement("div");
    note.className = `banner ${kind}`;
    screen.prepend(note);
  }
  note.className = `banner ${kind}`;
  note.textContent = text;
}

// -- landing / code / AM ----------------------------------------------------

function showLanding(ctx: AppContext): void {
  const screen = clear(ctx.root);
  screen.innerHTML = "<h1>Diagram games</h1>";
  screen.appendChild(
    button("Practice designing a diagram", () => showPractice(ctx), "primary"),
  );
  screen.appendChild(button("Enter a game code", () => showCodeEntry(ctx)));
}

function showPractice(ctx: AppContext): void {
  const editor = new EditorState();
  mountEditor(ctx, editor, {
    title: "Practice",
    submitLabel: "Back to start",
    onSubmit: () => showLanding(ctx),
    offline: true,
  });
}

function showCodeEntry(ctx: AppContext): void {
  const screen = clear(ctx.root);
  screen.innerHTML = "<h1>Join the class game</h1>";
  const code = document.createElement("input");
  code.placeholder = "game code";
  code.autocapitalize = "characters";
  const am = document.createElement("input");
  am.placeholder = "student number (AM)";
  screen.append(code, am);
  screen.appendChild(
    button(
      "Continue",
      async () => {
        if (!code.value.trim() || !am.value.trim()) {
          banner(screen, "both the code and your AM are needed");
          return;
        }
        try {
          const { games } = await ctx.client.listGames(code.value.trim());
          if (!games.length) {
            banner(screen, "no open game matches that code");
            return;
          }
          showGameList(ctx, code.value.trim(), am.value.trim(), games);
        } catch (err) {
          banner(screen, String(err));
        }
      },
      "primary",
    ),
  );
  screen.appendChild(button("Back", () => showLanding(ctx)));
}

function showGameList(
  ctx: AppContext,
  code: string,
  am: string,
  games: Array<{ game_number: number; phase: string }>,
): void {
  const screen = clear(ctx.root);
  screen.innerHTML = "<h1>Available games</h1>";
  const list = document.createElement("div");
  list.className = "game-list";
  for (const game of games) {
    list.appendChild(
      button(`Game ${game.game_number} (${game.phase.replace("_", " ")})`, async () => {
        try {
          const joined = await ctx.client.join(code, am, game.game_number);
          enterSession(ctx, joined.session_token, joined.session_phase);
        } catch (err) {
          banner(screen, String(err));
        }
      }),
    );
  }
  screen.appendChild(list);
  screen.appendChild(button("Back", () => showCodeEntry(ctx)));
}

function enterSession(ctx: AppContext, token: string, phase: string): void {
  if (phase === "phase2") showPathFinder(ctx, token);
  else if (phase === "done") showDone(ctx);
  else showPhase1Editor(ctx, token);
}

// -- the editor (shared by practice and phase 1) ------------------------------

interface EditorMountOptions {
  title: string;
  submitLabel: string;
  onSubmit: (doc: DiagramDoc, screen: HTMLElement) => void;
  offline?: boolean;
}

function mountEditor(ctx: AppContext, editor: EditorState, options: EditorMountOptions): void {
  const screen = clear(ctx.root);
  screen.classList.add("editor-screen");

  const header = document.createElement("div");
  header.className = "toolbar";
  const title = document.createElement("strong");
  title.textContent = options.title;
  header.appendChild(title);

  const modeSwitch = button("Mode: selection", () => {
    editor.setMode(editor.mode === "selection" ? "drawing" : "selection");
    modeSwitch.textContent = `Mode: ${editor.mode}`;
    redraw();
  });
  const lineSwitch = button("Line: straight", () => {
    editor.setLineStyle(editor.lineStyle === "straight" ? "curved" : "straight");
    lineSwitch.textContent = `Line: ${editor.lineStyle}`;
  });
  header.append(modeSwitch, lineSwitch);

  const ccBadge = document.createElement("span");
  ccBadge.className = "cc-indicator";
  header.appendChild(ccBadge);
  screen.appendChild(header);

  const body = document.createElement("div");
  body.className = "editor-body";
  const canvas = document.createElement("canvas");
  canvas.width = 720;
  canvas.height = 520;
  canvas.className = "board";
  body.appendChild(canvas);

  const palette = document.createElement("div");
  palette.className = "palette";
  palette.innerHTML = "<h4>Nodes</h4>";
  const circleItem = button("circle", () => {});
  const starItem = button("star", () => {});
  circleItem.className = "palette-item";
  starItem.className = "palette-item";
  palette.append(circleItem, starItem);
  body.appendChild(palette);
  screen.appendChild(body);

  const footer = document.createElement("div");
  footer.className = "toolbar";
  footer.append(
    button("Reset", () => {
      editor.reset();
      redraw();
    }),
    button("Delete", () => {
      editor.deleteSelected();
      redraw();
    }),
    button(options.submitLabel, () => options.onSubmit(editor.serialize(), screen), "primary"),
  );
  screen.appendChild(footer);

  const view: ViewOptions = { zoom: 1, panX: 10, panY: 10, showGrid: true };
  const dom = ctx.root.ownerDocument.defaultView!;
  let pendingInsert: "process" | "star" | null = null;
  let dragging: { id: string } | null = null;
  let draggingCp: { edgeId: string; index: 0 | 1 } | null = null;
  let drawingFrom: string | null = null;
  let panning: { x: number; y: number } | null = null;

  circleItem.addEventListener("pointerdown", () => (pendingInsert = "process"));
  starItem.addEventListener("pointerdown", () => (pendingInsert = "star"));

  const gridPoint = (event: PointerEvent | WheelEvent): [number, number] => {
    const rect = canvas.getBoundingClientRect();
    return toGrid(view, event.clientX - rect.left, event.clientY - rect.top);
  };

  canvas.addEventListener("pointerdown", (event) => {
    const [gx, gy] = gridPoint(event);
    const hit = nodeAt(editor.doc, gx, gy);
    if (editor.mode === "drawing") {
      drawingFrom = hit?.id ?? null;
      return;
    }
    const cp = controlPointAt(editor.doc, editor.selectedId, gx, gy);
    if (cp) {
      draggingCp = { edgeId: cp.edge.id, index: cp.index };
      return;
    }
    if (hit) {
      editor.select(hit.id);
      dragging = { id: hit.id };
    } else {
      editor.select(null);
      panning = { x: event.clientX - view.panX, y: event.clientY - view.panY };
    }
    redraw();
  });

  canvas.addEventListener("pointermove", (event) => {
    if (editor.mode !== "selection") return;
    const [gx, gy] = gridPoint(event);
    if (draggingCp) {
      editor.moveControlPoint(draggingCp.edgeId, draggingCp.index, gx, gy);
      redraw();
    } else if (dragging) {
      editor.moveNode(dragging.id, gx, gy);
      redraw();
    } else if (panning) {
      view.panX = event.clientX - panning.x;
      view.panY = event.clientY - panning.y;
      redraw();
    }
  });

  const settle = (event: PointerEvent) => {
    const [gx, gy] = gridPoint(event);
    if (pendingInsert) {
      const inside =
        gx >= 0 && gx <= editor.doc.canvas.w && gy >= 0 && gy <= editor.doc.canvas.h;
      if (inside) {
        editor.insertNode(pendingInsert, gx, gy);
      }
      pendingInsert = null;
    } else if (editor.mode === "drawing" && drawingFrom) {
      const target = nodeAt(editor.doc, gx, gy);
      if (target && target.id !== drawingFrom) {
        const { reason } = editor.addEdge(drawingFrom, target.id);
        if (reason) banner(screen, reason, "warn");
      } else if (target && target.id === drawingFrom) {
        const { reason } = editor.addEdge(drawingFrom, drawingFrom);
        if (reason) banner(screen, reason, "warn");
      }
      drawingFrom = null;
    }
    dragging = null;
    draggingCp = null;
    panning = null;
    redraw();
  };
  canvas.addEventListener("pointerup", settle);
  dom.addEventListener("pointerup", () => {
    pendingInsert = null;
    dragging = null;
    draggingCp = null;
    panning = null;
  });

  canvas.addEventListener("wheel", (event) => {
    event.preventDefault();
    editor.setZoom(editor.zoom * (event.deltaY < 0 ? 1.1 : 0.9));
    view.zoom = editor.zoom;
    redraw();
  });

  function redraw(): void {
    view.showGrid = editor.showGrid;
    view.selectedId = editor.selectedId;
    view.zoom = editor.zoom;
    ccBadge.textContent = `CC ${editor.ccIndicator}`;
    const context = canvas.getContext("2d");
    if (context) drawDiagram(context, editor.doc, view);
  }
  redraw();
}

// -- phase 1 -------------------------------------------------------------------

function showPhase1Editor(ctx: AppContext, token: string): void {
  const editor = new EditorState();
  mountEditor(ctx, editor, {
    title: "Design the diagram for the code on the projector",
    submitLabel: "Submit",
    onSubmit: async (doc, screen) => {
      try {
        const result = await ctx.client.submitDiagram(token, doc);
        if (result.session_phase === "phase2") showPathFinder(ctx, token);
        else showWaiting(ctx, token);
      } catch (err) {
        banner(screen, String(err));
      }
    },
  });
}

function showWaiting(ctx: AppContext, token: string): void {
  const screen = clear(ctx.root);
  screen.innerHTML =
    "<h1>Answer submitted</h1><p>Waiting for the second part to start…</p>";
  let stream: StreamHandle | null = null;
  let poller = 0;
  const proceed = () => {
    stream?.close();
    clearInterval(poller);
    showPathFinder(ctx, token);
  };
  stream = subscribeEvents(ctx.client.studentEventsUrl(token), {
    onEvent: (event) => {
      if (event.type === "phase_advanced") proceed();
    },
    onResync: async () => {
      banner(screen, "connection lost — resyncing", "warn");
      const state = await ctx.client.sessionState(token).catch(() => null);
      if (state && state.session_phase !== "phase1") proceed();
    },
  });
  poller = setInterval(async () => {
    const state = await ctx.client.sessionState(token).catch(() => null);
    if (state && state.session_phase !== "phase1") proceed();
  }, POLL_FALLBACK_MS) as unknown as number;
}

// -- phase 2 --------------------------------------------------------------------

async function showPathFinder(ctx: AppContext, token: string): Promise<void> {
  const screen = clear(ctx.root);
  screen.classList.add("editor-screen");
  let reference: DiagramDoc;
  try {
    reference = (await ctx.client.phase2Payload(token)).reference_diagram;
  } catch (err) {
    screen.textContent = `could not load the diagram: ${err}`;
    return;
  }

  const header = document.createElement("div");
  header.className = "toolbar";
  header.innerHTML = "<strong>Find the independent paths</strong>";
  screen.appendChild(header);

  const body = document.createElement("div");
  body.className = "editor-body";
  const canvas = document.createElement("canvas");
  canvas.width = 720;
  canvas.height = 480;
  canvas.className = "board";
  body.appendChild(canvas);

  const side = document.createElement("div");
  side.className = "palette";
  side.innerHTML = "<h4>Paths</h4>";
  const pathList = document.createElement("ol");
  pathList.className = "path-list";
  side.appendChild(pathList);
  body.appendChild(side);
  screen.appendChild(body);

  const footer = document.createElement("div");
  footer.className = "toolbar";
  const entry = document.createElement("input");
  entry.readOnly = true;
  entry.className = "path-entry";
  footer.appendChild(entry);

  const builder = new PathBuilderState();
  const view: ViewOptions = { zoom: 1, panX: 10, panY: 10, showGrid: false };

  const refresh = () => {
    entry.value = builder.entryText;
    pathList.textContent = "";
    builder.committed.forEach((path, index) => {
      const item = document.createElement("li");
      item.textContent = path.join("-");
      item.addEventListener("click", () => {
        if (confirm(`Remove path ${path.join("-")}?`)) {
          builder.removeAt(index);
          refresh();
        }
      });
      pathList.appendChild(item);
    });
    const context = canvas.getContext("2d");
    if (context) drawDiagram(context, reference, view);
  };

  footer.append(
    button("Undo", () => {
      builder.undo();
      refresh();
    }),
    button("Add", () => {
      if (!builder.add()) banner(screen, "a path needs at least two nodes", "warn");
      refresh();
    }),
    button(
      "Submit",
      async () => {
        if (builder.committed.length === 0 && !confirm("Submit with no paths?")) {
          return;
        }
        try {
          await ctx.client.submitPaths(token, builder.serialize());
          showDone(ctx);
        } catch (err) {
          banner(screen, String(err));
        }
      },
      "primary",
    ),
  );
  screen.appendChild(footer);

  canvas.addEventListener("pointerdown", (event) => {
    const rect = canvas.getBoundingClientRect();
    const [gx, gy] = toGrid(view, event.clientX - rect.left, event.clientY - rect.top);
    const hit = nodeAt(reference, gx, gy);
    if (hit?.kind === "process") {
      builder.tap(hit.number as number);
      refresh();
    }
  });
  canvas.addEventListener("wheel", (event) => {
    event.preventDefault();
    view.zoom = Math.min(4, Math.max(0.25, view.zoom * (event.deltaY < 0 ? 1.1 : 0.9)));
    refresh();
  });

  refresh();
}

function showDone(ctx: AppContext): void {
  const screen = clear(ctx.root);
  screen.innerHTML =
    "<h1>All done</h1><p>Your answer is in. Watch the projector for the wrap-up.</p>";
  screen.appendChild(button("Start over", () => showLanding(ctx)));
}
