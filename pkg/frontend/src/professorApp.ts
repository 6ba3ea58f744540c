/**
 * Professor screens in one client: the game designer (author the reference
 * diagram and its paths, lock it with a code, publish) and the management
 * dashboard (answers list, selected answer with its analysis overlaid,
 * live counters, phase controls).
 */

import {
  AnswerSummary,
  FullAnswer,
  GatewayClient,
  StreamHandle,
  subscribeEvents,
} from "./api.js";
import { CounterTracker, phaseActions, renderAnswerPanel } from "./dashboard.js";
import { metricsOf, validatePath } from "./document.js";
import { EditorState } from "./editor.js";
import { PathBuilderState } from "./pathBuilder.js";
import { drawDiagram, nodeAt, toGrid, ViewOptions } from "./render.js";

const CODE_ALPHABET = "ABCDEFGHJKMNPQRSTUVWXYZ23456789";

export function generateCode(length = 6, pick: () => number = Math.random): string {
  let code = "";
  for (let i = 0; i < length; i++) {
    code += CODE_ALPHABET[Math.floor(pick() * CODE_ALPHABET.length)];
  }
  return code;
}

export function startProfessorApp(root: HTMLElement, serverUrl = ""): void {
  const secret =
    sessionStorage.getItem("professor-secret") ??
    window.prompt("Professor secret for this server:") ??
    "";
  sessionStorage.setItem("professor-secret", secret);
  const client = new GatewayClient(serverUrl, secret);

  root.textContent = "";
  const tabs = document.createElement("div");
  tabs.className = "toolbar tabs";
  const designTab = document.createElement("button");
  designTab.textContent = "Design a game";
  const manageTab = document.createElement("button");
  manageTab.textContent = "Manage games";
  tabs.append(designTab, manageTab);
  root.appendChild(tabs);
  const body = document.createElement("div");
  root.appendChild(body);

  designTab.addEventListener("click", () => showDesigner(body, client));
  manageTab.addEventListener("click", () => showDashboard(body, client));
  showDesigner(body, client);
}

// -- designer -------------------------------------------------------------------

function showDesigner(root: HTMLElement, client: GatewayClient): void {
  root.textContent = "";
  const screen = document.createElement("div");
  screen.className = "screen editor-screen";
  root.appendChild(screen);

  const editor = new EditorState();
  const builder = new PathBuilderState();

  const header = document.createElement("div");
  header.className = "toolbar";
  header.innerHTML = "<strong>New game</strong>";
  const modeSwitch = document.createElement("button");
  modeSwitch.textContent = "Mode: selection";
  modeSwitch.addEventListener("click", () => {
    editor.setMode(editor.mode === "selection" ? "drawing" : "selection");
    modeSwitch.textContent = `Mode: ${editor.mode}`;
    redraw();
  });
  const lineSwitch = document.createElement("button");
  lineSwitch.textContent = "Line: straight";
  lineSwitch.addEventListener("click", () => {
    editor.setLineStyle(editor.lineStyle === "straight" ? "curved" : "straight");
    lineSwitch.textContent = `Line: ${editor.lineStyle}`;
  });
  const ccBadge = document.createElement("span");
  ccBadge.className = "cc-indicator";
  header.append(modeSwitch, lineSwitch, ccBadge);
  screen.appendChild(header);

  const body = document.createElement("div");
  body.className = "editor-body";
  const canvas = document.createElement("canvas");
  canvas.width = 680;
  canvas.height = 440;
  canvas.className = "board";
  body.appendChild(canvas);

  const side = document.createElement("div");
  side.className = "palette";
  side.innerHTML = "<h4>Nodes</h4>";
  const circleItem = document.createElement("button");
  circleItem.textContent = "circle";
  const starItem = document.createElement("button");
  starItem.textContent = "star";
  side.append(circleItem, starItem);

  side.appendChild(document.createElement("hr"));
  const pathsTitle = document.createElement("h4");
  pathsTitle.textContent = "Reference paths";
  side.appendChild(pathsTitle);
  const entry = document.createElement("input");
  entry.readOnly = true;
  entry.className = "path-entry";
  side.appendChild(entry);
  const pathButtons = document.createElement("div");
  const undoBtn = document.createElement("button");
  undoBtn.textContent = "Undo";
  const addBtn = document.createElement("button");
  addBtn.textContent = "Add";
  pathButtons.append(undoBtn, addBtn);
  side.appendChild(pathButtons);
  const pathList = document.createElement("ol");
  pathList.className = "path-list";
  side.appendChild(pathList);
  body.appendChild(side);
  screen.appendChild(body);

  const publishBar = document.createElement("div");
  publishBar.className = "toolbar";
  const codeInput = document.createElement("input");
  codeInput.placeholder = "game code";
  codeInput.value = generateCode();
  const regen = document.createElement("button");
  regen.textContent = "New code";
  regen.addEventListener("click", () => (codeInput.value = generateCode()));
  const modeSelect = document.createElement("select");
  for (const value of ["professor_triggered", "individual"]) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = value.replace("_", " ");
    modeSelect.appendChild(option);
  }
  const publish = document.createElement("button");
  publish.textContent = "Publish";
  publish.className = "primary";
  const status = document.createElement("span");
  status.className = "status";
  publishBar.append(codeInput, regen, modeSelect, publish, status);
  screen.appendChild(publishBar);

  const view: ViewOptions = { zoom: 1, panX: 10, panY: 10, showGrid: true };
  let pendingInsert: "process" | "star" | null = null;
  let drawingFrom: string | null = null;
  let dragging: string | null = null;

  circleItem.addEventListener("pointerdown", () => (pendingInsert = "process"));
  starItem.addEventListener("pointerdown", () => (pendingInsert = "star"));

  const gridPoint = (event: PointerEvent): [number, number] => {
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
    if (hit) {
      editor.select(hit.id);
      dragging = hit.id;
      // selecting a node in the designer also taps it into the path entry
      if (hit.kind === "process") {
        builder.tap(hit.number as number);
        refreshPaths();
      }
    } else {
      editor.select(null);
    }
    redraw();
  });
  canvas.addEventListener("pointermove", (event) => {
    if (dragging && editor.mode === "selection") {
      const [gx, gy] = gridPoint(event);
      editor.moveNode(dragging, gx, gy);
      redraw();
    }
  });
  canvas.addEventListener("pointerup", (event) => {
    const [gx, gy] = gridPoint(event);
    if (pendingInsert) {
      if (gx >= 0 && gx <= editor.doc.canvas.w && gy >= 0 && gy <= editor.doc.canvas.h) {
        editor.insertNode(pendingInsert, gx, gy);
      }
      pendingInsert = null;
    } else if (editor.mode === "drawing" && drawingFrom) {
      const target = nodeAt(editor.doc, gx, gy);
      if (target) {
        const { reason } = editor.addEdge(drawingFrom, target.id);
        if (reason) flash(reason);
      }
      drawingFrom = null;
    }
    dragging = null;
    redraw();
  });
  canvas.addEventListener("wheel", (event) => {
    event.preventDefault();
    editor.setZoom(editor.zoom * (event.deltaY < 0 ? 1.1 : 0.9));
    redraw();
  });

  undoBtn.addEventListener("click", () => {
    builder.undo();
    refreshPaths();
  });
  addBtn.addEventListener("click", () => {
    if (builder.current.length >= 2) {
      const check = validatePath(editor.doc, builder.current);
      if (!check.valid) {
        flash(
          check.missingPair
            ? `no edge ${check.missingPair[0]} -> ${check.missingPair[1]}`
            : `unknown node ${check.unknownNode}`,
        );
        return;
      }
    }
    if (!builder.add()) flash("a path needs at least two nodes");
    refreshPaths();
  });

  publish.addEventListener("click", async () => {
    const doc = editor.serialize();
    const metrics = metricsOf(doc);
    if (metrics.n === 0) {
      flash("draw the reference diagram first");
      return;
    }
    if (metrics.ccStructural !== builder.committed.length) {
      flash(
        `the game needs exactly ${metrics.ccStructural} paths (CC); ` +
          `${builder.committed.length} are listed`,
      );
      return;
    }
    try {
      const created = await client.createGame({
        reference_diagram: doc,
        reference_paths: builder.serialize(),
        code: codeInput.value.trim(),
        advance_mode: modeSelect.value,
      });
      flash(`published as game ${created.game_number} (CC ${created.reference_cc})`, true);
    } catch (err) {
      flash(String(err));
    }
  });

  function flash(text: string, good = false): void {
    status.textContent = text;
    status.className = good ? "status good" : "status bad";
  }

  function refreshPaths(): void {
    entry.value = builder.entryText;
    pathList.textContent = "";
    builder.committed.forEach((path, index) => {
      const item = document.createElement("li");
      item.textContent = path.join("-");
      item.addEventListener("click", () => {
        if (confirm(`Remove path ${path.join("-")}?`)) {
          builder.removeAt(index);
          refreshPaths();
        }
      });
      pathList.appendChild(item);
    });
  }

  function redraw(): void {
    view.showGrid = editor.showGrid;
    view.selectedId = editor.selectedId;
    view.zoom = editor.zoom;
    ccBadge.textContent = `CC ${editor.ccIndicator}`;
    const context = canvas.getContext("2d");
    if (context) drawDiagram(context, editor.doc, view);
  }
  redraw();
  refreshPaths();
}

// -- dashboard -------------------------------------------------------------------

function showDashboard(root: HTMLElement, client: GatewayClient): void {
  root.textContent = "";
  const screen = document.createElement("div");
  screen.className = "screen dashboard";
  root.appendChild(screen);

  const header = document.createElement("div");
  header.className = "toolbar";
  const gameSelect = document.createElement("select");
  const counters = document.createElement("span");
  counters.className = "counters";
  const openBtn = document.createElement("button");
  openBtn.textContent = "Open";
  const advanceBtn = document.createElement("button");
  advanceBtn.textContent = "Start part 2";
  const closeBtn = document.createElement("button");
  closeBtn.textContent = "Close";
  header.append(gameSelect, counters, openBtn, advanceBtn, closeBtn);
  screen.appendChild(header);

  const columns = document.createElement("div");
  columns.className = "dashboard-columns";
  const answersPanel = document.createElement("div");
  answersPanel.className = "answers-panel";
  answersPanel.innerHTML = "<h4>Answers</h4>";
  const answersList = document.createElement("ul");
  answersList.className = "answers-list";
  answersPanel.appendChild(answersList);
  const canvasPanel = document.createElement("div");
  const canvas = document.createElement("canvas");
  canvas.width = 560;
  canvas.height = 460;
  canvas.className = "board";
  canvasPanel.appendChild(canvas);
  const detailPanel = document.createElement("div");
  detailPanel.className = "detail-panel";
  detailPanel.innerHTML = "<h4>Paths</h4><p>select an answer</p>";
  columns.append(answersPanel, canvasPanel, detailPanel);
  screen.appendChild(columns);

  const tracker = new CounterTracker();
  let stream: StreamHandle | null = null;
  let currentGame: { game_id: string; phase: string } | null = null;

  const refreshHeader = () => {
    counters.textContent = tracker.line();
    const actions = phaseActions(currentGame?.phase ?? "");
    openBtn.disabled = !actions.open;
    advanceBtn.disabled = !actions.advance;
    closeBtn.disabled = !actions.close;
  };

  const refreshAnswers = async () => {
    if (!currentGame) return;
    const { answers } = await client.answers(currentGame.game_id);
    answersList.textContent = "";
    for (const answer of answers) {
      answersList.appendChild(answerRow(answer));
    }
  };

  const answerRow = (answer: AnswerSummary): HTMLLIElement => {
    const item = document.createElement("li");
    const when = answer.submitted_at_paths ?? answer.submitted_at_diagram ?? "";
    item.textContent = `AM ${answer.student_id} · ${when} · game ${answer.game_number}`;
    item.addEventListener("click", async () => {
      const full = await client.answer(answer.answer_id);
      selectAnswer(full);
    });
    item.addEventListener("contextmenu", async (event) => {
      event.preventDefault();
      if (confirm(`Permanently delete the answer of AM ${answer.student_id}?`)) {
        try {
          await client.deleteAnswer(answer.answer_id);
          await refreshAnswers();
        } catch (err) {
          alert(`delete failed, try again: ${err}`);
        }
      }
    });
    return item;
  };

  const selectAnswer = (answer: FullAnswer): void => {
    renderAnswerPanel(detailPanel, answer);
    const context = canvas.getContext("2d");
    if (context && answer.diagram) {
      drawDiagram(context, answer.diagram, {
        zoom: 0.8,
        panX: 10,
        panY: 10,
        showGrid: false,
        missingHops: answer.analysis
          ? answer.analysis.path_reports
              .filter((r) => r.missing_pair)
              .map((r) => r.missing_pair as [number, number])
          : [],
      });
    }
  };

  const watchGame = (gameId: string, phase: string) => {
    stream?.close();
    currentGame = { game_id: gameId, phase };
    tracker.phase = phase;
    void client.monitor(gameId).then((snapshot) => {
      tracker.applySnapshot(snapshot);
      refreshHeader();
    });
    void refreshAnswers();
    stream = subscribeEvents(client.professorEventsUrl(gameId), {
      headers: client.professorAuthHeaders(),
      onEvent: (event) => {
        tracker.applyEvent(event);
        if (currentGame && event.type !== "monitor_update") {
          currentGame.phase = tracker.phase;
        }
        refreshHeader();
        if (event.type === "monitor_update") void refreshAnswers();
      },
      onResync: () => {
        if (!currentGame) return;
        void client.monitor(currentGame.game_id).then((snapshot) => {
          tracker.applySnapshot(snapshot);
          currentGame!.phase = snapshot.phase;
          refreshHeader();
        });
      },
    });
  };

  const loadGames = async () => {
    const { games } = await client.allGames();
    gameSelect.textContent = "";
    for (const game of games) {
      const option = document.createElement("option");
      option.value = game.game_id;
      option.textContent = `game ${game.game_number} · ${game.phase} · code ${game.code}`;
      gameSelect.appendChild(option);
    }
    if (games.length) {
      const game = games[games.length - 1];
      gameSelect.value = game.game_id;
      watchGame(game.game_id, game.phase);
    }
    refreshHeader();
  };

  gameSelect.addEventListener("change", async () => {
    const { games } = await client.allGames();
    const game = games.find((g) => g.game_id === gameSelect.value);
    if (game) watchGame(game.game_id, game.phase);
  });

  const transition = (action: (id: string) => Promise<{ phase: string }>) => async () => {
    if (!currentGame) return;
    try {
      const result = await action(currentGame.game_id);
      currentGame.phase = result.phase;
      tracker.phase = result.phase;
      refreshHeader();
      await loadGames();
    } catch (err) {
      alert(String(err));
    }
  };
  openBtn.addEventListener("click", transition((id) => client.openGame(id)));
  advanceBtn.addEventListener("click", transition((id) => client.advanceGame(id)));
  closeBtn.addEventListener("click", transition((id) => client.closeGame(id)));

  void loadGames();
}
