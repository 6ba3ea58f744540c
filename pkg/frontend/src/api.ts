/**
 * Gateway protocol client. Speaks only the documented endpoints and the
 * canonical JSON documents; no private channels.
 */

import { DiagramDoc } from "./document.js";

export interface GameListing {
  game_number: number;
  phase: string;
}

export interface JoinResult {
  session_token: string;
  session_phase: string;
  game_number: number;
  resumed: boolean;
}

export interface SessionState {
  student_id: string;
  game_number: number;
  game_phase: string;
  session_phase: string;
  advance_mode: string;
  diagram_submitted: boolean;
  paths_submitted: boolean;
}

export interface MonitorSnapshot {
  game_id: string;
  game_number: number;
  phase: string;
  players_count: number;
  diagrams_submitted: number;
  paths_submitted: number;
  previews: Array<{ student_id: string; diagram: DiagramDoc }>;
}

export interface AnswerSummary {
  answer_id: string;
  student_id: string;
  game_id: string;
  game_number: number;
  submitted_at_diagram: string | null;
  submitted_at_paths: string | null;
  status: string;
  resubmitted: boolean;
  diagram_missing: boolean;
}

export interface PathReport {
  path: number[];
  verdict: "valid" | "invalid";
  failure_position: number | null;
  missing_pair: [number, number] | null;
  unknown_node: number | null;
  introduces_new_edge: boolean;
}

export interface Analysis {
  metrics: {
    n: number;
    e: number;
    cc_structural: number | null;
    cc_declared: number;
    connected: boolean;
  };
  cc_consistent: boolean;
  structure: string;
  path_reports: PathReport[];
  path_count_check: string;
  overall_diagram: string;
  overall_paths: string;
}

export interface FullAnswer extends AnswerSummary {
  diagram: DiagramDoc | null;
  paths: number[][] | null;
  analysis: Analysis | null;
  diagram_history: Array<{ diagram: DiagramDoc; at: string }>;
}

export class ApiError extends Error {
  constructor(readonly status: number, readonly code: string, message: string) {
    super(message);
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    const error = (body as { error?: { code?: string; message?: string } })?.error;
    throw new ApiError(
      response.status,
      error?.code ?? "unknown",
      error?.message ?? `request failed with ${response.status}`,
    );
  }
  return body as T;
}

export class GatewayClient {
  constructor(
    readonly baseUrl: string,
    private professorSecret?: string,
  ) {}

  private headers(professor = false): Record<string, string> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (professor && this.professorSecret) {
      headers["Authorization"] = `Bearer ${this.professorSecret}`;
    }
    return headers;
  }

  private async get<T>(path: string, professor = false): Promise<T> {
    return unwrap<T>(await fetch(this.baseUrl + path, { headers: this.headers(professor) }));
  }

  private async send<T>(
    method: string,
    path: string,
    body?: unknown,
    professor = false,
  ): Promise<T> {
    return unwrap<T>(
      await fetch(this.baseUrl + path, {
        method,
        headers: this.headers(professor),
        body: body === undefined ? undefined : JSON.stringify(body),
      }),
    );
  }

  // student surface

  listGames(code: string): Promise<{ games: GameListing[] }> {
    return this.get(`/api/games?code=${encodeURIComponent(code)}`);
  }

  join(code: string, studentId: string, gameNumber: number): Promise<JoinResult> {
    return this.send("POST", "/api/join", {
      code,
      student_id: studentId,
      game_number: gameNumber,
    });
  }

  submitDiagram(token: string, diagram: DiagramDoc): Promise<{ accepted: boolean; session_phase: string; resubmitted: boolean }> {
    return this.send("POST", "/api/session/diagram", { session_token: token, diagram });
  }

  submitPaths(token: string, paths: number[][]): Promise<{ accepted: boolean; done: boolean; answer_id: string }> {
    return this.send("POST", "/api/session/paths", { session_token: token, paths });
  }

  sessionState(token: string): Promise<SessionState> {
    return this.get(`/api/session/state?session_token=${encodeURIComponent(token)}`);
  }

  phase2Payload(token: string): Promise<{ game_number: number; reference_diagram: DiagramDoc }> {
    return this.get(`/api/session/phase2?session_token=${encodeURIComponent(token)}`);
  }

  studentEventsUrl(token: string): string {
    return `${this.baseUrl}/api/events?session_token=${encodeURIComponent(token)}`;
  }

  // professor surface

  createGame(body: {
    reference_diagram: DiagramDoc;
    reference_paths: number[][];
    code: string;
    advance_mode: string;
  }): Promise<{ game_id: string; game_number: number; reference_cc: number }> {
    return this.send("POST", "/api/prof/games", body, true);
  }

  openGame(gameId: string): Promise<{ phase: string }> {
    return this.send("POST", `/api/prof/games/${gameId}/open`, undefined, true);
  }

  advanceGame(gameId: string): Promise<{ phase: string }> {
    return this.send("POST", `/api/prof/games/${gameId}/advance`, undefined, true);
  }

  closeGame(gameId: string): Promise<{ phase: string }> {
    return this.send("POST", `/api/prof/games/${gameId}/close`, undefined, true);
  }

  allGames(): Promise<{ games: Array<{ game_id: string; game_number: number; phase: string; code: string; advance_mode: string; reference_cc: number }> }> {
    return this.get("/api/prof/games", true);
  }

  monitor(gameId: string): Promise<MonitorSnapshot> {
    return this.get(`/api/prof/games/${gameId}/monitor`, true);
  }

  reference(gameId: string): Promise<{ game_number: number; reference_diagram: DiagramDoc; reference_paths: number[][]; reference_cc: number }> {
    return this.get(`/api/prof/games/${gameId}/reference`, true);
  }

  answers(gameId?: string): Promise<{ answers: AnswerSummary[] }> {
    const query = gameId ? `?game_id=${encodeURIComponent(gameId)}` : "";
    return this.get(`/api/prof/answers${query}`, true);
  }

  answer(answerId: string): Promise<FullAnswer> {
    return this.get(`/api/prof/answers/${answerId}`, true);
  }

  deleteAnswer(answerId: string): Promise<{ deleted: boolean }> {
    return this.send("DELETE", `/api/prof/answers/${answerId}`, undefined, true);
  }

  professorEventsUrl(gameId?: string): string {
    const query = gameId ? `?game_id=${encodeURIComponent(gameId)}` : "";
    return `${this.baseUrl}/api/prof/events${query}`;
  }

  professorAuthHeaders(): Record<string, string> {
    return this.professorSecret ? { Authorization: `Bearer ${this.professorSecret}` } : {};
  }
}

export interface StreamEvent {
  id: number;
  type: string;
  data: { game_id: string; payload: unknown };
}

export interface StreamHandle {
  close(): void;
}

/**
 * Server-sent events over fetch (EventSource cannot carry the professor's
 * bearer header). Per-connection sequence ids dedup redeliveries; any
 * disconnect triggers onResync so the caller refetches a state snapshot,
 * then the stream reconnects.
 */
export function subscribeEvents(
  url: string,
  handlers: {
    onEvent: (event: StreamEvent) => void;
    onResync?: () => void;
    headers?: Record<string, string>;
    reconnectDelayMs?: number;
  },
): StreamHandle {
  let closed = false;
  let controller = new AbortController();

  const loop = async () => {
    while (!closed) {
      let lastSeq = 0;
      try {
        const response = await fetch(url, {
          headers: { Accept: "text/event-stream", ...(handlers.headers ?? {}) },
          signal: controller.signal,
        });
        if (!response.ok || !response.body) throw new Error(`stream ${response.status}`);
        const reader = response.body.getReader();
        const decoder = new TextDecoder();
        let buffer = "";
        let id = 0;
        let type = "";
        let data = "";
        for (;;) {
          const { done, value } = await reader.read();
          if (done) break;
          buffer += decoder.decode(value, { stream: true });
          let newline;
          while ((newline = buffer.indexOf("\n")) >= 0) {
            const line = buffer.slice(0, newline).replace(/\r$/, "");
            buffer = buffer.slice(newline + 1);
            if (line.startsWith("id:")) id = Number(line.slice(3).trim());
            else if (line.startsWith("event:")) type = line.slice(6).trim();
            else if (line.startsWith("data:")) data = line.slice(5).trim();
            else if (line === "" && type) {
              if (id > lastSeq) {
                lastSeq = id;
                if (type === "overflow") throw new Error("stream overflow");
                handlers.onEvent({ id, type, data: data ? JSON.parse(data) : {} });
              }
              id = 0;
              type = "";
              data = "";
            }
          }
        }
      } catch {
        // fall through to resync + reconnect
      }
      if (closed) return;
      handlers.onResync?.();
      await new Promise((resolve) => setTimeout(resolve, handlers.reconnectDelayMs ?? 1000));
    }
  };
  void loop();

  return {
    close() {
      closed = true;
      controller.abort();
    },
  };
}
