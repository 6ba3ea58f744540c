"""Game lifecycle: authoring, code-gated joining, two-phase play, answers.

One `GameStore` owns all games, sessions, and answers behind a single lock,
so concurrent callers serialize per mutation.  Every mutation first
validates, then builds a self-contained event dict, hands it to the journal
callback (the write-ahead log, when one is attached), and only then applies
it to memory.  Replaying the same events through `apply_event` rebuilds an
identical store, which is how restarts recover state.

Phase rules.  A game moves created -> phase1_open -> phase2_open -> closed,
professor-driven only.  A session moves phase1 -> phase2 -> done.  Under
professor_triggered advance, students who submitted a diagram wait in phase1
until the professor advances everyone; under individual advance, a session
jumps to phase2 the moment its diagram lands.  Entering phase2 reveals the
reference diagram, so diagram submissions are only accepted from sessions
still in phase1 (resubmission supersedes, is recorded in history, and flags
the answer).
"""

import secrets
import threading
from datetime import datetime, timezone

from . import grading
from .diagram import Diagram, check_path_shape

CREATED = "created"
PHASE1_OPEN = "phase1_open"
PHASE2_OPEN = "phase2_open"
CLOSED = "closed"

SESSION_PHASE1 = "phase1"
SESSION_PHASE2 = "phase2"
SESSION_DONE = "done"

PROFESSOR_TRIGGERED = "professor_triggered"
INDIVIDUAL = "individual"

MAX_PATHS_PER_ANSWER = 200


class GameError(Exception):
    code = "game_error"


class AccessDeniedError(GameError):
    code = "access_denied"


class PhaseError(GameError):
    code = "wrong_phase"


class NotFoundError(GameError):
    code = "not_found"


class RejectedError(GameError):
    code = "rejected"


def utc_now_iso():
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds").replace(
        "+00:00", "Z"
    )


def _default_token_source():
    return secrets.token_urlsafe(16)


class _Game:
    def __init__(self, game_id, game_number, code, diagram, paths, cc, mode, created_at):
        self.game_id = game_id
        self.game_number = game_number
        self.code = code
        self.reference_diagram = diagram
        self.reference_paths = paths
        self.reference_cc = cc
        self.advance_mode = mode
        self.phase = CREATED
        self.created_at = created_at


class _Session:
    def __init__(self, token, student_id, game_id, phase, joined_at):
        self.token = token
        self.student_id = student_id
        self.game_id = game_id
        self.phase = phase
        self.joined_at = joined_at


class _Answer:
    def __init__(self, answer_id, student_id, game_id, game_number):
        self.answer_id = answer_id
        self.student_id = student_id
        self.game_id = game_id
        self.game_number = game_number
        self.submitted_at_diagram = None
        self.submitted_at_paths = None
        self.diagram_doc = None
        self.paths = None
        self.analysis = None
        self.resubmitted = False
        self.diagram_missing = False
        self.diagram_history = []

    @property
    def status(self):
        return "complete" if self.paths is not None else "diagram_only"

    def summary(self):
        return {
            "answer_id": self.answer_id,
            "student_id": self.student_id,
            "game_id": self.game_id,
            "game_number": self.game_number,
            "submitted_at_diagram": self.submitted_at_diagram,
            "submitted_at_paths": self.submitted_at_paths,
            "status": self.status,
            "resubmitted": self.resubmitted,
            "diagram_missing": self.diagram_missing,
        }

    def full(self):
        doc = self.summary()
        doc["diagram"] = self.diagram_doc
        doc["paths"] = self.paths
        doc["analysis"] = self.analysis
        doc["diagram_history"] = list(self.diagram_history)
        return doc


class GameStore:
    def __init__(self, clock=utc_now_iso, token_source=_default_token_source,
                 code_case_insensitive=True):
        self._lock = threading.RLock()
        self._clock = clock
        self._token_source = token_source
        self._ci_codes = code_case_insensitive
        self.journal = None  # set by the persistence layer
        self._games = {}
        self._sessions = {}
        self._answers = {}
        self._answer_order = []
        self._next_game_ordinal = 1
        self._next_answer_ordinal = 1

    # -- helpers -----------------------------------------------------------

    def _code_key(self, code):
        return code.casefold() if self._ci_codes else code

    def _commit(self, event):
        if self.journal is not None:
            self.journal(event)
        self.apply_event(event)

    def _game(self, game_id):
        game = self._games.get(game_id)
        if game is None:
            raise NotFoundError(f"no game {game_id!r}")
        return game

    def _session(self, token):
        session = self._sessions.get(token)
        if session is None:
            raise AccessDeniedError("unknown or expired session token")
        return session

    def _answer_for(self, student_id, game_id):
        for answer_id in self._answer_order:
            answer = self._answers[answer_id]
            if answer.student_id == student_id and answer.game_id == game_id:
                return answer
        return None

    # -- professor operations ----------------------------------------------

    def create_game(self, reference_diagram_doc, reference_paths, code, advance_mode):
        with self._lock:
            if not isinstance(code, str):
                raise RejectedError("code must be a string")
            code = code.strip()
            if not (4 <= len(code) <= 12) or any(c.isspace() for c in code):
                raise RejectedError("code must be 4-12 characters with no spaces")
            if advance_mode not in (PROFESSOR_TRIGGERED, INDIVIDUAL):
                raise RejectedError(
                    f"advance_mode must be {PROFESSOR_TRIGGERED!r} or {INDIVIDUAL!r}"
                )
            diagram = Diagram.decode(reference_diagram_doc)
            metrics = diagram.metrics()
            if metrics.n < 1:
                raise RejectedError("reference diagram has no process nodes")
            if not metrics.connected:
                raise RejectedError("reference diagram is not weakly connected")
            if not isinstance(reference_paths, list):
                raise RejectedError("reference_paths must be a list of paths")
            checked_paths = []
            for i, path in enumerate(reference_paths):
                path = check_path_shape(path)
                check = diagram.validate_path(path)
                if not check.valid:
                    if check.missing_pair:
                        detail = f"missing edge {check.missing_pair[0]}->{check.missing_pair[1]}"
                    else:
                        detail = f"unknown node {check.unknown_node}"
                    raise RejectedError(f"reference path {i} is invalid: {detail}")
                checked_paths.append(path)
            if len(checked_paths) != metrics.cc_structural:
                raise RejectedError(
                    f"reference needs exactly {metrics.cc_structural} paths "
                    f"(cyclomatic complexity), got {len(checked_paths)}"
                )
            ordinal = self._next_game_ordinal
            event = {
                "op": "create_game",
                "game_id": f"g{ordinal}",
                "game_number": ordinal,
                "code": code,
                "advance_mode": advance_mode,
                "reference_diagram": diagram.encode(),
                "reference_paths": checked_paths,
                "reference_cc": metrics.cc_structural,
                "at": self._clock(),
            }
            self._commit(event)
            return {
                "game_id": event["game_id"],
                "game_number": ordinal,
                "reference_cc": metrics.cc_structural,
            }

    def open_game(self, game_id):
        with self._lock:
            game = self._game(game_id)
            if game.phase != CREATED:
                raise PhaseError(f"cannot open a game in phase {game.phase!r}")
            self._commit({"op": "open_game", "game_id": game_id, "at": self._clock()})
            return {"game_id": game_id, "phase": PHASE1_OPEN}

    def advance_game(self, game_id):
        with self._lock:
            game = self._game(game_id)
            if game.phase != PHASE1_OPEN:
                raise PhaseError(f"cannot advance a game in phase {game.phase!r}")
            self._commit({"op": "advance_game", "game_id": game_id, "at": self._clock()})
            return {"game_id": game_id, "phase": PHASE2_OPEN}

    def close_game(self, game_id):
        with self._lock:
            game = self._game(game_id)
            if game.phase != PHASE2_OPEN:
                raise PhaseError(f"cannot close a game in phase {game.phase!r}")
            self._commit({"op": "close_game", "game_id": game_id, "at": self._clock()})
            return {"game_id": game_id, "phase": CLOSED}

    def monitor(self, game_id):
        with self._lock:
            game = self._game(game_id)
            sessions = [s for s in self._sessions.values() if s.game_id == game_id]
            answers = [
                self._answers[a]
                for a in self._answer_order
                if self._answers[a].game_id == game_id
            ]
            previews = [
                {"student_id": a.student_id, "diagram": a.diagram_doc}
                for a in answers
                if a.diagram_doc is not None and not a.diagram_missing
            ]
            return {
                "game_id": game_id,
                "game_number": game.game_number,
                "phase": game.phase,
                "players_count": len(sessions),
                "diagrams_submitted": sum(1 for a in answers if a.diagram_doc is not None),
                "paths_submitted": sum(1 for a in answers if a.paths is not None),
                "previews": previews,
            }

    def list_all_games(self):
        with self._lock:
            return [
                {
                    "game_id": g.game_id,
                    "game_number": g.game_number,
                    "phase": g.phase,
                    "advance_mode": g.advance_mode,
                    "reference_cc": g.reference_cc,
                    "code": g.code,
                    "created_at": g.created_at,
                }
                for g in sorted(self._games.values(), key=lambda g: g.game_number)
            ]

    def game_reference(self, game_id):
        with self._lock:
            game = self._game(game_id)
            return {
                "game_id": game.game_id,
                "game_number": game.game_number,
                "reference_diagram": game.reference_diagram.encode(),
                "reference_paths": [list(p) for p in game.reference_paths],
                "reference_cc": game.reference_cc,
            }

    def list_answers(self, game_id=None):
        with self._lock:
            if game_id is not None and game_id not in self._games:
                raise NotFoundError(f"no game {game_id!r}")
            return [
                self._answers[a].summary()
                for a in self._answer_order
                if game_id is None or self._answers[a].game_id == game_id
            ]

    def get_answer(self, answer_id):
        with self._lock:
            answer = self._answers.get(answer_id)
            if answer is None:
                raise NotFoundError(f"no answer {answer_id!r}")
            return answer.full()

    def delete_answer(self, answer_id):
        with self._lock:
            if answer_id not in self._answers:
                raise NotFoundError(f"no answer {answer_id!r}")
            self._commit({"op": "delete_answer", "answer_id": answer_id,
                          "at": self._clock()})
            return {"answer_id": answer_id, "deleted": True}

    # -- student operations --------------------------------------------------

    def list_games(self, code):
        if not isinstance(code, str):
            return []
        key = self._code_key(code.strip())
        with self._lock:
            return [
                {"game_number": g.game_number, "phase": g.phase}
                for g in sorted(self._games.values(), key=lambda g: g.game_number)
                if self._code_key(g.code) == key and g.phase in (PHASE1_OPEN, PHASE2_OPEN)
            ]

    def join(self, code, student_id, game_number):
        if not isinstance(student_id, str) or not student_id.strip():
            raise AccessDeniedError("a student identification number is required")
        student_id = student_id.strip()
        if len(student_id) > 32:
            raise AccessDeniedError("student identification number too long")
        with self._lock:
            game = next(
                (g for g in self._games.values() if g.game_number == game_number), None
            )
            if (
                game is None
                or not isinstance(code, str)
                or self._code_key(game.code) != self._code_key(code.strip())
                or game.phase == CREATED
            ):
                # no existence oracle: wrong code and wrong number look the same
                raise AccessDeniedError("no open game matches that code")
            if game.phase == CLOSED:
                raise PhaseError("the game is closed")
            existing = next(
                (
                    s
                    for s in self._sessions.values()
                    if s.student_id == student_id and s.game_id == game.game_id
                ),
                None,
            )
            if existing is not None:
                return {
                    "session_token": existing.token,
                    "session_phase": existing.phase,
                    "game_number": game.game_number,
                    "resumed": True,
                }
            token = self._token_source()
            phase = SESSION_PHASE2 if game.phase == PHASE2_OPEN else SESSION_PHASE1
            event = {
                "op": "join",
                "game_id": game.game_id,
                "student_id": student_id,
                "session_token": token,
                "session_phase": phase,
                "at": self._clock(),
            }
            self._commit(event)
            return {
                "session_token": token,
                "session_phase": phase,
                "game_number": game.game_number,
                "resumed": False,
            }

    def submit_diagram(self, session_token, diagram_doc):
        with self._lock:
            session = self._session(session_token)
            game = self._games[session.game_id]
            if session.phase != SESSION_PHASE1:
                raise PhaseError("the diagram phase is over for this session")
            if game.phase == CLOSED:
                raise PhaseError("the game is closed")
            if game.advance_mode == PROFESSOR_TRIGGERED and game.phase != PHASE1_OPEN:
                raise PhaseError("the diagram phase has ended for this game")
            diagram = Diagram.decode(diagram_doc)  # strict; raises DecodeError
            answer = self._answer_for(session.student_id, session.game_id)
            answer_id = answer.answer_id if answer else f"a{self._next_answer_ordinal}"
            event = {
                "op": "submit_diagram",
                "session_token": session_token,
                "answer_id": answer_id,
                "diagram": diagram.encode(),
                "at": self._clock(),
            }
            self._commit(event)
            return {
                "accepted": True,
                "session_phase": self._sessions[session_token].phase,
                "resubmitted": self._answers[answer_id].resubmitted,
            }

    def submit_paths(self, session_token, paths):
        with self._lock:
            session = self._session(session_token)
            game = self._games[session.game_id]
            if session.phase == SESSION_DONE:
                raise PhaseError("paths were already submitted for this session")
            if session.phase != SESSION_PHASE2:
                raise PhaseError("the path phase has not started for this session")
            if game.phase == CLOSED:
                raise PhaseError("the game is closed")
            if not isinstance(paths, list) or len(paths) > MAX_PATHS_PER_ANSWER:
                raise RejectedError(
                    f"paths must be a list of at most {MAX_PATHS_PER_ANSWER} paths"
                )
            checked = [check_path_shape(p) for p in paths]
            answer = self._answer_for(session.student_id, session.game_id)
            answer_id = answer.answer_id if answer else f"a{self._next_answer_ordinal}"
            event = {
                "op": "submit_paths",
                "session_token": session_token,
                "answer_id": answer_id,
                "paths": checked,
                "at": self._clock(),
            }
            self._commit(event)
            return {"accepted": True, "done": True, "answer_id": answer_id}

    def session_state(self, session_token):
        with self._lock:
            session = self._session(session_token)
            game = self._games[session.game_id]
            answer = self._answer_for(session.student_id, session.game_id)
            return {
                "student_id": session.student_id,
                "game_number": game.game_number,
                "game_phase": game.phase,
                "session_phase": session.phase,
                "advance_mode": game.advance_mode,
                "diagram_submitted": bool(
                    answer and answer.diagram_doc is not None and not answer.diagram_missing
                ),
                "paths_submitted": bool(answer and answer.paths is not None),
            }

    def phase2_payload(self, session_token):
        with self._lock:
            session = self._session(session_token)
            if session.phase == SESSION_PHASE1:
                raise PhaseError("the reference diagram is not revealed yet")
            game = self._games[session.game_id]
            return {
                "game_number": game.game_number,
                "reference_diagram": game.reference_diagram.encode(),
            }

    def session_game_id(self, session_token):
        with self._lock:
            return self._session(session_token).game_id

    def sessions_of_game(self, game_id):
        with self._lock:
            return [
                {"session_token": s.token, "student_id": s.student_id, "phase": s.phase}
                for s in self._sessions.values()
                if s.game_id == game_id
            ]

    # -- event application (normal path and replay) ---------------------------

    def apply_event(self, event):
        with self._lock:
            op = event["op"]
            if op == "create_game":
                game = _Game(
                    event["game_id"],
                    event["game_number"],
                    event["code"],
                    Diagram.decode(event["reference_diagram"]),
                    [list(p) for p in event["reference_paths"]],
                    event["reference_cc"],
                    event["advance_mode"],
                    event["at"],
                )
                self._games[game.game_id] = game
                self._next_game_ordinal = max(
                    self._next_game_ordinal, game.game_number + 1
                )
            elif op == "open_game":
                self._games[event["game_id"]].phase = PHASE1_OPEN
            elif op == "advance_game":
                game = self._games[event["game_id"]]
                game.phase = PHASE2_OPEN
                for session in self._sessions.values():
                    if session.game_id == game.game_id and session.phase == SESSION_PHASE1:
                        session.phase = SESSION_PHASE2
            elif op == "close_game":
                self._games[event["game_id"]].phase = CLOSED
            elif op == "join":
                session = _Session(
                    event["session_token"],
                    event["student_id"],
                    event["game_id"],
                    event["session_phase"],
                    event["at"],
                )
                self._sessions[session.token] = session
            elif op == "submit_diagram":
                session = self._sessions[event["session_token"]]
                answer = self._ensure_answer(event["answer_id"], session)
                if answer.diagram_doc is not None:
                    answer.resubmitted = True
                    answer.diagram_history.append(
                        {"diagram": answer.diagram_doc, "at": answer.submitted_at_diagram}
                    )
                answer.diagram_doc = event["diagram"]
                answer.diagram_missing = False
                answer.submitted_at_diagram = event["at"]
                game = self._games[session.game_id]
                if game.advance_mode == INDIVIDUAL:
                    session.phase = SESSION_PHASE2
            elif op == "submit_paths":
                session = self._sessions[event["session_token"]]
                game = self._games[session.game_id]
                answer = self._ensure_answer(event["answer_id"], session)
                if answer.diagram_doc is None:
                    # phase 1 was skipped; keep the record complete with an
                    # empty canvas and say so
                    answer.diagram_missing = True
                    answer.diagram_doc = Diagram(
                        game.reference_diagram.width, game.reference_diagram.height
                    ).encode()
                    answer.submitted_at_diagram = event["at"]
                answer.paths = [list(p) for p in event["paths"]]
                answer.submitted_at_paths = event["at"]
                answer.analysis = grading.analyze_answer(
                    Diagram.decode(answer.diagram_doc),
                    answer.paths,
                    game.reference_diagram,
                    game.reference_cc,
                ).as_dict()
                session.phase = SESSION_DONE
            elif op == "delete_answer":
                self._answers.pop(event["answer_id"], None)
                self._answer_order = [
                    a for a in self._answer_order if a != event["answer_id"]
                ]
            else:
                raise ValueError(f"unknown event op {op!r}")

    def _ensure_answer(self, answer_id, session):
        answer = self._answers.get(answer_id)
        if answer is None:
            game = self._games[session.game_id]
            answer = _Answer(answer_id, session.student_id, session.game_id,
                             game.game_number)
            self._answers[answer_id] = answer
            self._answer_order.append(answer_id)
            ordinal = int(answer_id[1:])
            self._next_answer_ordinal = max(self._next_answer_ordinal, ordinal + 1)
        return answer

    # -- snapshot support ------------------------------------------------------

    def state_dump(self):
        with self._lock:
            return {
                "next_game_ordinal": self._next_game_ordinal,
                "next_answer_ordinal": self._next_answer_ordinal,
                "games": [
                    {
                        "game_id": g.game_id,
                        "game_number": g.game_number,
                        "code": g.code,
                        "advance_mode": g.advance_mode,
                        "phase": g.phase,
                        "created_at": g.created_at,
                        "reference_diagram": g.reference_diagram.encode(),
                        "reference_paths": [list(p) for p in g.reference_paths],
                        "reference_cc": g.reference_cc,
                    }
                    for g in self._games.values()
                ],
                "sessions": [
                    {
                        "session_token": s.token,
                        "student_id": s.student_id,
                        "game_id": s.game_id,
                        "phase": s.phase,
                        "joined_at": s.joined_at,
                    }
                    for s in self._sessions.values()
                ],
                "answers": [
                    self._answers[a].full() for a in self._answer_order
                ],
            }

    def load_state(self, state):
        with self._lock:
            self._games.clear()
            self._sessions.clear()
            self._answers.clear()
            self._answer_order = []
            self._next_game_ordinal = state["next_game_ordinal"]
            self._next_answer_ordinal = state["next_answer_ordinal"]
            for g in state["games"]:
                game = _Game(
                    g["game_id"],
                    g["game_number"],
                    g["code"],
                    Diagram.decode(g["reference_diagram"]),
                    [list(p) for p in g["reference_paths"]],
                    g["reference_cc"],
                    g["advance_mode"],
                    g["created_at"],
                )
                game.phase = g["phase"]
                self._games[game.game_id] = game
            for s in state["sessions"]:
                session = _Session(
                    s["session_token"], s["student_id"], s["game_id"], s["phase"],
                    s["joined_at"],
                )
                self._sessions[session.token] = session
            for a in state["answers"]:
                answer = _Answer(
                    a["answer_id"], a["student_id"], a["game_id"], a["game_number"]
                )
                answer.submitted_at_diagram = a["submitted_at_diagram"]
                answer.submitted_at_paths = a["submitted_at_paths"]
                answer.diagram_doc = a["diagram"]
                answer.paths = a["paths"]
                answer.analysis = a["analysis"]
                answer.resubmitted = a["resubmitted"]
                answer.diagram_missing = a["diagram_missing"]
                answer.diagram_history = list(a.get("diagram_history", []))
                self._answers[answer.answer_id] = answer
                self._answer_order.append(answer.answer_id)
