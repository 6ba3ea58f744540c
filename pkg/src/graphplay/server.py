"""HTTP gateway: request/response endpoints, live event streams, durability.

Students reach code-gated routes under /api; the professor's routes under
/api/prof require the bearer secret configured at startup.  All request and
response bodies are the canonical JSON documents (see PROTOCOL.md).  Every
accepted mutation is journaled to disk before the response is sent.

Event streams are server-sent events with per-connection sequence numbers;
clients that lose the stream re-subscribe and fetch the state snapshot
endpoint instead of relying on replay.
"""

import asyncio
import hmac
import json
import logging
from dataclasses import dataclass

import numpy as np
from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, StreamingResponse

from . import events as ev
from . import kernels
from .diagram import DiagramError
from .games import (
    AccessDeniedError,
    GameError,
    GameStore,
    NotFoundError,
    PhaseError,
    RejectedError,
)
from .persistence import Persister, StorageError

log = logging.getLogger(__name__)

SSE_POLL_SECONDS = 0.05
SSE_PING_SECONDS = 10.0


@dataclass
class ServerConfig:
    listen_port: int = 8000
    data_dir: str = "./data"
    professor_secret: str = ""
    max_body_bytes: int = 1_000_000
    code_case_insensitive: bool = True
    snapshot_every: int = 100
    host: str = "127.0.0.1"


class ApiError(Exception):
    def __init__(self, status, code, message):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


class BodyTooLarge(Exception):
    pass


class BodyLimitMiddleware:
    """Rejects oversized request bodies before they are consumed."""

    def __init__(self, app, max_bytes):
        self.app = app
        self.max_bytes = max_bytes

    async def __call__(self, scope, receive, send):
        if scope["type"] != "http":
            await self.app(scope, receive, send)
            return
        declared = None
        for name, value in scope.get("headers", []):
            if name == b"content-length":
                try:
                    declared = int(value)
                except ValueError:
                    declared = None
        if declared is not None and declared > self.max_bytes:
            await _send_error(send, 413, "body_too_large",
                              f"body exceeds {self.max_bytes} bytes")
            return

        seen = 0

        async def counting_receive():
            nonlocal seen
            message = await receive()
            if message["type"] == "http.request":
                seen += len(message.get("body", b""))
                if seen > self.max_bytes:
                    raise BodyTooLarge()
            return message

        await self.app(scope, counting_receive, send)


async def _send_error(send, status, code, message):
    body = json.dumps({"error": {"code": code, "message": message}}).encode()
    await send(
        {
            "type": "http.response.start",
            "status": status,
            "headers": [
                (b"content-type", b"application/json"),
                (b"content-length", str(len(body)).encode()),
            ],
        }
    )
    await send({"type": "http.response.body", "body": body})


def _error_response(status, code, message):
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "message": message}}
    )


def _fields(payload, required, optional=()):
    if not isinstance(payload, dict):
        raise ApiError(400, "bad_request", "body must be a JSON object")
    unknown = set(payload) - set(required) - set(optional)
    if unknown:
        raise ApiError(400, "bad_request", f"unknown field {sorted(unknown)[0]!r}")
    missing = [k for k in required if k not in payload]
    if missing:
        raise ApiError(400, "bad_request", f"missing field {missing[0]!r}")
    return payload


def create_app(config: ServerConfig, store: GameStore | None = None,
               hub: ev.EventHub | None = None, persister: Persister | None = None):
    app = FastAPI(title="graphplay", docs_url=None, redoc_url=None, openapi_url=None)
    store = store if store is not None else GameStore(
        code_case_insensitive=config.code_case_insensitive
    )
    hub = hub if hub is not None else ev.EventHub()
    if persister is None and config.data_dir:
        persister = Persister(config.data_dir, snapshot_every=config.snapshot_every)
    if persister is not None:
        persister.attach(store)

    app.state.config = config
    app.state.store = store
    app.state.hub = hub
    app.state.persister = persister

    # warm the walk kernel so the first request does not pay the compile
    kernels.walk_path(np.zeros((1, 1), dtype=np.bool_), [1, 1])

    # -- error mapping ------------------------------------------------------

    @app.exception_handler(ApiError)
    async def _api_error(_req, exc):
        return _error_response(exc.status, exc.code, exc.message)

    @app.exception_handler(DiagramError)
    async def _diagram_error(_req, exc):
        return _error_response(400, exc.code, str(exc))

    @app.exception_handler(GameError)
    async def _game_error(_req, exc):
        status = {
            AccessDeniedError: 403,
            PhaseError: 409,
            NotFoundError: 404,
            RejectedError: 400,
        }.get(type(exc), 400)
        return _error_response(status, exc.code, str(exc))

    @app.exception_handler(BodyTooLarge)
    async def _too_large(_req, _exc):
        return _error_response(413, "body_too_large",
                               f"body exceeds {config.max_body_bytes} bytes")

    @app.exception_handler(RequestValidationError)
    async def _bad_body(_req, exc):
        return _error_response(400, "bad_json", "body is not valid JSON")

    # -- auth ----------------------------------------------------------------

    def require_professor(request: Request):
        header = request.headers.get("authorization", "")
        expected = f"Bearer {config.professor_secret}"
        if not config.professor_secret or not hmac.compare_digest(header, expected):
            raise ApiError(401, "unauthorized", "professor secret required")

    # -- plumbing --------------------------------------------------------------

    def publish_monitor(game_id):
        try:
            snapshot = store.monitor(game_id)
        except NotFoundError:
            return
        hub.publish(ev.MONITOR_UPDATE, game_id, snapshot)

    @app.get("/api/health")
    def health():
        return {"ok": True}

    # -- student routes ---------------------------------------------------------

    @app.get("/api/games")
    def list_games(code: str = ""):
        return {"games": store.list_games(code)}

    @app.post("/api/join")
    def join(payload: dict = Body(...)):
        _fields(payload, ("code", "student_id", "game_number"))
        number = payload["game_number"]
        if not isinstance(number, int) or isinstance(number, bool):
            raise ApiError(400, "bad_request", "game_number must be an integer")
        result = store.join(payload["code"], payload["student_id"], number)
        game_id = store.session_game_id(result["session_token"])
        publish_monitor(game_id)
        return result

    @app.post("/api/session/diagram")
    def submit_diagram(payload: dict = Body(...)):
        _fields(payload, ("session_token", "diagram"))
        token = _require_token(payload["session_token"])
        result = store.submit_diagram(token, payload["diagram"])
        publish_monitor(store.session_game_id(token))
        return result

    @app.post("/api/session/paths")
    def submit_paths(payload: dict = Body(...)):
        _fields(payload, ("session_token", "paths"))
        token = _require_token(payload["session_token"])
        result = store.submit_paths(token, payload["paths"])
        publish_monitor(store.session_game_id(token))
        return result

    @app.get("/api/session/state")
    def session_state(session_token: str = ""):
        return store.session_state(_require_token(session_token))

    @app.get("/api/session/phase2")
    def phase2_payload(session_token: str = ""):
        return store.phase2_payload(_require_token(session_token))

    @app.get("/api/events")
    async def student_events(request: Request, session_token: str = ""):
        token = _require_token(session_token)
        game_id = store.session_game_id(token)
        sub = hub.subscribe("student", game_id)
        return StreamingResponse(
            _sse_stream(request, hub, sub), media_type="text/event-stream"
        )

    # -- professor routes ----------------------------------------------------------

    @app.post("/api/prof/games")
    def create_game(request: Request, payload: dict = Body(...)):
        require_professor(request)
        _fields(payload, ("reference_diagram", "reference_paths", "code"),
                ("advance_mode",))
        result = store.create_game(
            payload["reference_diagram"],
            payload["reference_paths"],
            payload["code"],
            payload.get("advance_mode", "professor_triggered"),
        )
        return result

    @app.post("/api/prof/games/{game_id}/open")
    def open_game(request: Request, game_id: str):
        require_professor(request)
        result = store.open_game(game_id)
        hub.publish(ev.GAME_OPENED, game_id, {"game_id": game_id})
        return result

    @app.post("/api/prof/games/{game_id}/advance")
    def advance_game(request: Request, game_id: str):
        require_professor(request)
        result = store.advance_game(game_id)
        reference = store.game_reference(game_id)
        hub.publish(
            ev.PHASE_ADVANCED,
            game_id,
            {
                "game_number": reference["game_number"],
                "reference_diagram": reference["reference_diagram"],
            },
        )
        publish_monitor(game_id)
        return result

    @app.post("/api/prof/games/{game_id}/close")
    def close_game(request: Request, game_id: str):
        require_professor(request)
        result = store.close_game(game_id)
        hub.publish(ev.GAME_CLOSED, game_id, {"game_id": game_id})
        return result

    @app.get("/api/prof/games")
    def all_games(request: Request):
        require_professor(request)
        return {"games": store.list_all_games()}

    @app.get("/api/prof/games/{game_id}/monitor")
    def monitor(request: Request, game_id: str):
        require_professor(request)
        return store.monitor(game_id)

    @app.get("/api/prof/games/{game_id}/reference")
    def game_reference(request: Request, game_id: str):
        require_professor(request)
        return store.game_reference(game_id)

    @app.get("/api/prof/answers")
    def list_answers(request: Request, game_id: str | None = None):
        require_professor(request)
        return {"answers": store.list_answers(game_id)}

    @app.get("/api/prof/answers/{answer_id}")
    def get_answer(request: Request, answer_id: str):
        require_professor(request)
        return store.get_answer(answer_id)

    @app.delete("/api/prof/answers/{answer_id}")
    def delete_answer(request: Request, answer_id: str):
        require_professor(request)
        return store.delete_answer(answer_id)

    @app.get("/api/prof/events")
    async def professor_events(request: Request, game_id: str | None = None):
        require_professor(request)
        sub = hub.subscribe("professor", game_id)
        return StreamingResponse(
            _sse_stream(request, hub, sub), media_type="text/event-stream"
        )

    app.add_middleware(BodyLimitMiddleware, max_bytes=config.max_body_bytes)
    return app


def _require_token(token):
    if not isinstance(token, str) or not token:
        raise ApiError(403, "access_denied", "session_token required")
    return token


async def _sse_stream(request: Request, hub, sub):
    idle = 0.0
    try:
        yield ": connected\n\n"
        while True:
            if sub.closed:
                # overflow: tell the client to resync and end the stream
                yield "event: overflow\ndata: {}\n\n"
                return
            items = sub.drain()
            if items:
                idle = 0.0
                for item in items:
                    payload = json.dumps(
                        {"game_id": item["game_id"], "payload": item["payload"]},
                        sort_keys=True,
                    )
                    yield (
                        f"id: {item['sequence_number']}\n"
                        f"event: {item['type']}\n"
                        f"data: {payload}\n\n"
                    )
            else:
                if await request.is_disconnected():
                    return
                await asyncio.sleep(SSE_POLL_SECONDS)
                idle += SSE_POLL_SECONDS
                if idle >= SSE_PING_SECONDS:
                    idle = 0.0
                    yield ": ping\n\n"
    finally:
        hub.unsubscribe(sub)


def serve(config: ServerConfig):
    """Run the gateway; raises SystemExit with a diagnostic on startup failure."""
    import uvicorn

    try:
        app = create_app(config)
    except StorageError as exc:
        raise SystemExit(f"startup failed: {exc}")
    persister = app.state.persister
    try:
        uvicorn.run(app, host=config.host, port=config.listen_port,
                    log_level="warning")
    finally:
        if persister is not None:
            persister.snapshot()
            persister.close()
