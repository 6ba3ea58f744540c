"""Byte-stable request/response transcripts for every endpoint.

The flow below touches each route once with fully deterministic identifiers
and clocks; the exact response bytes are frozen in golden/transcripts.json.
Regenerate deliberately after an intentional protocol change with:

    python3 tests/test_protocol_golden.py --regen
"""

import json
import sys
from pathlib import Path

from fastapi.testclient import TestClient

from graphplay.games import GameStore
from graphplay.server import ServerConfig, create_app

sys.path.insert(0, str(Path(__file__).parent))
from conftest import EXAM_BASIS_PATHS, EXAM_STUDENT_ID, EXAM_WRONG_PATHS, exam_doc

GOLDEN = Path(__file__).parent / "golden" / "transcripts.json"
SECRET = "golden-secret"
AUTH = {"Authorization": f"Bearer {SECRET}"}


def scripted_requests():
    bad_doc = exam_doc()
    bad_doc["nodes"][0]["kind"] = "triangle"
    return [
        ("GET", "/api/health", None, None),
        ("POST", "/api/prof/games", AUTH,
         {"reference_diagram": exam_doc(), "reference_paths": EXAM_BASIS_PATHS,
          "code": "QX7R2M", "advance_mode": "professor_triggered"}),
        ("POST", "/api/prof/games/g1/open", AUTH, None),
        ("GET", "/api/prof/games", AUTH, None),
        ("GET", "/api/games?code=QX7R2M", None, None),
        ("GET", "/api/games?code=WRONG9", None, None),
        ("POST", "/api/join", None,
         {"code": "qx7r2m", "student_id": EXAM_STUDENT_ID, "game_number": 1}),
        ("POST", "/api/join", None,
         {"code": "WRONG9", "student_id": "1002", "game_number": 1}),
        ("POST", "/api/session/diagram", None,
         {"session_token": "tok1", "diagram": exam_doc()}),
        ("POST", "/api/session/diagram", None,
         {"session_token": "tok1", "diagram": bad_doc}),
        ("POST", "/api/session/paths", None,
         {"session_token": "tok1", "paths": EXAM_WRONG_PATHS}),
        ("GET", "/api/session/state?session_token=tok1", None, None),
        ("POST", "/api/prof/games/g1/advance", AUTH, None),
        ("GET", "/api/session/phase2?session_token=tok1", None, None),
        ("POST", "/api/session/paths", None,
         {"session_token": "tok1", "paths": EXAM_WRONG_PATHS}),
        ("GET", "/api/prof/games/g1/monitor", AUTH, None),
        ("GET", "/api/prof/games/g1/reference", AUTH, None),
        ("GET", "/api/prof/answers", AUTH, None),
        ("GET", "/api/prof/answers/a1", AUTH, None),
        ("GET", "/api/prof/answers/a9", AUTH, None),
        ("DELETE", "/api/prof/answers/a1", AUTH, None),
        ("POST", "/api/prof/games/g1/close", AUTH, None),
        ("POST", "/api/prof/games/g1/advance", AUTH, None),
        ("GET", "/api/events?session_token=", None, None),
        ("GET", "/api/prof/events", None, None),
        ("POST", "/api/prof/games", {"Authorization": "Bearer wrong"}, {}),
    ]


def run_flow():
    ticks = iter(range(1, 100000))
    store = GameStore(
        clock=lambda: f"2026-08-11T09:00:{next(ticks) % 60:02d}.000Z",
        token_source=iter(f"tok{i}" for i in range(1, 100)).__next__,
    )
    app = create_app(
        ServerConfig(data_dir="", professor_secret=SECRET), store=store
    )
    client = TestClient(app)
    transcript = []
    for method, path, headers, body in scripted_requests():
        response = client.request(method, path, headers=headers, json=body)
        transcript.append(
            {
                "request": {"method": method, "path": path,
                            "authorized": headers is not None and "Authorization" in headers,
                            "body": body},
                "status": response.status_code,
                "response_bytes": response.content.decode("utf-8"),
            }
        )
    return transcript


def test_transcripts_are_byte_stable():
    assert GOLDEN.exists(), "golden transcripts missing; run --regen and commit"
    recorded = json.loads(GOLDEN.read_text())
    live = run_flow()
    assert len(live) == len(recorded)
    for got, want in zip(live, recorded):
        assert got["request"]["path"] == want["request"]["path"]
        assert got["status"] == want["status"], (want["request"], got)
        assert got["response_bytes"] == want["response_bytes"], want["request"]


if __name__ == "__main__":
    if "--regen" in sys.argv:
        GOLDEN.parent.mkdir(exist_ok=True)
        GOLDEN.write_text(json.dumps(run_flow(), indent=1))
        print(f"wrote {GOLDEN}")
    else:
        print(__doc__)
