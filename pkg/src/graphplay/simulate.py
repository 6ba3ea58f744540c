"""Load harness: drive a live server with a classroom of virtual students.

The simulator plays a full game: it authors a reference (as the professor),
opens it, has every virtual student join with a distinct AM, submit a
randomized-but-valid diagram, waits for the advance, then submit paths.
At the end it checks what the server must guarantee: one persisted answer
per finishing student, monitor counters matching, and exactly one
phase-advanced notification per connected student after dedup.  Any
violated check lands in the report's failures list.
"""

import json
import random
import threading
import time
from dataclasses import dataclass, field

import httpx

ALL_SUBMIT = "all_submit"
HALF_DROP = "half_drop"


@dataclass
class SimulationConfig:
    server_url: str
    students: int
    professor_secret: str
    profile: str = ALL_SUBMIT
    advance_mode: str = "professor_triggered"
    seed: int = 0
    timeout: float = 60.0
    retry_window: float = 20.0


@dataclass
class SimulationReport:
    ok: bool = False
    students: int = 0
    joined: int = 0
    diagrams_submitted: int = 0
    paths_submitted: int = 0
    answers_persisted: int = 0
    complete_answers: int = 0
    counters: dict = field(default_factory=dict)
    phase_advanced_counts: dict = field(default_factory=dict)
    monitor_updates_seen: int = 0
    failures: list = field(default_factory=list)
    duration: float = 0.0

    def as_dict(self):
        return self.__dict__.copy()


# -- randomized inputs ----------------------------------------------------------


def make_reference(rng, chain_length=5, extra_edges=2):
    """Build a connected diagram with a known basis path set.

    A numbered chain gives one base path; every extra shortcut or back edge
    raises the complexity by one and contributes the path that walks it, so
    the basis has exactly cyclomatic-complexity members by construction.
    """
    k = chain_length
    width, height = 40, 60
    doc = {"canvas": {"w": width, "h": height}, "nodes": [], "edges": []}
    for i in range(1, k + 1):
        doc["nodes"].append(
            {"id": f"n{i}", "kind": "process", "number": i,
             "x": 2 + (3 * i) % (width - 3), "y": 2 + (5 * i) % (height - 3)}
        )
    edge_idx = 1
    pairs = set()

    def add_edge(a, b):
        nonlocal edge_idx
        doc["edges"].append(
            {"id": f"e{edge_idx}", "from": f"n{a}", "to": f"n{b}", "shape": "straight"}
        )
        pairs.add((a, b))
        edge_idx += 1

    for i in range(1, k):
        add_edge(i, i + 1)
    chain = list(range(1, k + 1))
    paths = [chain]
    added = 0
    while added < extra_edges:
        if rng.random() < 0.5:
            a = rng.randrange(1, k - 1)
            b = rng.randrange(a + 2, k + 1)  # forward shortcut, skips >= 1 node
        else:
            b = rng.randrange(2, k + 1)
            a = rng.randrange(1, b)  # back edge
            a, b = b, a
        if (a, b) in pairs:
            continue
        add_edge(a, b)
        if a < b:
            paths.append(chain[:a] + chain[b - 1 :])
        else:
            paths.append(chain[:a] + chain[b - 1 :])
        added += 1
    # stars mark the regions the complexity promises
    cc = len(doc["edges"]) - k + 2
    for s in range(cc):
        doc["nodes"].append(
            {"id": f"s{s + 1}", "kind": "star",
             "x": 1 + (7 * s) % (width - 1), "y": 1 + (11 * s) % (height - 1)}
        )
    return doc, paths, cc


def random_student_diagram(rng):
    doc, _paths, _cc = make_reference(
        rng, chain_length=rng.randrange(4, 8), extra_edges=rng.randrange(1, 4)
    )
    return doc

def random_walk_paths(rng, diagram_doc, count):
    """Edge-wise valid random walks over a diagram document."""
    number_of = {n["id"]: n["number"] for n in diagram_doc["nodes"]
                 if n["kind"] == "process"}
    out = {}
    for e in diagram_doc["edges"]:
        out.setdefault(number_of[e["from"]], []).append(number_of[e["to"]])
    starts = sorted(v for v in out)
    paths = []
    for _ in range(count):
        at = rng.choice(starts)
        path = [at]
        for _ in range(rng.randrange(1, 6)):
            nxt = out.get(path[-1])
            if not nxt:
                break
            path.append(rng.choice(nxt))
        while len(path) < 2:
            path.append(rng.choice(out[path[0]]))
        paths.append(path)
    return paths


# -- resilient HTTP -------------------------------------------------------------


class PatientClient:
    """httpx wrapper that rides out connection losses (server restarts)."""

    def __init__(self, base_url, retry_window, headers=None):
        self.base_url = base_url.rstrip("/")
        self.retry_window = retry_window
        self.client = httpx.Client(timeout=10.0, headers=headers or {})

    def request(self, method, path, **kw):
        deadline = time.monotonic() + self.retry_window
        while True:
            try:
                return self.client.request(method, self.base_url + path, **kw)
            except httpx.TransportError:
                if time.monotonic() >= deadline:
                    raise
                time.sleep(0.2)

    def get(self, path, **kw):
        return self.request("GET", path, **kw)

    def post(self, path, **kw):
        return self.request("POST", path, **kw)

    def close(self):
        self.client.close()


class EventListener(threading.Thread):
    """Holds one student event stream; dedups by sequence number."""

    def __init__(self, base_url, session_token, on_phase_advanced):
        super().__init__(daemon=True)
        self.base_url = base_url.rstrip("/")
        self.session_token = session_token
        self.on_phase_advanced = on_phase_advanced
        self.phase_advanced_seen = 0
        self.stop_flag = threading.Event()
        self.connected = threading.Event()

    def run(self):
        while not self.stop_flag.is_set():
            last_seq = 0  # per-connection sequence numbers
            try:
                with httpx.Client(timeout=httpx.Timeout(10.0, read=30.0)) as client:
                    with client.stream(
                        "GET",
                        f"{self.base_url}/api/events",
                        params={"session_token": self.session_token},
                    ) as response:
                        self.connected.set()
                        event_type, event_id = None, None
                        for line in response.iter_lines():
                            if self.stop_flag.is_set():
                                return
                            if line.startswith("id:"):
                                event_id = int(line[3:].strip())
                            elif line.startswith("event:"):
                                event_type = line[6:].strip()
                            elif line == "":
                                if event_type and event_id is not None:
                                    if event_id > last_seq:
                                        last_seq = event_id
                                        if event_type == "phase_advanced":
                                            self.phase_advanced_seen += 1
                                            self.on_phase_advanced()
                                event_type, event_id = None, None
            except httpx.HTTPError:
                pass
            if not self.stop_flag.is_set():
                time.sleep(0.3)

    def stop(self):
        self.stop_flag.set()


# -- the run itself -------------------------------------------------------------


class _Student:
    def __init__(self, index, config, code, game_number):
        self.index = index
        self.am = f"{200000 + index}"
        self.config = config
        self.code = code
        self.game_number = game_number
        self.rng = random.Random(config.seed * 1000 + index)
        self.submitted_diagram = False
        self.submitted_paths = False
        self.advanced = threading.Event()
        self.listener = None
        self.error = None
        self.drops_after_phase1 = (
            config.profile == HALF_DROP and index % 2 == 1
        )

    def play(self):
        client = PatientClient(self.config.server_url, self.config.retry_window)
        try:
            games = client.get("/api/games", params={"code": self.code}).json()["games"]
            if not any(g["game_number"] == self.game_number for g in games):
                raise RuntimeError(f"game {self.game_number} not listed for code")
            joined = client.post(
                "/api/join",
                json={"code": self.code, "student_id": self.am,
                      "game_number": self.game_number},
            )
            joined.raise_for_status()
            token = joined.json()["session_token"]

            self.listener = EventListener(
                self.config.server_url, token, self.advanced.set
            )
            self.listener.start()
            self.listener.connected.wait(timeout=5.0)

            time.sleep(self.rng.random() * 0.3)  # classroom jitter
            diagram = random_student_diagram(self.rng)
            sent = client.post(
                "/api/session/diagram",
                json={"session_token": token, "diagram": diagram},
            )
            sent.raise_for_status()
            self.submitted_diagram = True

            if self.drops_after_phase1:
                return

            # event stream first, polling fallback second
            deadline = time.monotonic() + self.config.timeout
            while not self.advanced.is_set():
                if time.monotonic() >= deadline:
                    raise RuntimeError("timed out waiting for the path phase")
                if self.advanced.wait(timeout=0.5):
                    break
                state = client.get(
                    "/api/session/state", params={"session_token": token}
                ).json()
                if state["session_phase"] in ("phase2", "done"):
                    break

            payload = client.get(
                "/api/session/phase2", params={"session_token": token}
            ).json()
            paths = random_walk_paths(
                self.rng, payload["reference_diagram"], count=self.rng.randrange(2, 5)
            )
            time.sleep(self.rng.random() * 0.3)
            sent = client.post(
                "/api/session/paths", json={"session_token": token, "paths": paths}
            )
            sent.raise_for_status()
            self.submitted_paths = True
        except Exception as exc:  # recorded, not raised: the report decides
            self.error = f"student {self.am}: {exc}"
        finally:
            client.close()


def simulate_classroom(config: SimulationConfig) -> SimulationReport:
    report = SimulationReport(students=config.students)
    started = time.monotonic()
    rng = random.Random(config.seed)
    prof = PatientClient(
        config.server_url,
        config.retry_window,
        headers={"Authorization": f"Bearer {config.professor_secret}"},
    )
    monitor_updates = {"count": 0}
    prof_listener = None
    students = []
    try:
        code = "SIM" + "".join(rng.choice("ABCDEFGHJKMNPQRSTUVWXYZ23456789")
                               for _ in range(4))
        reference_diagram, reference_paths, _cc = make_reference(rng)
        created = prof.post(
            "/api/prof/games",
            json={
                "reference_diagram": reference_diagram,
                "reference_paths": reference_paths,
                "code": code,
                "advance_mode": config.advance_mode,
            },
        )
        created.raise_for_status()
        game = created.json()
        game_id = game["game_id"]

        prof_listener = _professor_listener(config, game_id, monitor_updates)
        opened = prof.post(f"/api/prof/games/{game_id}/open")
        opened.raise_for_status()

        students = [
            _Student(i, config, code, game["game_number"])
            for i in range(config.students)
        ]
        threads = [threading.Thread(target=s.play, daemon=True) for s in students]
        for t in threads:
            t.start()

        expected_diagrams = config.students
        deadline = time.monotonic() + config.timeout
        while time.monotonic() < deadline:
            snap = prof.get(f"/api/prof/games/{game_id}/monitor").json()
            if snap["diagrams_submitted"] >= expected_diagrams:
                break
            time.sleep(0.2)

        prof.post(f"/api/prof/games/{game_id}/advance").raise_for_status()

        expected_paths = sum(1 for s in students if not s.drops_after_phase1)
        while time.monotonic() < deadline:
            snap = prof.get(f"/api/prof/games/{game_id}/monitor").json()
            if snap["paths_submitted"] >= expected_paths:
                break
            time.sleep(0.2)

        for t in threads:
            t.join(timeout=config.timeout)

        prof.post(f"/api/prof/games/{game_id}/close").raise_for_status()

        # -- verification ---------------------------------------------------
        snap = prof.get(f"/api/prof/games/{game_id}/monitor").json()
        answers = prof.get(
            "/api/prof/answers", params={"game_id": game_id}
        ).json()["answers"]
        complete = [a for a in answers if a["status"] == "complete"]

        report.joined = snap["players_count"]
        report.diagrams_submitted = sum(1 for s in students if s.submitted_diagram)
        report.paths_submitted = sum(1 for s in students if s.submitted_paths)
        report.answers_persisted = len(answers)
        report.complete_answers = len(complete)
        report.counters = {
            "players_count": snap["players_count"],
            "diagrams_submitted": snap["diagrams_submitted"],
            "paths_submitted": snap["paths_submitted"],
        }
        report.phase_advanced_counts = {
            s.am: (s.listener.phase_advanced_seen if s.listener else 0)
            for s in students
        }
        report.monitor_updates_seen = monitor_updates["count"]

        for s in students:
            if s.error:
                report.failures.append(s.error)
        if report.joined != config.students:
            report.failures.append(
                f"players_count {report.joined} != students {config.students}"
            )
        if snap["diagrams_submitted"] != expected_diagrams:
            report.failures.append(
                f"diagrams_submitted {snap['diagrams_submitted']} != {expected_diagrams}"
            )
        if snap["paths_submitted"] != expected_paths:
            report.failures.append(
                f"paths_submitted {snap['paths_submitted']} != {expected_paths}"
            )
        if len(answers) != expected_diagrams:
            report.failures.append(
                f"answers persisted {len(answers)} != {expected_diagrams}"
            )
        if len(complete) != expected_paths:
            report.failures.append(
                f"complete answers {len(complete)} != {expected_paths}"
            )
        submitted_ams = {a["student_id"] for a in answers}
        missing = {s.am for s in students if s.submitted_diagram} - submitted_ams
        if missing:
            report.failures.append(f"answers missing for: {sorted(missing)}")
        for s in students:
            if s.drops_after_phase1 or not s.listener:
                continue
            seen = s.listener.phase_advanced_seen
            if seen != 1:
                report.failures.append(
                    f"student {s.am} saw {seen} phase_advanced events, wanted 1"
                )
    except Exception as exc:
        report.failures.append(f"run aborted: {exc}")
    finally:
        for s in students:
            if s.listener:
                s.listener.stop()
        if prof_listener is not None:
            prof_listener.stop()
        prof.close()
    report.duration = time.monotonic() - started
    report.ok = not report.failures
    return report


def _professor_listener(config, game_id, counter):
    class _ProfListener(EventListener):
        def run(self):
            try:
                with httpx.Client(timeout=httpx.Timeout(10.0, read=30.0)) as client:
                    with client.stream(
                        "GET",
                        f"{self.base_url}/api/prof/events",
                        params={"game_id": game_id},
                        headers={
                            "Authorization": f"Bearer {config.professor_secret}"
                        },
                    ) as response:
                        for line in response.iter_lines():
                            if self.stop_flag.is_set():
                                return
                            if line.startswith("event:") and \
                                    line[6:].strip() == "monitor_update":
                                counter["count"] += 1
            except httpx.HTTPError:
                pass

    listener = _ProfListener(config.server_url, "", lambda: None)
    listener.start()
    return listener


def print_report(report: SimulationReport, out=None):
    print(json.dumps(report.as_dict(), indent=2, sort_keys=True), file=out)
