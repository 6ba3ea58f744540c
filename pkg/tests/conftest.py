import random
import socket
import threading
import time

import pytest
import uvicorn

from graphplay.diagram import Diagram


def free_port():
    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()
    return port


class LiveServer:
    """uvicorn in a daemon thread, for tests that need real streaming."""

    def __init__(self, app, port=None):
        self.port = port or free_port()
        self.url = f"http://127.0.0.1:{self.port}"
        self._server = uvicorn.Server(
            uvicorn.Config(app, host="127.0.0.1", port=self.port, log_level="error")
        )
        self._thread = threading.Thread(target=self._server.run, daemon=True)

    def __enter__(self):
        self._thread.start()
        deadline = time.monotonic() + 10
        while not self._server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("server did not start")
            time.sleep(0.02)
        return self

    def __exit__(self, *exc):
        self._server.should_exit = True
        self._thread.join(timeout=5)


def build_doc(numbers, edges, stars=0, w=40, h=60, curved=()):
    """Compact diagram-document builder for tests.

    numbers: iterable of process-node numbers; edges: (from, to) number
    pairs; curved: subset of edges rendered with two control points.
    """
    nodes = [
        {"id": f"n{v}", "kind": "process", "number": v,
         "x": (3 * v) % w, "y": (5 * v) % h}
        for v in numbers
    ]
    nodes += [
        {"id": f"s{i}", "kind": "star", "x": (7 * i + 1) % w, "y": (11 * i + 1) % h}
        for i in range(1, stars + 1)
    ]
    docs = []
    for i, (a, b) in enumerate(edges, start=1):
        entry = {"id": f"e{i}", "from": f"n{a}", "to": f"n{b}", "shape": "straight"}
        if (a, b) in curved:
            entry["shape"] = "curved"
            entry["cp"] = [[1, 1], [2, 2]]
        docs.append(entry)
    return {"canvas": {"w": w, "h": h}, "nodes": nodes, "edges": docs}


# The grading walk-through everything reproduces: eight process nodes, nine
# directed edges (8->2 exists, 2->8 does not), three stars, so the structural
# complexity is 9 - 8 + 2 = 3 and matches the declared star count.
EXAM_EDGES = [
    (1, 2), (2, 3), (3, 4), (2, 5), (4, 6), (5, 6), (6, 7), (6, 8), (8, 2),
]

# A proper basis: three walks, each introducing at least one unused edge.
EXAM_BASIS_PATHS = [
    [1, 2, 3, 4, 6, 7],
    [1, 2, 5, 6, 7],
    [1, 2, 3, 4, 6, 8, 2, 5, 6, 7],
]

# The submitted answer being graded: four paths, every one unwalkable, the
# first failing on the missing hop 2->8.
EXAM_WRONG_PATHS = [
    [1, 2, 8],
    [1, 2, 4],
    [1, 3, 5],
    [2, 6, 7],
]

EXAM_STUDENT_ID = "236138"


def exam_doc(stars=3):
    return build_doc(range(1, 9), EXAM_EDGES, stars=stars)


@pytest.fixture
def exam_diagram():
    return Diagram.decode(exam_doc())


# Graph on which 1-2-3-2-3-2-3-4 is a legal walk (loop between 2 and 3).
LOOP_EDGES = [(1, 2), (2, 3), (3, 2), (3, 4)]


def loop_doc(stars=2):
    return build_doc(range(1, 5), LOOP_EDGES, stars=stars)


def random_digraph(rng: random.Random, n, p=0.35):
    edges = [
        (a, b)
        for a in range(1, n + 1)
        for b in range(1, n + 1)
        if rng.random() < p
    ]
    return edges


def doc_from_edges(n, edges, stars=0):
    return build_doc(range(1, n + 1), edges, stars=stars)
