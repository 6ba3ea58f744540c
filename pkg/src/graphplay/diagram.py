"""Diagram document model: numbered process nodes, star markers, directed edges.

Process nodes are always numbered exactly 1..n with no gaps: an insert takes
the smallest free number, and deleting a node slides the numbers above it
down one, so the badge freed by the most recent removal is what the next
insert receives.  Star nodes mark regions and carry no number; edges never
touch them.  Edges are directed (8->2 does not imply 2->8) and at most one
edge may exist per ordered (from, to) pair; self-loops are allowed.

The canonical JSON form produced by `encode` / accepted by `decode` is the
wire and storage format everywhere in this package.  `decode` is strict:
unknown fields, wrong types, and invariant violations are all rejected with
a location string.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels

PROCESS = "process"
STAR = "star"
STRAIGHT = "straight"
CURVED = "curved"

MAX_PATH_ENTRY = 10**9  # keeps walks inside int64


class DiagramError(ValueError):
    """Base for all diagram rejections."""

    code = "diagram_error"


class BoundsError(DiagramError):
    code = "out_of_bounds"

    def __init__(self, position, extent):
        self.position = tuple(position)
        self.extent = tuple(extent)
        super().__init__(
            f"position {self.position} outside canvas 0..{extent[0]} x 0..{extent[1]}"
        )


class UnknownItemError(DiagramError):
    code = "not_found"


class EdgeError(DiagramError):
    code = "edge_rejected"


class DecodeError(DiagramError):
    code = "decode_error"

    def __init__(self, message, location=""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class MalformedPathError(DiagramError):
    code = "malformed_path"


@dataclass
class Node:
    node_id: str
    kind: str
    number: int | None
    x: int
    y: int


@dataclass
class Edge:
    edge_id: str
    from_id: str
    to_id: str
    shape: str = STRAIGHT
    control_points: list[tuple[int, int]] | None = None


@dataclass
class GraphMetrics:
    """Structural counts of a diagram.

    cc_structural is e - n + 2 and is None when there are no process nodes.
    cc_declared is the star count (the student's claimed complexity).
    The formula assumes one weakly connected component; `connected` lets
    callers flag disconnected sketches instead of trusting the number.
    """

    n: int
    e: int
    cc_structural: int | None
    cc_declared: int
    connected: bool

    def as_dict(self):
        return {
            "n": self.n,
            "e": self.e,
            "cc_structural": self.cc_structural,
            "cc_declared": self.cc_declared,
            "connected": self.connected,
        }


@dataclass
class PathCheck:
    """Outcome of walking a node-number path over a diagram.

    On failure, `failure_position` is the index of the offending entry for an
    unknown number, or the index of the hop's first entry for a missing edge,
    whichever offence comes first scanning left to right.
    """

    valid: bool
    failure_position: int | None = None
    missing_pair: tuple[int, int] | None = None
    unknown_node: int | None = None

    def as_dict(self):
        return {
            "valid": self.valid,
            "failure_position": self.failure_position,
            "missing_pair": list(self.missing_pair) if self.missing_pair else None,
            "unknown_node": self.unknown_node,
        }


@dataclass
class Diagram:
    width: int = 40
    height: int = 60
    nodes: dict[str, Node] = field(default_factory=dict)
    edges: dict[str, Edge] = field(default_factory=dict)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise DiagramError("canvas extent must be positive")
        self._pairs = {(e.from_id, e.to_id) for e in self.edges.values()}

    # -- queries ---------------------------------------------------------

    def process_nodes(self):
        return [n for n in self.nodes.values() if n.kind == PROCESS]

    def star_count(self):
        return sum(1 for n in self.nodes.values() if n.kind == STAR)

    def used_numbers(self):
        return {n.number for n in self.nodes.values() if n.kind == PROCESS}

    def node_by_number(self, number):
        for n in self.nodes.values():
            if n.kind == PROCESS and n.number == number:
                return n
        return None

    def edge_pairs_by_number(self):
        """Directed edge set over process-node numbers."""
        return {
            (self.nodes[e.from_id].number, self.nodes[e.to_id].number)
            for e in self.edges.values()
        }

    # -- mutations -------------------------------------------------------

    def insert_node(self, kind, position):
        x, y = position
        if kind not in (PROCESS, STAR):
            raise DiagramError(f"unknown node kind {kind!r}")
        if not (0 <= x <= self.width and 0 <= y <= self.height):
            raise BoundsError(position, (self.width, self.height))
        number = None
        if kind == PROCESS:
            used = self.used_numbers()
            number = 1
            while number in used:
                number += 1
        node = Node(self._fresh_id("n"), kind, number, int(x), int(y))
        self.nodes[node.node_id] = node
        return node

    def delete_item(self, item_id):
        if item_id in self.nodes:
            for edge_id in [
                eid
                for eid, e in self.edges.items()
                if e.from_id == item_id or e.to_id == item_id
            ]:
                edge = self.edges.pop(edge_id)
                self._pairs.discard((edge.from_id, edge.to_id))
            removed = self.nodes.pop(item_id)
            if removed.kind == PROCESS:
                # keep numbers exactly 1..n: badges above the gap slide down
                for node in self.nodes.values():
                    if node.kind == PROCESS and node.number > removed.number:
                        node.number -= 1
        elif item_id in self.edges:
            edge = self.edges.pop(item_id)
            self._pairs.discard((edge.from_id, edge.to_id))
        else:
            raise UnknownItemError(f"no node or edge with id {item_id!r}")

    def reset(self):
        self.nodes.clear()
        self.edges.clear()
        self._pairs.clear()

    def add_edge(self, from_id, to_id, shape=STRAIGHT, control_points=None):
        for endpoint in (from_id, to_id):
            node = self.nodes.get(endpoint)
            if node is None:
                raise EdgeError(f"endpoint {endpoint!r} does not exist")
            if node.kind != PROCESS:
                raise EdgeError(f"endpoint {endpoint!r} is a star node")
        if (from_id, to_id) in self._pairs:
            raise EdgeError(f"duplicate edge {from_id!r} -> {to_id!r}")
        if shape == CURVED:
            if control_points is None or len(control_points) != 2:
                raise EdgeError("curved edge needs exactly 2 control points")
            control_points = [(int(x), int(y)) for x, y in control_points]
        elif shape == STRAIGHT:
            if control_points:
                raise EdgeError("straight edge takes no control points")
            control_points = None
        else:
            raise EdgeError(f"unknown edge shape {shape!r}")
        edge = Edge(self._fresh_id("e"), from_id, to_id, shape, control_points)
        self.edges[edge.edge_id] = edge
        self._pairs.add((from_id, to_id))
        return edge

    def _fresh_id(self, prefix):
        k = len(self.nodes) + len(self.edges) + 1
        while f"{prefix}{k}" in self.nodes or f"{prefix}{k}" in self.edges:
            k += 1
        return f"{prefix}{k}"

    # -- mathematics ------------------------------------------------------

    def metrics(self):
        procs = self.process_nodes()
        n = len(procs)
        e = len(self.edges)
        cc = e - n + 2 if n >= 1 else None
        return GraphMetrics(n, e, cc, self.star_count(), self._weakly_connected())

    def _weakly_connected(self):
        procs = self.process_nodes()
        if len(procs) <= 1:
            return True
        parent = {node.node_id: node.node_id for node in procs}

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for edge in self.edges.values():
            parent[find(edge.from_id)] = find(edge.to_id)
        roots = {find(node.node_id) for node in procs}
        return len(roots) == 1

    def adjacency(self):
        """Dense boolean adjacency over numbers 1..n (row/col = number - 1)."""
        n = len(self.process_nodes())
        adj = np.zeros((n, n), dtype=np.bool_)
        for a, b in self.edge_pairs_by_number():
            adj[a - 1, b - 1] = True
        return adj

    def validate_path(self, path):
        path = check_path_shape(path)
        status, pos = kernels.walk_path(self.adjacency(), path)
        if status == kernels.VALID:
            return PathCheck(valid=True)
        if status == kernels.UNKNOWN_NODE:
            return PathCheck(False, failure_position=pos, unknown_node=path[pos])
        return PathCheck(
            False, failure_position=pos, missing_pair=(path[pos], path[pos + 1])
        )

    # -- canonical document ------------------------------------------------

    def encode(self):
        doc = {
            "canvas": {"w": self.width, "h": self.height},
            "nodes": [],
            "edges": [],
        }
        for node in self.nodes.values():
            entry = {"id": node.node_id, "kind": node.kind, "x": node.x, "y": node.y}
            if node.kind == PROCESS:
                entry["number"] = node.number
            doc["nodes"].append(entry)
        for edge in self.edges.values():
            entry = {
                "id": edge.edge_id,
                "from": edge.from_id,
                "to": edge.to_id,
                "shape": edge.shape,
            }
            if edge.shape == CURVED:
                entry["cp"] = [list(p) for p in edge.control_points]
            doc["edges"].append(entry)
        return doc

    @classmethod
    def decode(cls, doc):
        if not isinstance(doc, dict):
            raise DecodeError("document must be an object")
        _reject_unknown(doc, {"canvas", "nodes", "edges"}, "")
        canvas = doc.get("canvas")
        if not isinstance(canvas, dict):
            raise DecodeError("missing or non-object field", "canvas")
        _reject_unknown(canvas, {"w", "h"}, "canvas")
        w = _require_int(canvas.get("w"), "canvas.w", minimum=1)
        h = _require_int(canvas.get("h"), "canvas.h", minimum=1)
        diagram = cls(w, h)

        nodes = doc.get("nodes")
        if not isinstance(nodes, list):
            raise DecodeError("missing or non-array field", "nodes")
        for i, raw in enumerate(nodes):
            where = f"nodes[{i}]"
            if not isinstance(raw, dict):
                raise DecodeError("node must be an object", where)
            _reject_unknown(raw, {"id", "kind", "number", "x", "y"}, where)
            node_id = _require_str(raw.get("id"), f"{where}.id")
            if node_id in diagram.nodes:
                raise DecodeError(f"duplicate node id {node_id!r}", where)
            kind = raw.get("kind")
            if kind not in (PROCESS, STAR):
                raise DecodeError(f"kind must be {PROCESS!r} or {STAR!r}", where)
            x = _require_int(raw.get("x"), f"{where}.x", minimum=0, maximum=w)
            y = _require_int(raw.get("y"), f"{where}.y", minimum=0, maximum=h)
            number = None
            if kind == PROCESS:
                number = _require_int(raw.get("number"), f"{where}.number", minimum=1)
            elif "number" in raw:
                raise DecodeError("star nodes carry no number", where)
            diagram.nodes[node_id] = Node(node_id, kind, number, x, y)

        numbers = sorted(diagram.used_numbers())
        expected = list(range(1, len(numbers) + 1))
        if numbers != expected or len(numbers) != len(diagram.process_nodes()):
            raise DecodeError(
                f"process numbers must be exactly 1..{len(diagram.process_nodes())}",
                "nodes",
            )

        edges = doc.get("edges")
        if not isinstance(edges, list):
            raise DecodeError("missing or non-array field", "edges")
        for i, raw in enumerate(edges):
            where = f"edges[{i}]"
            if not isinstance(raw, dict):
                raise DecodeError("edge must be an object", where)
            _reject_unknown(raw, {"id", "from", "to", "shape", "cp"}, where)
            edge_id = _require_str(raw.get("id"), f"{where}.id")
            if edge_id in diagram.edges or edge_id in diagram.nodes:
                raise DecodeError(f"duplicate id {edge_id!r}", where)
            shape = raw.get("shape")
            if shape not in (STRAIGHT, CURVED):
                raise DecodeError(f"shape must be {STRAIGHT!r} or {CURVED!r}", where)
            cp = None
            if shape == CURVED:
                cp_raw = raw.get("cp")
                if not isinstance(cp_raw, list) or len(cp_raw) != 2:
                    raise DecodeError("curved edge needs exactly 2 control points", where)
                cp = []
                for j, point in enumerate(cp_raw):
                    if not isinstance(point, list) or len(point) != 2:
                        raise DecodeError("control point must be [x, y]", f"{where}.cp[{j}]")
                    cp.append(
                        (
                            _require_int(point[0], f"{where}.cp[{j}][0]"),
                            _require_int(point[1], f"{where}.cp[{j}][1]"),
                        )
                    )
            elif "cp" in raw:
                raise DecodeError("straight edge takes no control points", where)
            from_id = _require_str(raw.get("from"), f"{where}.from")
            to_id = _require_str(raw.get("to"), f"{where}.to")
            for endpoint in (from_id, to_id):
                node = diagram.nodes.get(endpoint)
                if node is None:
                    raise DecodeError(f"endpoint {endpoint!r} does not exist", where)
                if node.kind != PROCESS:
                    raise DecodeError(f"endpoint {endpoint!r} is a star node", where)
            if (from_id, to_id) in diagram._pairs:
                raise DecodeError(f"duplicate edge {from_id!r} -> {to_id!r}", where)
            diagram.edges[edge_id] = Edge(edge_id, from_id, to_id, shape, cp)
            diagram._pairs.add((from_id, to_id))

        return diagram

    def copy(self):
        return Diagram.decode(self.encode())


def check_path_shape(path):
    """Reject anything that is not a list of at least two node numbers."""
    if not isinstance(path, (list, tuple)):
        raise MalformedPathError("path must be a list of node numbers")
    if len(path) < 2:
        raise MalformedPathError("a path needs at least 2 node numbers")
    out = []
    for i, value in enumerate(path):
        if isinstance(value, bool) or not isinstance(value, int):
            raise MalformedPathError(f"path[{i}] must be an integer")
        if not (1 <= value <= MAX_PATH_ENTRY):
            raise MalformedPathError(f"path[{i}] must be in 1..{MAX_PATH_ENTRY}")
        out.append(value)
    return out


def _reject_unknown(obj, allowed, where):
    unknown = set(obj) - allowed
    if unknown:
        name = sorted(unknown)[0]
        raise DecodeError(f"unknown field {name!r}", where or "document")


def _require_int(value, where, minimum=None, maximum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise DecodeError("must be an integer", where)
    if minimum is not None and value < minimum:
        raise DecodeError(f"must be >= {minimum}", where)
    if maximum is not None and value > maximum:
        raise DecodeError(f"must be <= {maximum}", where)
    return value


def _require_str(value, where):
    if not isinstance(value, str) or not value:
        raise DecodeError("must be a non-empty string", where)
    if len(value) > 64:
        raise DecodeError("must be at most 64 characters", where)
    return value
