"""Deterministic analysis of a submitted answer: metrics, structure, paths.

The report reproduces how a marker reasons about an answer sheet: does the
declared complexity (star count) match the structural count, does the drawn
graph match the reference, is every listed path walkable, does the path
count equal the expected complexity, and does each path contribute an edge
the earlier ones did not (listed order matters).
"""

from dataclasses import dataclass

from .diagram import Diagram

# structure verdicts
LABEL_EXACT_MATCH = "label_exact_match"
ISOMORPHIC_MATCH = "isomorphic_match"
MISMATCH = "mismatch"
REFERENCE_ABSENT = "reference_absent"

# path-count verdicts
EQUALS_CC = "equals_cc"
BELOW_CC = "below_cc"
EXCEEDS_CC = "exceeds_cc"

# overall verdicts
CORRECT = "correct"
SUSPECT = "suspect"
INCORRECT = "incorrect"

ISOMORPHISM_NODE_LIMIT = 12


@dataclass
class EquivalenceCheck:
    label_exact: bool
    isomorphic: bool | None  # None when the search was skipped
    skipped: str | None = None

    def as_dict(self):
        return {
            "label_exact": self.label_exact,
            "isomorphic": self.isomorphic,
            "skipped": self.skipped,
        }


@dataclass
class PathReport:
    path: list[int]
    valid: bool
    failure_position: int | None
    missing_pair: tuple[int, int] | None
    unknown_node: int | None
    introduces_new_edge: bool

    def as_dict(self):
        return {
            "path": list(self.path),
            "verdict": "valid" if self.valid else "invalid",
            "failure_position": self.failure_position,
            "missing_pair": list(self.missing_pair) if self.missing_pair else None,
            "unknown_node": self.unknown_node,
            "introduces_new_edge": self.introduces_new_edge,
        }


@dataclass
class AnalysisReport:
    metrics: object
    cc_consistent: bool
    structure: str
    path_reports: list[PathReport]
    path_count_check: str
    overall_diagram: str
    overall_paths: str

    def as_dict(self):
        return {
            "metrics": self.metrics.as_dict(),
            "cc_consistent": self.cc_consistent,
            "structure": self.structure,
            "path_reports": [r.as_dict() for r in self.path_reports],
            "path_count_check": self.path_count_check,
            "overall_diagram": self.overall_diagram,
            "overall_paths": self.overall_paths,
        }


def path_edges(path):
    return {(path[i], path[i + 1]) for i in range(len(path) - 1)}


def independence_flags(paths, diagram):
    """Per-path flag: does path i use a directed edge paths 0..i-1 did not?

    Every path must already be edge-wise valid on `diagram`; an invalid path
    makes the notion meaningless, so it is refused outright.
    """
    for i, path in enumerate(paths):
        check = diagram.validate_path(path)
        if not check.valid:
            raise ValueError(f"path {i} is not valid on the diagram; validate first")
    flags = []
    covered = set()
    for path in paths:
        edges = path_edges(path)
        flags.append(bool(edges - covered))
        covered |= edges
    return flags


def graphs_equivalent(a: Diagram, b: Diagram) -> EquivalenceCheck:
    """Compare two diagrams over process-node numbers; stars are ignored.

    label_exact: same node count and identical directed edge sets.
    isomorphic: some renumbering maps one edge set onto the other, found by
    exhaustive backtracking (refused above ISOMORPHISM_NODE_LIMIT nodes).
    """
    na, nb = len(a.process_nodes()), len(b.process_nodes())
    ea, eb = a.edge_pairs_by_number(), b.edge_pairs_by_number()
    label_exact = na == nb and ea == eb
    if max(na, nb) > ISOMORPHISM_NODE_LIMIT:
        return EquivalenceCheck(label_exact, None, skipped="too large")
    return EquivalenceCheck(label_exact, _isomorphic(na, ea, nb, eb))


def _degree_signature(n, edges):
    out_deg = {v: 0 for v in range(1, n + 1)}
    in_deg = {v: 0 for v in range(1, n + 1)}
    loops = {v: False for v in range(1, n + 1)}
    for x, y in edges:
        out_deg[x] += 1
        in_deg[y] += 1
        if x == y:
            loops[x] = True
    return {v: (out_deg[v], in_deg[v], loops[v]) for v in range(1, n + 1)}


def _isomorphic(na, ea, nb, eb):
    if na != nb or len(ea) != len(eb):
        return False
    n = na
    if n == 0:
        return True
    sig_a = _degree_signature(n, ea)
    sig_b = _degree_signature(n, eb)
    if sorted(sig_a.values()) != sorted(sig_b.values()):
        return False
    candidates = {
        v: [w for w in range(1, n + 1) if sig_b[w] == sig_a[v]] for v in range(1, n + 1)
    }
    # most-constrained node first keeps the search shallow
    order = sorted(range(1, n + 1), key=lambda v: len(candidates[v]))
    mapping = {}
    used = set()

    def extend(idx):
        if idx == n:
            return True
        v = order[idx]
        for w in candidates[v]:
            if w in used:
                continue
            ok = True
            for u, mu in mapping.items():
                if ((v, u) in ea) != ((w, mu) in eb) or ((u, v) in ea) != ((mu, w) in eb):
                    ok = False
                    break
            if ok and ((v, v) in ea) == ((w, w) in eb):
                mapping[v] = w
                used.add(w)
                if extend(idx + 1):
                    return True
                del mapping[v]
                used.discard(w)
        return False

    return extend(0)


def analyze_answer(
    submitted_diagram: Diagram,
    submitted_paths,
    reference_diagram: Diagram | None,
    reference_cc: int,
) -> AnalysisReport:
    """Build the full report for one answer.

    Paths are walked on the reference diagram when one is given (phase 2
    shows the reference graph, so that is the graph the numbers refer to);
    otherwise on the submitted diagram.
    """
    if reference_cc < 1:
        raise ValueError("reference_cc must be >= 1")
    metrics = submitted_diagram.metrics()
    cc_consistent = (
        metrics.cc_structural is not None
        and metrics.cc_structural == metrics.cc_declared
    )

    if reference_diagram is None:
        structure = REFERENCE_ABSENT
        structure_ok = True
    else:
        eq = graphs_equivalent(submitted_diagram, reference_diagram)
        if eq.label_exact:
            structure = LABEL_EXACT_MATCH
        elif eq.isomorphic:
            structure = ISOMORPHIC_MATCH
        else:
            structure = MISMATCH
        structure_ok = structure != MISMATCH

    context = reference_diagram if reference_diagram is not None else submitted_diagram
    path_reports = []
    covered = set()
    all_valid = True
    all_new = True
    for path in submitted_paths:
        check = context.validate_path(path)
        introduces = False
        if check.valid:
            edges = path_edges(path)
            introduces = bool(edges - covered)
            covered |= edges
            all_new = all_new and introduces
        else:
            all_valid = False
        path_reports.append(
            PathReport(
                list(path),
                check.valid,
                check.failure_position,
                check.missing_pair,
                check.unknown_node,
                introduces,
            )
        )

    count = len(path_reports)
    if count == reference_cc:
        path_count_check = EQUALS_CC
    elif count < reference_cc:
        path_count_check = BELOW_CC
    else:
        path_count_check = EXCEEDS_CC

    if cc_consistent and metrics.connected and structure_ok:
        overall_diagram = CORRECT
    elif cc_consistent and metrics.connected:
        overall_diagram = SUSPECT
    else:
        overall_diagram = INCORRECT

    paths_ok = all_valid and path_count_check == EQUALS_CC and all_new
    overall_paths = CORRECT if paths_ok else INCORRECT

    return AnalysisReport(
        metrics,
        cc_consistent,
        structure,
        path_reports,
        path_count_check,
        overall_diagram,
        overall_paths,
    )
