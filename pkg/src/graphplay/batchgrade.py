"""Offline grading of stored answer files against one reference.

Reads every *.json in the answers directory (sorted, so output order is
deterministic), grades each against the reference file, and emits a single
JSON report to the output stream.  Files that do not decode are collected
in a failures section instead of aborting the run.
"""

import json
import sys
from pathlib import Path

from . import grading
from .diagram import Diagram, DiagramError, check_path_shape


class ReferenceError(ValueError):
    pass


def load_reference(path):
    """Accepts {"reference_diagram": ..} (game export) or {"diagram": ..}."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ReferenceError("reference file must hold a JSON object")
    doc = raw.get("reference_diagram", raw.get("diagram"))
    if doc is None:
        raise ReferenceError("reference file needs a 'reference_diagram' or 'diagram' field")
    diagram = Diagram.decode(doc)
    cc = raw.get("reference_cc")
    if cc is None:
        cc = diagram.metrics().cc_structural
    if not isinstance(cc, int) or cc < 1:
        raise ReferenceError("reference complexity must be a positive integer")
    return diagram, cc


def grade_answer_file(path, reference_diagram, reference_cc):
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise DiagramError("answer file must hold a JSON object")
    if "diagram" not in raw:
        raise DiagramError("answer file needs a 'diagram' field")
    diagram = Diagram.decode(raw["diagram"])
    paths_raw = raw.get("paths") or []
    if not isinstance(paths_raw, list):
        raise DiagramError("'paths' must be a list of paths")
    paths = [check_path_shape(p) for p in paths_raw]
    report = grading.analyze_answer(diagram, paths, reference_diagram, reference_cc)
    return {
        "student_id": raw.get("student_id"),
        "analysis": report.as_dict(),
    }


def batch_grade(answers_dir, reference_file, out=None):
    """Grade a directory; returns the process exit code (nonzero on failures)."""
    out = out or sys.stdout
    try:
        reference_diagram, reference_cc = load_reference(reference_file)
    except (OSError, json.JSONDecodeError, ReferenceError, DiagramError) as exc:
        json.dump({"error": f"reference: {exc}"}, out)
        out.write("\n")
        return 2

    reports = []
    failures = []
    for path in sorted(Path(answers_dir).glob("*.json")):
        try:
            graded = grade_answer_file(path, reference_diagram, reference_cc)
        except (OSError, json.JSONDecodeError, DiagramError, ValueError) as exc:
            failures.append({"file": path.name, "error": str(exc)})
            continue
        graded["file"] = path.name
        reports.append(graded)

    json.dump(
        {"reference_cc": reference_cc, "reports": reports, "failures": failures},
        out,
        indent=2,
        sort_keys=True,
    )
    out.write("\n")
    return 1 if failures else 0
