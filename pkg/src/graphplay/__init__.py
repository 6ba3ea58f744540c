"""Classroom server and toolkit for two-phase graph-design games."""

from .diagram import Diagram, GraphMetrics, PathCheck
from .grading import AnalysisReport, analyze_answer, graphs_equivalent, independence_flags
from .games import GameStore

__all__ = [
    "Diagram",
    "GraphMetrics",
    "PathCheck",
    "AnalysisReport",
    "analyze_answer",
    "graphs_equivalent",
    "independence_flags",
    "GameStore",
]

__version__ = "0.1.0"
