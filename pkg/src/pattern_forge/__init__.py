"""pattern-forge: learn editable structural code patterns from HTML documents
and use them for explainable autocomplete, inspection, and linting."""

from .html_ast import Document, ElementNode, SourceSpan, element_at, parse
from .id3 import DecisionTree, Id3Classifier, extract_rules, train
from .inspector import InspectionResult, InspectionSite, inspect, lint
from .patterns import (
    CodePattern,
    ConflictGroup,
    PatternFile,
    PatternState,
    PatternStore,
)
from .session import Session, SessionManager
from .tables import TargetKind, TrainingTable, build_table, prune_rows

__all__ = [
    "Document",
    "ElementNode",
    "SourceSpan",
    "element_at",
    "parse",
    "DecisionTree",
    "Id3Classifier",
    "extract_rules",
    "train",
    "InspectionResult",
    "InspectionSite",
    "inspect",
    "lint",
    "CodePattern",
    "ConflictGroup",
    "PatternFile",
    "PatternState",
    "PatternStore",
    "Session",
    "SessionManager",
    "TargetKind",
    "TrainingTable",
    "build_table",
    "prune_rows",
]

__version__ = "0.1.0"
