"""Per-document sessions: document + pattern store + lazily retrained trees.

A session is the single writer for its state; the HTTP layer and the CLI are
thin callers. All mutations reparse/retrain as needed so reads never observe
stale trees.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass
from typing import Optional

from .completion import CompletionEngine, CompletionList
from .html_ast import Document, parse
from .inspector import InspectionResult, inspect
from .patterns import (
    CodePattern,
    Condition,
    ConflictGroup,
    PatternFile,
    PatternState,
    PatternStore,
)
from .tables import TargetKind


class SessionNotFoundError(KeyError):
    pass


@dataclass
class PatternListing:
    kind: TargetKind
    prioritized: list[CodePattern]
    standard_groups: list[ConflictGroup]
    blacklisted: list[CodePattern]


class Session:
    def __init__(self, text: str, session_id: Optional[str] = None):
        self.session_id = session_id or uuid.uuid4().hex
        self.doc: Document = parse(text, version=1)
        self.store = PatternStore()
        self.engine = CompletionEngine(self.store)
        self._lock = threading.Lock()

    @property
    def version(self) -> int:
        return self.doc.version

    def apply_edit(self, text: str) -> int:
        with self._lock:
            self.doc = parse(text, version=self.doc.version + 1)
            return self.doc.version

    def apply_range_edit(
        self, start_line: int, start_col: int, end_line: int, end_col: int, replacement: str
    ) -> int:
        with self._lock:
            start = self.doc.position_to_offset(start_line, start_col)
            end = self.doc.position_to_offset(end_line, end_col)
            if end < start:
                raise ValueError("range end precedes start")
            text = self.doc.text[:start] + replacement + self.doc.text[end:]
            self.doc = parse(text, version=self.doc.version + 1)
            return self.doc.version

    def get_completions(self, line: int, col: int) -> CompletionList:
        with self._lock:
            return self.engine.complete(self.doc, line, col)

    def list_patterns(self, kind: TargetKind) -> PatternListing:
        with self._lock:
            self.engine.ensure_trained(self.doc, kind)
            return PatternListing(
                kind=kind,
                prioritized=self.store.prioritized(kind),
                standard_groups=self.store.conflict_groups(kind),
                blacklisted=self.store.blacklist(kind),
            )

    def vote_pattern(self, pattern_id: str, direction: str) -> PatternState:
        with self._lock:
            self.engine.ensure_all_trained(self.doc)
            return self.store.vote(pattern_id, direction)

    def add_pattern(
        self, kind: TargetKind, conditions: list[Condition], target: str
    ) -> CodePattern:
        with self._lock:
            return self.store.add_custom(kind, conditions, target)

    def inspect_pattern(self, pattern_id: str) -> InspectionResult:
        with self._lock:
            self.engine.ensure_all_trained(self.doc)
            return inspect(self.doc, self.store.get(pattern_id))

    def export_patterns(self) -> PatternFile:
        with self._lock:
            return self.store.export()

    def import_patterns(self, file: PatternFile) -> None:
        with self._lock:
            self.store.import_file(file)


class SessionManager:
    def __init__(self) -> None:
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def open(self, text: str) -> Session:
        session = Session(text)
        with self._lock:
            self._sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            try:
                return self._sessions[session_id]
            except KeyError:
                raise SessionNotFoundError(session_id) from None
