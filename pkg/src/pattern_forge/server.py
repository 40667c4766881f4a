"""Local HTTP/JSON protocol over sessions, consumed by the editor UI."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .completion import CompletionList
from .html_ast import SourceSpan
from .inspector import InspectionResult
from .patterns import (
    CodePattern,
    ConflictGroup,
    PatternImportError,
    PatternNotFoundError,
    PatternValidationError,
    condition_from_wire,
    condition_to_wire,
    pattern_file_from_json,
    pattern_file_to_json,
    pattern_to_wire,
)
from .session import SessionManager, SessionNotFoundError
from .tables import TargetKind


class OpenSessionRequest(BaseModel):
    text: str


class EditRequest(BaseModel):
    text: Optional[str] = None
    start_line: Optional[int] = None
    start_col: Optional[int] = None
    end_line: Optional[int] = None
    end_col: Optional[int] = None
    replacement: Optional[str] = None


class AddPatternRequest(BaseModel):
    kind: str
    conditions: list[dict]
    target: str


class VoteRequest(BaseModel):
    direction: str


def span_to_wire(span: SourceSpan) -> dict:
    return {
        "start_line": span.start_line,
        "start_col": span.start_col,
        "end_line": span.end_line,
        "end_col": span.end_col,
    }


def pattern_to_response(pattern: CodePattern) -> dict:
    wire = pattern_to_wire(pattern)
    wire.update(
        {
            "id": pattern.id,
            "state": pattern.state.value,
            "support": pattern.support,
            "confidence": pattern.confidence,
            "description": pattern.describe(),
        }
    )
    return wire


def group_to_response(group: ConflictGroup) -> dict:
    return {
        "conditions": [condition_to_wire(c) for c in sorted(group.conditions)],
        "members": [pattern_to_response(p) for p in group.members],
    }


def completions_to_response(result: CompletionList, version: int) -> dict:
    return {
        "version": version,
        "target_kind": result.target_kind.value if result.target_kind else None,
        "items": [
            {
                "label": it.label,
                "confidence": it.confidence,
                "origin": it.origin,
                "pattern_id": it.pattern_id,
            }
            for it in result.items
        ],
        "current_pattern": (
            pattern_to_response(result.current_pattern) if result.current_pattern else None
        ),
    }


def inspection_to_response(result: InspectionResult, version: int) -> dict:
    return {
        "version": version,
        "pattern_id": result.pattern_id,
        "sites": [
            {
                "span": span_to_wire(site.span),
                "classification": site.classification,
                "pattern_id": site.pattern_id,
                "witness": site.witness,
            }
            for site in result.sites
        ],
    }


def _parse_kind(kind: str) -> TargetKind:
    try:
        return TargetKind(kind)
    except ValueError:
        raise HTTPException(status_code=422, detail=f"unknown kind: {kind!r}")


def create_app(manager: Optional[SessionManager] = None) -> FastAPI:
    app = FastAPI(title="pattern-forge")
    sessions = manager or SessionManager()
    app.state.sessions = sessions

    def get_session(session_id: str):
        try:
            return sessions.get(session_id)
        except SessionNotFoundError:
            raise HTTPException(status_code=404, detail="unknown session")

    @app.post("/sessions")
    def open_session(req: OpenSessionRequest):
        session = sessions.open(req.text)
        return {"session_id": session.session_id, "version": session.version}

    @app.put("/sessions/{session_id}/text")
    def apply_edit(session_id: str, req: EditRequest):
        session = get_session(session_id)
        if req.text is not None:
            version = session.apply_edit(req.text)
        elif None not in (req.start_line, req.start_col, req.end_line, req.end_col) and req.replacement is not None:
            try:
                version = session.apply_range_edit(
                    req.start_line, req.start_col, req.end_line, req.end_col, req.replacement
                )
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
        else:
            raise HTTPException(status_code=400, detail="provide text or a full range edit")
        return {"version": version}

    @app.get("/sessions/{session_id}/completions")
    def get_completions(session_id: str, line: int = Query(..., ge=1), col: int = Query(..., ge=1)):
        session = get_session(session_id)
        result = session.get_completions(line, col)
        return completions_to_response(result, session.version)

    @app.get("/sessions/{session_id}/patterns")
    def list_patterns(session_id: str, kind: str = Query(...)):
        session = get_session(session_id)
        listing = session.list_patterns(_parse_kind(kind))
        return {
            "version": session.version,
            "kind": listing.kind.value,
            "prioritized": [pattern_to_response(p) for p in listing.prioritized],
            "standard_groups": [group_to_response(g) for g in listing.standard_groups],
            "blacklisted": [pattern_to_response(p) for p in listing.blacklisted],
        }

    @app.post("/sessions/{session_id}/patterns")
    def add_pattern(session_id: str, req: AddPatternRequest):
        session = get_session(session_id)
        kind = _parse_kind(req.kind)
        try:
            conditions = [condition_from_wire(c) for c in req.conditions]
            pattern = session.add_pattern(kind, conditions, req.target)
        except (PatternValidationError, PatternImportError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"version": session.version, "pattern": pattern_to_response(pattern)}

    @app.post("/sessions/{session_id}/patterns/{pattern_id}/vote")
    def vote_pattern(session_id: str, pattern_id: str, req: VoteRequest):
        session = get_session(session_id)
        try:
            state = session.vote_pattern(pattern_id, req.direction)
        except PatternNotFoundError:
            raise HTTPException(status_code=404, detail="unknown pattern")
        except PatternValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"version": session.version, "pattern_id": pattern_id, "state": state.value}

    @app.get("/sessions/{session_id}/patterns/{pattern_id}/inspect")
    def inspect_pattern(session_id: str, pattern_id: str):
        session = get_session(session_id)
        try:
            result = session.inspect_pattern(pattern_id)
        except PatternNotFoundError:
            raise HTTPException(status_code=404, detail="unknown pattern")
        return inspection_to_response(result, session.version)

    @app.get("/sessions/{session_id}/patterns/export")
    def export_patterns(session_id: str):
        session = get_session(session_id)
        file = session.export_patterns()
        return JSONResponse(content=json.loads(pattern_file_to_json(file)))

    @app.post("/sessions/{session_id}/patterns/import")
    async def import_patterns(session_id: str, payload: dict):
        session = get_session(session_id)
        try:
            file = pattern_file_from_json(json.dumps(payload))
            session.import_patterns(file)
        except PatternImportError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"version": session.version, "ok": True}

    frontend_dist = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if frontend_dist.is_dir():  # serve the editor UI when it has been built
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(frontend_dist), html=True), name="ui")

    return app
