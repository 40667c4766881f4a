"""Code patterns (IF/THEN rules) and the store that owns their lifecycle.

A pattern's identity is a hash of (kind, conditions, target), so user votes
survive retraining: a relearned pattern with the same shape maps onto the
same id and keeps its prioritized/blacklisted state.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .html_ast import SourceSpan
from .tables import (
    ABSENT,
    CURRENT_TAG,
    PARENT_ATTR_PREFIX,
    PARENT_TAG,
    PRECEDING_ATTRIBUTE,
    TargetKind,
    is_parent_attr_key,
    parent_attr_key,
)

PATTERN_FILE_VERSION = 1

Condition = tuple[str, str]  # (feature key, required value)


class PatternState(str, enum.Enum):
    STANDARD = "standard"
    PRIORITIZED = "prioritized"
    BLACKLISTED = "blacklisted"


class PatternSource(str, enum.Enum):
    LEARNED = "learned"
    CUSTOM = "custom"


class PatternNotFoundError(KeyError):
    pass


class PatternValidationError(ValueError):
    pass


class PatternImportError(ValueError):
    pass


def compute_pattern_id(kind: TargetKind, conditions: Iterable[Condition], target: str) -> str:
    canonical = json.dumps(
        [kind.value, sorted(conditions), target], ensure_ascii=False, separators=(",", ":")
    )
    return hashlib.sha1(canonical.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class CodePattern:
    kind: TargetKind
    conditions: frozenset[Condition]  # displayed conditions; absent-valued ones dropped
    target: str
    state: PatternState = PatternState.STANDARD
    source: PatternSource = PatternSource.LEARNED
    support: int = 0
    confidence: float = 0.0
    origin_spans: tuple[SourceSpan, ...] = ()
    # Full tree-path conditions, including absent-valued ones. Used to decide
    # whether this exact learned rule explains a prediction. For custom
    # patterns this equals `conditions`.
    path_conditions: frozenset[Condition] = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.path_conditions is None:
            object.__setattr__(self, "path_conditions", self.conditions)

    @property
    def id(self) -> str:
        return compute_pattern_id(self.kind, self.conditions, self.target)

    def applies_to(self, context: dict[str, str]) -> bool:
        """True when every displayed condition holds in the feature context."""
        return all(context.get(key, ABSENT) == value for key, value in self.conditions)

    def path_matches(self, context: dict[str, str]) -> bool:
        return all(context.get(key, ABSENT) == value for key, value in self.path_conditions)

    def describe(self) -> str:
        if self.conditions:
            conds = " AND ".join(
                f"{_display_key(k)}={v}" for k, v in sorted(self.conditions)
            )
        else:
            conds = "(always)"
        return f"IF {conds} THEN {self.kind.value}={self.target}"


def _display_key(key: str) -> str:
    if is_parent_attr_key(key):
        return f"parent_attr[{key[len(PARENT_ATTR_PREFIX):]}]"
    return key


@dataclass(frozen=True)
class ConflictGroup:
    kind: TargetKind
    conditions: frozenset[Condition]
    members: tuple[CodePattern, ...]  # primary (highest confidence) first

    @property
    def primary(self) -> CodePattern:
        return self.members[0]


@dataclass(frozen=True)
class PatternFile:
    format_version: int
    prioritized: tuple[CodePattern, ...]
    blacklisted: tuple[CodePattern, ...]


# --- wire format -----------------------------------------------------------

_KEY_TO_WIRE = {
    PARENT_TAG: "parent_tag",
    CURRENT_TAG: "current_tag",
    PRECEDING_ATTRIBUTE: "preceding_attribute",
}
_WIRE_TO_KEY = {v: k for k, v in _KEY_TO_WIRE.items()}


def condition_to_wire(condition: Condition) -> dict:
    key, value = condition
    if is_parent_attr_key(key):
        return {"key": "parent_attr", "attr_name": key[len(PARENT_ATTR_PREFIX):], "value": value}
    return {"key": _KEY_TO_WIRE[key], "value": value}


def condition_from_wire(obj: dict) -> Condition:
    try:
        key = obj["key"]
        value = obj["value"]
    except (TypeError, KeyError) as exc:
        raise PatternImportError(f"malformed condition: {obj!r}") from exc
    if key == "parent_attr":
        attr_name = obj.get("attr_name")
        if not attr_name:
            raise PatternImportError("parent_attr condition requires attr_name")
        return (parent_attr_key(attr_name.lower()), str(value))
    if key not in _WIRE_TO_KEY:
        raise PatternImportError(f"unknown condition key: {key!r}")
    return (_WIRE_TO_KEY[key], str(value))


def pattern_to_wire(pattern: CodePattern) -> dict:
    return {
        "kind": pattern.kind.value,
        "conditions": [condition_to_wire(c) for c in sorted(pattern.conditions)],
        "target": pattern.target,
        "source": pattern.source.value,
    }


def pattern_from_wire(obj: dict, state: PatternState) -> CodePattern:
    if not isinstance(obj, dict):
        raise PatternImportError(f"pattern entry is not an object: {obj!r}")
    try:
        kind = TargetKind(obj["kind"])
    except (KeyError, ValueError) as exc:
        raise PatternImportError(f"bad pattern kind in {obj!r}") from exc
    target = obj.get("target")
    if not target or not isinstance(target, str):
        raise PatternImportError("pattern target missing or empty")
    raw_conditions = obj.get("conditions")
    if not isinstance(raw_conditions, list):
        raise PatternImportError("pattern conditions missing")
    conditions = frozenset(condition_from_wire(c) for c in raw_conditions)
    source = PatternSource(obj.get("source", "learned"))
    return CodePattern(
        kind=kind, conditions=conditions, target=target, state=state, source=source
    )


def pattern_file_to_json(file: PatternFile) -> str:
    return json.dumps(
        {
            "format_version": file.format_version,
            "prioritized": [pattern_to_wire(p) for p in file.prioritized],
            "blacklisted": [pattern_to_wire(p) for p in file.blacklisted],
        },
        ensure_ascii=False,
        indent=2,
    )


def pattern_file_from_json(text: str) -> PatternFile:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PatternImportError(f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise PatternImportError("pattern file must be a JSON object")
    version = obj.get("format_version")
    if version != PATTERN_FILE_VERSION:
        raise PatternImportError(f"unsupported format_version: {version!r}")
    prioritized = tuple(
        pattern_from_wire(p, PatternState.PRIORITIZED) for p in obj.get("prioritized", [])
    )
    blacklisted = tuple(
        pattern_from_wire(p, PatternState.BLACKLISTED) for p in obj.get("blacklisted", [])
    )
    return PatternFile(PATTERN_FILE_VERSION, prioritized, blacklisted)


# --- store -----------------------------------------------------------------


class PatternStore:
    """Single-writer pattern state machine for one document session.

    Standard patterns are replaced wholesale on each retrain; prioritized and
    blacklisted ones persist until the user votes them away. `blacklist_epoch`
    increments whenever blacklist membership changes, so completion caches can
    tell when a retrain is due.
    """

    def __init__(self) -> None:
        self._patterns: dict[str, CodePattern] = {}
        self.blacklist_epoch = 0

    # -- reads

    def get(self, pattern_id: str) -> CodePattern:
        try:
            return self._patterns[pattern_id]
        except KeyError:
            raise PatternNotFoundError(pattern_id) from None

    def all_patterns(self) -> list[CodePattern]:
        return list(self._patterns.values())

    def in_state(
        self, state: PatternState, kind: Optional[TargetKind] = None
    ) -> list[CodePattern]:
        return [
            p for p in self._patterns.values()
            if p.state is state and (kind is None or p.kind is kind)
        ]

    def blacklist(self, kind: Optional[TargetKind] = None) -> list[CodePattern]:
        return self.in_state(PatternState.BLACKLISTED, kind)

    def prioritized(self, kind: Optional[TargetKind] = None) -> list[CodePattern]:
        return self.in_state(PatternState.PRIORITIZED, kind)

    def standard(self, kind: Optional[TargetKind] = None) -> list[CodePattern]:
        return self.in_state(PatternState.STANDARD, kind)

    def conflict_groups(self, kind: TargetKind) -> list[ConflictGroup]:
        groups: dict[frozenset[Condition], list[CodePattern]] = {}
        for p in self.standard(kind):
            groups.setdefault(p.conditions, []).append(p)
        out = []
        for conditions, members in groups.items():
            members.sort(key=lambda p: (-p.confidence, -p.support, p.target))
            out.append(ConflictGroup(kind=kind, conditions=conditions, members=tuple(members)))
        out.sort(key=lambda g: (-g.primary.confidence, sorted(g.conditions)))
        return out

    # -- mutations

    def refresh(self, kind: TargetKind, learned: list[CodePattern]) -> None:
        """Replace the standard set for one kind with freshly learned patterns.

        Learned patterns whose id is currently prioritized or blacklisted keep
        their user-assigned state; their statistics are updated in place.
        """
        for pid in [
            pid for pid, p in self._patterns.items()
            if p.kind is kind and p.state is PatternState.STANDARD
        ]:
            del self._patterns[pid]
        for pattern in learned:
            pid = pattern.id
            existing = self._patterns.get(pid)
            if existing is not None and existing.state is not PatternState.STANDARD:
                self._patterns[pid] = replace(
                    existing,
                    support=pattern.support,
                    confidence=pattern.confidence,
                    origin_spans=pattern.origin_spans,
                    path_conditions=pattern.path_conditions,
                )
            else:
                self._patterns[pid] = replace(pattern, state=PatternState.STANDARD)

    _UP = {
        PatternState.BLACKLISTED: PatternState.STANDARD,
        PatternState.STANDARD: PatternState.PRIORITIZED,
        PatternState.PRIORITIZED: PatternState.PRIORITIZED,
    }
    _DOWN = {
        PatternState.PRIORITIZED: PatternState.STANDARD,
        PatternState.STANDARD: PatternState.BLACKLISTED,
        PatternState.BLACKLISTED: PatternState.BLACKLISTED,
    }

    def vote(self, pattern_id: str, direction: str) -> PatternState:
        pattern = self.get(pattern_id)
        if direction == "up":
            new_state = self._UP[pattern.state]
        elif direction == "down":
            new_state = self._DOWN[pattern.state]
        else:
            raise PatternValidationError(f"direction must be 'up' or 'down', got {direction!r}")
        if new_state is not pattern.state:
            was_blacklisted = pattern.state is PatternState.BLACKLISTED
            now_blacklisted = new_state is PatternState.BLACKLISTED
            self._patterns[pattern_id] = replace(pattern, state=new_state)
            if was_blacklisted != now_blacklisted:
                self.blacklist_epoch += 1
        return new_state

    def add_custom(
        self, kind: TargetKind, conditions: Iterable[Condition], target: str
    ) -> CodePattern:
        conditions = frozenset(conditions)
        if not conditions or not target:
            raise PatternValidationError(
                "a custom pattern must have a target and at least one condition"
            )
        if any(value == ABSENT for _, value in conditions):
            raise PatternValidationError("conditions may not use the absent sentinel")
        pid = compute_pattern_id(kind, conditions, target)
        existing = self._patterns.get(pid)
        if existing is not None:
            if existing.state is not PatternState.PRIORITIZED:
                if existing.state is PatternState.BLACKLISTED:
                    self.blacklist_epoch += 1
                self._patterns[pid] = replace(existing, state=PatternState.PRIORITIZED)
            return self._patterns[pid]
        pattern = CodePattern(
            kind=kind,
            conditions=conditions,
            target=target,
            state=PatternState.PRIORITIZED,
            source=PatternSource.CUSTOM,
        )
        self._patterns[pid] = pattern
        return pattern

    def export(self) -> PatternFile:
        return PatternFile(
            format_version=PATTERN_FILE_VERSION,
            prioritized=tuple(self.prioritized()),
            blacklisted=tuple(self.blacklist()),
        )

    def import_file(self, file: PatternFile) -> None:
        """Merge a pattern file; the incoming state wins on id collision."""
        if file.format_version != PATTERN_FILE_VERSION:
            raise PatternImportError(f"unsupported format_version: {file.format_version!r}")
        blacklist_changed = False
        for incoming in list(file.prioritized) + list(file.blacklisted):
            pid = incoming.id
            existing = self._patterns.get(pid)
            if existing is not None:
                if existing.state is not incoming.state:
                    if (existing.state is PatternState.BLACKLISTED) != (
                        incoming.state is PatternState.BLACKLISTED
                    ):
                        blacklist_changed = True
                    self._patterns[pid] = replace(existing, state=incoming.state)
            else:
                self._patterns[pid] = incoming
                if incoming.state is PatternState.BLACKLISTED:
                    blacklist_changed = True
        if blacklist_changed:
            self.blacklist_epoch += 1
