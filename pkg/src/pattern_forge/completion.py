"""Autocomplete: tokenize the line prefix, classify the completion target,
assemble context features, lazily retrain, and rank suggestions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .html_ast import Document, ElementNode
from .id3 import DecisionTree, extract_rules, train
from .patterns import CodePattern, PatternStore
from .tables import (
    ABSENT,
    CURRENT_TAG,
    PARENT_TAG,
    PRECEDING_ATTRIBUTE,
    TargetKind,
    build_table,
    escape_value,
    is_parent_attr_key,
    prune_rows,
)

TAG_OPEN = "tag-open"
TAG_NAME = "tag-name"
ATTRIBUTE = "attribute"
EQUALS = "equals"
VALUE = "value"
WHITESPACE = "whitespace"
TAG_CLOSE = "tag-close"
TEXT = "text"


@dataclass(frozen=True)
class LineToken:
    cls: str
    lexeme: str
    start_col: int  # 1-based, inclusive
    end_col: int  # exclusive


def tokenize_line(prefix: str) -> list[LineToken]:
    """Tokenize one line from its first character up to the cursor.

    Concatenating the lexemes reproduces the prefix exactly.
    """
    tokens: list[LineToken] = []
    i, n = 0, len(prefix)
    in_tag = False
    seen_tag_name = False
    after_equals = False

    def emit(cls: str, start: int, end: int) -> None:
        tokens.append(LineToken(cls, prefix[start:end], start + 1, end + 1))

    while i < n:
        ch = prefix[i]
        if not in_tag:
            if ch == "<":
                start = i
                i += 1
                if i < n and prefix[i] == "/":
                    i += 1
                emit(TAG_OPEN, start, i)
                in_tag = True
                seen_tag_name = False
                after_equals = False
            else:
                start = i
                while i < n and prefix[i] != "<":
                    i += 1
                emit(TEXT, start, i)
            continue
        # inside a tag
        if ch.isspace():
            start = i
            while i < n and prefix[i].isspace():
                i += 1
            emit(WHITESPACE, start, i)
        elif ch == ">":
            emit(TAG_CLOSE, i, i + 1)
            i += 1
            in_tag = False
        elif ch == "/" and i + 1 < n and prefix[i + 1] == ">":
            emit(TAG_CLOSE, i, i + 2)
            i += 2
            in_tag = False
        elif ch == "=":
            emit(EQUALS, i, i + 1)
            i += 1
            after_equals = True
        elif after_equals:
            start = i
            if ch in "\"'":
                quote = ch
                i += 1
                while i < n and prefix[i] != quote:
                    i += 1
                if i < n:
                    i += 1  # closing quote
            else:
                while i < n and prefix[i] not in ">=" and not prefix[i].isspace():
                    i += 1
            emit(VALUE, start, i)
            after_equals = False
        else:
            start = i
            while i < n and prefix[i] not in ">=/" and not prefix[i].isspace():
                i += 1
            if i == start:  # lone "/" not followed by ">"
                i += 1
                emit(TEXT, start, i)
                continue
            emit(TAG_NAME if not seen_tag_name else ATTRIBUTE, start, i)
            seen_tag_name = True
    return tokens


@dataclass(frozen=True)
class TargetContext:
    kind: TargetKind
    typed_prefix: str
    attr_name: Optional[str] = None  # attribute whose value is being completed


def _value_parts(token: LineToken) -> tuple[str, bool]:
    """Return (typed content without quotes, terminated?)."""
    lex = token.lexeme
    if lex and lex[0] in "\"'":
        quote = lex[0]
        terminated = len(lex) >= 2 and lex[-1] == quote
        return (lex[1:-1] if terminated else lex[1:]), terminated
    return lex, False  # bare value: still typing until a delimiter appears


def _classify(tokens: list[LineToken]) -> Optional[TargetContext]:
    if not tokens:
        return None
    last = tokens[-1]
    prev = tokens[-2] if len(tokens) > 1 else None

    if last.cls == TAG_OPEN:
        return TargetContext(TargetKind.TAG, "") if last.lexeme == "<" else None
    if last.cls == TAG_NAME:
        if prev is not None and prev.cls == TAG_OPEN and prev.lexeme == "<":
            return TargetContext(TargetKind.TAG, last.lexeme)
        return None
    if last.cls == WHITESPACE:
        if prev is not None and prev.cls in (TAG_NAME, VALUE, ATTRIBUTE):
            return TargetContext(TargetKind.ATTRIBUTE, "")
        return None
    if last.cls == ATTRIBUTE:
        if prev is not None and prev.cls == WHITESPACE:
            return TargetContext(TargetKind.ATTRIBUTE, last.lexeme)
        return None
    if last.cls == EQUALS:
        if prev is not None and prev.cls == ATTRIBUTE:
            return TargetContext(TargetKind.VALUE, "", attr_name=prev.lexeme)
        return None
    if last.cls == VALUE:
        typed, terminated = _value_parts(last)
        if terminated:
            return None
        attr = None
        if prev is not None and prev.cls == EQUALS and len(tokens) > 2:
            maybe_attr = tokens[-3]
            if maybe_attr.cls == ATTRIBUTE:
                attr = maybe_attr.lexeme
        return TargetContext(TargetKind.VALUE, typed, attr_name=attr)
    return None  # text, tag-close, "</"


def classify_target(line_prefix: str) -> Optional[TargetKind]:
    """Which kind of token is being completed at the end of this prefix."""
    ctx = _classify(tokenize_line(line_prefix))
    return ctx.kind if ctx else None


@dataclass(frozen=True)
class CompletionItem:
    label: str
    confidence: float
    origin: str  # "prioritized" | "learned"
    pattern_id: Optional[str]


@dataclass(frozen=True)
class CompletionList:
    target_kind: Optional[TargetKind]
    items: tuple[CompletionItem, ...]
    current_pattern: Optional[CodePattern] = None

    @staticmethod
    def empty() -> "CompletionList":
        return CompletionList(target_kind=None, items=())


@dataclass
class _TrainedKind:
    tree: DecisionTree
    patterns: list[CodePattern]
    doc_version: int
    blacklist_epoch: int


class CompletionEngine:
    """Per-session completion state: keeps one lazily retrained tree per kind."""

    def __init__(self, store: PatternStore):
        self.store = store
        self._trained: dict[TargetKind, _TrainedKind] = {}

    def invalidate(self) -> None:
        self._trained.clear()

    def ensure_trained(self, doc: Document, kind: TargetKind) -> _TrainedKind:
        cached = self._trained.get(kind)
        if (
            cached is not None
            and cached.doc_version == doc.version
            and cached.blacklist_epoch == self.store.blacklist_epoch
        ):
            return cached
        table = build_table(doc, kind)
        table = prune_rows(table, self.store.blacklist(kind))
        tree = train(table, version=doc.version)
        patterns = extract_rules(tree)
        self.store.refresh(kind, patterns)
        cached = _TrainedKind(
            tree=tree,
            patterns=patterns,
            doc_version=doc.version,
            blacklist_epoch=self.store.blacklist_epoch,
        )
        self._trained[kind] = cached
        return cached

    def ensure_all_trained(self, doc: Document) -> None:
        for kind in TargetKind:
            self.ensure_trained(doc, kind)

    # -- context assembly

    def _cursor_elements(
        self, doc: Document, line: int, col: int
    ) -> tuple[Optional[ElementNode], Optional[ElementNode]]:
        """(current element being edited, its parent) at the cursor.

        The cursor sits between characters, so containment is evaluated at
        the character just before it.
        """
        offset = doc.position_to_offset(line, col)
        if offset == 0:
            return None, None
        node = _innermost(doc.roots, offset - 1)
        if node is None:
            return None, None
        if node.start_offset <= offset - 1 < node.open_end_offset:
            # cursor inside the start tag: this element is being edited
            return node, node.parent
        # cursor in the element body: a new child is being started
        return None, node

    def build_context(
        self, doc: Document, line: int, col: int, target: TargetContext, columns: tuple[str, ...]
    ) -> dict[str, str]:
        current, parent = self._cursor_elements(doc, line, col)
        context: dict[str, str] = {}
        for key in columns:
            if key == PARENT_TAG:
                context[key] = parent.tag if parent is not None else ABSENT
            elif is_parent_attr_key(key):
                name = key.split(":", 1)[1]
                value = parent.attribute_value(name) if parent is not None else None
                context[key] = escape_value(value) if value is not None else ABSENT
            elif key == CURRENT_TAG:
                context[key] = current.tag if current is not None else ABSENT
            elif key == PRECEDING_ATTRIBUTE:
                context[key] = target.attr_name if target.attr_name else ABSENT
            else:
                context[key] = ABSENT
        return context

    # -- the main entry point

    def complete(self, doc: Document, line: int, col: int) -> CompletionList:
        try:
            offset = doc.position_to_offset(line, col)
        except ValueError:
            return CompletionList.empty()
        line_start = doc.position_to_offset(line, 1)
        prefix = doc.text[line_start:offset]
        target = _classify(tokenize_line(prefix))
        if target is None:
            return CompletionList.empty()

        trained = self.ensure_trained(doc, target.kind)
        context = self.build_context(doc, line, col, target, trained.tree.columns)
        current, _parent = self._cursor_elements(doc, line, col)

        blacklisted = [
            p for p in self.store.blacklist(target.kind) if p.applies_to(context)
        ]
        blocked = {p.target for p in blacklisted}

        items: list[CompletionItem] = []
        seen: set[str] = set()
        # prioritized first; an applicable prioritized pattern overrides a
        # blacklisted one (the user re-allowed the target in this context)
        for p in self.store.prioritized(target.kind):
            if p.target in seen:
                continue
            if p.applies_to(context):
                items.append(CompletionItem(p.target, p.confidence, "prioritized", p.id))
                seen.add(p.target)

        learned_by_label: dict[str, CodePattern] = {}
        for label, conf, _spans in trained.tree.predict(context):
            if label in seen or label in blocked:
                continue
            pattern = _explaining_pattern(trained.patterns, context, label)
            items.append(
                CompletionItem(label, conf, "learned", pattern.id if pattern else None)
            )
            if pattern is not None:
                learned_by_label[label] = pattern
            seen.add(label)

        if target.kind is TargetKind.ATTRIBUTE and current is not None:
            present = {a.name for a in current.attributes} - {target.typed_prefix.lower()}
            items = [it for it in items if it.label not in present]

        if target.typed_prefix:
            lowered = target.typed_prefix.lower()
            items = [it for it in items if it.label.lower().startswith(lowered)]

        current_pattern: Optional[CodePattern] = None
        if items:
            top = items[0]
            if top.origin == "prioritized" and top.pattern_id is not None:
                current_pattern = self.store.get(top.pattern_id)
            else:
                current_pattern = learned_by_label.get(top.label)

        return CompletionList(
            target_kind=target.kind, items=tuple(items), current_pattern=current_pattern
        )


def _innermost(roots: list[ElementNode], offset: int) -> Optional[ElementNode]:
    best: Optional[ElementNode] = None
    nodes = list(roots)
    while nodes:
        node = nodes.pop()
        if node.start_offset <= offset < node.end_offset:
            if best is None or (node.end_offset - node.start_offset) <= (
                best.end_offset - best.start_offset
            ):
                best = node
            nodes.extend(node.children)
    return best


def _explaining_pattern(
    patterns: list[CodePattern], context: dict[str, str], label: str
) -> Optional[CodePattern]:
    """The learned rule behind a prediction: first pattern (leaf order) whose
    full path matches the context and whose target is the predicted label;
    if the prediction came from a fallback (off-path context), the first
    pattern whose displayed conditions hold."""
    for p in patterns:
        if p.target == label and p.path_matches(context):
            return p
    for p in patterns:
        if p.target == label and p.applies_to(context):
            return p
    return None
