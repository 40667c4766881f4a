"""Error-tolerant HTML parsing into an attributed element tree with source spans.

The parser is total: any input produces a Document. Text, comments, and
doctypes are dropped; only elements and their attributes are kept, since
those are the only tokens pattern mining looks at. Unclosed tags are
auto-closed when their enclosing scope ends, which keeps mid-edit documents
parseable while the user types.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Optional

# HTML5 void elements: never receive children, never pushed on the open stack.
VOID_ELEMENTS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
})

_NAME_CHARS = set("abcdefghijklmnopqrstuvwxyz0123456789-_:.")


class PositionError(ValueError):
    """Raised when a queried position lies outside the document."""


@dataclass(frozen=True)
class SourceSpan:
    """Half-open text region: (start_line, start_col) up to but excluding (end_line, end_col).

    Lines and columns are 1-based.
    """

    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def contains(self, line: int, col: int) -> bool:
        return (self.start_line, self.start_col) <= (line, col) < (self.end_line, self.end_col)


@dataclass(frozen=True)
class AttributePair:
    name: str  # lowercased
    value: str  # quotes stripped; empty for valueless attributes


@dataclass
class ElementNode:
    tag: str
    attributes: list[AttributePair]
    children: list["ElementNode"] = field(default_factory=list)
    span: SourceSpan = None  # type: ignore[assignment]
    open_span: SourceSpan = None  # type: ignore[assignment]  # the start tag only
    parent: Optional["ElementNode"] = None
    # Offsets kept alongside spans so containment checks don't re-derive them.
    start_offset: int = 0
    end_offset: int = 0
    open_end_offset: int = 0

    def attribute_value(self, name: str) -> Optional[str]:
        for pair in self.attributes:
            if pair.name == name:
                return pair.value
        return None

    def has_attribute(self, name: str) -> bool:
        return any(pair.name == name for pair in self.attributes)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"<ElementNode {self.tag} attrs={len(self.attributes)} children={len(self.children)}>"


@dataclass
class Document:
    text: str
    roots: list[ElementNode]
    version: int = 0
    diagnostics: list[str] = field(default_factory=list)
    _line_starts: list[int] = field(default_factory=list, repr=False)

    def offset_to_position(self, offset: int) -> tuple[int, int]:
        line = bisect.bisect_right(self._line_starts, offset)
        return line, offset - self._line_starts[line - 1] + 1

    def position_to_offset(self, line: int, col: int) -> int:
        if line < 1 or col < 1 or line > len(self._line_starts):
            raise PositionError(f"position {line}:{col} out of bounds")
        line_start = self._line_starts[line - 1]
        line_end = self._line_starts[line] if line < len(self._line_starts) else len(self.text) + 1
        offset = line_start + col - 1
        if offset > line_end:
            raise PositionError(f"position {line}:{col} out of bounds")
        return offset

    def all_elements(self) -> list[ElementNode]:
        """Every element in document (pre-) order."""
        out: list[ElementNode] = []
        stack = list(reversed(self.roots))
        while stack:
            node = stack.pop()
            out.append(node)
            stack.extend(reversed(node.children))
        return out


def _compute_line_starts(text: str) -> list[int]:
    starts = [0]
    for i, ch in enumerate(text):
        if ch == "\n":
            starts.append(i + 1)
    return starts


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.n = len(text)
        self.i = 0
        self.line_starts = _compute_line_starts(text)
        self.roots: list[ElementNode] = []
        self.stack: list[ElementNode] = []
        self.diagnostics: list[str] = []

    def pos(self, offset: int) -> tuple[int, int]:
        line = bisect.bisect_right(self.line_starts, offset)
        return line, offset - self.line_starts[line - 1] + 1

    def span(self, start: int, end: int) -> SourceSpan:
        sl, sc = self.pos(start)
        el, ec = self.pos(end)
        return SourceSpan(sl, sc, el, ec)

    def parse(self) -> tuple[list[ElementNode], list[str]]:
        text, n = self.text, self.n
        while self.i < n:
            lt = text.find("<", self.i)
            if lt == -1:
                break
            self.i = lt
            nxt = text[lt + 1] if lt + 1 < n else ""
            if text.startswith("<!--", lt):
                end = text.find("-->", lt + 4)
                self.i = n if end == -1 else end + 3
            elif nxt == "!" or nxt == "?":
                end = text.find(">", lt)
                self.i = n if end == -1 else end + 1
            elif nxt == "/":
                self._close_tag(lt)
            elif nxt.isalpha():
                self._open_tag(lt)
            else:
                # stray "<" (e.g. "< " or "<<"): treat as text
                self.diagnostics.append(
                    "stray '<' at %d:%d" % self.pos(lt)
                )
                self.i = lt + 1
        self._auto_close_all(n)
        return self.roots, self.diagnostics

    def _read_name(self) -> str:
        start = self.i
        text, n = self.text, self.n
        while self.i < n and text[self.i].lower() in _NAME_CHARS:
            self.i += 1
        return text[start:self.i].lower()

    def _close_tag(self, lt: int) -> None:
        self.i = lt + 2
        name = self._read_name()
        end = self.text.find(">", self.i)
        tag_end = self.n if end == -1 else end + 1
        self.i = tag_end
        if not name:
            self.diagnostics.append("malformed closing tag at %d:%d" % self.pos(lt))
            return
        depth = next(
            (k for k in range(len(self.stack) - 1, -1, -1) if self.stack[k].tag == name),
            None,
        )
        if depth is None:
            self.diagnostics.append(
                "unmatched closing tag </%s> at %d:%d" % ((name,) + self.pos(lt))
            )
            return
        # auto-close anything opened inside the matching element
        while len(self.stack) - 1 > depth:
            self._finish(self.stack.pop(), lt)
        self._finish(self.stack.pop(), tag_end)

    def _open_tag(self, lt: int) -> None:
        self.i = lt + 1
        tag = self._read_name()
        attributes, self_closing, terminated, open_end = self._read_attributes()
        node = ElementNode(
            tag=tag,
            attributes=attributes,
            span=self.span(lt, open_end),
            open_span=self.span(lt, open_end),
            start_offset=lt,
            end_offset=open_end,
            open_end_offset=open_end,
        )
        parent = self.stack[-1] if self.stack else None
        node.parent = parent
        if parent is not None:
            parent.children.append(node)
        else:
            self.roots.append(node)
        # an element whose start tag is still being typed cannot hold children
        if not self_closing and terminated and tag not in VOID_ELEMENTS:
            self.stack.append(node)

    def _read_attributes(self) -> tuple[list[AttributePair], bool, bool, int]:
        """Scan attribute pairs until '>', '/>', a recovering '<', or EOF.

        Returns (attributes, self_closing, start tag terminated by '>', end offset).
        """
        text, n = self.text, self.n
        attributes: list[AttributePair] = []
        self_closing = False
        while True:
            while self.i < n and text[self.i].isspace():
                self.i += 1
            if self.i >= n:
                self.diagnostics.append("unterminated start tag at end of input")
                return attributes, self_closing, False, n
            ch = text[self.i]
            if ch == ">":
                self.i += 1
                return attributes, self_closing, True, self.i
            if ch == "<":
                # unterminated start tag; do not consume the next tag's "<"
                self.diagnostics.append(
                    "unterminated start tag at %d:%d" % self.pos(self.i)
                )
                return attributes, self_closing, False, self.i
            if ch == "/":
                self.i += 1
                if self.i < n and text[self.i] == ">":
                    self.i += 1
                    return attributes, True, True, self.i
                continue
            name_start = self.i
            while self.i < n and text[self.i] not in "=/><" and not text[self.i].isspace():
                self.i += 1
            name = text[name_start:self.i].lower()
            if not name:
                self.i += 1
                continue
            while self.i < n and text[self.i].isspace():
                self.i += 1
            value = ""
            if self.i < n and text[self.i] == "=":
                self.i += 1
                while self.i < n and text[self.i].isspace():
                    self.i += 1
                if self.i < n and text[self.i] in "\"'":
                    quote = text[self.i]
                    self.i += 1
                    val_start = self.i
                    end = text.find(quote, self.i)
                    newline = text.find("\n", self.i)
                    if end == -1 or (newline != -1 and newline < end):
                        # unterminated quote (mid-edit): end the value at the
                        # line break or tag boundary instead of running on
                        end = self.i
                        while end < n and text[end] not in "<>\n":
                            end += 1
                        value = text[val_start:end]
                        self.i = end
                    else:
                        value = text[val_start:end]
                        self.i = end + 1
                else:
                    val_start = self.i
                    while self.i < n and text[self.i] not in "<>/" and not text[self.i].isspace():
                        self.i += 1
                    value = text[val_start:self.i]
            attributes.append(AttributePair(name, value))

    def _finish(self, node: ElementNode, end_offset: int) -> None:
        node.end_offset = max(end_offset, node.end_offset)
        node.span = self.span(node.start_offset, node.end_offset)

    def _auto_close_all(self, end_offset: int) -> None:
        while self.stack:
            self._finish(self.stack.pop(), end_offset)


def parse(text: str, version: int = 0) -> Document:
    """Parse HTML text into a Document. Total: never raises on malformed input."""
    roots, diagnostics = _Parser(text).parse()
    return Document(
        text=text,
        roots=roots,
        version=version,
        diagnostics=diagnostics,
        _line_starts=_compute_line_starts(text),
    )


def element_at(doc: Document, line: int, col: int) -> Optional[ElementNode]:
    """Innermost element whose span contains the 1-based position, if any."""
    offset = doc.position_to_offset(line, col)
    best: Optional[ElementNode] = None
    nodes = list(doc.roots)
    while nodes:
        node = nodes.pop()
        if node.start_offset <= offset < node.end_offset:
            if best is None or (node.end_offset - node.start_offset) <= (
                best.end_offset - best.start_offset
            ):
                best = node
            nodes.extend(node.children)
    return best


def serialize(nodes: list[ElementNode]) -> str:
    """Render elements back to markup (tags and attributes only, source order)."""
    parts: list[str] = []

    def emit(node: ElementNode) -> None:
        attrs = "".join(f' {a.name}="{a.value}"' for a in node.attributes)
        parts.append(f"<{node.tag}{attrs}>")
        if node.tag in VOID_ELEMENTS:
            return
        for child in node.children:
            emit(child)
        parts.append(f"</{node.tag}>")

    for root in nodes:
        emit(root)
    return "".join(parts)
