"""Pattern inspection: classify document sites as positive examples, similar
examples, or violations of a code pattern, yielding highlightable spans.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .html_ast import Document, ElementNode, SourceSpan, VOID_ELEMENTS
from .patterns import CodePattern, PatternState
from .tables import (
    CURRENT_TAG,
    PARENT_TAG,
    PRECEDING_ATTRIBUTE,
    TargetKind,
    escape_value,
    is_parent_attr_key,
)

POSITIVE = "positive"
SIMILAR = "similar"
VIOLATION = "violation"


@dataclass(frozen=True)
class InspectionSite:
    span: SourceSpan
    classification: str
    pattern_id: str
    witness: str


@dataclass(frozen=True)
class InspectionResult:
    pattern_id: str
    sites: tuple[InspectionSite, ...]


def _split_conditions(pattern: CodePattern):
    parent_tag = None
    parent_attrs: list[tuple[str, str]] = []
    current_tag = None
    preceding_attr = None
    for key, value in pattern.conditions:
        if key == PARENT_TAG:
            parent_tag = value
        elif is_parent_attr_key(key):
            parent_attrs.append((key.split(":", 1)[1], value))
        elif key == CURRENT_TAG:
            current_tag = value
        elif key == PRECEDING_ATTRIBUTE:
            preceding_attr = value
    return parent_tag, parent_attrs, current_tag, preceding_attr


def _attrs_status(element: Optional[ElementNode], parent_attrs: list[tuple[str, str]]) -> bool:
    """True when every parent attribute-value condition holds on element."""
    if not parent_attrs:
        return True
    if element is None:
        return False
    return all(
        (v := element.attribute_value(name)) is not None and escape_value(v) == value
        for name, value in parent_attrs
    )


def _classify_site(attrs_ok: bool, has_attr_conditions: bool, target_occurs: bool) -> Optional[str]:
    if attrs_ok and target_occurs:
        return POSITIVE
    if attrs_ok and not target_occurs:
        return VIOLATION
    if not attrs_ok and has_attr_conditions and target_occurs:
        return SIMILAR
    return None


def inspect(doc: Document, pattern: CodePattern) -> InspectionResult:
    """Classify every candidate site for the pattern.

    A site is positive when all conditions hold and the target occurs,
    a violation when all conditions hold and the target is missing, and
    similar when only parent attribute-value conditions deviate yet the
    target still occurs. Deviations in any tag condition disqualify the
    site entirely.
    """
    parent_tag, parent_attrs, current_tag, preceding_attr = _split_conditions(pattern)
    has_attr_conds = bool(parent_attrs)
    sites: list[InspectionSite] = []

    if pattern.kind is TargetKind.TAG:
        # candidate parents: the element itself carries the parent-side conditions
        for el in doc.all_elements():
            if el.tag in VOID_ELEMENTS:
                continue
            if parent_tag is not None and el.tag != parent_tag:
                continue
            attrs_ok = _attrs_status(el, parent_attrs)
            target_occurs = any(child.tag == pattern.target for child in el.children)
            cls = _classify_site(attrs_ok, has_attr_conds, target_occurs)
            if cls is None:
                continue
            witness = (
                f"<{pattern.target}> child present"
                if target_occurs
                else f"missing <{pattern.target}> child"
            )
            sites.append(InspectionSite(el.span, cls, pattern.id, witness))
    elif pattern.kind is TargetKind.ATTRIBUTE:
        for el in doc.all_elements():
            if current_tag is not None and el.tag != current_tag:
                continue
            if parent_tag is not None and (el.parent is None or el.parent.tag != parent_tag):
                continue
            attrs_ok = _attrs_status(el.parent, parent_attrs)
            target_occurs = el.has_attribute(pattern.target)
            cls = _classify_site(attrs_ok, has_attr_conds, target_occurs)
            if cls is None:
                continue
            witness = (
                f"attribute '{pattern.target}' present"
                if target_occurs
                else f"missing attribute '{pattern.target}'"
            )
            sites.append(InspectionSite(el.open_span, cls, pattern.id, witness))
    else:
        for el in doc.all_elements():
            if current_tag is not None and el.tag != current_tag:
                continue
            if parent_tag is not None and (el.parent is None or el.parent.tag != parent_tag):
                continue
            for attr in el.attributes:
                if preceding_attr is not None and attr.name != preceding_attr:
                    continue
                attrs_ok = _attrs_status(el.parent, parent_attrs)
                target_occurs = escape_value(attr.value) == pattern.target
                cls = _classify_site(attrs_ok, has_attr_conds, target_occurs)
                if cls is None:
                    continue
                witness = (
                    f"{attr.name}=\"{attr.value}\" matches"
                    if target_occurs
                    else f"{attr.name}=\"{attr.value}\" instead of \"{pattern.target}\""
                )
                sites.append(InspectionSite(el.open_span, cls, pattern.id, witness))

    deduped: dict[tuple[SourceSpan, str], InspectionSite] = {}
    for site in sites:
        deduped.setdefault((site.span, site.classification), site)
    ordered = sorted(
        deduped.values(),
        key=lambda s: (s.span.start_line, s.span.start_col, s.span.end_line, s.span.end_col),
    )
    return InspectionResult(pattern_id=pattern.id, sites=tuple(ordered))


def lint(doc: Document, patterns: list[CodePattern]) -> list[InspectionSite]:
    """All violation sites across the given patterns, ordered by span."""
    seen: set[tuple[SourceSpan, str]] = set()
    out: list[InspectionSite] = []
    for pattern in patterns:
        if pattern.state is PatternState.BLACKLISTED:
            continue
        for site in inspect(doc, pattern).sites:
            if site.classification != VIOLATION:
                continue
            key = (site.span, site.pattern_id)
            if key in seen:
                continue
            seen.add(key)
            out.append(site)
    out.sort(key=lambda s: (s.span.start_line, s.span.start_col, s.span.end_line, s.span.end_col, s.pattern_id))
    return out
