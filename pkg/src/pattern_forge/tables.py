"""Feature extraction: turn a parsed document into categorical training tables.

Three tables are built, one per target kind (tag, attribute, value). Rows
share a fixed column set; a feature an occurrence does not have takes the
reserved absent sentinel.
"""

from __future__ import annotations

import io
import csv
import enum
import re
from dataclasses import dataclass
from typing import Iterable, Optional, TYPE_CHECKING

from .html_ast import Document, ElementNode, SourceSpan

if TYPE_CHECKING:  # pragma: no cover
    from .patterns import CodePattern

# Sentinel for "feature absent". Real document values equal to it are escaped.
ABSENT = "∅"

PARENT_TAG = "parent_tag"
CURRENT_TAG = "current_tag"
PRECEDING_ATTRIBUTE = "preceding_attribute"
PARENT_ATTR_PREFIX = "parent_attr:"

_SENTINEL_RE = re.compile(r"^\\*∅$")


class TargetKind(str, enum.Enum):
    TAG = "tag"
    ATTRIBUTE = "attribute"
    VALUE = "value"


def parent_attr_key(attr_name: str) -> str:
    return PARENT_ATTR_PREFIX + attr_name


def is_parent_attr_key(key: str) -> bool:
    return key.startswith(PARENT_ATTR_PREFIX)


def escape_value(value: str) -> str:
    """Keep the absent sentinel out of the real value space."""
    if _SENTINEL_RE.match(value):
        return "\\" + value
    return value


@dataclass(frozen=True)
class TrainingRow:
    features: dict[str, str]
    target: str
    origin_span: SourceSpan

    def matches(self, conditions: Iterable[tuple[str, str]]) -> bool:
        return all(self.features.get(key, ABSENT) == value for key, value in conditions)


@dataclass(frozen=True)
class TrainingTable:
    kind: TargetKind
    columns: tuple[str, ...]
    rows: tuple[TrainingRow, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(list(self.columns) + ["target"])
        for row in self.rows:
            writer.writerow([row.features.get(c, ABSENT) for c in self.columns] + [row.target])
        return buf.getvalue()


def _parent_features(parent: Optional[ElementNode], attr_names: Iterable[str]) -> dict[str, str]:
    features = {PARENT_TAG: parent.tag if parent is not None else ABSENT}
    for name in attr_names:
        value = parent.attribute_value(name) if parent is not None else None
        features[parent_attr_key(name)] = escape_value(value) if value is not None else ABSENT
    return features


def build_table(doc: Document, kind: TargetKind) -> TrainingTable:
    """One row per occurrence of the kind's target, in document order."""
    elements = doc.all_elements()
    parent_attr_names = sorted({
        attr.name for el in elements if el.children for attr in el.attributes
    })

    columns = [PARENT_TAG] + [parent_attr_key(n) for n in parent_attr_names]
    if kind in (TargetKind.ATTRIBUTE, TargetKind.VALUE):
        columns.append(CURRENT_TAG)
    if kind is TargetKind.VALUE:
        columns.append(PRECEDING_ATTRIBUTE)

    rows: list[TrainingRow] = []
    if kind is TargetKind.TAG:
        for el in elements:
            if el.parent is None:
                continue
            features = _parent_features(el.parent, parent_attr_names)
            rows.append(TrainingRow(features, el.tag, el.span))
    elif kind is TargetKind.ATTRIBUTE:
        for el in elements:
            for attr in el.attributes:
                features = _parent_features(el.parent, parent_attr_names)
                features[CURRENT_TAG] = el.tag
                rows.append(TrainingRow(features, attr.name, el.open_span))
    else:
        for el in elements:
            for attr in el.attributes:
                if attr.value == "":
                    continue
                features = _parent_features(el.parent, parent_attr_names)
                features[CURRENT_TAG] = el.tag
                features[PRECEDING_ATTRIBUTE] = attr.name
                rows.append(TrainingRow(features, escape_value(attr.value), el.open_span))

    return TrainingTable(kind=kind, columns=tuple(columns), rows=tuple(rows))


def prune_rows(table: TrainingTable, blacklist: list["CodePattern"]) -> TrainingTable:
    """Drop rows matched by a blacklisted pattern (all conditions hold and the
    target equals the pattern's target)."""
    for pattern in blacklist:
        if pattern.kind is not table.kind:
            raise ValueError(
                f"blacklist pattern kind {pattern.kind.value} does not match table kind {table.kind.value}"
            )
    if not blacklist:
        return table
    kept = tuple(
        row for row in table.rows
        if not any(
            row.target == p.target and row.matches(p.conditions) for p in blacklist
        )
    )
    return TrainingTable(kind=table.kind, columns=table.columns, rows=kept)
