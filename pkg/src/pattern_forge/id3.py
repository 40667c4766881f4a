"""ID3 decision trees over categorical feature dicts, plus rule extraction.

The classifier follows the sklearn estimator conventions (fit/predict,
get_params) so it composes with the wider ecosystem, but the inputs are
lists of categorical feature dicts rather than numeric arrays: that is the
native shape of the training tables.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

from sklearn.base import BaseEstimator, ClassifierMixin

from .html_ast import SourceSpan
from .patterns import CodePattern, Condition, PatternSource, PatternState
from .tables import ABSENT, TargetKind, TrainingTable

# (label, count, origin spans of the rows carrying that label)
LabelCount = tuple[str, int, tuple[SourceSpan, ...]]


@dataclass
class DecisionNode:
    """Internal node (split_key set) or leaf (split_key None).

    `label_order` holds the ordered label counts of all rows reaching this
    node: for leaves it is the prediction, for internal nodes the fallback
    used when a query value was never seen in training.
    """

    label_order: list[LabelCount]
    total: int
    split_key: Optional[str] = None
    branches: dict[str, "DecisionNode"] = field(default_factory=dict)

    @property
    def is_leaf(self) -> bool:
        return self.split_key is None


def _entropy(counts: Counter) -> float:
    total = sum(counts.values())
    if total == 0:
        return 0.0
    return -sum((c / total) * math.log2(c / total) for c in counts.values() if c)


class Id3Classifier(BaseEstimator, ClassifierMixin):
    """Greedy maximum-information-gain tree over categorical features.

    Parameters
    ----------
    feature_order : sequence of feature keys, or None
        Fixed column order used to break information-gain ties (first key
        wins). When None, the sorted union of keys seen in fit is used.
    """

    def __init__(self, feature_order: Optional[Sequence[str]] = None):
        self.feature_order = feature_order

    def fit(self, X, y, sample_spans: Optional[Sequence[SourceSpan]] = None):
        """Fit on a list of feature dicts X and labels y.

        sample_spans, when given, lets leaves remember which document sites
        produced each label; order also breaks equal-count label ties
        (earliest occurrence first).
        """
        X = list(X)
        y = list(y)
        if len(X) != len(y):
            raise ValueError(f"X and y length mismatch: {len(X)} != {len(y)}")
        if sample_spans is None:
            spans: list[Optional[SourceSpan]] = [None] * len(X)
        else:
            spans = list(sample_spans)
            if len(spans) != len(X):
                raise ValueError("sample_spans length must match X")
        if self.feature_order is not None:
            self.columns_ = list(self.feature_order)
        else:
            seen: dict[str, None] = {}
            for row in X:
                for key in row:
                    seen.setdefault(key)
            self.columns_ = sorted(seen)
        self._X = [{k: row.get(k, ABSENT) for k in self.columns_} for row in X]
        self._y = y
        self._spans = spans
        self.n_samples_ = len(X)
        self.root_ = self._build(list(range(len(X))), list(self.columns_))
        return self

    # -- tree construction

    def _order_labels(self, indices: list[int]) -> list[LabelCount]:
        counts: Counter = Counter(self._y[i] for i in indices)
        first_index = {}
        by_label: dict[str, list[Optional[SourceSpan]]] = {}
        for i in indices:
            label = self._y[i]
            first_index.setdefault(label, i)
            by_label.setdefault(label, []).append(self._spans[i])
        ordered = sorted(counts, key=lambda lab: (-counts[lab], first_index[lab]))
        return [
            (lab, counts[lab], tuple(s for s in by_label[lab] if s is not None))
            for lab in ordered
        ]

    def _gain(self, indices: list[int], key: str, parent_entropy: float) -> float:
        subsets: dict[str, Counter] = {}
        for i in indices:
            subsets.setdefault(self._X[i][key], Counter())[self._y[i]] += 1
        n = len(indices)
        weighted = sum(
            (sum(c.values()) / n) * _entropy(c) for c in subsets.values()
        )
        return parent_entropy - weighted

    def _build(self, indices: list[int], available: list[str]) -> DecisionNode:
        label_order = self._order_labels(indices)
        node = DecisionNode(label_order=label_order, total=len(indices))
        if not indices or len(label_order) == 1 or not available:
            return node
        parent_entropy = _entropy(Counter(self._y[i] for i in indices))
        best_key, best_gain = None, 0.0
        for key in available:  # ties resolved by column order
            gain = self._gain(indices, key, parent_entropy)
            if gain > best_gain + 1e-12:
                best_key, best_gain = key, gain
        if best_key is None:
            return node
        node.split_key = best_key
        remaining = [k for k in available if k != best_key]
        partitions: dict[str, list[int]] = {}
        for i in indices:  # branch order: first occurrence among rows
            partitions.setdefault(self._X[i][best_key], []).append(i)
        for value, subset in partitions.items():
            node.branches[value] = self._build(subset, remaining)
        return node

    # -- prediction

    def predict_ranked(self, features: dict[str, str]) -> list[tuple[str, float, tuple[SourceSpan, ...]]]:
        """Ordered (label, confidence, supporting spans) for one context.

        Walks the tree; a value never seen at a split returns that node's
        fallback label ordering.
        """
        node = self.root_
        while not node.is_leaf:
            value = features.get(node.split_key, ABSENT)
            child = node.branches.get(value)
            if child is None:
                break
            node = child
        if node.total == 0:
            return []
        return [
            (label, count / node.total, spans)
            for label, count, spans in node.label_order
        ]

    def predict(self, X) -> list[Optional[str]]:
        """Top-ranked label per feature dict (None when the tree is empty)."""
        out = []
        for features in X:
            ranked = self.predict_ranked(features)
            out.append(ranked[0][0] if ranked else None)
        return out


@dataclass(frozen=True)
class DecisionTree:
    """A trained tree bound to the table kind and document version it saw."""

    kind: TargetKind
    classifier: Id3Classifier
    trained_on_version: int
    columns: tuple[str, ...]

    def predict(self, context: dict[str, str]) -> list[tuple[str, float, tuple[SourceSpan, ...]]]:
        return self.classifier.predict_ranked(context)


def train(table: TrainingTable, version: int = 0) -> DecisionTree:
    X = [row.features for row in table.rows]
    y = [row.target for row in table.rows]
    spans = [row.origin_span for row in table.rows]
    clf = Id3Classifier(feature_order=list(table.columns))
    clf.fit(X, y, sample_spans=spans)
    return DecisionTree(
        kind=table.kind,
        classifier=clf,
        trained_on_version=version,
        columns=table.columns,
    )


def extract_rules(tree: DecisionTree) -> list[CodePattern]:
    """One pattern per (root-to-leaf path, leaf label), in leaf label order.

    Path conditions valued with the absent sentinel are dropped from the
    displayed conditions (absence is implicit) but kept in path_conditions so
    a prediction can be traced back to exactly one rule.
    """
    patterns: list[CodePattern] = []

    def walk(node: DecisionNode, path: list[Condition]) -> None:
        if not node.is_leaf:
            for value, child in node.branches.items():
                walk(child, path + [(node.split_key, value)])
            return
        if node.total == 0:
            return
        path_conditions = frozenset(path)
        conditions = frozenset((k, v) for k, v in path if v != ABSENT)
        for label, count, spans in node.label_order:
            patterns.append(
                CodePattern(
                    kind=tree.kind,
                    conditions=conditions,
                    target=label,
                    state=PatternState.STANDARD,
                    source=PatternSource.LEARNED,
                    support=count,
                    confidence=count / node.total,
                    origin_spans=spans,
                    path_conditions=path_conditions,
                )
            )

    walk(tree.classifier.root_, [])
    return patterns
