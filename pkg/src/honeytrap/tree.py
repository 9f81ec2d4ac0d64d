"""Decision-tree base learner.

Greedy top-down induction with information-gain-ratio splits: numeric
attributes get binary splits at midpoints between consecutive distinct
values, nominal attributes split multiway on every category.  Leaves
keep Laplace-smoothed class distributions so downstream consumers always
see non-zero probabilities.

Missing values are routed to the larger child during training; at
prediction time they blend every child's answer weighted by training
support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Union

from .arff import Dataset, format_number
from .errors import ConfigError, FormatError, SchemaMismatchError, TrainingError


@dataclass(frozen=True)
class Leaf:
    """Terminal node: smoothed class distribution and training support."""

    distribution: tuple[float, ...]
    support: int


@dataclass(frozen=True)
class NumericSplit:
    """Binary test ``value <= threshold``; ties go to the below branch."""

    attribute: int
    threshold: float
    below: "TreeNode"
    above: "TreeNode"
    supports: tuple[int, int]


@dataclass(frozen=True)
class NominalSplit:
    """Multiway test on a nominal attribute.

    ``children`` is aligned with the attribute's category list; a
    category unseen during training has no child (``None``) and is
    treated like a missing value at prediction time.
    """

    attribute: int
    children: tuple["TreeNode | None", ...]
    supports: tuple[int, ...]


TreeNode = Union[Leaf, NumericSplit, NominalSplit]


def _entropy(counts: list[int] | tuple[int, ...], total: int) -> float:
    if total == 0:
        return 0.0
    h = 0.0
    for c in counts:
        if c:
            p = c / total
            h -= p * math.log2(p)
    return h


def _laplace(counts: list[int], n_classes: int) -> tuple[float, ...]:
    total = sum(counts) + n_classes
    return tuple((c + 1) / total for c in counts)


@dataclass(frozen=True)
class _Candidate:
    gain_ratio: float
    gain: float
    attribute: int
    threshold: float | None  # None for nominal splits

    def sort_key(self) -> tuple:
        # Highest ratio wins; ties prefer higher gain, then the
        # lowest attribute index, then the lowest threshold, so the
        # choice never depends on evaluation order.
        return (
            self.gain_ratio,
            self.gain,
            -self.attribute,
            -(self.threshold if self.threshold is not None else 0.0),
        )


def _numeric_candidate(values: list[tuple[float, int]], n_classes: int, min_leaf: int,
                       attribute: int) -> _Candidate | None:
    """Best admissible threshold for one numeric attribute.

    ``values`` holds (value, class) for rows where the attribute is
    present, and must be sorted by value.
    """
    n = len(values)
    total_counts = [0] * n_classes
    for _, y in values:
        total_counts[y] += 1
    base = _entropy(total_counts, n)
    left = [0] * n_classes
    best: _Candidate | None = None
    for i in range(n - 1):
        left[values[i][1]] += 1
        if values[i][0] == values[i + 1][0]:
            continue
        n_left = i + 1
        n_right = n - n_left
        if n_left < min_leaf or n_right < min_leaf:
            continue
        right = [t - l for t, l in zip(total_counts, left)]
        gain = base - (n_left / n) * _entropy(left, n_left) - (n_right / n) * _entropy(right, n_right)
        p_left = n_left / n
        split_info = -(p_left * math.log2(p_left) + (1 - p_left) * math.log2(1 - p_left))
        ratio = gain / split_info if split_info > 0 else 0.0
        threshold = (values[i][0] + values[i + 1][0]) / 2.0
        if threshold >= values[i + 1][0]:
            # adjacent floats can round the midpoint up; fall back to
            # the lower value so the test still separates the pair
            threshold = values[i][0]
        cand = _Candidate(ratio, gain, attribute, threshold)
        if best is None or cand.sort_key() > best.sort_key():
            best = cand
    return best


def _nominal_candidate(buckets: list[list[int]], n_classes: int, min_leaf: int,
                       attribute: int) -> _Candidate | None:
    sizes = [sum(b) for b in buckets]
    n = sum(sizes)
    non_empty = [s for s in sizes if s > 0]
    if len(non_empty) < 2 or sum(1 for s in non_empty if s >= min_leaf) < 2:
        return None
    total_counts = [sum(b[c] for b in buckets) for c in range(n_classes)]
    base = _entropy(total_counts, n)
    gain = base
    split_info = 0.0
    for b, size in zip(buckets, sizes):
        if size == 0:
            continue
        p = size / n
        gain -= p * _entropy(b, size)
        split_info -= p * math.log2(p)
    ratio = gain / split_info if split_info > 0 else 0.0
    return _Candidate(ratio, gain, attribute, None)


def train_tree(dataset: Dataset, min_leaf: int = 2) -> TreeNode:
    """Grow a tree on the dataset's designated (nominal) class attribute.

    Rows with a missing class label are ignored.  Splitting stops when a
    node is pure, has fewer than ``2 * min_leaf`` rows, or no attribute
    offers a split leaving ``min_leaf`` rows per branch.
    """
    if not isinstance(min_leaf, int) or min_leaf < 1:
        raise ConfigError("min_leaf must be a positive integer")
    class_idx = dataset.class_index
    if class_idx is None:
        raise TrainingError("the dataset has no designated class attribute")
    class_spec = dataset.attributes[class_idx]
    if not class_spec.is_nominal:
        raise TrainingError("the class attribute must be nominal")
    n_classes = len(class_spec.categories)
    rows = dataset.instances
    labeled = [i for i in range(len(rows)) if rows[i][class_idx] is not None]
    if not labeled:
        raise TrainingError("no instance carries a class label")
    attrs = [i for i in range(len(dataset.attributes)) if i != class_idx]
    specs = dataset.attributes
    return _grow(rows, labeled, attrs, specs, class_idx, n_classes, min_leaf)


def _grow(rows, idx, attrs, specs, class_idx, n_classes, min_leaf) -> TreeNode:
    counts = [0] * n_classes
    for i in idx:
        counts[rows[i][class_idx]] += 1
    n = len(idx)
    if max(counts) == n or n < 2 * min_leaf:
        return Leaf(_laplace(counts, n_classes), n)

    best: _Candidate | None = None
    for attr in attrs:
        if specs[attr].is_nominal:
            k = len(specs[attr].categories)
            buckets = [[0] * n_classes for _ in range(k)]
            for i in idx:
                v = rows[i][attr]
                if v is not None:
                    buckets[v][rows[i][class_idx]] += 1
            cand = _nominal_candidate(buckets, n_classes, min_leaf, attr)
        else:
            present = sorted(
                (rows[i][attr], rows[i][class_idx]) for i in idx if rows[i][attr] is not None
            )
            cand = _numeric_candidate(present, n_classes, min_leaf, attr) if len(present) >= 2 else None
        if cand is not None and (best is None or cand.sort_key() > best.sort_key()):
            best = cand

    if best is None:
        return Leaf(_laplace(counts, n_classes), n)

    attr = best.attribute
    if best.threshold is not None:
        below_idx, above_idx, missing = [], [], []
        for i in idx:
            v = rows[i][attr]
            if v is None:
                missing.append(i)
            elif v <= best.threshold:
                below_idx.append(i)
            else:
                above_idx.append(i)
        # missing values follow the majority; ties go below
        (below_idx if len(below_idx) >= len(above_idx) else above_idx).extend(missing)
        below = _grow(rows, below_idx, attrs, specs, class_idx, n_classes, min_leaf)
        above = _grow(rows, above_idx, attrs, specs, class_idx, n_classes, min_leaf)
        return NumericSplit(attr, best.threshold, below, above, (len(below_idx), len(above_idx)))

    k = len(specs[attr].categories)
    parts: list[list[int]] = [[] for _ in range(k)]
    missing = []
    for i in idx:
        v = rows[i][attr]
        if v is None:
            missing.append(i)
        else:
            parts[v].append(i)
    largest = max(range(k), key=lambda c: (len(parts[c]), -c))
    parts[largest].extend(missing)
    children: list[TreeNode | None] = []
    supports: list[int] = []
    for part in parts:
        if part:
            children.append(_grow(rows, part, attrs, specs, class_idx, n_classes, min_leaf))
        else:
            children.append(None)
        supports.append(len(part))
    return NominalSplit(attr, tuple(children), tuple(supports))


def _blend(pairs: list[tuple[int, TreeNode]], row) -> tuple[float, ...]:
    total = sum(w for w, _ in pairs)
    acc: list[float] | None = None
    for weight, child in pairs:
        dist = predict_tree(child, row)
        if acc is None:
            acc = [weight * p for p in dist]
        else:
            for c, p in enumerate(dist):
                acc[c] += weight * p
    return tuple(v / total for v in acc)


def predict_tree(node: TreeNode, row) -> tuple[float, ...]:
    """Class distribution for one instance row.

    A missing test value (or a category the training data never showed)
    blends every branch's prediction, weighted by training support.
    """
    if isinstance(node, Leaf):
        return node.distribution
    value = row[node.attribute]
    if isinstance(node, NumericSplit):
        if value is None:
            return _blend(
                [(node.supports[0], node.below), (node.supports[1], node.above)], row
            )
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaMismatchError(
                f"attribute {node.attribute} expects a number, got {value!r}"
            )
        branch = node.below if value <= node.threshold else node.above
        return predict_tree(branch, row)
    # nominal
    if value is not None:
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaMismatchError(
                f"attribute {node.attribute} expects a category index, got {value!r}"
            )
        if not 0 <= value < len(node.children):
            raise SchemaMismatchError(
                f"category index {value} out of range for attribute {node.attribute}"
            )
        child = node.children[value]
        if child is not None:
            return predict_tree(child, row)
    pairs = [
        (s, c) for s, c in zip(node.supports, node.children) if c is not None
    ]
    return _blend(pairs, row)


# ---------------------------------------------------------------------------
# flat text form (used inside saved model files)


def serialize_tree(node: TreeNode) -> list[str]:
    """Preorder, one node per line; parse_tree inverts it exactly."""
    lines: list[str] = []

    def walk(n: TreeNode) -> None:
        if isinstance(n, Leaf):
            probs = " ".join(repr(p) for p in n.distribution)
            lines.append(f"leaf {n.support} {probs}")
        elif isinstance(n, NumericSplit):
            lines.append(
                f"num {n.attribute} {format_number(n.threshold)} "
                f"{n.supports[0]} {n.supports[1]}"
            )
            walk(n.below)
            walk(n.above)
        else:
            supports = ",".join(
                str(s) if child is not None else "-"
                for s, child in zip(n.supports, n.children)
            )
            lines.append(f"nom {n.attribute} {supports}")
            for child in n.children:
                if child is not None:
                    walk(child)

    walk(node)
    return lines


def parse_tree(lines: Iterator[str]) -> TreeNode:
    """Rebuild a tree from its serialized lines (consumes exactly one tree)."""
    try:
        line = next(lines)
    except StopIteration:
        raise FormatError("tree text ended unexpectedly") from None
    parts = line.split()
    try:
        if parts[0] == "leaf":
            support = int(parts[1])
            dist = tuple(float(p) for p in parts[2:])
            if not dist:
                raise FormatError("leaf with empty distribution")
            return Leaf(dist, support)
        if parts[0] == "num":
            attribute = int(parts[1])
            threshold = float(parts[2])
            supports = (int(parts[3]), int(parts[4]))
            below = parse_tree(lines)
            above = parse_tree(lines)
            return NumericSplit(attribute, threshold, below, above, supports)
        if parts[0] == "nom":
            attribute = int(parts[1])
            raw = parts[2].split(",")
            supports = tuple(0 if r == "-" else int(r) for r in raw)
            children: list[TreeNode | None] = []
            for r in raw:
                children.append(None if r == "-" else parse_tree(lines))
            return NominalSplit(attribute, tuple(children), supports)
    except (IndexError, ValueError) as exc:
        raise FormatError(f"malformed tree line {line!r}: {exc}") from None
    raise FormatError(f"unknown tree node kind in line {line!r}")
