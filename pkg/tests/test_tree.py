"""Base learner: split choice, smoothing, missing values, text form."""

import random

import pytest

from honeytrap import tree as tr
from honeytrap.arff import AttributeSpec, Dataset
from honeytrap.errors import ConfigError, FormatError, SchemaMismatchError, TrainingError
from honeytrap.tree import Leaf, NominalSplit, NumericSplit, parse_tree, predict_tree, serialize_tree, train_tree


def numeric_dataset(values, labels, classes=("A", "B")):
    return Dataset(
        "t",
        [AttributeSpec("x"), AttributeSpec("class", tuple(classes))],
        [[v, y] for v, y in zip(values, labels)],
        class_index=1,
    )


# ---------------------------------------------------------------------------
# split selection


def test_clean_numeric_split_at_midpoint():
    ds = numeric_dataset([2, 3, 5, 6, 8, 9], [0, 0, 0, 1, 1, 1])
    node = train_tree(ds, min_leaf=2)
    assert isinstance(node, NumericSplit)
    assert node.attribute == 0
    assert node.threshold == 5.5
    assert node.supports == (3, 3)
    # pure three-row leaves with add-one smoothing over two classes
    assert node.below == Leaf((0.8, 0.2), 3)
    assert node.above == Leaf((0.2, 0.8), 3)


def test_pure_node_is_a_leaf():
    ds = numeric_dataset([1, 2, 3, 4], [0, 0, 0, 0])
    assert train_tree(ds, min_leaf=1) == Leaf((5 / 6, 1 / 6), 4)


def test_small_node_stops_splitting():
    ds = numeric_dataset([1, 9], [0, 1])
    # two rows with min_leaf=2 cannot split (needs 2 per side -> 4 rows)
    assert train_tree(ds, min_leaf=2) == Leaf((0.5, 0.5), 2)
    # with min_leaf=1 it can
    assert isinstance(train_tree(ds, min_leaf=1), NumericSplit)


def test_min_leaf_respected_throughout():
    rng = random.Random(4)
    values = [rng.uniform(0, 10) for _ in range(60)]
    labels = [int(v > 5) if rng.random() < 0.8 else rng.randint(0, 1) for v in values]
    node = train_tree(numeric_dataset(values, labels), min_leaf=5)

    def walk(n):
        if isinstance(n, NumericSplit):
            assert min(n.supports) >= 5
            walk(n.below)
            walk(n.above)
        elif isinstance(n, NominalSplit):
            assert sum(1 for s in n.supports if s >= 5) >= 2
            for child in n.children:
                if child is not None:
                    walk(child)

    walk(node)


def test_gain_ratio_beats_raw_gain():
    # both attributes separate perfectly (same gain) but the four-way
    # nominal split has split-info 2 vs the binary split's 1, so the
    # ratio prefers the numeric attribute even though it comes second
    labels = [0, 0, 1, 1, 0, 0, 1, 1]
    ds = Dataset(
        "t",
        [
            AttributeSpec("chunk", ("c0", "c1", "c2", "c3")),
            AttributeSpec("x"),
            AttributeSpec("class", ("A", "B")),
        ],
        [
            [i // 2, [1, 2, 5, 6, 3, 4, 7, 8][i], labels[i]]
            for i in range(8)
        ],
        class_index=2,
    )
    node = train_tree(ds, min_leaf=2)
    assert isinstance(node, NumericSplit)
    assert node.attribute == 1
    assert node.threshold == 4.5


def test_zero_gain_split_still_allowed():
    # XOR: no single attribute has positive gain, yet the tree must not
    # give up at the impure root
    ds = Dataset(
        "xor",
        [AttributeSpec("x"), AttributeSpec("y"), AttributeSpec("class", ("A", "B"))],
        [[0.0, 0.0, 0], [0.0, 1.0, 1], [1.0, 0.0, 1], [1.0, 1.0, 0]],
        class_index=2,
    )
    node = train_tree(ds, min_leaf=1)
    for row in ds.instances:
        dist = predict_tree(node, row)
        assert max(range(2), key=lambda c: dist[c]) == row[2]


def test_nominal_split_and_unseen_category():
    ds = Dataset(
        "t",
        [AttributeSpec("color", ("red", "green", "blue")), AttributeSpec("class", ("A", "B"))],
        [[0, 0], [0, 0], [0, 0], [1, 1], [1, 1], [1, 1]],
        class_index=1,
    )
    node = train_tree(ds, min_leaf=2)
    assert isinstance(node, NominalSplit)
    assert node.attribute == 0
    assert node.children[2] is None  # blue never seen
    assert node.supports == (3, 3, 0)
    assert predict_tree(node, [0, None]) == (0.8, 0.2)
    assert predict_tree(node, [1, None]) == (0.2, 0.8)
    # unseen category blends the existing branches by support: 50/50 here
    assert predict_tree(node, [2, None]) == pytest.approx((0.5, 0.5))


def test_row_order_does_not_change_the_tree():
    rng = random.Random(7)
    values = [rng.uniform(0, 1) for _ in range(40)]
    cats = [rng.randint(0, 2) for _ in range(40)]
    labels = [int(v > 0.4) ^ (c == 1) for v, c in zip(values, cats)]
    rows = [[v, c, y] for v, c, y in zip(values, cats, labels)]
    attrs = [AttributeSpec("x"), AttributeSpec("c", ("a", "b", "c")), AttributeSpec("class", ("A", "B"))]
    ds = Dataset("t", attrs, rows, class_index=2)
    shuffled = rows[:]
    rng.shuffle(shuffled)
    ds2 = Dataset("t", attrs, shuffled, class_index=2)
    assert train_tree(ds) == train_tree(ds2)


# ---------------------------------------------------------------------------
# missing values


def test_training_missing_goes_to_larger_side():
    ds = numeric_dataset([1, 2, 3, 4, None], [0, 0, 1, 1, 0])
    node = train_tree(ds, min_leaf=2)
    assert isinstance(node, NumericSplit)
    assert node.threshold == 2.5
    # 2 below vs 2 above before routing; the tie sends the missing row below
    assert node.supports == (3, 2)
    assert node.below == Leaf((0.8, 0.2), 3)
    assert node.above == Leaf((0.25, 0.75), 2)


def test_prediction_missing_blends_by_support():
    node = NumericSplit(
        attribute=0,
        threshold=5.0,
        below=Leaf((1.0, 0.0), 30),
        above=Leaf((0.0, 1.0), 10),
        supports=(30, 10),
    )
    assert predict_tree(node, [None]) == (0.75, 0.25)
    assert predict_tree(node, [5.0]) == (1.0, 0.0)  # tie goes below
    assert predict_tree(node, [5.0000001]) == (0.0, 1.0)


def test_rows_with_missing_class_are_ignored():
    ds = numeric_dataset([1, 2, 3, 4, 100], [0, 0, 1, 1, None])
    node = train_tree(ds, min_leaf=2)
    assert isinstance(node, NumericSplit)
    assert node.supports == (2, 2)


def test_adjacent_float_midpoint_stays_below_the_upper_value():
    lo = 1.0
    hi = float.fromhex("0x1.0000000000001p+0")  # next float up
    ds = numeric_dataset([lo, lo, hi, hi], [0, 0, 1, 1])
    node = train_tree(ds, min_leaf=2)
    assert isinstance(node, NumericSplit)
    assert node.threshold < hi
    assert predict_tree(node, [lo])[0] > 0.5
    assert predict_tree(node, [hi])[1] > 0.5


def test_distributions_always_sum_to_one():
    rng = random.Random(13)
    values = [rng.choice([None, rng.uniform(0, 1)]) for _ in range(50)]
    cats = [rng.choice([None, rng.randint(0, 2)]) for _ in range(50)]
    labels = [rng.randint(0, 2) for _ in range(50)]
    ds = Dataset(
        "t",
        [AttributeSpec("x"), AttributeSpec("c", ("a", "b", "c")),
         AttributeSpec("class", ("A", "B", "C"))],
        [[v, c, y] for v, c, y in zip(values, cats, labels)],
        class_index=2,
    )
    node = train_tree(ds, min_leaf=1)
    for _ in range(100):
        row = [rng.choice([None, rng.uniform(-1, 2)]), rng.choice([None, 0, 1, 2]), None]
        dist = predict_tree(node, row)
        assert len(dist) == 3
        assert sum(dist) == pytest.approx(1.0)
        assert all(p > 0 for p in dist)


# ---------------------------------------------------------------------------
# guard rails


def test_training_guards():
    ds = numeric_dataset([1, 2], [0, 1])
    with pytest.raises(ConfigError):
        train_tree(ds, min_leaf=0)
    undesignated = Dataset("t", ds.attributes, ds.instances)
    with pytest.raises(TrainingError):
        train_tree(undesignated)
    numeric_class = Dataset(
        "t", [AttributeSpec("x"), AttributeSpec("y")], [[1.0, 2.0]], class_index=1
    )
    with pytest.raises(TrainingError):
        train_tree(numeric_class)
    unlabeled = numeric_dataset([1, 2], [None, None])
    with pytest.raises(TrainingError):
        train_tree(unlabeled)


def test_prediction_type_guards():
    ds = Dataset(
        "t",
        [AttributeSpec("x"), AttributeSpec("c", ("a", "b")), AttributeSpec("class", ("A", "B"))],
        [[1.0, 0, 0], [2.0, 0, 0], [3.0, 1, 1], [4.0, 1, 1]],
        class_index=2,
    )
    node = train_tree(ds, min_leaf=2)
    with pytest.raises(SchemaMismatchError):
        predict_tree(node, ["tall", 0, None])
    nominal_root = train_tree(
        Dataset("t", ds.attributes,
                [[1.0, 0, 0], [1.0, 0, 0], [1.0, 1, 1], [1.0, 1, 1]],
                class_index=2),
        min_leaf=2,
    )
    assert isinstance(nominal_root, NominalSplit)
    with pytest.raises(SchemaMismatchError):
        predict_tree(nominal_root, [1.0, 7, None])
    with pytest.raises(SchemaMismatchError):
        predict_tree(nominal_root, [1.0, 0.5, None])


# ---------------------------------------------------------------------------
# text form


def _mixed_tree():
    rng = random.Random(99)
    rows = []
    for _ in range(80):
        x = rng.choice([None, rng.uniform(0, 10)])
        c = rng.choice([None, 0, 1, 2])
        y = int((x or 5) > 5) ^ (c == 2)
        rows.append([x, c, y])
    ds = Dataset(
        "t",
        [AttributeSpec("x"), AttributeSpec("c", ("a", "b", "c")),
         AttributeSpec("class", ("A", "B"))],
        rows,
        class_index=2,
    )
    return train_tree(ds, min_leaf=3)


def test_serialize_round_trip():
    node = _mixed_tree()
    lines = serialize_tree(node)
    assert parse_tree(iter(lines)) == node
    # a hand-sized example, checked shape-wise
    small = NumericSplit(0, 2.5, Leaf((0.8, 0.2), 3), Leaf((0.25, 0.75), 2), (3, 2))
    text = serialize_tree(small)
    assert text[0] == "num 0 2.5 3 2"
    assert text[1].startswith("leaf 3 ")
    assert parse_tree(iter(text)) == small


def test_serialize_handles_unseen_category_children():
    node = NominalSplit(1, (Leaf((0.9, 0.1), 5), None, Leaf((0.3, 0.7), 4)), (5, 0, 4))
    lines = serialize_tree(node)
    assert lines[0] == "nom 1 5,-,4"
    assert parse_tree(iter(lines)) == node


def test_parse_tree_rejects_malformed_text():
    for bad in (
        [],
        ["leaf 3"],
        ["num 0 2.5 3"],
        ["num 0 x 3 2", "leaf 1 0.5 0.5", "leaf 1 0.5 0.5"],
        ["branch 0"],
        ["num 0 2.5 3 2", "leaf 3 0.8 0.2"],  # above child missing
        ["nom 0 5,x", "leaf 5 0.9 0.1", "leaf 1 0.5 0.5"],
    ):
        with pytest.raises(FormatError):
            parse_tree(iter(bad))


def test_leaf_probabilities_survive_the_round_trip_exactly():
    node = Leaf((1 / 3, 1 / 3, 1 / 3), 7)
    assert parse_tree(iter(serialize_tree(node))) == node
