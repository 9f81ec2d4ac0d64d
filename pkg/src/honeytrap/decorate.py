"""Diversity-driven ensemble construction over the tree learner.

The ensemble starts from one tree trained on the real data.  Each
round, synthetic instances are drawn from per-attribute summaries of the
training data, labeled *against* the current ensemble's predictions to
force disagreement, and a candidate tree is trained on the union of real
and synthetic rows.  The candidate stays only if ensemble training error
does not increase.  Rounds continue until the ensemble reaches its size
budget or the trial budget runs out.
"""

from __future__ import annotations

import hashlib
import random
import statistics
from dataclasses import dataclass, field

from .arff import AttributeSpec, Dataset, Value, attribute_line, format_number, parse_attribute_declaration
from .errors import ConfigError, FormatError, SchemaMismatchError, TrainingError
from .tree import TreeNode, parse_tree, predict_tree, serialize_tree, train_tree

#: Floor applied to predicted class probabilities before inversion, so a
#: confident ensemble cannot zero out a label entirely.
PROBABILITY_FLOOR = 1e-3

MODEL_HEADER = "honeytrap-model 1"


@dataclass(frozen=True)
class DecorateParams:
    """Knobs for ensemble construction."""

    c_size: int = 15
    i_max: int = 50
    r_size: float = 1.0
    seed: int = 42
    min_leaf: int = 2

    def validate(self) -> None:
        if not isinstance(self.c_size, int) or self.c_size < 1:
            raise ConfigError("c_size must be a positive integer")
        if not isinstance(self.i_max, int) or self.i_max < self.c_size:
            raise ConfigError("i_max must be an integer no smaller than c_size")
        if not (isinstance(self.r_size, (int, float)) and self.r_size > 0):
            raise ConfigError("r_size must be positive")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError("seed must be an integer")
        if not isinstance(self.min_leaf, int) or self.min_leaf < 1:
            raise ConfigError("min_leaf must be a positive integer")


@dataclass
class Ensemble:
    """A trained committee plus everything needed to reapply it."""

    members: list[TreeNode]
    attributes: tuple[AttributeSpec, ...]
    class_index: int
    params: DecorateParams
    training_error: float
    error_history: tuple[float, ...]

    @property
    def class_labels(self) -> tuple[str, ...]:
        return self.attributes[self.class_index].categories

    @property
    def schema_hash(self) -> str:
        return schema_hash(self.attributes, self.class_index)


def schema_hash(attributes: tuple[AttributeSpec, ...], class_index: int) -> str:
    """Digest of the attribute declarations a model was trained against."""
    text = "\n".join(attribute_line(a) for a in attributes) + f"\nclass {class_index}"
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _argmax(dist) -> int:
    best = 0
    for i in range(1, len(dist)):
        if dist[i] > dist[best]:
            best = i
    return best


def predict(ensemble: Ensemble, row) -> tuple[float, ...]:
    """Mean of the member trees' class distributions for one row."""
    if len(row) != len(ensemble.attributes):
        raise SchemaMismatchError(
            f"row has {len(row)} values, model expects {len(ensemble.attributes)}"
        )
    acc = [0.0] * len(ensemble.class_labels)
    for member in ensemble.members:
        for c, p in enumerate(predict_tree(member, row)):
            acc[c] += p
    n = len(ensemble.members)
    return tuple(v / n for v in acc)


def classify(ensemble: Ensemble, row) -> str:
    """Predicted label; ties resolve to the first-listed class."""
    return ensemble.class_labels[_argmax(predict(ensemble, row))]


def check_schema(ensemble: Ensemble, dataset: Dataset) -> None:
    """Raise unless the dataset's schema matches the model's exactly."""
    if dataset.class_index is None:
        raise SchemaMismatchError("the dataset has no designated class attribute")
    if schema_hash(tuple(dataset.attributes), dataset.class_index) != ensemble.schema_hash:
        raise SchemaMismatchError("dataset schema does not match the model's schema")


def _members_error(members, rows, labeled, class_idx, n_classes) -> float:
    wrong = 0
    for i in labeled:
        acc = [0.0] * n_classes
        for member in members:
            for c, p in enumerate(predict_tree(member, rows[i])):
                acc[c] += p
        if _argmax(acc) != rows[i][class_idx]:
            wrong += 1
    return wrong / len(labeled)


def generate_artificial(dataset: Dataset, n: int, seed: int) -> list[list[Value]]:
    """Draw synthetic unlabeled rows from per-attribute data summaries.

    Numeric attributes use a Gaussian fit to the observed values (a
    constant column stays constant); nominal attributes sample category
    frequencies with add-one smoothing.  The class cell is left missing.
    """
    if n < 0:
        raise ConfigError("the number of artificial instances must be non-negative")
    class_idx = dataset.class_index
    rng = random.Random(seed)
    summaries = []
    for idx, spec in enumerate(dataset.attributes):
        if idx == class_idx:
            summaries.append(None)
            continue
        observed = [row[idx] for row in dataset.instances if row[idx] is not None]
        if spec.is_nominal:
            k = len(spec.categories)
            counts = [1] * k  # add-one smoothing
            for v in observed:
                counts[v] += 1
            total = sum(counts)
            cumulative = []
            acc = 0.0
            for c in counts:
                acc += c / total
                cumulative.append(acc)
            summaries.append(("nom", cumulative))
        else:
            if observed:
                mean = statistics.fmean(observed)
                std = statistics.pstdev(observed) if len(observed) > 1 else 0.0
            else:
                mean, std = 0.0, 0.0
            summaries.append(("num", mean, std))
    out: list[list[Value]] = []
    for _ in range(n):
        row: list[Value] = []
        for idx, summary in enumerate(summaries):
            if summary is None:
                row.append(None)
            elif summary[0] == "num":
                row.append(rng.gauss(summary[1], summary[2]))
            else:
                roll = rng.random()
                cumulative = summary[1]
                chosen = len(cumulative) - 1
                for c, edge in enumerate(cumulative):
                    if roll < edge:
                        chosen = c
                        break
                row.append(chosen)
        out.append(row)
    return out


def label_artificial(ensemble: Ensemble, rows: list[list[Value]], seed: int) -> list[list[Value]]:
    """Fill in class labels that disagree with the ensemble.

    Each row's predicted distribution is floored, inverted and
    renormalized, then a label is drawn from the inverted weights — so
    the likeliest draw is whatever the ensemble currently finds least
    plausible.
    """
    rng = random.Random(seed)
    class_idx = ensemble.class_index
    labeled = []
    for row in rows:
        dist = predict(ensemble, row)
        inverse = [1.0 / max(p, PROBABILITY_FLOOR) for p in dist]
        total = sum(inverse)
        roll = rng.random()
        acc = 0.0
        chosen = len(inverse) - 1
        for c, w in enumerate(inverse):
            acc += w / total
            if roll < acc:
                chosen = c
                break
        new_row = list(row)
        new_row[class_idx] = chosen
        labeled.append(new_row)
    return labeled


def train_decorate(dataset: Dataset, params: DecorateParams = DecorateParams()) -> Ensemble:
    """Build the ensemble; see the module docstring for the loop.

    The dataset needs a designated nominal class with at least two
    distinct labels among its rows.
    """
    params.validate()
    dataset.validate()
    class_idx = dataset.class_index
    if class_idx is None:
        raise TrainingError("the dataset has no designated class attribute")
    rows = dataset.instances
    labeled = [i for i in range(len(rows)) if rows[i][class_idx] is not None]
    if len(labeled) < 2:
        raise TrainingError("training needs at least two labeled instances")
    observed = {rows[i][class_idx] for i in labeled}
    if len(observed) < 2:
        raise TrainingError("training needs at least two distinct class labels")

    n_classes = len(dataset.attributes[class_idx].categories)
    rng = random.Random(params.seed)
    real = [rows[i] for i in labeled]
    n_artificial = max(1, round(params.r_size * len(real)))

    members = [train_tree(dataset, params.min_leaf)]
    error = _members_error(members, rows, labeled, class_idx, n_classes)
    history = [error]

    ensemble = Ensemble(
        members=members,
        attributes=tuple(dataset.attributes),
        class_index=class_idx,
        params=params,
        training_error=error,
        error_history=(),
    )

    trials = 1
    while len(members) < params.c_size and trials < params.i_max:
        trials += 1
        artificial = generate_artificial(dataset, n_artificial, rng.randrange(2**32))
        synthetic = label_artificial(ensemble, artificial, rng.randrange(2**32))
        candidate_data = Dataset(
            dataset.relation,
            dataset.attributes,
            real + synthetic,
            class_index=class_idx,
        )
        members.append(train_tree(candidate_data, params.min_leaf))
        new_error = _members_error(members, rows, labeled, class_idx, n_classes)
        if new_error <= error:
            error = new_error
            history.append(error)
        else:
            members.pop()

    ensemble.training_error = error
    ensemble.error_history = tuple(history)
    return ensemble


# ---------------------------------------------------------------------------
# model files


def save_model(ensemble: Ensemble) -> str:
    """Render the ensemble as a line-oriented text model file."""
    p = ensemble.params
    lines = [
        MODEL_HEADER,
        f"schema {ensemble.schema_hash}",
        f"class_index {ensemble.class_index}",
        f"params c_size={p.c_size} i_max={p.i_max} r_size={format_number(p.r_size)} "
        f"seed={p.seed} min_leaf={p.min_leaf}",
        f"training_error {repr(ensemble.training_error)}",
        "error_history " + ",".join(repr(e) for e in ensemble.error_history),
        f"attributes {len(ensemble.attributes)}",
    ]
    for spec in ensemble.attributes:
        lines.append(attribute_line(spec))
    lines.append(f"members {len(ensemble.members)}")
    for member in ensemble.members:
        lines.append("tree")
        lines.extend(serialize_tree(member))
    lines.append("end")
    return "\n".join(lines) + "\n"


def load_model(text: str) -> Ensemble:
    """Parse a model file, verifying its recorded schema digest."""
    lines = iter(text.splitlines())

    def take(prefix: str) -> str:
        try:
            line = next(lines)
        except StopIteration:
            raise FormatError(f"model file ended before {prefix!r}") from None
        if not line.startswith(prefix):
            raise FormatError(f"expected {prefix!r}, found {line!r}")
        return line[len(prefix):].strip()

    header = take(MODEL_HEADER)
    if header:
        raise FormatError("unsupported model file version")
    recorded_hash = take("schema ")
    class_index = int(take("class_index "))
    params_text = take("params ")
    kv = dict(part.split("=", 1) for part in params_text.split())
    try:
        params = DecorateParams(
            c_size=int(kv["c_size"]),
            i_max=int(kv["i_max"]),
            r_size=float(kv["r_size"]),
            seed=int(kv["seed"]),
            min_leaf=int(kv["min_leaf"]),
        )
    except (KeyError, ValueError) as exc:
        raise FormatError(f"malformed params line: {exc}") from None
    training_error = float(take("training_error "))
    history_text = take("error_history ")
    error_history = tuple(float(x) for x in history_text.split(",")) if history_text else ()
    n_attributes = int(take("attributes "))
    attributes = []
    for _ in range(n_attributes):
        try:
            line = next(lines)
        except StopIteration:
            raise FormatError("model file ended inside the attribute block") from None
        if not line.startswith("@attribute"):
            raise FormatError(f"expected an @attribute line, found {line!r}")
        attributes.append(parse_attribute_declaration(line[len("@attribute"):].strip()))
    if not 0 <= class_index < len(attributes):
        raise FormatError(f"class index {class_index} out of range")
    if not attributes[class_index].is_nominal:
        raise FormatError("the class attribute in the model file is not nominal")
    n_members = int(take("members "))
    members = []
    for _ in range(n_members):
        take("tree")
        members.append(parse_tree(lines))
    take("end")
    ensemble = Ensemble(
        members=members,
        attributes=tuple(attributes),
        class_index=class_index,
        params=params,
        training_error=training_error,
        error_history=error_history,
    )
    if ensemble.schema_hash != recorded_hash:
        raise SchemaMismatchError(
            "the model file's schema digest does not match its attribute block"
        )
    return ensemble
