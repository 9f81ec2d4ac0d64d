"""Cross-validated evaluation: agreement statistics, curves, cost sweeps.

``cross_validate`` runs stratified k-fold cross-validation of the
ensemble learner and assembles an :class:`EvalReport`; the remaining
functions are the individual metrics, all usable on their own.

Predictions are passed around as ``(distribution, actual_index)`` pairs,
where the distribution follows the dataset's class label order.
"""

from __future__ import annotations

import dataclasses
import json
import math
import multiprocessing
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .arff import Dataset
from .decorate import DecorateParams, predict, train_decorate
from .errors import (
    ConfigError,
    EmptyCurveError,
    EvaluationError,
    StratificationError,
    UndefinedMetricError,
)
from .features import FeatureGroup, project_dataset

Prediction = tuple[tuple[float, ...], int]


def _argmax(dist: Sequence[float]) -> int:
    best = 0
    for i in range(1, len(dist)):
        if dist[i] > dist[best]:
            best = i
    return best


# ---------------------------------------------------------------------------
# agreement statistics


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts[actual][predicted], rows and columns in class label order."""

    labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    @classmethod
    def from_pairs(cls, labels: Sequence[str], pairs: Sequence[tuple[int, int]]) -> "ConfusionMatrix":
        k = len(labels)
        grid = [[0] * k for _ in range(k)]
        for actual, predicted in pairs:
            if not (0 <= actual < k and 0 <= predicted < k):
                raise EvaluationError(f"label index pair {(actual, predicted)} out of range")
            grid[actual][predicted] += 1
        return cls(tuple(labels), tuple(tuple(row) for row in grid))

    @property
    def n(self) -> int:
        return sum(sum(row) for row in self.counts)

    @property
    def correct(self) -> int:
        return sum(self.counts[i][i] for i in range(len(self.labels)))

    def row_sum(self, i: int) -> int:
        return sum(self.counts[i])

    def col_sum(self, j: int) -> int:
        return sum(row[j] for row in self.counts)

    @property
    def accuracy(self) -> float:
        if self.n == 0:
            raise EvaluationError("the confusion matrix is empty")
        return self.correct / self.n


def kappa(cm: ConfusionMatrix) -> float:
    """Chance-corrected agreement between actual and predicted labels.

    Observed agreement is the diagonal mass; expected agreement comes
    from the row/column marginal products.  Expected agreement of 1
    leaves the statistic undefined.
    """
    n = cm.n
    if n == 0:
        raise EvaluationError("the confusion matrix is empty")
    observed = cm.correct / n
    expected = sum(cm.row_sum(i) * cm.col_sum(i) for i in range(len(cm.labels))) / (n * n)
    if expected == 1.0:
        raise UndefinedMetricError("chance agreement is 1; the statistic is undefined")
    return (observed - expected) / (1.0 - expected)


@dataclass(frozen=True)
class ClassMetrics:
    """One class's row of the detailed-accuracy table."""

    tp_rate: float
    fp_rate: float
    precision: float
    recall: float


def class_metrics(cm: ConfusionMatrix) -> dict[str, ClassMetrics]:
    """Per-class TP rate, FP rate, precision and recall.

    A vanishing denominator yields 0 for that entry.
    """
    out: dict[str, ClassMetrics] = {}
    n = cm.n
    for i, label in enumerate(cm.labels):
        tp = cm.counts[i][i]
        actual = cm.row_sum(i)
        predicted = cm.col_sum(i)
        negatives = n - actual
        tp_rate = tp / actual if actual else 0.0
        fp_rate = (predicted - tp) / negatives if negatives else 0.0
        precision = tp / predicted if predicted else 0.0
        out[label] = ClassMetrics(tp_rate, fp_rate, precision, tp_rate)
    return out


def prob_errors(predictions: Sequence[Prediction]) -> tuple[float, float]:
    """Mean absolute and root-mean-squared error of the predicted
    probabilities against one-hot actual labels, averaged over every
    instance *and* every class."""
    if not predictions:
        raise EvaluationError("no predictions to evaluate")
    abs_sum = 0.0
    sq_sum = 0.0
    cells = 0
    for dist, actual in predictions:
        for c, p in enumerate(dist):
            residual = p - (1.0 if c == actual else 0.0)
            abs_sum += abs(residual)
            sq_sum += residual * residual
            cells += 1
    return abs_sum / cells, math.sqrt(sq_sum / cells)


# ---------------------------------------------------------------------------
# curves


class CurvePoint(NamedTuple):
    x: float
    y: float


def threshold_curve(predictions: Sequence[Prediction], positive_index: int) -> list[CurvePoint]:
    """Positives retrieved as ever-larger score-ranked prefixes are flagged.

    Instances are ranked by predicted positive probability (descending);
    point i has x = fraction of instances in the prefix and y = fraction
    of all actual positives the prefix contains.  Starts at (0, 0) and
    ends at (1, 1).
    """
    if not predictions:
        raise EmptyCurveError("cannot build a curve from zero predictions")
    total_pos = sum(1 for _, actual in predictions if actual == positive_index)
    if total_pos == 0:
        raise EvaluationError("the curve needs at least one actual positive instance")
    ranked = sorted(predictions, key=lambda pr: -pr[0][positive_index])
    n = len(ranked)
    points = [CurvePoint(0.0, 0.0)]
    seen_pos = 0
    for i, (dist, actual) in enumerate(ranked):
        if actual == positive_index:
            seen_pos += 1
        points.append(CurvePoint((i + 1) / n, seen_pos / total_pos))
    return points


def margin_curve(predictions: Sequence[Prediction]) -> list[CurvePoint]:
    """Cumulative distribution of the prediction margin.

    The margin of one instance is the probability of its actual class
    minus the largest probability among the other classes, so it lies in
    [-1, 1].  One point per distinct margin, y = fraction of instances
    at or below it.
    """
    if not predictions:
        raise EmptyCurveError("cannot build a curve from zero predictions")
    margins = []
    for dist, actual in predictions:
        if not 0 <= actual < len(dist):
            raise EvaluationError(f"actual class {actual} out of range")
        others = [p for c, p in enumerate(dist) if c != actual]
        rival = max(others) if others else 0.0
        margins.append(dist[actual] - rival)
    margins.sort()
    n = len(margins)
    points: list[CurvePoint] = []
    for i, m in enumerate(margins):
        if i + 1 < n and margins[i + 1] == m:
            continue
        points.append(CurvePoint(m, (i + 1) / n))
    return points


# ---------------------------------------------------------------------------
# cost-sensitive threshold choice


@dataclass(frozen=True)
class CostMatrix:
    """costs[actual][predicted] in class label order, for binary tasks."""

    costs: tuple[tuple[float, float], tuple[float, float]]

    def validate(self) -> None:
        if len(self.costs) != 2 or any(len(row) != 2 for row in self.costs):
            raise ConfigError("the cost matrix must be 2x2")
        for row in self.costs:
            for v in row:
                if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
                    raise ConfigError("costs must be finite and non-negative")


@dataclass(frozen=True)
class CostBenefitResult:
    threshold: float
    total_cost: float
    confusion: ConfusionMatrix
    accuracy: float


def cost_benefit(
    predictions: Sequence[Prediction],
    positive_index: int,
    cost: CostMatrix,
    labels: tuple[str, str] = ("pos", "neg"),
) -> CostBenefitResult:
    """Sweep decision thresholds and keep the cheapest one.

    Candidate thresholds are every distinct predicted positive
    probability plus 0 and 1; an instance is called positive when its
    positive probability is at or above the threshold.  Cost ties keep
    the smallest threshold.
    """
    if not predictions:
        raise EvaluationError("no predictions to evaluate")
    if any(len(dist) != 2 for dist, _ in predictions):
        raise EvaluationError("cost analysis is defined for two-class predictions only")
    if positive_index not in (0, 1):
        raise EvaluationError("positive_index must be 0 or 1")
    cost.validate()
    negative_index = 1 - positive_index

    candidates = sorted({0.0, 1.0} | {dist[positive_index] for dist, _ in predictions})
    best_t = None
    best_cost = None
    for t in candidates:
        total = 0.0
        for dist, actual in predictions:
            predicted = positive_index if dist[positive_index] >= t else negative_index
            total += cost.costs[actual][predicted]
        if best_cost is None or total < best_cost:
            best_cost = total
            best_t = t

    pairs = []
    for dist, actual in predictions:
        predicted = positive_index if dist[positive_index] >= best_t else negative_index
        pairs.append((actual, predicted))
    cm = ConfusionMatrix.from_pairs(labels, pairs)
    return CostBenefitResult(best_t, best_cost, cm, cm.accuracy)


# ---------------------------------------------------------------------------
# cross-validation


def stratified_folds(labels: Sequence[int | None], k: int, seed: int) -> list[list[int]]:
    """Split positions 0..n-1 into k folds with per-class balance.

    Each class's positions are shuffled with the given seed and dealt
    round-robin, so every fold holds each class's share within one
    instance.  Every class that occurs must have at least k instances.
    """
    if not isinstance(k, int) or k < 2:
        raise ConfigError("the number of folds must be an integer >= 2")
    if not labels:
        raise StratificationError("there are no instances to split")
    groups: dict[int, list[int]] = {}
    for pos, label in enumerate(labels):
        if label is None:
            raise StratificationError(f"instance {pos} has no class label")
        groups.setdefault(label, []).append(pos)
    for label, members in sorted(groups.items()):
        if len(members) < k:
            raise StratificationError(
                f"class {label} has {len(members)} instances, fewer than {k} folds"
            )
    rng = random.Random(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    offset = 0
    for label, members in sorted(groups.items()):
        rng.shuffle(members)
        for j, pos in enumerate(members):
            folds[(offset + j) % k].append(pos)
        offset = (offset + len(members)) % k
    for fold in folds:
        fold.sort()
    return folds


def _fold_worker(payload):
    attributes, class_index, train_rows, test_items, params = payload
    subset = Dataset("cv-train", list(attributes), train_rows, class_index=class_index)
    ensemble = train_decorate(subset, params)
    return [
        (idx, predict(ensemble, row), row[class_index]) for idx, row in test_items
    ]


def cv_predictions(
    dataset: Dataset,
    params: DecorateParams = DecorateParams(),
    folds: int = 10,
    seed: int = 42,
    jobs: int = 1,
) -> list[Prediction]:
    """Out-of-fold predictions for every labeled instance, in row order.

    Each fold's model trains with its own derived seed
    (``params.seed + fold``), so the whole procedure is reproducible.
    """
    class_idx = dataset.class_index
    if class_idx is None:
        raise EvaluationError("the dataset has no designated class attribute")
    rows = dataset.instances
    labeled = [i for i in range(len(rows)) if rows[i][class_idx] is not None]
    if len(labeled) != len(rows):
        raise StratificationError("every instance must carry a class label")
    fold_positions = stratified_folds([rows[i][class_idx] for i in labeled], folds, seed)

    payloads = []
    for f, positions in enumerate(fold_positions):
        test = {labeled[p] for p in positions}
        train_rows = [rows[i] for i in labeled if i not in test]
        test_items = [(i, rows[i]) for i in sorted(test)]
        fold_params = dataclasses.replace(params, seed=params.seed + f)
        payloads.append(
            (tuple(dataset.attributes), class_idx, train_rows, test_items, fold_params)
        )

    jobs = max(1, min(int(jobs), folds))
    if jobs == 1:
        results = [_fold_worker(p) for p in payloads]
    else:
        try:
            context = multiprocessing.get_context("fork")
        except ValueError:
            context = None
        if context is None:
            results = [_fold_worker(p) for p in payloads]
        else:
            with ProcessPoolExecutor(max_workers=jobs, mp_context=context) as pool:
                results = list(pool.map(_fold_worker, payloads))

    collected: dict[int, Prediction] = {}
    for chunk in results:
        for idx, dist, actual in chunk:
            collected[idx] = (dist, actual)
    return [collected[i] for i in sorted(collected)]


@dataclass
class EvalReport:
    """Everything the evaluation stage reports for one model/dataset pair."""

    labels: tuple[str, ...]
    n_instances: int
    correct: int
    accuracy: float
    kappa: float
    mae: float
    rmse: float
    confusion: ConfusionMatrix
    per_class: dict[str, ClassMetrics]
    positive_class: str
    threshold_points: list[CurvePoint]
    margin_points: list[CurvePoint]


def build_report(
    predictions: Sequence[Prediction],
    labels: Sequence[str],
    positive_class: str,
) -> EvalReport:
    """Assemble the full report from out-of-fold predictions."""
    if not predictions:
        raise EvaluationError("no predictions to evaluate")
    labels = tuple(labels)
    if positive_class not in labels:
        raise EvaluationError(f"positive class {positive_class!r} is not a dataset label")
    positive_index = labels.index(positive_class)
    pairs = [(actual, _argmax(dist)) for dist, actual in predictions]
    cm = ConfusionMatrix.from_pairs(labels, pairs)
    mae, rmse = prob_errors(predictions)
    return EvalReport(
        labels=labels,
        n_instances=cm.n,
        correct=cm.correct,
        accuracy=cm.accuracy,
        kappa=kappa(cm),
        mae=mae,
        rmse=rmse,
        confusion=cm,
        per_class=class_metrics(cm),
        positive_class=positive_class,
        threshold_points=threshold_curve(predictions, positive_index),
        margin_points=margin_curve(predictions),
    )


def cross_validate(
    dataset: Dataset,
    params: DecorateParams = DecorateParams(),
    folds: int = 10,
    seed: int = 42,
    positive_class: str = "mal",
    jobs: int = 1,
) -> EvalReport:
    """Stratified k-fold cross-validation of the ensemble learner."""
    predictions = cv_predictions(dataset, params, folds, seed, jobs)
    labels = dataset.class_attribute.categories
    return build_report(predictions, labels, positive_class)


# ---------------------------------------------------------------------------
# feature-group comparison


@dataclass(frozen=True)
class AblationRow:
    group: str
    accuracy: float
    kappa: float
    recall: float
    fp_rate: float


GROUP_ORDER = (FeatureGroup.TRADITIONAL, FeatureGroup.HONEYPOT, FeatureGroup.COMBINED)


def ablation(
    dataset: Dataset,
    params: DecorateParams = DecorateParams(),
    folds: int = 10,
    seed: int = 42,
    positive_class: str = "mal",
    jobs: int = 1,
    groups: Sequence[FeatureGroup] = GROUP_ORDER,
) -> list[AblationRow]:
    """Cross-validate each feature group on the same fold partition.

    Projection preserves row order and the fold seed is shared, so rows
    are comparable across groups.
    """
    out = []
    for group in groups:
        projected = project_dataset(dataset, group)
        report = cross_validate(projected, params, folds, seed, positive_class, jobs)
        metrics = report.per_class[positive_class]
        out.append(
            AblationRow(group.value, report.accuracy, report.kappa, metrics.recall, metrics.fp_rate)
        )
    return out


# ---------------------------------------------------------------------------
# rendering


def format_report(report: EvalReport) -> str:
    """Human-readable summary block."""
    n = report.n_instances
    incorrect = n - report.correct
    lines = [
        "=== Evaluation summary ===",
        "",
        f"Correctly classified instances    {report.correct:6d}    {100 * report.accuracy:8.4f} %",
        f"Incorrectly classified instances  {incorrect:6d}    {100 * (1 - report.accuracy):8.4f} %",
        f"Kappa statistic                   {report.kappa:.4f}",
        f"Mean absolute error               {report.mae:.4f}",
        f"Root mean squared error           {report.rmse:.4f}",
        f"Total number of instances         {n:6d}",
        "",
        "=== Detailed accuracy by class ===",
        "",
        f"{'class':<12}{'tp_rate':>8}{'fp_rate':>9}{'precision':>11}{'recall':>8}",
    ]
    for label in report.labels:
        m = report.per_class[label]
        lines.append(
            f"{label:<12}{m.tp_rate:>8.3f}{m.fp_rate:>9.3f}{m.precision:>11.3f}{m.recall:>8.3f}"
        )
    lines += ["", "=== Confusion matrix ===", ""]
    tags = [chr(ord("a") + i) for i in range(len(report.labels))]
    width = max(4, len(str(max(max(row) for row in report.confusion.counts))))
    lines.append("  ".join(f"{t:>{width}}" for t in tags) + "   <-- classified as")
    for i, label in enumerate(report.labels):
        row = "  ".join(f"{c:>{width}}" for c in report.confusion.counts[i])
        lines.append(f"{row} | {tags[i]} = {label}")
    return "\n".join(lines) + "\n"


def format_ablation(rows: Sequence[AblationRow]) -> str:
    lines = [
        f"{'group':<14}{'accuracy':>10}{'kappa':>9}{'recall':>9}{'fp_rate':>9}"
    ]
    for r in rows:
        lines.append(
            f"{r.group:<14}{r.accuracy:>10.4f}{r.kappa:>9.4f}{r.recall:>9.4f}{r.fp_rate:>9.4f}"
        )
    return "\n".join(lines) + "\n"


def report_to_dict(report: EvalReport) -> dict:
    """JSON-friendly view of a report."""
    return {
        "labels": list(report.labels),
        "n_instances": report.n_instances,
        "correct": report.correct,
        "accuracy": report.accuracy,
        "kappa": report.kappa,
        "mae": report.mae,
        "rmse": report.rmse,
        "confusion": [list(row) for row in report.confusion.counts],
        "per_class": {
            label: dataclasses.asdict(m) for label, m in report.per_class.items()
        },
        "positive_class": report.positive_class,
        "threshold_curve": [[p.x, p.y] for p in report.threshold_points],
        "margin_curve": [[p.x, p.y] for p in report.margin_points],
    }


def threshold_curve_csv(points: Sequence[CurvePoint]) -> str:
    lines = ["sample_size,recall"]
    lines += [f"{repr(p.x)},{repr(p.y)}" for p in points]
    return "\n".join(lines) + "\n"


def margin_curve_csv(points: Sequence[CurvePoint]) -> str:
    lines = ["margin,cumulative_fraction"]
    lines += [f"{repr(p.x)},{repr(p.y)}" for p in points]
    return "\n".join(lines) + "\n"


def ablation_csv(rows: Sequence[AblationRow]) -> str:
    lines = ["group,accuracy,kappa,recall,fp_rate"]
    lines += [
        f"{r.group},{repr(r.accuracy)},{repr(r.kappa)},{repr(r.recall)},{repr(r.fp_rate)}"
        for r in rows
    ]
    return "\n".join(lines) + "\n"


def report_to_json(report: EvalReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"
