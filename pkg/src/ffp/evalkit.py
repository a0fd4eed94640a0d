"""Evaluation: metrics, k sweeps, seeded repeats, and baseline comparison.

Metrics are computed over the dataset's declared class list, so a class
with no gold or predicted instances still occupies its confusion row and
contributes an F1 of zero to the macro average.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .core import FingerprintLibrary, build_library, classify
from .dataio import LabeledDataset
from .errors import ConfigError, ParseError


@dataclass(frozen=True)
class EvaluationReport:
    """Per-class and aggregate scores plus the full confusion matrix."""

    classes: tuple[str, ...]
    confusion: np.ndarray
    support: dict[str, int]
    accuracy: float
    precision: dict[str, float]
    recall: dict[str, float]
    f1: dict[str, float]
    macro_f1: float
    num_instances: int


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def _as_prediction_map(predictions) -> dict[str, str]:
    if isinstance(predictions, Mapping):
        return dict(predictions)
    out: dict[str, str] = {}
    for inst_id, label in predictions:
        if inst_id in out:
            raise ConfigError(f"duplicate prediction for id {inst_id!r}")
        out[inst_id] = label
    return out


def evaluate(predictions, gold: LabeledDataset) -> EvaluationReport:
    """Score predictions against a gold dataset.

    ``predictions`` is an id -> label mapping or a sequence of (id, label)
    pairs, and must cover the gold ids exactly; a partial or padded
    prediction set is a configuration error, not a zero.
    """
    preds = _as_prediction_map(predictions)
    if not len(gold):
        raise ConfigError("no gold instances to evaluate against")
    gold_ids = set(gold.ids)
    missing = gold_ids - set(preds)
    if missing:
        raise ConfigError(f"predictions missing for ids: {sorted(missing)[:5]}")
    extra = set(preds) - gold_ids
    if extra:
        raise ConfigError(f"predictions for unknown ids: {sorted(extra)[:5]}")

    classes = tuple(gold.classes)
    pos = {cls: i for i, cls in enumerate(classes)}
    confusion = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for inst_id, gold_label in zip(gold.ids, gold.labels):
        pred_label = preds[inst_id]
        if pred_label not in pos:
            raise ConfigError(f"predicted label {pred_label!r} not in declared classes")
        confusion[pos[gold_label], pos[pred_label]] += 1

    total = int(confusion.sum())
    correct = int(np.trace(confusion))
    support, precision, recall, f1 = {}, {}, {}, {}
    for cls, i in pos.items():
        tp = float(confusion[i, i])
        support[cls] = int(confusion[i, :].sum())
        precision[cls] = _safe_div(tp, float(confusion[:, i].sum()))
        recall[cls] = _safe_div(tp, float(confusion[i, :].sum()))
        f1[cls] = _safe_div(2 * precision[cls] * recall[cls], precision[cls] + recall[cls])
    return EvaluationReport(
        classes=classes,
        confusion=confusion,
        support=support,
        accuracy=_safe_div(correct, total),
        precision=precision,
        recall=recall,
        f1=f1,
        macro_f1=float(np.mean([f1[cls] for cls in classes])),
        num_instances=total,
    )


def render_report(report: EvaluationReport) -> str:
    """Fixed-width text rendering with the confusion matrix last."""
    lines = [
        f"instances  {report.num_instances}",
        f"accuracy   {report.accuracy:.4f}",
        f"macro-f1   {report.macro_f1:.4f}",
        "",
        f"{'class':<16} {'support':>8} {'precision':>9} {'recall':>9} {'f1':>9}",
    ]
    for cls in report.classes:
        lines.append(
            f"{cls:<16} {report.support[cls]:>8} {report.precision[cls]:>9.4f} "
            f"{report.recall[cls]:>9.4f} {report.f1[cls]:>9.4f}"
        )
    lines.append("")
    lines.append("confusion (rows gold, columns predicted)")
    width = max(6, max(len(c) for c in report.classes) + 1)
    lines.append(" " * width + "".join(f"{c:>{width}}" for c in report.classes))
    for i, cls in enumerate(report.classes):
        row = "".join(f"{int(n):>{width}}" for n in report.confusion[i])
        lines.append(f"{cls:<{width}}{row}")
    return "\n".join(lines) + "\n"


def report_to_dict(report: EvaluationReport) -> dict:
    """JSON-ready form of a report."""
    return {
        "classes": list(report.classes),
        "num_instances": report.num_instances,
        "accuracy": report.accuracy,
        "macro_f1": report.macro_f1,
        "support": dict(report.support),
        "precision": dict(report.precision),
        "recall": dict(report.recall),
        "f1": dict(report.f1),
        "confusion": report.confusion.tolist(),
    }


def predict_dataset(ds: LabeledDataset, lib: FingerprintLibrary) -> dict[str, str]:
    """Classify every instance; returns id -> predicted label."""
    return {inst_id: classify(vec, lib).predicted for inst_id, _, vec in ds.instances()}


def score_dataset(ds: LabeledDataset, lib: FingerprintLibrary) -> dict[str, dict[str, float]]:
    """Full per-class similarity breakdown for every instance."""
    return {inst_id: dict(classify(vec, lib).scores) for inst_id, _, vec in ds.instances()}


def train_and_score(
    train: LabeledDataset,
    validation: LabeledDataset,
    k: int,
    a: float = 0.8,
    norm: float | None = None,
) -> EvaluationReport:
    """Build a library on the training split and evaluate on the other."""
    if train.dim != validation.dim:
        raise ConfigError(f"train dim {train.dim} != validation dim {validation.dim}")
    if train.classes != validation.classes:
        raise ConfigError("train and validation must declare the same classes")
    lib = build_library(train.by_class(), k=k, a=a, norm=norm, class_order=train.classes)
    return evaluate(predict_dataset(validation, lib), validation)


@dataclass(frozen=True)
class SweepTable:
    """Macro-F1 per fingerprint size, in the order the sizes were given."""

    ks: tuple[int, ...]
    macro_f1: tuple[float, ...]

    def __post_init__(self):
        if len(self.ks) != len(self.macro_f1):
            raise ConfigError("ks and macro_f1 must have matching lengths")
        if not self.ks:
            raise ConfigError("sweep needs at least one k")
        if len(set(self.ks)) != len(self.ks):
            raise ConfigError("sweep sizes must be distinct")

    @property
    def best_k(self) -> int:
        """Smallest k attaining the maximum macro-F1."""
        best = max(self.macro_f1)
        return min(k for k, f in zip(self.ks, self.macro_f1) if f == best)

    def rows(self):
        yield from zip(self.ks, self.macro_f1)


def sweep_k(
    train: LabeledDataset,
    validation: LabeledDataset,
    ks: Sequence[int],
    a: float = 0.8,
    norm: float | None = None,
) -> SweepTable:
    """Retrain and rescore at each fingerprint size."""
    scores = tuple(
        train_and_score(train, validation, k=k, a=a, norm=norm).macro_f1 for k in ks
    )
    return SweepTable(ks=tuple(int(k) for k in ks), macro_f1=scores)


def render_sweep(table: SweepTable) -> str:
    lines = [f"{'k':>6} {'macro_f1':>10}"]
    for k, f in table.rows():
        lines.append(f"{k:>6} {f:>10.4f}")
    lines.append(f"best k: {table.best_k}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SeedRuns:
    """Per-seed scores and their unweighted mean."""

    seeds: tuple[int, ...]
    scores: tuple[float, ...]

    @property
    def mean(self) -> float:
        return float(np.mean(self.scores))


def run_seeds(make_score, seeds: Sequence[int]) -> SeedRuns:
    """Run ``make_score(seed)`` once per seed, in the given order.

    ``make_score`` owns the experiment (typically: generate data, build,
    evaluate, return macro-F1); this runner only fixes the bookkeeping.
    """
    seeds = tuple(int(s) for s in seeds)
    if not seeds:
        raise ConfigError("run_seeds needs at least one seed")
    return SeedRuns(seeds=seeds, scores=tuple(float(make_score(s)) for s in seeds))


class NearestCentroidBaseline:
    """Dot-product nearest-centroid classifier used as a reference point."""

    def __init__(
        self,
        vectors_by_class: Mapping[str, np.ndarray],
        class_order: Sequence[str] | None = None,
    ):
        if not vectors_by_class:
            raise ConfigError("baseline needs at least one class")
        order = tuple(class_order) if class_order is not None else tuple(vectors_by_class)
        if set(order) != set(vectors_by_class) or len(set(order)) != len(order):
            raise ConfigError("class order must cover exactly the given classes")
        self.class_order = order
        self.centroids = {}
        dim = None
        for cls in order:
            mat = np.asarray(vectors_by_class[cls], dtype=np.float64)
            if mat.ndim != 2 or mat.shape[0] == 0:
                raise ConfigError(f"class {cls!r} needs a non-empty 2-D matrix")
            if dim is None:
                dim = mat.shape[1]
            elif mat.shape[1] != dim:
                raise ConfigError("all classes must share one dimensionality")
            self.centroids[cls] = mat.mean(axis=0)
        self.dim = int(dim)

    @classmethod
    def from_dataset(cls, ds: LabeledDataset) -> "NearestCentroidBaseline":
        by_class = {c: m for c, m in ds.by_class().items() if m.shape[0]}
        order = [c for c in ds.classes if c in by_class]
        return cls(by_class, class_order=order)

    def predict(self, vector: np.ndarray) -> str:
        v = np.asarray(vector, dtype=np.float64)
        scores = {cls: float(self.centroids[cls] @ v) for cls in self.class_order}
        best = max(scores.values())
        return next(cls for cls in self.class_order if scores[cls] == best)

    def predict_dataset(self, ds: LabeledDataset) -> dict[str, str]:
        return {inst_id: self.predict(vec) for inst_id, _, vec in ds.instances()}


@dataclass(frozen=True)
class Disagreement:
    """One instance where the two classifiers part ways."""

    id: str
    ref: str
    ffp_label: str
    baseline_label: str
    ffp_scores: dict[str, float] = field(compare=False, default_factory=dict)


@dataclass(frozen=True)
class DisagreementSet:
    items: tuple[Disagreement, ...]
    num_compared: int

    def __len__(self) -> int:
        return len(self.items)


def diff_baseline(
    ffp_preds: Mapping[str, str],
    baseline_preds: Mapping[str, str],
    ds: LabeledDataset,
    scores: Mapping[str, Mapping[str, float]] | None = None,
    texts: Mapping[str, str] | None = None,
) -> DisagreementSet:
    """Collect instances where the two prediction sets differ.

    Items keep dataset order. ``ref`` is the instance text when supplied,
    else the id, so downstream inspection has something to show.
    """
    if set(ffp_preds) != set(ds.ids) or set(baseline_preds) != set(ds.ids):
        raise ConfigError("both prediction sets must cover exactly the dataset ids")
    items = []
    for inst_id in ds.ids:
        a, b = ffp_preds[inst_id], baseline_preds[inst_id]
        if a == b:
            continue
        ref = texts[inst_id] if texts and inst_id in texts else inst_id
        inst_scores = dict(scores[inst_id]) if scores and inst_id in scores else {}
        items.append(
            Disagreement(
                id=inst_id, ref=ref, ffp_label=a, baseline_label=b, ffp_scores=inst_scores
            )
        )
    return DisagreementSet(items=tuple(items), num_compared=len(ds.ids))


def render_disagreements(diff: DisagreementSet) -> str:
    lines = [f"disagreements: {len(diff)} of {diff.num_compared}"]
    for item in diff.items:
        line = f"{item.id}  ffp={item.ffp_label}  baseline={item.baseline_label}"
        if item.ref != item.id:
            line += f"  text={item.ref!r}"
        if item.ffp_scores:
            ranked = sorted(item.ffp_scores.items(), key=lambda kv: (-kv[1], kv[0]))
            line += "  scores=" + " ".join(f"{c}:{s:.4f}" for c, s in ranked)
        lines.append(line)
    return "\n".join(lines) + "\n"


def write_predictions(preds: Mapping[str, str], ids_in_order: Sequence[str], path) -> None:
    """One ``id,label`` line per instance, in the given id order."""
    missing = [i for i in ids_in_order if i not in preds]
    if missing:
        raise ConfigError(f"predictions missing for ids: {missing[:5]}")
    with open(path, "w", encoding="utf-8") as fh:
        for inst_id in ids_in_order:
            fh.write(f"{inst_id},{preds[inst_id]}\n")


def read_predictions(path) -> dict[str, str]:
    preds: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split(",")
            if len(fields) != 2 or not fields[0] or not fields[1]:
                raise ParseError(path, lineno, f"expected 'id,label', got {line!r}")
            if fields[0] in preds:
                raise ParseError(path, lineno, f"duplicate prediction id {fields[0]!r}")
            preds[fields[0]] = fields[1]
    return preds
