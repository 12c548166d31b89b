"""Confusion-matrix metrics and class-coarsening analysis.

Accuracy is trace/total, precision is TP/(TP+FP), recall is TP/(TP+FN),
all computed in exact rational arithmetic so equality properties (e.g.
micro-recall == accuracy) hold without tolerance. Zero-denominator cells
are reported as absent, never coerced to 0 or 1: silently zeroing the
recall of a rarely-predicted class would hide exactly the signal the
treat-or-not decision depends on.

Shipped label sets: six fine-grained bee groups (five native plus the
invasive honeybee), the three-class grouping that merges natives by body
shape, and the binary native-vs-invasive split.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import LabelError

INVASIVE = "honeybee_invasive"

SIX_CLASS_LABELS = (
    "bumblebee",
    "carpenter_bee",
    "leafcutter_bee",
    "mason_bee",
    "sweat_bee",
    INVASIVE,
)

# Mason and carpenter bees share a rounder, stouter build; leafcutter,
# bumblebee and sweat bees share pale abdominal hair bands.
THREE_CLASS_MAPPING = {
    "mason_bee": "stout_native",
    "carpenter_bee": "stout_native",
    "leafcutter_bee": "banded_native",
    "bumblebee": "banded_native",
    "sweat_bee": "banded_native",
    INVASIVE: INVASIVE,
}

TWO_CLASS_MAPPING = {
    "mason_bee": "native",
    "carpenter_bee": "native",
    "leafcutter_bee": "native",
    "bumblebee": "native",
    "sweat_bee": "native",
    INVASIVE: INVASIVE,
}

NAMED_MAPPINGS = {
    "three_class": THREE_CLASS_MAPPING,
    "two_class": TWO_CLASS_MAPPING,
}


@dataclass(frozen=True)
class ClassMapping:
    mapping: Mapping[str, str]

    @property
    def coarse_labels(self) -> tuple[str, ...]:
        seen: list[str] = []
        for coarse in self.mapping.values():
            if coarse not in seen:
                seen.append(coarse)
        return tuple(seen)

    def __call__(self, fine: str) -> str:
        try:
            return self.mapping[fine]
        except KeyError:
            raise LabelError(f"label {fine!r} not covered by mapping") from None


@dataclass(frozen=True)
class ConfusionMatrix:
    labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]  # rows = true class, cols = predicted

    def __post_init__(self):
        n = len(self.labels)
        if len(self.counts) != n or any(len(row) != n for row in self.counts):
            raise ValueError("counts must be square with one row per label")
        if any(c < 0 for row in self.counts for c in row):
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return sum(c for row in self.counts for c in row)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LabelError(f"unknown label {label!r}") from None


@dataclass(frozen=True)
class MetricsReport:
    accuracy: Fraction
    precision: Mapping[str, Fraction]  # absent key = undefined (never predicted)
    recall: Mapping[str, Fraction]  # absent key = undefined (no true instances)
    labels: tuple[str, ...]


def build_confusion(
    pairs: Iterable[tuple[str, str]], labels: Sequence[str]
) -> ConfusionMatrix:
    """Count (true, predicted) pairs into a matrix over the given labels."""
    labels = tuple(labels)
    index = {label: i for i, label in enumerate(labels)}
    counts = [[0] * len(labels) for _ in labels]
    for true, predicted in pairs:
        if true not in index:
            raise LabelError(f"unknown true label {true!r}")
        if predicted not in index:
            raise LabelError(f"unknown predicted label {predicted!r}")
        counts[index[true]][index[predicted]] += 1
    return ConfusionMatrix(labels, tuple(tuple(row) for row in counts))


def coarsen_confusion(m: ConfusionMatrix, f: ClassMapping) -> ConfusionMatrix:
    """Merge classes on both axes; total count is conserved."""
    coarse_labels = []
    for label in m.labels:
        coarse = f(label)
        if coarse not in coarse_labels:
            coarse_labels.append(coarse)
    index = {label: i for i, label in enumerate(coarse_labels)}

    counts = [[0] * len(coarse_labels) for _ in coarse_labels]
    for i, true in enumerate(m.labels):
        for j, predicted in enumerate(m.labels):
            counts[index[f(true)]][index[f(predicted)]] += m.counts[i][j]
    return ConfusionMatrix(tuple(coarse_labels), tuple(tuple(row) for row in counts))


def compute_metrics(m: ConfusionMatrix) -> MetricsReport:
    """Accuracy plus per-class precision and recall, exact rationals."""
    total = m.total
    if total < 1:
        raise ValueError("cannot compute metrics for an empty matrix")

    n = len(m.labels)
    accuracy = Fraction(sum(m.counts[i][i] for i in range(n)), total)

    precision: dict[str, Fraction] = {}
    recall: dict[str, Fraction] = {}
    for i, label in enumerate(m.labels):
        tp = m.counts[i][i]
        predicted = sum(m.counts[r][i] for r in range(n))  # TP + FP
        actual = sum(m.counts[i][c] for c in range(n))  # TP + FN
        if predicted > 0:
            precision[label] = Fraction(tp, predicted)
        if actual > 0:
            recall[label] = Fraction(tp, actual)
    return MetricsReport(accuracy, precision, recall, m.labels)


def read_pairs_csv(stream: io.TextIOBase | Iterable[str]) -> list[tuple[str, str]]:
    """Read true_label,predicted_label rows (header optional)."""
    pairs = []
    for row in csv.reader(stream):
        if not row or not any(cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise ValueError(f"expected 2 columns, got {len(row)}: {row}")
        true, predicted = row[0].strip(), row[1].strip()
        if (true, predicted) == ("true_label", "predicted_label"):
            continue
        pairs.append((true, predicted))
    return pairs


def _render(value: Fraction) -> str:
    return f"{float(value):.6f}"


def metrics_to_csv(report: MetricsReport) -> str:
    """One row per class; blank cells mark undefined metrics."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["class", "precision", "recall"])
    writer.writerow(["__accuracy__", _render(report.accuracy), ""])
    for label in report.labels:
        writer.writerow(
            [
                label,
                _render(report.precision[label]) if label in report.precision else "",
                _render(report.recall[label]) if label in report.recall else "",
            ]
        )
    return out.getvalue()


def metrics_to_json(report: MetricsReport) -> str:
    payload = {
        "accuracy": float(report.accuracy),
        "precision": {k: float(v) for k, v in report.precision.items()},
        "recall": {k: float(v) for k, v in report.recall.items()},
        "labels": list(report.labels),
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
