"""Inter-annotator reliability and classifier validation metrics.

Krippendorff's alpha (nominal) is computed from the coincidence matrix
with standard missing-data handling: units coded by a single coder
contribute nothing. Precision/recall/F1 are computed per dimension and
language with an explicit NA convention: a cell with no positive truth and
no positive predictions reports NA rather than a misleading 1 or 0, and NA
cells are excluded from averages.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Optional, Sequence

from .codebook import AnnotationRecord, DIMENSION_CODES
from .errors import DataError, DegenerateError, EmptySelectionError

#: Cells with fewer positive truth cases than this get a warning.
LOW_SUPPORT_THRESHOLD = 5


@dataclass(frozen=True)
class ReliabilityMatrix:
    """Units × coders with a partial value map (missing entries allowed)."""

    units: tuple
    coders: tuple
    values: Mapping[tuple, Hashable]

    def __post_init__(self):
        units = tuple(self.units)
        coders = tuple(self.coders)
        object.__setattr__(self, "units", units)
        object.__setattr__(self, "coders", coders)
        object.__setattr__(self, "values", dict(self.values))
        if len(coders) < 2:
            raise ValueError("a reliability matrix needs at least 2 coders")
        unit_set, coder_set = set(units), set(coders)
        coded_units = set()
        for unit, coder in self.values:
            if unit not in unit_set or coder not in coder_set:
                raise ValueError(f"value for unknown (unit, coder): {(unit, coder)}")
            coded_units.add(unit)
        for unit in units:
            if unit not in coded_units:
                raise ValueError(f"unit {unit!r} has no coded value")


def reliability_matrix_from_records(
    records: Iterable[AnnotationRecord], dimension: str
) -> ReliabilityMatrix:
    """Build a doc × coder matrix for one dimension from human records."""
    if dimension not in DIMENSION_CODES:
        raise KeyError(dimension)
    values = {}
    units, coders = [], []
    for record in records:
        value = record.value(dimension)
        if dimension == "upd":
            value = value.isoformat() if value else "NA"
        if record.doc_id not in units:
            units.append(record.doc_id)
        if record.backend_id not in coders:
            coders.append(record.backend_id)
        values[(record.doc_id, record.backend_id)] = value
    return ReliabilityMatrix(tuple(units), tuple(coders), values)


def coincidence_matrix(matrix: ReliabilityMatrix):
    """Coincidence counts o[c][k] and category marginals; missing data skipped.

    Each unit with m >= 2 values contributes 1/(m-1) per ordered value pair.
    """
    by_unit = defaultdict(list)
    for (unit, _), value in matrix.values.items():
        by_unit[unit].append(value)
    counts: dict = defaultdict(float)
    for unit_values in by_unit.values():
        m = len(unit_values)
        if m < 2:
            continue
        weight = 1.0 / (m - 1)
        for i, a in enumerate(unit_values):
            for j, b in enumerate(unit_values):
                if i != j:
                    counts[(a, b)] += weight
    marginals: dict = defaultdict(float)
    for (a, _), count in counts.items():
        marginals[a] += count
    return counts, marginals


def krippendorff_alpha(matrix: ReliabilityMatrix, metric: str = "nominal") -> float:
    """Alpha = 1 - D_o/D_e over the coincidence matrix; nominal metric only."""
    if metric != "nominal":
        raise ValueError(f"unsupported metric {metric!r}")
    counts, marginals = coincidence_matrix(matrix)
    n = sum(marginals.values())
    if n <= 1:
        raise DegenerateError("no unit has two or more coded values")
    observed_disagreement = sum(
        count for (a, b), count in counts.items() if a != b
    )
    d_o = observed_disagreement / n
    d_e = sum(
        marginals[a] * marginals[b]
        for a in marginals
        for b in marginals
        if a != b
    ) / (n * (n - 1))
    if d_e == 0:
        raise DegenerateError("expected disagreement is zero (all values identical)")
    return 1.0 - d_o / d_e


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricCell:
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]
    support_pos: int


def metrics_from_counts(counts: ConfusionCounts) -> MetricCell:
    """P/R/F1 with the NA convention: undefined ratios are None, not 0."""
    tp, fp, fn = counts.tp, counts.fp, counts.fn
    if tp + fp + fn == 0:
        return MetricCell(None, None, None, 0)
    precision = tp / (tp + fp) if tp + fp else None
    recall = tp / (tp + fn) if tp + fn else None
    f1 = 2 * tp / (2 * tp + fp + fn)
    return MetricCell(precision, recall, f1, tp + fn)


def _is_positive(record: AnnotationRecord, dimension: str) -> bool:
    value = record.value(dimension)
    return value is not None if dimension == "upd" else bool(value)


def confusion_counts(
    pred: Iterable[AnnotationRecord],
    truth: Iterable[AnnotationRecord],
    dimension: str,
    language: Optional[str] = None,
    doc_language: Optional[Mapping[str, str]] = None,
) -> ConfusionCounts:
    """Join predictions to truth on doc_id, optionally filtered by language."""
    if dimension not in DIMENSION_CODES:
        raise KeyError(dimension)
    pred_by_id = {r.doc_id: r for r in pred}
    truth_by_id = {r.doc_id: r for r in truth}
    shared = sorted(set(pred_by_id) & set(truth_by_id))
    if language is not None:
        if doc_language is None:
            raise DataError("language filter requires a doc_id -> language map")
        shared = [d for d in shared if doc_language.get(d) == language]
    if not shared:
        raise EmptySelectionError(
            f"no documents in the {dimension}/{language or 'all'} join"
        )
    tp = fp = fn = tn = 0
    for doc_id in shared:
        p = _is_positive(pred_by_id[doc_id], dimension)
        t = _is_positive(truth_by_id[doc_id], dimension)
        if p and t:
            tp += 1
        elif p and not t:
            fp += 1
        elif not p and t:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp, fp, fn, tn)


def prf1(
    pred: Iterable[AnnotationRecord],
    truth: Iterable[AnnotationRecord],
    dimension: str,
    language: Optional[str] = None,
    doc_language: Optional[Mapping[str, str]] = None,
) -> MetricCell:
    """Precision/recall/F1 for one dimension, positive class = field true."""
    counts = confusion_counts(pred, truth, dimension, language, doc_language)
    return metrics_from_counts(counts)


@dataclass
class MetricReport:
    """(dimension, language) -> MetricCell, with low-support warnings."""

    cells: dict = field(default_factory=dict)
    backend_id: str = ""

    def warnings(self, threshold: int = LOW_SUPPORT_THRESHOLD) -> list[str]:
        notes = []
        for (dimension, language), cell in sorted(self.cells.items()):
            if cell.support_pos < threshold:
                notes.append(
                    f"{dimension}/{language}: only {cell.support_pos} positive "
                    f"cases; metrics are unstable"
                )
        return notes


def build_metric_report(
    pred: Iterable[AnnotationRecord],
    truth: Iterable[AnnotationRecord],
    doc_language: Mapping[str, str],
    dimensions: Sequence[str] = DIMENSION_CODES,
    languages: Sequence[str] = ("de", "en", "fr", "it"),
    backend_id: str = "",
) -> MetricReport:
    """Evaluate a backend against ground truth per dimension × language.

    Cells whose language slice is empty are skipped entirely (not NA): there
    is nothing to evaluate.
    """
    pred = list(pred)
    truth = list(truth)
    report = MetricReport(backend_id=backend_id)
    for dimension in dimensions:
        for language in languages:
            try:
                report.cells[(dimension, language)] = prf1(
                    pred, truth, dimension, language, doc_language
                )
            except EmptySelectionError:
                continue
    return report


def delta_f1(report_a: MetricReport, report_b: MetricReport) -> dict:
    """Per-cell F1 difference (a - b); NA propagates; support carried.

    Reports must cover identical cells; the error lists what is missing.
    """
    keys_a, keys_b = set(report_a.cells), set(report_b.cells)
    if keys_a != keys_b:
        missing_in_b = sorted(keys_a - keys_b)
        missing_in_a = sorted(keys_b - keys_a)
        raise DataError(
            f"cell mismatch: missing in b={missing_in_b}, missing in a={missing_in_a}"
        )
    deltas = {}
    for key in sorted(keys_a):
        cell_a, cell_b = report_a.cells[key], report_b.cells[key]
        if cell_a.f1 is None or cell_b.f1 is None:
            delta = None
        else:
            delta = cell_a.f1 - cell_b.f1
        deltas[key] = {"delta": delta, "support": cell_a.support_pos}
    return deltas
