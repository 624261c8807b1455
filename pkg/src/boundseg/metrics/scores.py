"""Reconstruction ratio, exact-match F1, character-level F1, label F1 and the reward."""

from collections import Counter
from dataclasses import asdict, dataclass

import numpy as np

from boundseg.boundary.reconstruct import ReconstructionResult
from boundseg.core.types import Document, LabelSet, Segmentation
from boundseg.metrics.arrays import (
    label_array,
    label_codes,
    require_lossless,
    segment_ids,
)
from boundseg.metrics.pk import pk


def _f1(precision: float, recall: float) -> float:
    return 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class RewardBreakdown:
    """The verifiable reward and its three components."""

    rho_rec: float
    em_f1: float
    char_f1: float
    reward: float

    @classmethod
    def combine(cls, rho_rec: float, em_f1: float, char_f1: float) -> "RewardBreakdown":
        return cls(rho_rec, em_f1, char_f1, rho_rec * (em_f1 + char_f1) / 2)

    @classmethod
    def zero(cls) -> "RewardBreakdown":
        return cls(0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class EvalReport:
    """Full metric suite for one document (or a corpus mean)."""

    rho_rec: float
    em_f1: float
    char_f1: float
    pk: float
    f1_lab: float
    predicted: int
    gold: int
    exact_matched: int
    discarded: int

    @property
    def average(self) -> float:
        """Mean of rho_rec, em_f1, 1 - pk, f1_lab and char_f1."""
        return (self.rho_rec + self.em_f1 + (1.0 - self.pk) + self.f1_lab + self.char_f1) / 5

    def as_row(self, doc_id: str, with_average: bool = False) -> dict:
        """JSON-ready row with metrics as percentages, one decimal.

        with_average adds an "avg" column, as on corpus-mean rows.
        """
        row: dict = {"id": doc_id}
        for key, value in asdict(self).items():
            row[key] = round(100 * value, 1) if isinstance(value, float) else value
        if with_average:
            row["avg"] = round(100 * self.average, 1)
        return row


def reconstruction_ratio(doc: Document, pred: Segmentation | ReconstructionResult) -> float:
    """Fraction of document characters covered by predicted segments."""
    if isinstance(pred, ReconstructionResult):
        pred = pred.segments
    return pred.covered / len(doc)


def _matches(doc: Document, pred: Segmentation, gold: Segmentation) -> tuple[int, int]:
    """(predicted segments with an exact match, gold segments with an exact match)."""
    def key(s):
        return s.label, doc.text[s.start:s.end]

    pred_keys = Counter(key(s) for s in pred)
    gold_keys = Counter(key(s) for s in gold)
    pred_hits = sum(n for k, n in pred_keys.items() if k in gold_keys)
    gold_hits = sum(n for k, n in gold_keys.items() if k in pred_keys)
    return pred_hits, gold_hits


def exact_match_f1(
    doc: Document, pred: Segmentation, gold: Segmentation
) -> tuple[float, float, float]:
    """(precision, recall, f1) of segments matching on label and text."""
    if not len(pred) or not len(gold):
        return 0.0, 0.0, 0.0
    pred_hits, gold_hits = _matches(doc, pred, gold)
    precision = pred_hits / len(pred)
    recall = gold_hits / len(gold)
    return precision, recall, _f1(precision, recall)


def char_f1(
    doc: Document,
    pred: Segmentation,
    gold: Segmentation,
    label_set: LabelSet | None = None,
) -> float:
    """Gold-support-weighted F1 over per-character labels.

    Characters no predicted segment covers carry a NONE label that never
    matches gold.
    """
    require_lossless(doc, gold)
    codes = label_codes(pred, gold, label_set)
    n_labels = len(codes)
    pred_arr = label_array(len(doc), pred, codes)
    gold_arr = label_array(len(doc), gold, codes)

    support = np.bincount(gold_arr, minlength=n_labels)
    predicted = np.bincount(pred_arr[pred_arr >= 0], minlength=n_labels)
    hits = np.bincount(gold_arr[pred_arr == gold_arr], minlength=n_labels)
    denom = support + predicted
    per_label = np.divide(2 * hits, denom, out=np.zeros(n_labels), where=denom > 0)
    return float(np.dot(support, per_label) / len(doc))


def f1_label(pred: Segmentation, gold: Segmentation) -> float:
    """Micro-F1 of predicted labels against their most-overlapping gold segment.

    Ties go to the earliest gold segment. With one pairing per predicted
    segment this equals pairing accuracy.
    """
    if not len(pred):
        return 0.0
    length = max(gold[-1].end, pred[-1].end)
    gold_ids = segment_ids(length, gold)
    correct = 0
    for s in pred:
        counts = np.bincount(gold_ids[s.start:s.end])
        best = int(np.argmax(counts[:len(gold)]))
        correct += gold[best].label == s.label
    return correct / len(pred)


def reward(
    doc: Document,
    pred: Segmentation | ReconstructionResult,
    gold: Segmentation,
    label_set: LabelSet | None = None,
) -> RewardBreakdown:
    """rho_rec * (EM-F1 + char-F1) / 2."""
    if isinstance(pred, ReconstructionResult):
        pred = pred.segments
    rho = reconstruction_ratio(doc, pred)
    _, _, em = exact_match_f1(doc, pred, gold)
    return RewardBreakdown.combine(rho, em, char_f1(doc, pred, gold, label_set))


def evaluate(
    doc: Document,
    pred: Segmentation | ReconstructionResult,
    gold: Segmentation,
    window: int | None = None,
    label_set: LabelSet | None = None,
) -> EvalReport:
    """Compute the full metric suite for one document."""
    segs = pred.segments if isinstance(pred, ReconstructionResult) else pred
    discarded = len(pred.discarded) if isinstance(pred, ReconstructionResult) else 0
    _, _, em = exact_match_f1(doc, segs, gold)
    pred_hits = _matches(doc, segs, gold)[0] if len(segs) else 0
    return EvalReport(
        rho_rec=reconstruction_ratio(doc, segs),
        em_f1=em,
        char_f1=char_f1(doc, segs, gold, label_set),
        pk=pk(doc, segs, gold, window),
        f1_lab=f1_label(segs, gold),
        predicted=len(segs),
        gold=len(gold),
        exact_matched=pred_hits,
        discarded=discarded,
    )


def mean_report(reports: list[EvalReport]) -> EvalReport:
    """Corpus mean of metric fields; counts are summed."""
    if not reports:
        raise ValueError("No reports to aggregate")

    def mean(name: str) -> float:
        return float(np.mean([getattr(r, name) for r in reports]))

    def total(name: str) -> int:
        return sum(getattr(r, name) for r in reports)

    return EvalReport(
        rho_rec=mean("rho_rec"),
        em_f1=mean("em_f1"),
        char_f1=mean("char_f1"),
        pk=mean("pk"),
        f1_lab=mean("f1_lab"),
        predicted=total("predicted"),
        gold=total("gold"),
        exact_matched=total("exact_matched"),
        discarded=total("discarded"),
    )
