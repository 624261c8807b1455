"""Tests for the reward components and the evaluation suite."""

import pytest

from boundseg.boundary.reconstruct import ReconstructionResult
from boundseg.core.types import Document, LabelSet, Segmentation
from boundseg.metrics.arrays import GoldNotLossless
from boundseg.metrics.scores import (
    EvalReport,
    RewardBreakdown,
    char_f1,
    evaluate,
    exact_match_f1,
    f1_label,
    mean_report,
    reconstruction_ratio,
    reward,
)

DOC = Document("d", "aaa bbb ccc ddd")
GOLD = Segmentation.from_tuples([("A", 0, 4), ("B", 4, 8), ("A", 8, 12), ("B", 12, 15)])
PARTIAL = Segmentation.from_tuples([("A", 0, 4), ("B", 4, 8), ("A", 8, 15)])


class TestReconstructionRatio:
    """Covered characters over document length."""

    def test_full_cover(self) -> None:
        assert reconstruction_ratio(DOC, GOLD) == 1.0

    def test_partial(self) -> None:
        pred = Segmentation.from_tuples([("A", 8, 15)])
        assert reconstruction_ratio(DOC, pred) == pytest.approx(7 / 15)

    def test_empty(self) -> None:
        assert reconstruction_ratio(DOC, ReconstructionResult.empty()) == 0.0


class TestExactMatchF1:
    """Segments match on label and text."""

    def test_identity(self) -> None:
        assert exact_match_f1(DOC, GOLD, GOLD) == (1.0, 1.0, 1.0)

    def test_partial_match(self) -> None:
        p, r, f1 = exact_match_f1(DOC, PARTIAL, GOLD)
        assert p == pytest.approx(2 / 3)
        assert r == pytest.approx(1 / 2)
        assert f1 == pytest.approx(4 / 7)

    def test_empty_prediction(self) -> None:
        assert exact_match_f1(DOC, Segmentation(), GOLD) == (0.0, 0.0, 0.0)

    def test_text_not_offsets(self) -> None:
        doc = Document("d", "xx xx ")
        gold = Segmentation.from_tuples([("A", 0, 3), ("B", 3, 6)])
        pred = Segmentation.from_tuples([("B", 0, 3)])
        p, _, _ = exact_match_f1(doc, pred, gold)
        assert p == 1.0


class TestCharF1:
    """Gold-support-weighted per-character F1."""

    def test_worked_example(self) -> None:
        doc = Document("d", "abcd")
        gold = Segmentation.from_tuples([("A", 0, 2), ("B", 2, 4)])
        pred = Segmentation.from_tuples([("A", 0, 3), ("B", 3, 4)])
        assert char_f1(doc, pred, gold) == pytest.approx((2 * 0.8 + 2 * (2 / 3)) / 4)

    def test_identity(self) -> None:
        assert char_f1(DOC, GOLD, GOLD) == 1.0

    def test_nothing_covered(self) -> None:
        assert char_f1(DOC, Segmentation(), GOLD) == 0.0

    def test_gold_with_gap(self) -> None:
        gold = Segmentation.from_tuples([("A", 0, 4), ("B", 5, 15)])
        with pytest.raises(GoldNotLossless):
            char_f1(DOC, GOLD, gold)

    def test_label_set_does_not_change_score(self) -> None:
        labels = LabelSet(("C", "B", "A"))
        assert char_f1(DOC, PARTIAL, GOLD, labels) == pytest.approx(char_f1(DOC, PARTIAL, GOLD))


class TestF1Label:
    """Predicted labels against the most-overlapping gold segment."""

    def test_half_correct(self) -> None:
        gold = Segmentation.from_tuples([("instruction", 0, 4), ("context", 4, 10)])
        pred = Segmentation.from_tuples([("instruction", 0, 5), ("example", 5, 10)])
        assert f1_label(pred, gold) == 0.5

    def test_identity(self) -> None:
        assert f1_label(GOLD, GOLD) == 1.0

    def test_tie_goes_to_earlier_gold(self) -> None:
        gold = Segmentation.from_tuples([("A", 0, 3), ("B", 3, 6)])
        assert f1_label(Segmentation.from_tuples([("A", 0, 6)]), gold) == 1.0
        assert f1_label(Segmentation.from_tuples([("B", 0, 6)]), gold) == 0.0

    def test_empty(self) -> None:
        assert f1_label(Segmentation(), GOLD) == 0.0


class TestReward:
    """reward = rho_rec * (em_f1 + char_f1) / 2."""

    def test_perfect(self) -> None:
        assert reward(DOC, GOLD, GOLD) == RewardBreakdown(1.0, 1.0, 1.0, 1.0)

    def test_combination(self) -> None:
        score = reward(DOC, PARTIAL, GOLD)
        assert score.rho_rec == 1.0
        assert score.em_f1 == pytest.approx(4 / 7)
        assert score.reward == pytest.approx((score.em_f1 + score.char_f1) / 2)

    def test_worked_arithmetic(self) -> None:
        score = RewardBreakdown.combine(1.0, 4 / 7, 0.7333)
        assert score.reward == pytest.approx(0.6524, abs=1e-4)

    def test_zero_coverage(self) -> None:
        assert reward(DOC, ReconstructionResult.empty(), GOLD).reward == 0.0


class TestEvaluate:
    """The full metric suite per document and per corpus."""

    def test_identity_law(self) -> None:
        report = evaluate(DOC, GOLD, GOLD)
        assert (report.rho_rec, report.em_f1, report.char_f1, report.f1_lab) == (1.0, 1.0, 1.0, 1.0)
        assert report.pk == 0.0
        assert report.exact_matched == report.gold == report.predicted == 4

    def test_discards_counted(self) -> None:
        pred = ReconstructionResult(PARTIAL, (), (), (0, 1, 2))
        assert evaluate(DOC, pred, GOLD).discarded == 0
        assert evaluate(DOC, pred, GOLD).predicted == 3

    def test_as_row_percentages(self) -> None:
        row = evaluate(DOC, PARTIAL, GOLD).as_row("d")
        assert row["id"] == "d"
        assert row["em_f1"] == 57.1
        assert row["rho_rec"] == 100.0
        assert row["gold"] == 4

    def test_mean_report(self) -> None:
        a = evaluate(DOC, GOLD, GOLD)
        b = evaluate(DOC, Segmentation(), GOLD)
        mean = mean_report([a, b])
        assert isinstance(mean, EvalReport)
        assert mean.rho_rec == 0.5
        assert mean.gold == 8
        assert mean.predicted == 4

    def test_average_column(self) -> None:
        assert evaluate(DOC, GOLD, GOLD).as_row("d", with_average=True)["avg"] == 100.0
        report = EvalReport(
            rho_rec=0.9, em_f1=0.6, char_f1=0.8, pk=0.2, f1_lab=0.7,
            predicted=3, gold=4, exact_matched=2, discarded=0,
        )
        assert report.average == pytest.approx((0.9 + 0.6 + 0.8 + 0.8 + 0.7) / 5)
        assert report.as_row("__mean__", with_average=True)["avg"] == 76.0
        assert "avg" not in report.as_row("d")

    def test_mean_of_nothing(self) -> None:
        with pytest.raises(ValueError):
            mean_report([])
