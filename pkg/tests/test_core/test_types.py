"""Tests for documents, labels, spans and segmentation validation."""

import pytest

from boundseg.core.types import (
    DEFAULT_LABELS,
    Document,
    InvalidDocument,
    InvalidLabelSet,
    InvalidSegmentation,
    LabelSet,
    OutOfBounds,
    Segment,
    Segmentation,
    Span,
    require_valid,
    segment_text,
    validate_segmentation,
)


class TestDocument:
    """Documents need an id and some text."""

    def test_length_is_character_count(self) -> None:
        assert len(Document("d", "héllo")) == 5

    def test_empty_id_rejected(self) -> None:
        with pytest.raises(InvalidDocument):
            Document("", "text")

    def test_empty_text_rejected(self) -> None:
        with pytest.raises(InvalidDocument):
            Document("d", "")


class TestLabelSet:
    """Label sets are ordered, distinct and have an alternative for every label."""

    def test_default_taxonomy(self) -> None:
        labels = LabelSet()
        assert labels.names == DEFAULT_LABELS
        assert "output format" in labels
        assert len(labels) == 5

    def test_single_label_rejected(self) -> None:
        with pytest.raises(InvalidLabelSet):
            LabelSet(("only",))

    def test_duplicates_rejected(self) -> None:
        with pytest.raises(InvalidLabelSet):
            LabelSet(("a", "b", "a"))

    def test_tab_in_label_rejected(self) -> None:
        with pytest.raises(InvalidLabelSet):
            LabelSet(("a\tb", "c"))

    def test_alternatives_keep_order(self) -> None:
        labels = LabelSet(("A", "B", "C", "D", "E"))
        assert labels.alternatives({"A", "B", "C"}) == ["D", "E"]


class TestSpan:
    """Spans are half-open and never empty."""

    def test_empty_span_rejected(self) -> None:
        with pytest.raises(OutOfBounds):
            Span(3, 3)

    def test_negative_start_rejected(self) -> None:
        with pytest.raises(OutOfBounds):
            Span(-1, 2)

    def test_overlap(self) -> None:
        assert Span(0, 5).overlap(Span(3, 8)) == 2
        assert Span(0, 3).overlap(Span(3, 8)) == 0


class TestValidateSegmentation:
    """validate_segmentation reports violations instead of raising."""

    def test_valid_and_lossless(self) -> None:
        doc = Document("d", "abcd")
        seg = Segmentation.from_tuples([("A", 0, 2), ("B", 2, 4)])
        report = validate_segmentation(doc, seg)
        assert report.ok
        assert report.lossless

    def test_adjacent_labels_equal(self) -> None:
        doc = Document("d", "abcd")
        seg = Segmentation.from_tuples([("A", 0, 2), ("A", 2, 4)])
        report = validate_segmentation(doc, seg)
        assert [v.message for v in report.violations] == ["adjacent labels equal at index 1"]

    def test_overlap(self) -> None:
        doc = Document("d", "abcd")
        seg = Segmentation.from_tuples([("A", 0, 3), ("B", 2, 4)])
        report = validate_segmentation(doc, seg)
        assert [v.message for v in report.violations] == ["overlap at index 1"]
        assert report.violations[0].kind == "overlap"

    def test_out_of_bounds(self) -> None:
        doc = Document("d", "abcd")
        seg = Segmentation.from_tuples([("A", 0, 2), ("B", 2, 9)])
        report = validate_segmentation(doc, seg)
        assert report.violations[0].kind == "out_of_bounds"
        assert report.violations[0].index == 1

    def test_gap_is_valid_but_not_lossless(self) -> None:
        doc = Document("d", "abcdef")
        seg = Segmentation.from_tuples([("A", 0, 2), ("B", 3, 6)])
        report = validate_segmentation(doc, seg)
        assert report.ok
        assert not report.lossless

    def test_unknown_label_only_checked_with_label_set(self) -> None:
        doc = Document("d", "abcd")
        seg = Segmentation.from_tuples([("X", 0, 2), ("B", 2, 4)])
        assert validate_segmentation(doc, seg).ok
        report = validate_segmentation(doc, seg, LabelSet(("A", "B")))
        assert report.violations[0].kind == "unknown_label"

    def test_pure(self) -> None:
        doc = Document("d", "abcd")
        seg = Segmentation.from_tuples([("A", 0, 3), ("A", 2, 4)])
        assert validate_segmentation(doc, seg) == validate_segmentation(doc, seg)


class TestRequireValid:
    """require_valid raises on violations and, optionally, gaps."""

    def test_raises_on_gap(self) -> None:
        doc = Document("d", "abcdef")
        seg = Segmentation.from_tuples([("A", 0, 2), ("B", 3, 6)])
        with pytest.raises(InvalidSegmentation):
            require_valid(doc, seg)
        require_valid(doc, seg, lossless=False)


class TestSegmentText:
    """segment_text slices the document."""

    def test_slices(self) -> None:
        doc = Document("d", "foo bar")
        assert segment_text(doc, Segment("A", Span(0, 3))) == "foo"
        assert segment_text(doc, Segment("A", Span(4, 7))) == "bar"

    def test_out_of_bounds(self) -> None:
        with pytest.raises(OutOfBounds):
            segment_text(Document("d", "foo"), Segment("A", Span(0, 5)))

    def test_lossless_concatenation_reproduces_text(self) -> None:
        doc = Document("d", "Classify this. Example: x. Input:")
        seg = Segmentation.from_tuples([("A", 0, 15), ("B", 15, 27), ("A", 27, 33)])
        assert "".join(segment_text(doc, s) for s in seg) == doc.text
