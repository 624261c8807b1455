"""Tests for SFT target synthesis."""

import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from boundseg.boundary.codec import parse, serialize
from boundseg.boundary.patterns import OutputPattern
from boundseg.boundary.reconstruct import reconstruct
from boundseg.boundary.targets import (
    TargetSynthesisFailure,
    full_text_output,
    make_targets,
    output_reduction,
)
from boundseg.core.types import Document, InvalidSegmentation, LabelSet, Segmentation

PROMPT = "Classify the review. Example: great -> positive. Review: {review}"


def _prompt_gold() -> Segmentation:
    example = PROMPT.index("Example:")
    question = PROMPT.index("Review:")
    return Segmentation.from_tuples([
        ("instruction", 0, example),
        ("example", example, question),
        ("question", question, len(PROMPT)),
    ])


class TestMakeTargets:
    """Targets are short, distinct and reconstruct the gold exactly."""

    def test_single_word_sequences(self) -> None:
        doc = Document("p", PROMPT)
        out = make_targets(doc, _prompt_gold(), OutputPattern.START, 0, max_sampled_words=1)
        assert [(i.label, i.start_seq) for i in out.items] == [
            ("instruction", "Classify"),
            ("example", "Example:"),
            ("question", "Review:"),
        ]

    @pytest.mark.parametrize("pattern", list(OutputPattern))
    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_round_trip(self, pattern: OutputPattern, seed: int) -> None:
        doc = Document("p", PROMPT)
        gold = _prompt_gold()
        out = make_targets(doc, gold, pattern, seed)
        result = reconstruct(doc, out)
        assert result.segments == gold
        assert result.discarded == ()

    @pytest.mark.parametrize("pattern", list(OutputPattern))
    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_round_trip_through_wire_format(self, pattern: OutputPattern, seed: int) -> None:
        cases = [
            (Document("p", PROMPT), _prompt_gold(), LabelSet()),
            (
                Document("f", "foo bar foo baz"),
                Segmentation.from_tuples([("A", 0, 8), ("B", 8, 15)]),
                LabelSet(("A", "B")),
            ),
        ]
        for doc, gold, labels in cases:
            out = make_targets(doc, gold, pattern, seed)
            wired = parse(serialize(out), labels, pattern)
            assert wired == out
            assert reconstruct(doc, wired).segments == gold

    def test_deterministic_for_seed(self) -> None:
        doc = Document("p", PROMPT)
        gold = _prompt_gold()
        assert make_targets(doc, gold, OutputPattern.START_END, 7) == make_targets(
            doc, gold, OutputPattern.START_END, 7
        )

    def test_sampled_length_bounded(self) -> None:
        doc = Document("p", PROMPT)
        out = make_targets(doc, _prompt_gold(), OutputPattern.START, 3, max_sampled_words=2)
        assert all(len(i.start_seq.split()) <= 2 for i in out.items)

    def test_duplicate_sequences_are_grown(self) -> None:
        text = "Note: alpha\nNote: beta\n"
        doc = Document("d", text)
        gold = Segmentation.from_tuples([("context", 0, 12), ("question", 12, len(text))])
        out = make_targets(doc, gold, OutputPattern.START, 0, max_sampled_words=1)
        assert [i.start_seq for i in out.items] == ["Note: alpha", "Note: beta"]

    def test_identical_segments_fail(self) -> None:
        doc = Document("d", "foofoo")
        gold = Segmentation.from_tuples([("context", 0, 3), ("question", 3, 6)])
        with pytest.raises(TargetSynthesisFailure):
            make_targets(doc, gold, OutputPattern.START, 0)

    def test_gold_must_be_lossless(self) -> None:
        doc = Document("d", "ab cd")
        gold = Segmentation.from_tuples([("context", 0, 2)])
        with pytest.raises(InvalidSegmentation):
            make_targets(doc, gold, OutputPattern.START, 0)


class TestOutputReduction:
    """Boundary outputs are much shorter than full segment texts."""

    def test_full_text_rendering(self) -> None:
        doc = Document("p", PROMPT)
        rendered = full_text_output(doc, _prompt_gold())
        assert rendered.splitlines()[0] == "instruction\tClassify the review.\\s"

    def test_reduction_positive(self) -> None:
        doc = Document("p", PROMPT)
        gold = _prompt_gold()
        out = make_targets(doc, gold, OutputPattern.START, 0, max_sampled_words=1)
        expected = 1 - len(serialize(out)) / len(full_text_output(doc, gold))
        assert output_reduction(doc, gold, out) == pytest.approx(expected)
        assert 0 < output_reduction(doc, gold, out) < 1


_WORDS = ["alpha", "beta", "gamma", "delta", "x", "y"]


@st.composite
def annotated_docs(draw):
    n = draw(st.integers(1, 5))
    texts = [
        " ".join(draw(st.lists(st.sampled_from(_WORDS), min_size=1, max_size=6))) + "\n"
        for _ in range(n)
    ]
    assume(len(set(t.strip() for t in texts)) == n)
    labels = ["instruction", "example"] * n
    tuples, offset = [], 0
    for i, t in enumerate(texts):
        tuples.append((labels[i], offset, offset + len(t)))
        offset += len(t)
    return Document("d", "".join(texts)), Segmentation.from_tuples(tuples)


class TestMakeTargetsProperties:
    """Whenever synthesis succeeds, the output reconstructs the gold."""

    @settings(
        max_examples=200, deadline=None, suppress_health_check=[HealthCheck.filter_too_much]
    )
    @given(annotated_docs(), st.sampled_from(list(OutputPattern)), st.integers(0, 2**16))
    def test_reconstructs_gold(self, case, pattern: OutputPattern, seed: int) -> None:
        doc, gold = case
        try:
            out = make_targets(doc, gold, pattern, seed)
        except TargetSynthesisFailure:
            assume(False)
        assert reconstruct(doc, out).segments == gold
        seqs = [s.strip() for i in out.items for s in (i.start_seq, i.end_seq) if s is not None]
        assert len(out) == len(gold)
        if pattern is not OutputPattern.START_END:
            assert len(set(seqs)) == len(seqs)
