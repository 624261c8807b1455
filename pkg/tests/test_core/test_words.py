"""Tests for the word-level view of a text."""

from hypothesis import given
from hypothesis import strategies as st

from boundseg.core.types import Span
from boundseg.core.words import WordIndex, words


class TestWords:
    """Words are maximal runs of non-whitespace."""

    def test_whitespace_split(self) -> None:
        result = words("foo bar")
        assert [(w.text, w.span) for w in result] == [("foo", Span(0, 3)), ("bar", Span(4, 7))]

    def test_surrounding_space(self) -> None:
        assert [(w.text, w.span) for w in words("  a  ")] == [("a", Span(2, 3))]

    def test_empty(self) -> None:
        assert words("") == []
        assert words(" \n\t ") == []

    @given(st.text(alphabet="ab \n\t", max_size=40))
    def test_no_character_lost(self, text: str) -> None:
        found = words(text)
        assert "".join(w.text for w in found) == "".join(text.split())
        for w in found:
            assert text[w.span.start:w.span.end] == w.text
            assert [x.text for x in words(w.text)] == [w.text]


class TestWordIndex:
    """Offset lookups used by target synthesis and perturbations."""

    def test_inside_clips(self) -> None:
        index = WordIndex("foo bar baz")
        assert index.inside(1, 6) == [Span(1, 3), Span(4, 6)]

    def test_before(self) -> None:
        index = WordIndex("foo bar foo baz")
        assert index.before(8) == Span(4, 7)
        assert index.before(2) is None

    def test_from_offset(self) -> None:
        index = WordIndex("foo bar foo baz")
        assert index.from_offset(8) == [Span(8, 11), Span(12, 15)]
