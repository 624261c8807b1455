"""Word-level view of a text.

A word is a maximal run of non-whitespace characters. Boundary edits and
target lengths are counted in these words.
"""

import bisect
import re
from dataclasses import dataclass

from boundseg.core.types import Span

_WORD = re.compile(r"\S+")


@dataclass(frozen=True)
class Word:
    """A word and its location in the text it was taken from."""

    text: str
    span: Span


def words(text: str) -> list[Word]:
    """Split text into words with their spans.

    Returns an empty list for empty or whitespace-only text.
    """
    return [Word(m.group(), Span(m.start(), m.end())) for m in _WORD.finditer(text)]


class WordIndex:
    """Offset lookups over the words of one text."""

    def __init__(self, text: str) -> None:
        self.text = text
        self.words = words(text)
        self._starts = [w.span.start for w in self.words]
        self._ends = [w.span.end for w in self.words]

    def __len__(self) -> int:
        return len(self.words)

    def inside(self, start: int, end: int) -> list[Span]:
        """Word spans overlapping [start, end), clipped to it."""
        lo = bisect.bisect_right(self._ends, start)
        hi = bisect.bisect_left(self._starts, end)
        return [
            Span(max(w.span.start, start), min(w.span.end, end))
            for w in self.words[lo:hi]
        ]

    def before(self, offset: int) -> Span | None:
        """The last word ending at or before offset."""
        i = bisect.bisect_right(self._ends, offset)
        return self.words[i - 1].span if i else None

    def from_offset(self, offset: int) -> list[Span]:
        """Word spans overlapping [offset, len(text)), clipped to it."""
        return self.inside(offset, len(self.text))
