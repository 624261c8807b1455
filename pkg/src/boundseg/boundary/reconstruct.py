"""Segment reconstruction from boundary outputs.

Sequences are located left to right. Each sequence is matched at its
leftmost occurrence that starts strictly after the previously located
sequence of the same kind; a sequence that cannot be found does not move
the search cursor. Items whose boundaries cannot be resolved are discarded,
never raised.
"""

import logging
from dataclasses import dataclass

from boundseg.boundary.patterns import BoundaryOutput, OutputPattern
from boundseg.core.types import Document, Segment, Segmentation, Span

logger = logging.getLogger(__name__)

NOT_FOUND = "sequence not found"
END_NOT_FOUND = "end sequence not found"
RIGHT_UNLOCATABLE = "right boundary unlocatable"
LEFT_UNLOCATABLE = "left boundary unlocatable"


@dataclass(frozen=True)
class Discard:
    """An item that produced no segment, and why."""

    index: int
    reason: str


@dataclass(frozen=True)
class ReconstructionResult:
    """Segments recovered from a boundary output.

    locations holds, per item, the located start sequence (start pattern),
    the located end sequence (end pattern) or the span from the start of
    the start sequence to the end of the end sequence (start+end pattern).
    sources maps each surviving segment to the item that produced it.
    """

    segments: Segmentation
    discarded: tuple[Discard, ...]
    locations: tuple[Span | None, ...]
    sources: tuple[int, ...]

    @classmethod
    def empty(cls) -> "ReconstructionResult":
        return cls(Segmentation(), (), (), ())


def _locate(text: str, seq: str, after_start: int, after_end: int = 0) -> Span | None:
    """Leftmost occurrence starting after after_start and ending after after_end."""
    lowest = max(after_start + 1, after_end - len(seq) + 1, 0)
    pos = text.find(seq, lowest)
    return None if pos == -1 else Span(pos, pos + len(seq))


def _reconstruct_start(doc: Document, out: BoundaryOutput) -> ReconstructionResult:
    text = doc.text
    locs: list[Span | None] = []
    cursor = -1
    for item in out.items:
        loc = _locate(text, item.start_seq, cursor)
        if loc is not None:
            cursor = loc.start
        locs.append(loc)

    segments, discarded, sources = [], [], []
    last = len(locs) - 1
    for i, (item, loc) in enumerate(zip(out.items, locs)):
        if loc is None:
            discarded.append(Discard(i, NOT_FOUND))
            continue
        right = len(text) if i == last else (locs[i + 1].start if locs[i + 1] else None)
        if right is None:
            discarded.append(Discard(i, RIGHT_UNLOCATABLE))
            continue
        segments.append(Segment(item.label, Span(loc.start, right)))
        sources.append(i)
    return ReconstructionResult(Segmentation(segments), tuple(discarded), tuple(locs), tuple(sources))


def _reconstruct_end(doc: Document, out: BoundaryOutput) -> ReconstructionResult:
    text = doc.text
    locs: list[Span | None] = []
    cursor_start, cursor_end = -1, 0
    for item in out.items:
        loc = _locate(text, item.end_seq, cursor_start, cursor_end)
        if loc is not None:
            cursor_start, cursor_end = loc.start, loc.end
        locs.append(loc)

    segments, discarded, sources = [], [], []
    for i, (item, loc) in enumerate(zip(out.items, locs)):
        if loc is None:
            discarded.append(Discard(i, NOT_FOUND))
            continue
        left = 0 if i == 0 else (locs[i - 1].end if locs[i - 1] else None)
        if left is None:
            discarded.append(Discard(i, LEFT_UNLOCATABLE))
            continue
        segments.append(Segment(item.label, Span(left, loc.end)))
        sources.append(i)
    return ReconstructionResult(Segmentation(segments), tuple(discarded), tuple(locs), tuple(sources))


def _reconstruct_start_end(doc: Document, out: BoundaryOutput) -> ReconstructionResult:
    text = doc.text
    locs: list[Span | None] = []
    segments, discarded, sources = [], [], []
    cursor, seg_end = -1, 0
    for i, item in enumerate(out.items):
        start = _locate(text, item.start_seq, max(cursor, seg_end - 1))
        if start is None:
            discarded.append(Discard(i, NOT_FOUND))
            locs.append(None)
            continue
        pos = text.find(item.end_seq, start.start)
        if pos == -1:
            discarded.append(Discard(i, END_NOT_FOUND))
            locs.append(None)
            continue
        span = Span(start.start, pos + len(item.end_seq))
        cursor, seg_end = span.start, span.end
        locs.append(span)
        segments.append(Segment(item.label, span))
        sources.append(i)
    return ReconstructionResult(Segmentation(segments), tuple(discarded), tuple(locs), tuple(sources))


_RECONSTRUCTORS = {
    OutputPattern.START: _reconstruct_start,
    OutputPattern.END: _reconstruct_end,
    OutputPattern.START_END: _reconstruct_start_end,
}


def reconstruct(doc: Document, out: BoundaryOutput) -> ReconstructionResult:
    """Recover labeled segments of doc from a boundary output."""
    result = _RECONSTRUCTORS[out.pattern](doc, out)
    if result.discarded:
        logger.debug(
            "%s: %d of %d items discarded", doc.id, len(result.discarded), len(out.items)
        )
    return result
