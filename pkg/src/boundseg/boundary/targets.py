"""SFT target synthesis: turn an annotated segmentation into a boundary output.

Each gold segment contributes its first (start pattern) and/or last (end
pattern) k words, k sampled per segment. Sequences are then grown one word
at a time until they are pairwise distinct and reconstruct the gold exactly.
"""

import logging

import numpy as np

from boundseg.boundary.codec import escape_field, serialize
from boundseg.boundary.patterns import BoundaryItem, BoundaryOutput, OutputPattern
from boundseg.boundary.reconstruct import END_NOT_FOUND, ReconstructionResult, reconstruct
from boundseg.core.errors import InputError
from boundseg.core.types import Document, Segmentation, Span, require_valid
from boundseg.core.words import WordIndex

logger = logging.getLogger(__name__)

_DEFAULT_MAX_SAMPLED_WORDS = 4


class TargetSynthesisFailure(InputError):
    """Raised when no boundary sequences can reproduce a gold segmentation."""


def _start_seq(text: str, span: Span, seg_words: list[Span], k: int) -> str:
    return text[span.start:seg_words[k - 1].end]


def _end_seq(text: str, span: Span, seg_words: list[Span], k: int) -> str:
    return text[seg_words[-k].start:span.end]


def _build(
    doc: Document,
    gold: Segmentation,
    pattern: OutputPattern,
    seg_words: list[list[Span]],
    start_k: list[int],
    end_k: list[int],
) -> BoundaryOutput:
    items = []
    for i, seg in enumerate(gold):
        start = _start_seq(doc.text, seg.span, seg_words[i], start_k[i]) if pattern.has_start else None
        end = _end_seq(doc.text, seg.span, seg_words[i], end_k[i]) if pattern.has_end else None
        items.append(BoundaryItem(seg.label, start_seq=start, end_seq=end))
    return BoundaryOutput(pattern, tuple(items))


def _duplicates(seqs: list[str | None]) -> set[int]:
    """Indices whose (whitespace-trimmed) sequence is shared with another item."""
    seen: dict[str, list[int]] = {}
    for i, s in enumerate(seqs):
        if s is not None:
            seen.setdefault(s.strip(), []).append(i)
    return {i for group in seen.values() if len(group) > 1 for i in group}


def make_targets(
    doc: Document,
    gold: Segmentation,
    pattern: OutputPattern,
    length_sampler: np.random.Generator | int | None = None,
    max_sampled_words: int = _DEFAULT_MAX_SAMPLED_WORDS,
) -> BoundaryOutput:
    """Synthesize a boundary output that reconstructs gold exactly.

    Initial lengths are drawn uniformly from [1, min(max_sampled_words, words
    in segment)]. Raises TargetSynthesisFailure when even full segment texts
    cannot be made distinct and locatable.
    """
    require_valid(doc, gold)
    rng = np.random.default_rng(length_sampler)
    index = WordIndex(doc.text)
    seg_words = [index.inside(seg.start, seg.end) for seg in gold]
    for i, ws in enumerate(seg_words):
        if not ws:
            raise TargetSynthesisFailure(f"{doc.id}: segment {i} contains no words")

    def sample() -> list[int]:
        return [int(rng.integers(1, min(max_sampled_words, len(ws)) + 1)) for ws in seg_words]

    start_k = sample() if pattern.has_start else [1] * len(gold)
    end_k = sample() if pattern.has_end else [1] * len(gold)

    def grow(lengths: list[int], indices: set[int] | list[int]) -> bool:
        grown = False
        for i in indices:
            if lengths[i] < len(seg_words[i]):
                lengths[i] += 1
                grown = True
        return grown

    while True:
        out = _build(doc, gold, pattern, seg_words, start_k, end_k)
        dup_start = _duplicates([it.start_seq for it in out.items])
        dup_end = _duplicates([it.end_seq for it in out.items])
        if dup_start or dup_end:
            if not (grow(start_k, sorted(dup_start)) | grow(end_k, sorted(dup_end))):
                raise TargetSynthesisFailure(
                    f"{doc.id}: segments {sorted(dup_start | dup_end)} cannot be told apart"
                )
            continue

        result = reconstruct(doc, out)
        if result.segments == gold and not result.discarded:
            return out

        lengths = _first_mislocated(out, result, gold, start_k, end_k)
        if lengths is None:
            raise TargetSynthesisFailure(f"{doc.id}: reconstruction differs from gold")
        which, i = lengths
        if not grow(which, [i]):
            raise TargetSynthesisFailure(
                f"{doc.id}: segment {i} cannot be located from its own text"
            )
        logger.debug("%s: growing sequence of segment %d", doc.id, i)


def _first_mislocated(
    out: BoundaryOutput,
    result: ReconstructionResult,
    gold: Segmentation,
    start_k: list[int],
    end_k: list[int],
) -> tuple[list[int], int] | None:
    """The length vector and item index of the first sequence located wrongly."""
    reasons = {d.index: d.reason for d in result.discarded}
    for i, (loc, seg) in enumerate(zip(result.locations, gold)):
        if out.pattern is OutputPattern.START:
            if loc is None or loc.start != seg.start:
                return start_k, i
        elif out.pattern is OutputPattern.END:
            if loc is None or loc.end != seg.end:
                return end_k, i
        else:
            if loc is None:
                return (end_k if reasons.get(i) == END_NOT_FOUND else start_k), i
            if loc.start != seg.start:
                return start_k, i
            if loc.end != seg.end:
                return end_k, i
    return None


def full_text_output(doc: Document, gold: Segmentation) -> str:
    """Render gold as the full-segment-text output that boundary generation replaces."""
    return "\n".join(f"{seg.label}\t{escape_field(doc.text[seg.start:seg.end])}" for seg in gold)


def output_reduction(doc: Document, gold: Segmentation, out: BoundaryOutput) -> float:
    """Fraction of output characters saved relative to the full-text rendering."""
    full = full_text_output(doc, gold)
    return 1.0 - len(serialize(out)) / len(full)
