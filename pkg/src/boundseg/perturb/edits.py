"""Single-edit perturbations of a candidate segmentation.

Shorten and extend edits move one segment edge by one word. The edge is
stored in a boundary sequence: for the start pattern the left edge of
segment i is the start of s_i and its right edge the start of s_{i+1}; for
the end pattern the edges are the ends of e_{i-1} and e_i; for the
start+end pattern s_i holds the left edge and e_i the right one. An edit
rewrites every sequence holding the moved edge, re-derives sequences that
now spill over their segment, and is legal only if re-reconstruction gives
exactly the intended spans.
"""

import enum
import functools
import logging
from dataclasses import dataclass

import numpy as np

from boundseg.boundary.patterns import BoundaryItem, BoundaryOutput, OutputPattern
from boundseg.boundary.reconstruct import ReconstructionResult, reconstruct
from boundseg.core.errors import InputError
from boundseg.core.types import Document, LabelSet, Segment, Segmentation, Span
from boundseg.core.words import WordIndex
from boundseg.perturb.candidate import Candidate

logger = logging.getLogger(__name__)

_START = "start"
_END = "end"


class IllegalPerturbation(InputError):
    """Raised when a perturbation is not legal for the candidate it is applied to."""


class PerturbationKind(enum.Enum):
    """Edit kinds, in tie-breaking order."""

    SHORTEN_LEFT = "shorten_left"
    SHORTEN_RIGHT = "shorten_right"
    EXTEND_LEFT = "extend_left"
    EXTEND_RIGHT = "extend_right"
    RELABEL = "relabel"


@dataclass(frozen=True)
class Perturbation:
    """One edit of one surviving segment."""

    segment_index: int
    kind: PerturbationKind
    label: str | None = None

    def __post_init__(self) -> None:
        if (self.kind is PerturbationKind.RELABEL) != (self.label is not None):
            raise ValueError("Exactly the relabel kind carries a label")

    def as_dict(self) -> dict:
        return {"segment_index": self.segment_index, "kind": self.kind.value, "label": self.label}


@functools.lru_cache(maxsize=128)
def _word_index(text: str) -> WordIndex:
    return WordIndex(text)


def _edge_move(index: WordIndex, seg: Segment, kind: PerturbationKind) -> tuple[int, int] | None:
    """(old offset, new offset) of the edge the edit moves, or None if impossible."""
    inner = index.inside(seg.start, seg.end)
    if kind is PerturbationKind.SHORTEN_LEFT:
        return (seg.start, inner[1].start) if len(inner) > 1 else None
    if kind is PerturbationKind.SHORTEN_RIGHT:
        return (seg.end, inner[-1].start) if len(inner) > 1 else None
    if kind is PerturbationKind.EXTEND_LEFT:
        word = index.before(seg.start)
        return (seg.start, word.start) if word is not None else None
    after = index.from_offset(seg.end)
    return (seg.end, after[1].start) if len(after) > 1 else None


def _edge_owners(
    pattern: OutputPattern, recon: ReconstructionResult, n_items: int, j: int, left: bool
) -> list[tuple[int, str]]:
    """Sequences (item index, kind) that encode one edge of surviving segment j."""
    p = recon.sources[j]
    if pattern is OutputPattern.START:
        if left:
            return [(p, _START)]
        return [(p + 1, _START)] if p + 1 < n_items else []
    if pattern is OutputPattern.END:
        if left:
            return [(p - 1, _END)] if p > 0 else []
        return [(p, _END)]
    return [(p, _START if left else _END)]


def _last_word_start(index: WordIndex, offset: int) -> int:
    inner = index.inside(0, offset)
    return inner[-1].start if inner else 0


def _moved_start(text: str, index: WordIndex, seq: str, loc: int, new_start: int) -> str:
    """Start sequence beginning at new_start: drops or prepends words of seq."""
    first = index.from_offset(new_start)[0]
    return text[new_start:max(loc + len(seq), first.end)]


def _moved_end(text: str, index: WordIndex, seq: str, loc_end: int, new_end: int) -> str:
    """End sequence ending at new_end: drops or appends words of seq."""
    start = min(loc_end - len(seq), _last_word_start(index, new_end))
    return text[start:new_end]


def _sequence_location(out: BoundaryOutput, recon: ReconstructionResult, p: int, kind: str) -> Span:
    """Where sequence kind of item p currently sits."""
    loc = recon.locations[p]
    item = out.items[p]
    if kind == _START:
        return Span(loc.start, loc.start + len(item.start_seq))
    return Span(loc.end - len(item.end_seq), loc.end)


def _with_sequence(item: BoundaryItem, kind: str, seq: str) -> BoundaryItem:
    if kind == _START:
        return BoundaryItem(item.label, start_seq=seq, end_seq=item.end_seq)
    return BoundaryItem(item.label, start_seq=item.start_seq, end_seq=seq)


def _intended(segments: Segmentation, old: int, new: int) -> Segmentation | None:
    """Segments with every edge at old moved to new; None if any would empty or overlap."""
    moved = []
    for s in segments:
        start = new if s.start == old else s.start
        end = new if s.end == old else s.end
        if start >= end:
            return None
        moved.append((s.label, start, end))
    for (_, _, prev_end), (_, start, _) in zip(moved, moved[1:]):
        if start < prev_end:
            return None
    return Segmentation.from_tuples(moved)


def _repair(
    doc: Document,
    index: WordIndex,
    out: BoundaryOutput,
    sources: tuple[int, ...],
    intended: Segmentation,
) -> BoundaryOutput:
    """Re-derive sequences that spill over their intended segment.

    A spilling sequence becomes the shortest word prefix (start) or suffix
    (end) of its segment that still reconstructs the intended spans.
    """
    text = doc.text
    for j, seg in enumerate(intended):
        p = sources[j]
        item = out.items[p]
        for kind in (_START, _END):
            seq = item.start_seq if kind == _START else item.end_seq
            if seq is None or len(seq) <= len(seg.span):
                continue
            inner = index.inside(seg.start, seg.end)
            for k in range(1, len(inner) + 1):
                if kind == _START:
                    trial = text[seg.start:inner[k - 1].end]
                else:
                    trial = text[inner[-k].start:seg.end]
                candidate = out.replace_item(p, _with_sequence(item, kind, trial))
                if reconstruct(doc, candidate).segments == intended:
                    out, item = candidate, candidate.items[p]
                    break
    return out


def _neighbor_labels(segments: Segmentation, j: int) -> set[str]:
    labels = set()
    if j > 0:
        labels.add(segments[j - 1].label)
    if j + 1 < len(segments):
        labels.add(segments[j + 1].label)
    return labels


def edit_output(
    doc: Document,
    output: BoundaryOutput,
    recon: ReconstructionResult,
    p: Perturbation,
    label_set: LabelSet,
) -> BoundaryOutput | None:
    """The boundary output after applying p, or None if p is not legal."""
    segments = recon.segments
    if not 0 <= p.segment_index < len(segments):
        return None
    j = p.segment_index
    item_index = recon.sources[j]

    if p.kind is PerturbationKind.RELABEL:
        current = segments[j].label
        if p.label not in label_set or p.label == current or p.label in _neighbor_labels(segments, j):
            return None
        item = output.items[item_index]
        return output.replace_item(
            item_index, BoundaryItem(p.label, start_seq=item.start_seq, end_seq=item.end_seq)
        )

    text = doc.text
    index = _word_index(text)
    move = _edge_move(index, segments[j], p.kind)
    if move is None:
        return None
    old, new = move
    left = p.kind in (PerturbationKind.SHORTEN_LEFT, PerturbationKind.EXTEND_LEFT)
    owners = _edge_owners(output.pattern, recon, len(output), j, left)
    if not owners:
        return None
    intended = _intended(segments, old, new)
    if intended is None:
        return None
    for k, s in enumerate(segments):
        if k != j and (s.start == old or s.end == old):
            owners.extend(_edge_owners(output.pattern, recon, len(output), k, s.start == old))

    edited = output
    for q, kind in dict.fromkeys(owners):
        item = edited.items[q]
        loc = _sequence_location(output, recon, q, kind)
        if kind == _START:
            seq = _moved_start(text, index, item.start_seq, loc.start, new)
        else:
            seq = _moved_end(text, index, item.end_seq, loc.end, new)
        edited = edited.replace_item(q, _with_sequence(item, kind, seq))

    edited = _repair(doc, index, edited, recon.sources, intended)
    if reconstruct(doc, edited).segments != intended:
        logger.debug("%s: %s does not realize its intended spans", doc.id, p)
        return None
    return edited


def perturbation_pool(
    doc: Document,
    output: BoundaryOutput | None,
    recon: ReconstructionResult,
    label_set: LabelSet,
) -> list[tuple[Perturbation, BoundaryOutput]]:
    """Every legal single perturbation with its edited output, in tie-breaking order."""
    if output is None:
        return []
    pool = []
    segments = recon.segments
    for j, seg in enumerate(segments):
        for kind in PerturbationKind:
            if kind is PerturbationKind.RELABEL:
                exclude = {seg.label} | _neighbor_labels(segments, j)
                perts = [Perturbation(j, kind, label) for label in label_set.alternatives(exclude)]
            else:
                perts = [Perturbation(j, kind)]
            for p in perts:
                edited = edit_output(doc, output, recon, p, label_set)
                if edited is not None:
                    pool.append((p, edited))
    return pool


def enumerate_perturbations(
    doc: Document, cand: Candidate, label_set: LabelSet | None = None
) -> list[Perturbation]:
    """All legal single perturbations of cand."""
    label_set = label_set or LabelSet()
    return [p for p, _ in perturbation_pool(doc, cand.output, cand.recon, label_set)]


def apply_perturbation(
    doc: Document,
    cand: Candidate,
    p: Perturbation,
    gold: Segmentation,
    label_set: LabelSet | None = None,
) -> Candidate:
    """Apply p to cand and re-score the result."""
    label_set = label_set or LabelSet()
    if cand.output is None:
        raise IllegalPerturbation("Placeholder candidates cannot be perturbed")
    edited = edit_output(doc, cand.output, cand.recon, p, label_set)
    if edited is None:
        raise IllegalPerturbation(f"{p} is not legal for this candidate")
    return Candidate.build(doc, gold, edited, label_set)


def random_perturbation(
    doc: Document,
    output: BoundaryOutput,
    label_set: LabelSet,
    rng: np.random.Generator,
) -> BoundaryOutput:
    """Apply one uniformly chosen legal perturbation; output unchanged if none exist."""
    pool = perturbation_pool(doc, output, reconstruct(doc, output), label_set)
    if not pool:
        return output
    return pool[int(rng.integers(len(pool)))][1]
