"""Per-character label and segment-id arrays shared by the metrics."""

import numpy as np

from boundseg.core.errors import InputError
from boundseg.core.types import Document, LabelSet, Segmentation

NONE = -1


class GoldNotLossless(InputError):
    """Raised when a gold segmentation leaves characters uncovered."""


def require_lossless(doc: Document, gold: Segmentation) -> None:
    if not gold.is_lossless(len(doc)):
        raise GoldNotLossless(f"Gold segmentation of {doc.id!r} does not tile the document")


def label_codes(
    pred: Segmentation, gold: Segmentation, label_set: LabelSet | None = None
) -> dict[str, int]:
    """Integer code per label: label-set order first, then any extra labels sorted."""
    names = list(label_set.names) if label_set is not None else []
    extra = sorted({s.label for s in (*pred, *gold)} - set(names))
    return {name: i for i, name in enumerate(names + extra)}


def label_array(length: int, seg: Segmentation, codes: dict[str, int]) -> np.ndarray:
    """Label code of every character; NONE where no segment covers it."""
    arr = np.full(length, NONE, dtype=np.int64)
    for s in seg:
        arr[s.start:s.end] = codes[s.label]
    return arr


def segment_ids(length: int, seg: Segmentation) -> np.ndarray:
    """Segment number of every character.

    Each maximal run of uncovered characters gets a filler segment of its own.
    """
    ids = np.full(length, NONE, dtype=np.int64)
    for k, s in enumerate(seg):
        ids[s.start:s.end] = k
    uncovered = ids == NONE
    if uncovered.any():
        run_starts = uncovered & ~np.concatenate(([False], uncovered[:-1]))
        ids[uncovered] = len(seg) + np.cumsum(run_starts)[uncovered]
    return ids
