"""Character-level P_k."""

import math

import numpy as np

from boundseg.core.errors import InputError
from boundseg.core.types import Document, Segmentation
from boundseg.metrics.arrays import require_lossless, segment_ids


class WindowTooLarge(InputError):
    """Raised when the comparison window is not smaller than the document."""


def default_window(doc: Document, gold: Segmentation) -> int:
    """Half the average gold segment length, rounded half up, at least 1."""
    return max(1, math.floor(0.5 * len(doc) / len(gold) + 0.5))


def pk(
    doc: Document,
    pred: Segmentation,
    gold: Segmentation,
    window: int | None = None,
) -> float:
    """Fraction of position pairs (i, i + window) where pred and gold disagree on same-segment."""
    require_lossless(doc, gold)
    if window is None:
        window = default_window(doc, gold)
    length = len(doc)
    if window < 1 or window >= length:
        raise WindowTooLarge(f"Window {window} does not fit a document of length {length}")
    g = segment_ids(length, gold)
    p = segment_ids(length, pred)
    same_gold = g[:-window] == g[window:]
    same_pred = p[:-window] == p[window:]
    return float(np.mean(same_gold != same_pred))
