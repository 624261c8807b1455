"""Pick the reward-maximizing intermediate candidate."""

import logging

from boundseg.core.errors import InputError
from boundseg.core.types import Document, LabelSet, Segmentation
from boundseg.perturb.candidate import Candidate
from boundseg.perturb.edits import perturbation_pool

logger = logging.getLogger(__name__)


class NoPerturbations(InputError):
    """Raised when a candidate admits no legal perturbation."""


def _best_step(
    doc: Document, gold: Segmentation, cand: Candidate, label_set: LabelSet
) -> Candidate:
    pool = perturbation_pool(doc, cand.output, cand.recon, label_set)
    if not pool:
        raise NoPerturbations(f"{doc.id}: candidate admits no legal perturbation")
    scored = [Candidate.build(doc, gold, edited, label_set) for _, edited in pool]
    # max keeps the first of equal rewards, i.e. lowest segment index then kind order
    return max(scored, key=lambda c: c.reward)


def best_intermediate(
    doc: Document,
    cand: Candidate,
    gold: Segmentation,
    label_set: LabelSet | None = None,
    steps: int = 1,
) -> tuple[Candidate, float]:
    """Best candidate reachable in `steps` greedy edits, and its reward gain over cand.

    With steps=2 the best single edit is applied first and the best edit of
    that result second. The gain is always measured against cand and may be
    zero or negative.
    """
    if steps not in (1, 2):
        raise ValueError(f"steps must be 1 or 2, got {steps}")
    label_set = label_set or LabelSet()
    best = _best_step(doc, gold, cand, label_set)
    if steps == 2:
        try:
            best = _best_step(doc, gold, best, label_set)
        except NoPerturbations:
            logger.debug("%s: no second perturbation step available", doc.id)
    return best, best.reward - cand.reward
