"""Candidate groups, medium selection, selective replacement and advantages."""

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from boundseg.boundary.codec import parse_lenient, truncate_at_end_marker
from boundseg.boundary.targets import TargetSynthesisFailure, make_targets
from boundseg.core.types import Document, LabelSet, Segmentation
from boundseg.perturb.candidate import Candidate
from boundseg.perturb.search import NoPerturbations, best_intermediate
from boundseg.rollout.config import MediumMode, RolloutConfig

logger = logging.getLogger(__name__)

# substream purposes
_MEDIUM_STREAM = 1
_GOLD_STREAM = 2


@dataclass(frozen=True)
class CandidateGroup:
    """One document's rollout candidates, best first.

    rollout_indices[j] is the generation slot candidates[j] came from;
    equal rewards keep slot order.
    """

    doc_id: str
    candidates: tuple[Candidate, ...]
    rollout_indices: tuple[int, ...]
    diagnostics: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.candidates)

    @property
    def rewards(self) -> np.ndarray:
        return np.array([c.reward for c in self.candidates], dtype=float)

    @property
    def best(self) -> Candidate:
        return self.candidates[0]

    @classmethod
    def ranked(
        cls,
        doc_id: str,
        slots: Sequence[tuple[int, Candidate]],
        diagnostics: Sequence[str] = (),
    ) -> "CandidateGroup":
        """Sort (slot, candidate) pairs by descending reward, then slot."""
        ordered = sorted(slots, key=lambda s: (-s[1].reward, s[0]))
        return cls(
            doc_id=doc_id,
            candidates=tuple(c for _, c in ordered),
            rollout_indices=tuple(i for i, _ in ordered),
            diagnostics=tuple(diagnostics),
        )

    def replace(self, position: int, cand: Candidate) -> "CandidateGroup":
        """Swap the candidate at position and re-rank; the slot is kept."""
        slots = list(zip(self.rollout_indices, self.candidates))
        slots[position] = (self.rollout_indices[position], cand)
        return CandidateGroup.ranked(self.doc_id, slots, self.diagnostics)


@dataclass(frozen=True)
class ReplacementRecord:
    """Intermediate-candidate outcome for one group."""

    doc_id: str
    rollout_index: int
    old_reward: float
    new_reward: float
    gain: float
    replaced: bool

    def as_dict(self) -> dict:
        return {
            "id": self.doc_id,
            "rollout_index": self.rollout_index,
            "old_reward": round(self.old_reward, 6),
            "new_reward": round(self.new_reward, 6),
            "gain": round(self.gain, 6),
            "replaced": self.replaced,
        }


def build_group(
    doc: Document,
    gold: Segmentation,
    raw_outputs: Sequence[str],
    config: RolloutConfig,
    label_set: LabelSet | None = None,
) -> CandidateGroup:
    """Truncate, parse, reconstruct and score raw outputs into a ranked group.

    Outputs with no valid line become reward-0 placeholders so the group
    keeps one candidate per raw output.
    """
    label_set = label_set or LabelSet()
    slots: list[tuple[int, Candidate]] = []
    diagnostics: list[str] = []
    for j, raw in enumerate(raw_outputs):
        text = truncate_at_end_marker(raw, config.end_marker)
        parsed = parse_lenient(text, label_set, config.pattern)
        diagnostics.extend(f"output {j}: {d}" for d in parsed.diagnostics)
        if parsed.output is None:
            logger.warning("%s: output %d is unparseable, using a placeholder", doc.id, j)
            slots.append((j, Candidate.placeholder()))
            continue
        slots.append((j, Candidate.build(doc, gold, parsed.output, label_set)))
    return CandidateGroup.ranked(doc.id, slots, diagnostics)


def select_medium(
    group: CandidateGroup,
    mode: MediumMode = MediumMode.MEDIUM,
    rng: np.random.Generator | None = None,
) -> int:
    """Position of the candidate to perturb.

    MEDIUM picks rank ceil(m/2) (1-based) of the descending order; RANDOM
    picks uniformly with rng.
    """
    if not len(group):
        raise ValueError(f"{group.doc_id}: empty group")
    if mode is MediumMode.RANDOM:
        if rng is None:
            raise ValueError("Random medium selection needs a generator")
        return int(rng.integers(len(group)))
    return math.ceil(len(group) / 2) - 1


def compute_advantages(group: CandidateGroup) -> np.ndarray:
    """Reward minus group mean, without standard-deviation scaling."""
    rewards = group.rewards
    return rewards - rewards.mean()


def _intermediate(
    doc: Document,
    gold: Segmentation,
    group: CandidateGroup,
    position: int,
    config: RolloutConfig,
    label_set: LabelSet,
) -> tuple[Candidate | None, float]:
    medium = group.candidates[position]
    if medium.is_placeholder:
        return None, 0.0
    try:
        return best_intermediate(doc, medium, gold, label_set, steps=config.perturb_steps)
    except NoPerturbations:
        logger.debug("%s: medium candidate admits no perturbation", doc.id)
        return None, 0.0


def apply_selective_replacement(
    groups: Sequence[CandidateGroup],
    examples: Sequence[tuple[Document, Segmentation]],
    config: RolloutConfig,
    label_set: LabelSet | None = None,
    step: int = 0,
) -> tuple[list[CandidateGroup], list[ReplacementRecord]]:
    """Swap in intermediate candidates for the groups that gain the most.

    Every group's chosen candidate is perturbed. Groups with a positive gain
    are eligible; the k largest gains (ties by doc id) are replaced, or every
    eligible group when config.select_top_k is off.
    """
    if not config.enable_intermediate:
        return list(groups), []
    label_set = label_set or LabelSet()

    positions = [
        select_medium(g, config.medium_mode, config.substream(step, i, _MEDIUM_STREAM))
        for i, g in enumerate(groups)
    ]
    jobs = [
        (doc, gold, g, pos, config, label_set)
        for (doc, gold), g, pos in zip(examples, groups, positions)
    ]
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda job: _intermediate(*job), jobs))
    else:
        results = [_intermediate(*job) for job in jobs]

    eligible = [i for i, (cand, gain) in enumerate(results) if cand is not None and gain > 0]
    eligible.sort(key=lambda i: (-results[i][1], groups[i].doc_id))
    chosen = set(eligible[:config.k] if config.select_top_k else eligible)

    new_groups = list(groups)
    log = []
    for i, (group, pos, (cand, gain)) in enumerate(zip(groups, positions, results)):
        if cand is None:
            continue
        medium = group.candidates[pos]
        if i in chosen:
            new_groups[i] = group.replace(pos, cand)
        log.append(ReplacementRecord(
            doc_id=group.doc_id,
            rollout_index=group.rollout_indices[pos],
            old_reward=medium.reward,
            new_reward=cand.reward,
            gain=gain,
            replaced=i in chosen,
        ))
    logger.debug("Replaced %d of %d groups", len(chosen), len(groups))
    return new_groups, log


def inject_gold(
    groups: Sequence[CandidateGroup],
    examples: Sequence[tuple[Document, Segmentation]],
    config: RolloutConfig,
    label_set: LabelSet | None = None,
    step: int = 0,
) -> list[CandidateGroup]:
    """Swap each group's lowest-ranked candidate for a gold-target candidate.

    The gold candidate is the boundary output make_targets synthesizes for
    the document, so it always reconstructs the gold exactly. Groups whose
    gold admits no targets are left as generated.
    """
    if not config.gold_injection:
        return list(groups)
    label_set = label_set or LabelSet()
    injected = []
    for i, (group, (doc, gold)) in enumerate(zip(groups, examples)):
        rng = config.substream(step, i, _GOLD_STREAM)
        try:
            targets = make_targets(doc, gold, config.pattern, rng)
        except TargetSynthesisFailure as e:
            logger.warning("%s: no gold candidate to inject: %s", doc.id, e)
            injected.append(group)
            continue
        injected.append(group.replace(len(group) - 1, Candidate.build(doc, gold, targets, label_set)))
    return injected
