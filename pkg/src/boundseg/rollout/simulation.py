"""Desk-scale rollout loop: generate → group → inject → replace → advantages → update.

Coordinates one policy over a dataset in fixed-size batches. Each step is
a separate component; the simulator wires them together and records the
reward statistics a training run would log.
"""

import json
import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from boundseg.core.errors import InvariantViolation
from boundseg.core.types import Document, LabelSet, Segmentation, require_valid
from boundseg.dataset.io import DatasetRecord
from boundseg.rollout.config import InvalidConfig, RolloutConfig
from boundseg.rollout.groups import (
    CandidateGroup,
    ReplacementRecord,
    apply_selective_replacement,
    build_group,
    compute_advantages,
    inject_gold,
)
from boundseg.rollout.policies.base import Feedback, Policy

logger = logging.getLogger(__name__)

_ADVANTAGE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class TrainingBatch:
    """What one step hands to the optimizer."""

    step: int
    generated: tuple[CandidateGroup, ...]
    groups: tuple[CandidateGroup, ...]
    advantages: tuple[np.ndarray, ...]
    replacements: tuple[ReplacementRecord, ...]

    @property
    def replaced(self) -> int:
        return sum(r.replaced for r in self.replacements)


@dataclass(frozen=True)
class StepRecord:
    """Reward statistics of one step.

    generated_mean_reward is taken before selective replacement,
    mean_reward and reward_std after it. reward_std is the mean of the
    within-group standard deviations.
    """

    step: int
    generated_mean_reward: float
    mean_reward: float
    reward_std: float
    replacements: int
    best_rewards: dict[str, float] = field(default_factory=dict)

    def as_json(self) -> str:
        return json.dumps(
            {
                "step": self.step,
                "generated_mean_reward": round(self.generated_mean_reward, 6),
                "mean_reward": round(self.mean_reward, 6),
                "reward_std": round(self.reward_std, 6),
                "replacements": self.replacements,
                "best_rewards": {k: round(v, 6) for k, v in self.best_rewards.items()},
            },
            sort_keys=True,
        )


@dataclass(frozen=True)
class SimulationReport:
    """Per-step records plus the best reward each document reached."""

    steps: tuple[StepRecord, ...]
    final_best: dict[str, float]

    @property
    def final_best_mean(self) -> float:
        if not self.final_best:
            return 0.0
        return float(np.mean(list(self.final_best.values())))

    def to_jsonl(self) -> str:
        return "".join(s.as_json() + "\n" for s in self.steps)


def _mean_reward(groups: Sequence[CandidateGroup]) -> float:
    return float(np.concatenate([g.rewards for g in groups]).mean())


def rollout_step(
    examples: Sequence[tuple[Document, Segmentation]],
    policy: Policy,
    config: RolloutConfig,
    step: int,
    label_set: LabelSet | None = None,
) -> TrainingBatch:
    """Run one batch through generation, grouping, replacement and advantages.

    The policy is called serially in batch order; group construction and
    perturbation search fan out over config.workers threads. Policy feedback
    is the best generated candidate of each group, before gold injection and
    selective replacement.
    """
    label_set = label_set or LabelSet()
    raw = [policy.generate(doc, config.m, config.temperature) for doc, _ in examples]

    jobs = [(doc, gold, outputs) for (doc, gold), outputs in zip(examples, raw)]

    def build(job: tuple[Document, Segmentation, list[str]]) -> CandidateGroup:
        doc, gold, outputs = job
        return build_group(doc, gold, outputs, config, label_set)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            generated = list(pool.map(build, jobs))
    else:
        generated = [build(job) for job in jobs]

    injected = inject_gold(generated, examples, config, label_set, step)
    groups, log = apply_selective_replacement(injected, examples, config, label_set, step)

    advantages = []
    for group in groups:
        adv = compute_advantages(group)
        if abs(float(adv.sum())) > _ADVANTAGE_TOLERANCE:
            raise InvariantViolation(f"{group.doc_id}: advantages sum to {adv.sum()!r}")
        advantages.append(adv)

    policy.update([Feedback(g.doc_id, g.best.output, g.best.reward) for g in generated])
    return TrainingBatch(
        step=step,
        generated=tuple(generated),
        groups=tuple(groups),
        advantages=tuple(advantages),
        replacements=tuple(log),
    )


class RolloutSimulator:
    """Drives a policy over a dataset in batches of config.batch_size documents."""

    def __init__(
        self,
        records: Sequence[DatasetRecord],
        policy: Policy,
        config: RolloutConfig,
        label_set: LabelSet | None = None,
    ) -> None:
        if not records:
            raise InvalidConfig("Cannot simulate over an empty dataset")
        self._examples = [(r.document, r.segmentation) for r in records]
        self._policy = policy
        self._config = config
        self._label_set = label_set or LabelSet()
        self._best: dict[str, float] = {}

    def batch(self, step: int) -> list[tuple[Document, Segmentation]]:
        """Examples of a 1-based step; batches wrap around the dataset."""
        n = len(self._examples)
        size = min(self._config.batch_size, n)
        return [self._examples[((step - 1) * size + b) % n] for b in range(size)]

    def step(self, step: int) -> tuple[TrainingBatch, StepRecord]:
        batch = rollout_step(self.batch(step), self._policy, self._config, step, self._label_set)
        for group in batch.groups:
            self._best[group.doc_id] = max(self._best.get(group.doc_id, 0.0), group.best.reward)
        record = StepRecord(
            step=step,
            generated_mean_reward=_mean_reward(batch.generated),
            mean_reward=_mean_reward(batch.groups),
            reward_std=float(np.mean([g.rewards.std() for g in batch.groups])),
            replacements=batch.replaced,
            best_rewards={g.doc_id: self._best[g.doc_id] for g in batch.groups},
        )
        logger.info(
            "Step %d: mean reward %.4f, std %.4f, %d replacement(s)",
            step, record.mean_reward, record.reward_std, record.replacements,
        )
        return batch, record

    def run(self, iterations: int) -> SimulationReport:
        if iterations < 0:
            raise InvalidConfig(f"iterations must be non-negative, got {iterations}")
        steps = tuple(self.step(t)[1] for t in range(1, iterations + 1))
        return SimulationReport(steps=steps, final_best=dict(sorted(self._best.items())))


def simulate(
    dataset: Sequence[DatasetRecord],
    policy: Policy,
    config: RolloutConfig,
    iterations: int,
    label_set: LabelSet | None = None,
) -> SimulationReport:
    """Validate the dataset's gold and run iterations batch steps."""
    for record in dataset:
        require_valid(record.document, record.segmentation, label_set)
    return RolloutSimulator(dataset, policy, config, label_set).run(iterations)
