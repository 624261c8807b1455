"""A scored rollout output."""

from dataclasses import dataclass

from boundseg.boundary.patterns import BoundaryOutput
from boundseg.boundary.reconstruct import ReconstructionResult, reconstruct
from boundseg.core.types import Document, LabelSet, Segmentation
from boundseg.metrics.scores import RewardBreakdown, reward


@dataclass(frozen=True)
class Candidate:
    """A boundary output with its reconstruction and reward.

    output is None for placeholders standing in for unparseable rollouts.
    """

    output: BoundaryOutput | None
    recon: ReconstructionResult
    score: RewardBreakdown

    @property
    def reward(self) -> float:
        return self.score.reward

    @property
    def is_placeholder(self) -> bool:
        return self.output is None

    @classmethod
    def build(
        cls,
        doc: Document,
        gold: Segmentation,
        output: BoundaryOutput,
        label_set: LabelSet | None = None,
    ) -> "Candidate":
        """Reconstruct and score output against gold."""
        recon = reconstruct(doc, output)
        return cls(output, recon, reward(doc, recon, gold, label_set))

    @classmethod
    def placeholder(cls) -> "Candidate":
        return cls(None, ReconstructionResult.empty(), RewardBreakdown.zero())
