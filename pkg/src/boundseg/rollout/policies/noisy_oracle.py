"""Hill-climbing surrogate policy built around the gold segmentation.

Each document starts from SFT-style targets of its gold, pushed `noise`
random edits away. Every sample applies a temperature-scaled random number
of further edits to the current anchor. update() moves the anchor to the
best candidate of a step whenever it scores higher, so the policy improves
the way a trained model would drift toward higher-reward outputs.
"""

import logging
import zlib
from collections.abc import Mapping

import numpy as np

from boundseg.boundary.codec import serialize
from boundseg.boundary.patterns import BoundaryOutput, OutputPattern
from boundseg.boundary.targets import make_targets
from boundseg.core.types import Document, LabelSet, Segmentation
from boundseg.perturb.candidate import Candidate
from boundseg.perturb.edits import random_perturbation
from boundseg.rollout.policies.base import Feedback, Policy, PolicyError

logger = logging.getLogger(__name__)

_DEFAULT_NOISE = 2
_DEFAULT_END_MARKER = "<eos>"


class NoisyOraclePolicy(Policy):
    """Samples random perturbations around a per-document anchor output."""

    def __init__(
        self,
        golds: Mapping[str, Segmentation],
        label_set: LabelSet | None = None,
        pattern: OutputPattern = OutputPattern.START,
        noise: int = _DEFAULT_NOISE,
        seed: int = 0,
        end_marker: str = _DEFAULT_END_MARKER,
    ) -> None:
        if noise < 0:
            raise ValueError(f"noise must be non-negative, got {noise}")
        self._golds = dict(golds)
        self._label_set = label_set or LabelSet()
        self._pattern = pattern
        self._noise = noise
        self._seed = seed
        self._end_marker = end_marker
        self._anchors: dict[str, tuple[BoundaryOutput, float]] = {}
        self._calls: dict[str, int] = {}

    @property
    def name(self) -> str:
        return "noisy-oracle"

    def _rng(self, doc_id: str, call: int) -> np.random.Generator:
        key = (zlib.crc32(doc_id.encode("utf-8")), call)
        return np.random.default_rng(np.random.SeedSequence(self._seed, spawn_key=key))

    def _perturbed(self, doc: Document, out: BoundaryOutput, edits: int, rng) -> BoundaryOutput:
        for _ in range(edits):
            out = random_perturbation(doc, out, self._label_set, rng)
        return out

    def _anchor(self, doc: Document) -> BoundaryOutput:
        if doc.id not in self._anchors:
            gold = self._golds.get(doc.id)
            if gold is None:
                raise PolicyError(f"No gold segmentation for document {doc.id!r}")
            rng = self._rng(doc.id, 0)
            start = self._perturbed(doc, make_targets(doc, gold, self._pattern, rng), self._noise, rng)
            score = Candidate.build(doc, gold, start, self._label_set).reward
            self._anchors[doc.id] = (start, score)
            logger.debug("%s: initial anchor reward %.4f", doc.id, score)
        return self._anchors[doc.id][0]

    def generate(self, doc: Document, m: int, temperature: float) -> list[str]:
        anchor = self._anchor(doc)
        call = self._calls.get(doc.id, 0) + 1
        self._calls[doc.id] = call
        rng = self._rng(doc.id, call)
        edit_prob = min(1.0, temperature / 2)
        texts = []
        for _ in range(m):
            edits = int(rng.binomial(self._noise, edit_prob))
            texts.append(serialize(self._perturbed(doc, anchor, edits, rng)) + self._end_marker)
        return texts

    def update(self, feedback: list[Feedback]) -> None:
        for fb in feedback:
            current = self._anchors.get(fb.doc_id)
            if fb.output is None or current is None:
                continue
            if fb.reward > current[1]:
                self._anchors[fb.doc_id] = (fb.output, fb.reward)
