"""Base policy interface and common types.

A policy stands in for the model being trained: the rollout loop asks it
for m raw output texts per document and reports back the best candidate
it generated. Implementations only need to be callable from one logical
context at a time.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass

from boundseg.boundary.patterns import BoundaryOutput
from boundseg.core.errors import InputError
from boundseg.core.types import Document


class PolicyError(InputError):
    """Raised when a policy cannot produce outputs for a document."""


@dataclass(frozen=True)
class Feedback:
    """The best generated candidate of one document's group in a rollout step."""

    doc_id: str
    output: BoundaryOutput | None
    reward: float


class Policy(ABC):
    """Abstract base class that all candidate-generation policies implement."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Registry name of this policy (e.g. 'noisy-oracle')."""
        ...

    @abstractmethod
    def generate(self, doc: Document, m: int, temperature: float) -> list[str]:
        """Return exactly m raw output texts for doc.

        Raises PolicyError if the policy has nothing for this document.
        """
        ...

    def update(self, feedback: list[Feedback]) -> None:
        """Learn from the best candidates of a step. No-op by default."""
        return None
