"""Policy that returns fixed outputs, for tests and debugging."""

import json
from collections.abc import Mapping, Sequence
from pathlib import Path

from boundseg.core.types import Document
from boundseg.rollout.policies.base import Policy, PolicyError


class StaticPolicy(Policy):
    """Returns the same raw outputs for a document every time."""

    def __init__(self, outputs: Mapping[str, Sequence[str]]) -> None:
        self._outputs = {doc_id: list(texts) for doc_id, texts in outputs.items()}

    @classmethod
    def from_file(cls, path: Path) -> "StaticPolicy":
        """Read ``{"id": ..., "outputs": [...]}`` lines, one per document."""
        outputs: dict[str, list[str]] = {}
        try:
            with open(path, encoding="utf-8") as f:
                for lineno, line in enumerate(f, start=1):
                    if not line.strip():
                        continue
                    data = json.loads(line)
                    texts = data.get("outputs")
                    if "id" not in data or not isinstance(texts, list):
                        raise PolicyError(f"{path}:{lineno}: expected 'id' and 'outputs'")
                    doc_id = str(data["id"])
                    if doc_id in outputs:
                        raise PolicyError(f"{path}:{lineno}: duplicate document id {doc_id!r}")
                    outputs[doc_id] = [str(t) for t in texts]
        except OSError as e:
            raise PolicyError(f"Cannot read static outputs {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise PolicyError(f"{path}: invalid JSON: {e}") from e
        return cls(outputs)

    @property
    def name(self) -> str:
        return "static"

    def generate(self, doc: Document, m: int, temperature: float) -> list[str]:
        texts = self._outputs.get(doc.id)
        if texts is None:
            raise PolicyError(f"No static outputs for document {doc.id!r}")
        if len(texts) != m:
            raise PolicyError(f"{doc.id}: {len(texts)} static outputs, expected {m}")
        return list(texts)
