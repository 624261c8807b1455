"""Policy that replays recorded raw outputs from a JSONL file.

Each line is ``{"id": ..., "outputs": [...]}``. A document may appear on
several lines; successive calls for it cycle through those groups in file
order.
"""

import json
from pathlib import Path

from boundseg.core.types import Document
from boundseg.rollout.policies.base import Policy, PolicyError


class ReplayPolicy(Policy):
    """Replays recorded rollout groups."""

    def __init__(self, path: Path) -> None:
        self._groups: dict[str, list[list[str]]] = {}
        self._calls: dict[str, int] = {}
        try:
            with open(path, encoding="utf-8") as f:
                for lineno, line in enumerate(f, start=1):
                    if not line.strip():
                        continue
                    data = json.loads(line)
                    outputs = data.get("outputs")
                    if "id" not in data or not isinstance(outputs, list):
                        raise PolicyError(f"{path}:{lineno}: expected 'id' and 'outputs'")
                    self._groups.setdefault(str(data["id"]), []).append([str(o) for o in outputs])
        except OSError as e:
            raise PolicyError(f"Cannot read replay file {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise PolicyError(f"{path}: invalid JSON: {e}") from e

    @property
    def name(self) -> str:
        return "replay"

    def generate(self, doc: Document, m: int, temperature: float) -> list[str]:
        groups = self._groups.get(doc.id)
        if not groups:
            raise PolicyError(f"No recorded outputs for document {doc.id!r}")
        call = self._calls.get(doc.id, 0)
        self._calls[doc.id] = call + 1
        outputs = groups[call % len(groups)]
        if len(outputs) != m:
            raise PolicyError(f"{doc.id}: recorded group has {len(outputs)} outputs, expected {m}")
        return list(outputs)
