"""JSONL dataset format.

One record per line: ``{"id": ..., "text": ..., "segments": [{"label",
"start", "end"}, ...]}`` with character offsets. Files written here start
with a ``{"offset_unit": "char"}`` header line; files without it are read
as character offsets too.
"""

import contextlib
import json
import logging
import os
import tempfile
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path

from boundseg.core.errors import InputError
from boundseg.core.types import (
    Document,
    LabelSet,
    Segment,
    Segmentation,
    Span,
    Violation,
    validate_segmentation,
)

logger = logging.getLogger(__name__)

_OFFSET_UNIT = "char"


class IoFailure(InputError):
    """Raised when a dataset file cannot be read or written."""


class SchemaViolation(InputError):
    """Raised when a dataset line is missing a field or has the wrong type."""


class InvalidGold(InputError):
    """Raised when a record's segmentation breaks a segmentation invariant."""


@dataclass(frozen=True)
class DatasetRecord:
    """A document with its annotated segmentation."""

    id: str
    text: str
    segmentation: Segmentation

    @property
    def document(self) -> Document:
        return Document(self.id, self.text)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "segments": [
                {"label": s.label, "start": s.start, "end": s.end} for s in self.segmentation
            ],
        }


def _record_from_json(data: object, where: str) -> DatasetRecord:
    if not isinstance(data, dict):
        raise SchemaViolation(f"{where}: expected a JSON object")
    for key in ("id", "text", "segments"):
        if key not in data:
            raise SchemaViolation(f"{where}: missing field {key!r}")
    if not isinstance(data["id"], str) or not isinstance(data["text"], str):
        raise SchemaViolation(f"{where}: 'id' and 'text' must be strings")
    if not isinstance(data["segments"], list):
        raise SchemaViolation(f"{where}: 'segments' must be a list")
    segments = []
    for k, seg in enumerate(data["segments"]):
        if not isinstance(seg, dict) or any(f not in seg for f in ("label", "start", "end")):
            raise SchemaViolation(f"{where}: segment {k} needs 'label', 'start' and 'end'")
        if not isinstance(seg["start"], int) or not isinstance(seg["end"], int):
            raise SchemaViolation(f"{where}: segment {k} offsets must be integers")
        try:
            segments.append(Segment(str(seg["label"]), Span(seg["start"], seg["end"])))
        except InputError as e:
            raise InvalidGold(f"{where}: segment {k}: {e}") from e
    return DatasetRecord(data["id"], data["text"], Segmentation(tuple(segments)))


def _violations(
    record: DatasetRecord, where: str, label_set: LabelSet | None
) -> tuple[list[Violation], bool]:
    try:
        doc = record.document
    except InputError as e:
        raise InvalidGold(f"{where}: {e}") from e
    report = validate_segmentation(doc, record.segmentation, label_set)
    return list(report.violations), report.lossless


def _read(path: Path) -> list[tuple[str, DatasetRecord]]:
    """Parse every record line, paired with its "path:line" location."""
    records = []
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as e:
        raise IoFailure(f"Cannot read {path}: {e}") from e
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        where = f"{path}:{lineno}"
        try:
            data = json.loads(line)
        except json.JSONDecodeError as e:
            raise SchemaViolation(f"{where}: invalid JSON: {e}") from e
        if isinstance(data, dict) and "offset_unit" in data and "id" not in data:
            if data["offset_unit"] != _OFFSET_UNIT:
                raise SchemaViolation(f"{where}: unsupported offset unit {data['offset_unit']!r}")
            continue
        records.append((where, _record_from_json(data, where)))
    logger.info("Loaded %d records from %s", len(records), path)
    return records


def load_dataset(path: Path, label_set: LabelSet | None = None) -> list[DatasetRecord]:
    """Read and validate a gold dataset; every segmentation must be valid and lossless."""
    records = []
    for where, record in _read(Path(path)):
        violations, lossless = _violations(record, where, label_set)
        if violations:
            raise InvalidGold(f"{where}: " + "; ".join(v.message for v in violations))
        if not lossless:
            raise InvalidGold(f"{where}: segments do not tile the text")
        records.append(record)
    return records


def load_predictions(path: Path) -> list[DatasetRecord]:
    """Read predicted segmentations in the dataset format.

    Predictions may leave gaps and repeat adjacent labels; spans must still
    be in bounds, ordered and disjoint.
    """
    records = []
    for where, record in _read(Path(path)):
        violations, _ = _violations(record, where, None)
        bad = [v for v in violations if v.kind != "adjacent_labels"]
        if bad:
            raise InvalidGold(f"{where}: " + "; ".join(v.message for v in bad))
        records.append(record)
    return records


def dumps_dataset(records: Iterable[DatasetRecord]) -> str:
    """Render records as JSONL text, header line first."""
    lines = [json.dumps({"offset_unit": _OFFSET_UNIT})]
    lines.extend(json.dumps(r.to_json(), ensure_ascii=False) for r in records)
    return "\n".join(lines) + "\n"


def save_dataset(records: Iterable[DatasetRecord], path: Path) -> None:
    """Write records as JSONL, atomically."""
    records = list(records)
    write_atomic(Path(path), dumps_dataset(records))
    logger.info("Wrote %d records to %s", len(records), path)


def write_atomic(path: Path, content: str) -> None:
    """Write content to path through a temporary file so readers never see partial output."""
    path = Path(path)
    tmp = None
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(content)
        os.replace(tmp, path)
    except OSError as e:
        if tmp is not None:
            with contextlib.suppress(OSError):
                os.unlink(tmp)
        raise IoFailure(f"Cannot write {path}: {e}") from e


def load_outputs(path: Path) -> dict[str, str]:
    """Read raw boundary outputs, one ``{"id": ..., "output": ...}`` object per line."""
    outputs: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as e:
        raise IoFailure(f"Cannot read {path}: {e}") from e
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        where = f"{path}:{lineno}"
        try:
            data = json.loads(line)
        except json.JSONDecodeError as e:
            raise SchemaViolation(f"{where}: invalid JSON: {e}") from e
        if not isinstance(data, dict) or not isinstance(data.get("id"), str) \
                or not isinstance(data.get("output"), str):
            raise SchemaViolation(f"{where}: expected string fields 'id' and 'output'")
        if data["id"] in outputs:
            raise SchemaViolation(f"{where}: duplicate id {data['id']!r}")
        outputs[data["id"]] = data["output"]
    return outputs
