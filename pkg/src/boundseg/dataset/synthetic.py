"""Synthetic structured-document corpus.

Documents are sequences of labeled segments separated by blank lines. Each
segment is one structural element: plain prose, a fenced code block, a
nested key-value (JSON) block, or a template placeholder such as
``{{user_input_2}}``. Placeholders are always a segment of their own.

Every generated document is checked against target synthesis for all
output patterns and regenerated from a fresh substream if any check fails.
"""

import dataclasses
import json
import logging
import tomllib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from boundseg.boundary.patterns import OutputPattern
from boundseg.boundary.reconstruct import reconstruct
from boundseg.boundary.targets import TargetSynthesisFailure, make_targets
from boundseg.core.errors import InputError
from boundseg.core.types import (
    DEFAULT_LABELS,
    Document,
    InvalidLabelSet,
    LabelSet,
    Segment,
    Segmentation,
    Span,
    require_valid,
)
from boundseg.dataset.io import DatasetRecord

logger = logging.getLogger(__name__)

_SEPARATOR = "\n\n"
_MIN_SEGMENT_WORDS = 4
_MAX_ATTEMPTS = 20

PLACEHOLDER = "placeholder"
CODE = "code"
NESTED = "nested"
PROSE = "prose"
ELEMENT_KINDS = (PLACEHOLDER, CODE, NESTED, PROSE)

_VOCABULARY = (
    "account", "active", "address", "agent", "amount", "answer", "archive",
    "audit", "balance", "batch", "billing", "branch", "budget", "buffer",
    "cache", "calendar", "campaign", "channel", "checkout", "client", "cluster",
    "column", "comment", "contract", "counter", "coupon", "customer", "dashboard",
    "deadline", "delivery", "deposit", "device", "digest", "discount", "domain",
    "draft", "employee", "engine", "entry", "estimate", "event", "expense",
    "feature", "feedback", "field", "filter", "forecast", "format", "gateway",
    "grade", "handler", "header", "history", "inbox", "incident", "index",
    "invoice", "journal", "kernel", "ledger", "limit", "listing", "locale",
    "manager", "margin", "member", "message", "metric", "module", "monthly",
    "network", "notice", "number", "offer", "order", "owner", "package",
    "partner", "payment", "period", "policy", "portal", "priority", "profile",
    "project", "quarter", "query", "quota", "ranking", "rate", "receipt",
    "record", "region", "release", "report", "request", "resource", "review",
    "route", "sample", "schedule", "schema", "score", "section", "segment",
    "server", "session", "setting", "shipment", "signal", "source", "status",
    "storage", "summary", "supplier", "survey", "table", "target", "task",
    "template", "ticket", "timeline", "token", "total", "tracker", "update",
    "usage", "user", "value", "vendor", "version", "voucher", "warning",
    "weekly", "window", "workflow", "yearly", "zone",
)
_CONNECTIVES = ("the", "a", "each", "every", "this", "our", "with", "for", "and", "from", "to", "of")
_LANGUAGES = ("python", "javascript", "sql", "bash")


class SpecInfeasible(InputError):
    """Raised when a corpus spec cannot produce any valid document."""


@dataclass(frozen=True)
class CorpusSpec:
    """Shape of a synthetic corpus. Ranges are inclusive."""

    n_docs: int = 10
    min_words: int = 40
    max_words: int = 200
    min_segments: int = 2
    max_segments: int = 8
    labels: tuple[str, ...] = DEFAULT_LABELS
    placeholder_weight: float = 1.0
    code_weight: float = 1.0
    nested_weight: float = 1.0
    prose_weight: float = 3.0
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        if self.n_docs < 1:
            raise SpecInfeasible(f"n_docs must be at least 1, got {self.n_docs}")
        if not 1 <= self.min_segments <= self.max_segments:
            raise SpecInfeasible(
                f"Segment range [{self.min_segments}, {self.max_segments}] is empty or below 1"
            )
        if not 1 <= self.min_words <= self.max_words:
            raise SpecInfeasible(f"Word range [{self.min_words}, {self.max_words}] is empty or below 1")
        weights = self.weights
        if any(w < 0 for w in weights) or not any(w > 0 for w in weights):
            raise SpecInfeasible(f"Element weights must be non-negative and not all zero: {weights}")
        if self.seed < 0:
            raise SpecInfeasible(f"seed must be non-negative, got {self.seed}")
        try:
            LabelSet(self.labels)
        except InvalidLabelSet as e:
            raise SpecInfeasible(str(e)) from e

    @property
    def weights(self) -> tuple[float, ...]:
        """Mix weights in ELEMENT_KINDS order."""
        return (self.placeholder_weight, self.code_weight, self.nested_weight, self.prose_weight)

    @property
    def label_set(self) -> LabelSet:
        return LabelSet(self.labels)

    @classmethod
    def from_mapping(cls, data: dict) -> "CorpusSpec":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise SpecInfeasible(f"Unknown corpus spec keys: {unknown}")
        try:
            return cls(**data)
        except TypeError as e:
            raise SpecInfeasible(f"Bad corpus spec: {e}") from e

    @classmethod
    def from_file(cls, path: Path) -> "CorpusSpec":
        """Read a flat TOML file of CorpusSpec fields."""
        try:
            with open(path, "rb") as f:
                data = tomllib.load(f)
        except (OSError, tomllib.TOMLDecodeError) as e:
            raise SpecInfeasible(f"Cannot read corpus spec {path}: {e}") from e
        return cls.from_mapping(data)


def _word(rng: np.random.Generator) -> str:
    return _VOCABULARY[int(rng.integers(len(_VOCABULARY)))]


def _prose(rng: np.random.Generator, budget: int) -> str:
    sentences = []
    remaining = budget
    while remaining > 0:
        length = min(remaining, int(rng.integers(5, 13)))
        tokens = [
            _word(rng) if rng.random() < 0.7 else _CONNECTIVES[int(rng.integers(len(_CONNECTIVES)))]
            for _ in range(length)
        ]
        tokens[0] = tokens[0].capitalize()
        sentences.append(" ".join(tokens) + ".")
        remaining -= length
    return " ".join(sentences)


def _code(rng: np.random.Generator, budget: int) -> str:
    language = _LANGUAGES[int(rng.integers(len(_LANGUAGES)))]
    lines = [f"```{language}"]
    remaining = budget - 2
    while remaining > 0:
        name = f"{_word(rng)}_{int(rng.integers(100))}"
        lines.append(f"{name} = {_word(rng)}({_word(rng)}, {int(rng.integers(1000))})")
        remaining -= 5
    lines.append("```")
    return "\n".join(lines)


def _nested(rng: np.random.Generator, budget: int) -> str:
    def value(depth: int):
        roll = rng.random()
        if depth < 2 and roll < 0.3:
            return {f"{_word(rng)}_{i}": value(depth + 1) for i in range(int(rng.integers(1, 4)))}
        if roll < 0.6:
            return int(rng.integers(10000))
        return f"{_word(rng)} {_word(rng)}"

    block: dict = {}
    while True:
        block[f"{_word(rng)}_{len(block)}"] = value(0)
        text = json.dumps(block, indent=2)
        if len(text.split()) >= budget:
            return text


def _render(kind: str, rng: np.random.Generator, budget: int, ordinal: int) -> str:
    if kind == PLACEHOLDER:
        return f"{{{{{_word(rng)}_{ordinal}}}}}"
    if kind == CODE:
        return _code(rng, budget)
    if kind == NESTED:
        return _nested(rng, budget)
    return _prose(rng, budget)


def _kinds(spec: CorpusSpec, rng: np.random.Generator, n: int) -> list[str]:
    """Element kind per segment; every weighted kind appears when n allows."""
    weights = np.array(spec.weights, dtype=float)
    present = [k for k, w in zip(ELEMENT_KINDS, weights) if w > 0]
    required = [present[i] for i in rng.permutation(len(present))][:n]
    extra = rng.choice(len(ELEMENT_KINDS), size=n - len(required), p=weights / weights.sum())
    kinds = required + [ELEMENT_KINDS[int(i)] for i in extra]
    return [kinds[int(i)] for i in rng.permutation(n)]


def _labels(label_set: LabelSet, rng: np.random.Generator, n: int) -> list[str]:
    labels = [label_set.names[int(rng.integers(len(label_set)))]]
    while len(labels) < n:
        options = label_set.alternatives({labels[-1]})
        labels.append(options[int(rng.integers(len(options)))])
    return labels


def _document(spec: CorpusSpec, doc_id: str, rng: np.random.Generator) -> DatasetRecord | None:
    label_set = spec.label_set
    n = int(rng.integers(spec.min_segments, spec.max_segments + 1))
    kinds = _kinds(spec, rng, n)
    labels = _labels(label_set, rng, n)
    total = int(rng.integers(spec.min_words, spec.max_words + 1))

    n_bodies = sum(k != PLACEHOLDER for k in kinds)
    budgets = []
    if n_bodies:
        spare = max(0, total - n_bodies * _MIN_SEGMENT_WORDS)
        budgets = rng.multinomial(spare, [1 / n_bodies] * n_bodies)
    texts = []
    body_index = 0
    for ordinal, kind in enumerate(kinds):
        budget = 1
        if kind != PLACEHOLDER:
            budget = _MIN_SEGMENT_WORDS + int(budgets[body_index])
            body_index += 1
        texts.append(_render(kind, rng, budget, ordinal))

    if len({t.strip() for t in texts}) != len(texts):
        return None

    segments = []
    offset = 0
    for i, (label, body) in enumerate(zip(labels, texts)):
        piece = body if i == n - 1 else body + _SEPARATOR
        segments.append(Segment(label, Span(offset, offset + len(piece))))
        offset += len(piece)
    text = "".join(b if i == n - 1 else b + _SEPARATOR for i, b in enumerate(texts))
    record = DatasetRecord(doc_id, text, Segmentation(tuple(segments)))
    return record if _round_trips(record, rng) else None


def _round_trips(record: DatasetRecord, rng: np.random.Generator) -> bool:
    doc = record.document
    for pattern in OutputPattern:
        try:
            out = make_targets(doc, record.segmentation, pattern, rng)
        except TargetSynthesisFailure as e:
            logger.debug("%s: %s", record.id, e)
            return False
        if reconstruct(doc, out).segments != record.segmentation:
            return False
    return True


def generate_synthetic_corpus(spec: CorpusSpec) -> list[DatasetRecord]:
    """Generate spec.n_docs valid, lossless documents.

    Document i is drawn from the substream (seed, i, attempt), so a corpus
    depends only on the spec. Raises SpecInfeasible when a document fails
    its checks on every attempt.
    """
    records = []
    for i in range(spec.n_docs):
        doc_id = f"doc-{i:05d}"
        for attempt in range(_MAX_ATTEMPTS):
            rng = np.random.default_rng(np.random.SeedSequence(spec.seed, spawn_key=(i, attempt)))
            record = _document(spec, doc_id, rng)
            if record is not None:
                require_valid(record.document, record.segmentation, spec.label_set)
                records.append(record)
                break
            logger.debug("%s: attempt %d rejected, regenerating", doc_id, attempt)
        else:
            raise SpecInfeasible(f"{doc_id}: no valid document after {_MAX_ATTEMPTS} attempts")
    logger.info("Generated %d synthetic documents", len(records))
    return records
