"""Document, label, span and segmentation types.

All types are frozen dataclasses. Offsets are code-point offsets into
Document.text, half-open [start, end). Segmentation itself does not enforce
the ordering and label-alternation constraints: reconstructed predictions
may break them and are scored rather than rejected. Use
validate_segmentation (or require_valid) where a well-formed gold is needed.
"""

from dataclasses import dataclass, field

from boundseg.core.errors import InputError

DEFAULT_LABELS: tuple[str, ...] = (
    "instruction",
    "example",
    "context",
    "question",
    "output format",
)


class OutOfBounds(InputError):
    """Raised when a span does not fit inside its document."""


class InvalidDocument(InputError):
    """Raised when a document has an empty id or empty text."""


class InvalidLabelSet(InputError):
    """Raised when a label set has fewer than two labels, duplicates or blanks."""


class InvalidSegmentation(InputError):
    """Raised when a segmentation breaks one of its invariants."""


@dataclass(frozen=True)
class Document:
    """A structured input text identified by id."""

    id: str
    text: str

    def __post_init__(self) -> None:
        if not self.id:
            raise InvalidDocument("Document id must be non-empty")
        if not self.text:
            raise InvalidDocument(f"Document {self.id!r} has empty text")

    def __len__(self) -> int:
        return len(self.text)


@dataclass(frozen=True)
class LabelSet:
    """Ordered set of segment labels."""

    names: tuple[str, ...] = DEFAULT_LABELS

    def __post_init__(self) -> None:
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(names) < 2:
            raise InvalidLabelSet("A label set needs at least two labels")
        if any(not n or n != n.strip() or "\t" in n or "\n" in n for n in names):
            raise InvalidLabelSet(f"Labels must be non-empty single-line tokens: {names}")
        if len(set(names)) != len(names):
            raise InvalidLabelSet(f"Duplicate labels in {names}")

    def __contains__(self, label: object) -> bool:
        return label in self.names

    def __iter__(self):
        return iter(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def index(self, label: str) -> int:
        return self.names.index(label)

    def alternatives(self, exclude: set[str]) -> list[str]:
        """Labels not in exclude, in label-set order."""
        return [n for n in self.names if n not in exclude]


@dataclass(frozen=True, order=True)
class Span:
    """Half-open character range [start, end); never empty."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end <= self.start:
            raise OutOfBounds(f"Invalid span [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    def overlap(self, other: "Span") -> int:
        """Number of characters shared with other."""
        return max(0, min(self.end, other.end) - max(self.start, other.start))

    def within(self, length: int) -> bool:
        return self.end <= length


@dataclass(frozen=True)
class Segment:
    """A labeled span."""

    label: str
    span: Span

    @property
    def start(self) -> int:
        return self.span.start

    @property
    def end(self) -> int:
        return self.span.end


@dataclass(frozen=True)
class Segmentation:
    """Ordered sequence of labeled segments over one document."""

    segments: tuple[Segment, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "segments", tuple(self.segments))

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def __getitem__(self, index: int) -> Segment:
        return self.segments[index]

    @property
    def covered(self) -> int:
        """Total number of characters covered by segments."""
        return sum(len(s.span) for s in self.segments)

    def is_lossless(self, length: int) -> bool:
        """True iff the spans tile [0, length) in order with no gaps."""
        cursor = 0
        for seg in self.segments:
            if seg.start != cursor:
                return False
            cursor = seg.end
        return cursor == length and length > 0

    @classmethod
    def from_tuples(cls, items: list[tuple[str, int, int]]) -> "Segmentation":
        """Build from (label, start, end) triples."""
        return cls(tuple(Segment(label, Span(start, end)) for label, start, end in items))

    def to_tuples(self) -> list[tuple[str, int, int]]:
        return [(s.label, s.start, s.end) for s in self.segments]


@dataclass(frozen=True)
class Violation:
    """One broken segmentation constraint."""

    index: int
    kind: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validate_segmentation."""

    violations: tuple[Violation, ...]
    lossless: bool

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_segmentation(
    doc: Document, seg: Segmentation, label_set: LabelSet | None = None
) -> ValidationReport:
    """Check every Segmentation invariant against doc.

    Violations are reported, never raised. Kinds: "out_of_bounds",
    "overlap", "adjacent_labels", "unknown_label".
    """
    violations: list[Violation] = []
    length = len(doc)
    prev: Segment | None = None
    for i, s in enumerate(seg.segments):
        if not s.span.within(length):
            violations.append(Violation(
                i, "out_of_bounds",
                f"span [{s.start}, {s.end}) exceeds document length {length} at index {i}",
            ))
        if label_set is not None and s.label not in label_set:
            violations.append(Violation(i, "unknown_label", f"unknown label {s.label!r} at index {i}"))
        if prev is not None:
            if s.start < prev.end:
                violations.append(Violation(i, "overlap", f"overlap at index {i}"))
            if s.label == prev.label:
                violations.append(Violation(i, "adjacent_labels", f"adjacent labels equal at index {i}"))
        prev = s
    return ValidationReport(violations=tuple(violations), lossless=seg.is_lossless(length))


def require_valid(
    doc: Document,
    seg: Segmentation,
    label_set: LabelSet | None = None,
    lossless: bool = True,
) -> None:
    """Raise InvalidSegmentation unless seg is valid (and lossless, if asked)."""
    report = validate_segmentation(doc, seg, label_set)
    if not report.ok:
        raise InvalidSegmentation("; ".join(v.message for v in report.violations))
    if lossless and not report.lossless:
        raise InvalidSegmentation(f"Segmentation of {doc.id!r} does not tile the document")


def segment_text(doc: Document, seg: Segment) -> str:
    """Return the text covered by seg."""
    if not seg.span.within(len(doc)):
        raise OutOfBounds(
            f"Span [{seg.start}, {seg.end}) exceeds document {doc.id!r} of length {len(doc)}"
        )
    return doc.text[seg.start:seg.end]
