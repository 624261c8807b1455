"""Line-oriented wire format for boundary outputs.

One item per line: ``label<TAB>start_seq`` (start pattern),
``label<TAB>end_seq`` (end pattern) or ``label<TAB>start_seq<TAB>end_seq``
(start+end pattern). Backslash, newline, carriage return and tab inside a
sequence are written as ``\\\\``, ``\\n``, ``\\r`` and ``\\t``. Whitespace at
either edge of a sequence is written as ``\\s`` (space) or ``\\uXXXX`` so it
survives the field trimming done by the parser.
"""

import logging
import re
from dataclasses import dataclass

from boundseg.boundary.patterns import BoundaryItem, BoundaryOutput, OutputPattern
from boundseg.core.errors import InputError
from boundseg.core.types import LabelSet

logger = logging.getLogger(__name__)

_ESCAPED = re.compile(r"\\(u[0-9a-fA-F]{4}|.)", re.DOTALL)
_UNESCAPE = {"n": "\n", "r": "\r", "t": "\t", "s": " ", "\\": "\\"}


class MalformedLine(InputError):
    """Raised when a line has the wrong number of fields or an empty field."""


class UnknownLabel(InputError):
    """Raised when a line carries a label outside the label set."""


class EmptyOutput(InputError):
    """Raised when a text contains no valid boundary lines."""


@dataclass(frozen=True)
class ParseResult:
    """Outcome of a lenient parse: the surviving output plus per-line diagnostics."""

    output: BoundaryOutput | None
    diagnostics: tuple[str, ...] = ()


def _edge_escape(ch: str) -> str:
    return "\\s" if ch == " " else f"\\u{ord(ch):04x}"


def escape_field(seq: str) -> str:
    body = (
        seq.replace("\\", "\\\\")
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )
    core = body.strip()
    if not core:
        return "".join(_edge_escape(ch) for ch in body)
    lead = body[: len(body) - len(body.lstrip())]
    trail = body[len(body.rstrip()):]
    return (
        "".join(_edge_escape(ch) for ch in lead)
        + core
        + "".join(_edge_escape(ch) for ch in trail)
    )


def _unescape_one(m: re.Match[str]) -> str:
    code = m.group(1)
    if len(code) == 5:
        return chr(int(code[1:], 16))
    return _UNESCAPE.get(code, m.group(0))


def _unescape(field: str) -> str:
    return _ESCAPED.sub(_unescape_one, field)


def serialize(out: BoundaryOutput) -> str:
    """Render a boundary output as tab-separated lines."""
    lines = []
    for item in out.items:
        fields = [item.label]
        fields.extend(escape_field(s) for s in (item.start_seq, item.end_seq) if s is not None)
        lines.append("\t".join(fields))
    return "\n".join(lines)


def _parse_line(
    line: str, lineno: int, label_set: LabelSet, pattern: OutputPattern
) -> BoundaryItem:
    fields = line.split("\t")
    if len(fields) != pattern.field_count:
        raise MalformedLine(
            f"line {lineno}: expected {pattern.field_count} fields, got {len(fields)}"
        )
    label = fields[0].strip()
    if label not in label_set:
        raise UnknownLabel(f"line {lineno}: unknown label {label!r}")
    seqs = [_unescape(f.strip()) for f in fields[1:]]
    if not all(s.strip() for s in seqs):
        raise MalformedLine(f"line {lineno}: empty boundary sequence")
    if pattern is OutputPattern.START:
        return BoundaryItem(label, start_seq=seqs[0])
    if pattern is OutputPattern.END:
        return BoundaryItem(label, end_seq=seqs[0])
    return BoundaryItem(label, start_seq=seqs[0], end_seq=seqs[1])


def parse(text: str, label_set: LabelSet, pattern: OutputPattern) -> BoundaryOutput:
    """Parse serialized boundary lines, failing on the first bad line.

    Blank lines are ignored.
    """
    items = [
        _parse_line(line, lineno, label_set, pattern)
        for lineno, line in enumerate(text.split("\n"), start=1)
        if line.strip()
    ]
    if not items:
        raise EmptyOutput("No boundary lines found")
    return BoundaryOutput(pattern, tuple(items))


def parse_lenient(text: str, label_set: LabelSet, pattern: OutputPattern) -> ParseResult:
    """Parse serialized boundary lines, dropping bad lines into diagnostics."""
    items: list[BoundaryItem] = []
    diagnostics: list[str] = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            items.append(_parse_line(line, lineno, label_set, pattern))
        except (MalformedLine, UnknownLabel) as e:
            logger.debug("Dropping line: %s", e)
            diagnostics.append(str(e))
    if not items:
        diagnostics.append("no valid boundary lines")
        return ParseResult(None, tuple(diagnostics))
    return ParseResult(BoundaryOutput(pattern, tuple(items)), tuple(diagnostics))


def truncate_at_end_marker(raw: str, marker: str) -> str:
    """Cut raw at the first occurrence of marker; unchanged if absent."""
    if not marker:
        raise ValueError("End marker must be non-empty")
    pos = raw.find(marker)
    return raw if pos == -1 else raw[:pos]
