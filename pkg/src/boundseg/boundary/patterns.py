"""Output patterns and the boundary output types a policy produces."""

import enum
from dataclasses import dataclass

from boundseg.core.errors import InputError


class MalformedOutput(InputError):
    """Raised when a boundary output does not conform to its pattern."""


class OutputPattern(enum.Enum):
    """Which boundary sequences each item carries."""

    START = "start"
    END = "end"
    START_END = "startend"

    @property
    def has_start(self) -> bool:
        return self is not OutputPattern.END

    @property
    def has_end(self) -> bool:
        return self is not OutputPattern.START

    @property
    def field_count(self) -> int:
        """Tab-separated fields per serialized line, label included."""
        return 3 if self is OutputPattern.START_END else 2


@dataclass(frozen=True)
class BoundaryItem:
    """One generated segment: its label and boundary token sequence(s)."""

    label: str
    start_seq: str | None = None
    end_seq: str | None = None

    def conforms(self, pattern: OutputPattern) -> bool:
        if (self.start_seq is not None) != pattern.has_start:
            return False
        if (self.end_seq is not None) != pattern.has_end:
            return False
        return all(s.strip() for s in (self.start_seq, self.end_seq) if s is not None)


@dataclass(frozen=True)
class BoundaryOutput:
    """A pattern-tagged, non-empty sequence of boundary items."""

    pattern: OutputPattern
    items: tuple[BoundaryItem, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise MalformedOutput("A boundary output needs at least one item")
        for i, item in enumerate(self.items):
            if not item.conforms(self.pattern):
                raise MalformedOutput(
                    f"Item {i} does not conform to the {self.pattern.value} pattern: {item}"
                )

    def __len__(self) -> int:
        return len(self.items)

    def replace_item(self, index: int, item: BoundaryItem) -> "BoundaryOutput":
        items = list(self.items)
        items[index] = item
        return BoundaryOutput(self.pattern, tuple(items))
