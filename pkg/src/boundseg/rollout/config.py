"""Rollout configuration.

Defaults: groups of 4 candidates sampled at temperature 1.2, batches of
6 documents, at most 2 intermediate replacements per batch.
"""

import dataclasses
import enum
import tomllib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from boundseg.boundary.patterns import OutputPattern
from boundseg.core.errors import InputError

_DEFAULT_M = 4
_DEFAULT_TEMPERATURE = 1.2
_DEFAULT_K = 2
_DEFAULT_BATCH_SIZE = 6
_DEFAULT_END_MARKER = "<eos>"


class InvalidConfig(InputError):
    """Raised when a rollout configuration is out of range or unreadable."""


class MediumMode(enum.Enum):
    """How the candidate to perturb is chosen from a group."""

    MEDIUM = "medium"
    RANDOM = "random"


def _coerce(key: str, value: object, current: object) -> object:
    """value converted to the type of current, the field's present value."""
    if isinstance(current, enum.Enum):
        return type(current)(value)
    if isinstance(current, bool):
        if not isinstance(value, bool):
            raise InvalidConfig(f"{key} must be true or false, got {value!r}")
        return value
    if isinstance(current, int):
        integral = isinstance(value, int) or (isinstance(value, float) and value.is_integer())
        if isinstance(value, bool) or not integral:
            raise InvalidConfig(f"{key} must be an integer, got {value!r}")
        return int(value)
    if isinstance(current, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InvalidConfig(f"{key} must be a number, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise InvalidConfig(f"{key} must be a string, got {value!r}")
    return value


@dataclass(frozen=True)
class RolloutConfig:
    """Knobs of one rollout run."""

    m: int = _DEFAULT_M
    temperature: float = _DEFAULT_TEMPERATURE
    k: int = _DEFAULT_K
    batch_size: int = _DEFAULT_BATCH_SIZE
    enable_intermediate: bool = True
    perturb_steps: int = 1
    medium_mode: MediumMode = MediumMode.MEDIUM
    end_marker: str = _DEFAULT_END_MARKER
    pattern: OutputPattern = OutputPattern.START
    seed: int = 0
    select_top_k: bool = True
    workers: int = 1
    gold_injection: bool = False

    def __post_init__(self) -> None:
        if self.m < 2:
            raise InvalidConfig(f"m must be at least 2, got {self.m}")
        if self.k < 0:
            raise InvalidConfig(f"k must be non-negative, got {self.k}")
        if self.batch_size < 1:
            raise InvalidConfig(f"batch_size must be at least 1, got {self.batch_size}")
        if self.perturb_steps not in (1, 2):
            raise InvalidConfig(f"perturb_steps must be 1 or 2, got {self.perturb_steps}")
        if self.temperature <= 0:
            raise InvalidConfig(f"temperature must be positive, got {self.temperature}")
        if not self.end_marker:
            raise InvalidConfig("end_marker must be non-empty")
        if self.workers < 1:
            raise InvalidConfig(f"workers must be at least 1, got {self.workers}")
        if self.seed < 0:
            raise InvalidConfig(f"seed must be non-negative, got {self.seed}")

    def substream(self, *key: int) -> np.random.Generator:
        """Independent generator for one (step, position, purpose) key."""
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=key))

    @classmethod
    def from_mapping(cls, data: dict, base: "RolloutConfig | None" = None) -> "RolloutConfig":
        """Build from flat key/value pairs, on top of base (or the defaults)."""
        base = base or cls()
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidConfig(f"Unknown rollout config keys: {unknown}")
        values = {}
        try:
            for key, value in data.items():
                values[key] = _coerce(key, value, getattr(base, key))
        except (TypeError, ValueError) as e:
            raise InvalidConfig(f"Bad rollout config value: {e}") from e
        return dataclasses.replace(base, **values)

    @classmethod
    def from_file(cls, path: Path) -> "RolloutConfig":
        """Read a flat TOML file of RolloutConfig fields."""
        try:
            with open(path, "rb") as f:
                data = tomllib.load(f)
        except (OSError, tomllib.TOMLDecodeError) as e:
            raise InvalidConfig(f"Cannot read config {path}: {e}") from e
        return cls.from_mapping(data)
