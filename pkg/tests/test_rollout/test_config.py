"""Tests for rollout configuration."""

import pytest

from boundseg.boundary.patterns import OutputPattern
from boundseg.rollout.config import InvalidConfig, MediumMode, RolloutConfig


class TestRolloutConfig:
    """Defaults, validation and loading."""

    def test_defaults(self) -> None:
        config = RolloutConfig()
        assert (config.m, config.temperature, config.k, config.batch_size) == (4, 1.2, 2, 6)
        assert config.enable_intermediate is True
        assert config.perturb_steps == 1
        assert config.medium_mode is MediumMode.MEDIUM
        assert config.pattern is OutputPattern.START
        assert config.end_marker == "<eos>"
        assert config.gold_injection is False

    @pytest.mark.parametrize(
        "field, value",
        [
            ("m", 1),
            ("k", -1),
            ("batch_size", 0),
            ("perturb_steps", 3),
            ("temperature", 0.0),
            ("end_marker", ""),
            ("workers", 0),
            ("seed", -5),
        ],
    )
    def test_rejects_out_of_range(self, field, value) -> None:
        with pytest.raises(InvalidConfig):
            RolloutConfig(**{field: value})

    def test_from_mapping_converts_enums(self) -> None:
        config = RolloutConfig.from_mapping({"pattern": "startend", "medium_mode": "random", "k": 3})
        assert config.pattern is OutputPattern.START_END
        assert config.medium_mode is MediumMode.RANDOM
        assert config.k == 3

    def test_from_mapping_layers_on_base(self) -> None:
        base = RolloutConfig(m=6)
        config = RolloutConfig.from_mapping({"k": 0}, base)
        assert (config.m, config.k) == (6, 0)

    def test_unknown_key(self) -> None:
        with pytest.raises(InvalidConfig, match="Unknown"):
            RolloutConfig.from_mapping({"group_size": 4})

    def test_bad_enum_value(self) -> None:
        with pytest.raises(InvalidConfig):
            RolloutConfig.from_mapping({"pattern": "middle"})

    def test_bool_must_be_bool(self) -> None:
        with pytest.raises(InvalidConfig):
            RolloutConfig.from_mapping({"enable_intermediate": "yes"})

    @pytest.mark.parametrize(
        "data",
        [
            {"m": [4]},
            {"m": 2.7},
            {"m": "4"},
            {"k": True},
            {"temperature": "hot"},
            {"temperature": False},
            {"end_marker": 5},
            {"pattern": ["start"]},
            {"gold_injection": 1},
        ],
    )
    def test_wrong_value_types(self, data) -> None:
        with pytest.raises(InvalidConfig):
            RolloutConfig.from_mapping(data)

    def test_integral_values_accepted(self) -> None:
        config = RolloutConfig.from_mapping({"m": 6.0, "temperature": 1})
        assert config.m == 6 and isinstance(config.m, int)
        assert config.temperature == 1.0 and isinstance(config.temperature, float)

    def test_non_scalar_in_file(self, tmp_path) -> None:
        path = tmp_path / "rollout.toml"
        path.write_text("m = [4]\n")
        with pytest.raises(InvalidConfig, match="m must be an integer"):
            RolloutConfig.from_file(path)

    def test_from_file(self, tmp_path) -> None:
        path = tmp_path / "rollout.toml"
        path.write_text('m = 8\ntemperature = 0.7\npattern = "end"\nselect_top_k = false\n')
        config = RolloutConfig.from_file(path)
        assert config.m == 8
        assert config.temperature == 0.7
        assert config.pattern is OutputPattern.END
        assert config.select_top_k is False

    def test_from_file_missing(self, tmp_path) -> None:
        with pytest.raises(InvalidConfig):
            RolloutConfig.from_file(tmp_path / "nope.toml")

    def test_from_file_bad_toml(self, tmp_path) -> None:
        path = tmp_path / "bad.toml"
        path.write_text("m = = 3\n")
        with pytest.raises(InvalidConfig):
            RolloutConfig.from_file(path)


class TestSubstreams:
    """Generators depend only on seed and key."""

    def test_same_key_same_draws(self) -> None:
        a = RolloutConfig(seed=7).substream(1, 2, 3).integers(1000, size=5)
        b = RolloutConfig(seed=7).substream(1, 2, 3).integers(1000, size=5)
        assert a.tolist() == b.tolist()

    def test_different_key_different_draws(self) -> None:
        config = RolloutConfig(seed=7)
        a = config.substream(1, 0, 1).integers(1 << 30, size=4)
        b = config.substream(1, 1, 1).integers(1 << 30, size=4)
        assert a.tolist() != b.tolist()
