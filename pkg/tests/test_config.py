import numpy as np
import pytest
import yaml

from utils.config import CACHE_ENV, load_config, merge_dicts_recursively
from utils.errors import ConfigError


def test_defaults():
    config = load_config()
    assert config.tau == 1j
    assert config["torus"]["N"] == [1, 2, 3, 5, 8]
    assert config.threads == 1
    assert isinstance(config.seed, int)


def test_overrides_are_dotted_keys():
    config = load_config(**{"torus.N": [2], "seed": 5, "output.threads": None})
    assert config["torus"]["N"] == [2]
    assert config.seed == 5
    assert config.threads == 1


def test_user_file_is_merged_over_defaults(tmp_path):
    path = tmp_path / "run.yml"
    path.write_text(yaml.safe_dump({"torus": {"pairs": 3}, "output": {"directory": "elsewhere"}}))
    config = load_config(path)
    assert config["torus"]["pairs"] == 3
    assert config["torus"]["radius"] == 8.0
    assert str(config.out) == "elsewhere"


def test_cache_directory_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path / "c"))
    assert load_config().cache_dir == tmp_path / "c"
    monkeypatch.delenv(CACHE_ENV)
    assert load_config(**{"output.directory": "out"}).cache_dir.as_posix() == "out/cache"


@pytest.mark.parametrize("overrides", [
    {"torus.tail_tolerance": -1.0},
    {"torus.tau": [0.0, -1.0]},
    {"fuchsian.N": [1]},
    {"torus.N": [0]},
    {"caps.elements": 10},
    {"output.threads": 0},
    {"fuchsian.certificate": "guess"},
    {"summation.beta": 0.0},
])
def test_invalid_values(overrides):
    with pytest.raises(ConfigError):
        load_config(**overrides)


def test_unreadable_files(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yml")
    bad = tmp_path / "list.yml"
    bad.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_merge_dicts_recursively():
    merged = merge_dicts_recursively({"a": {"b": 1, "c": 2}, "d": 3}, {"a": {"c": 4}})
    assert merged == {"a": {"b": 1, "c": 4}, "d": 3}
    assert np.isclose(load_config().to_dict()["summation"]["shell"], 0.5)
