"""Run configuration: YAML defaults, user overrides and validation."""
from __future__ import annotations

import copy
import itertools as it
import os
from pathlib import Path

import yaml

from utils.errors import ConfigError

__all__ = ["DEFAULT_CONFIG_PATH", "merge_dicts_recursively", "RunConfig", "load_config"]

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "custom_config.yml"
CACHE_ENV = "POINCARE_KERNELS_CACHE"

MIN_ELEMENT_CAP = 1000
MIN_WORD_CAP = 8


def merge_dicts_recursively(*dicts):
    """Later dictionaries win; nested dictionaries are merged key by key"""
    result = dict()
    for key, value in it.chain(*[d.items() for d in dicts]):
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = merge_dicts_recursively(result[key], value)
        else:
            result[key] = value
    return result


def _read_yaml(path):
    try:
        with open(path) as fp:
            data = yaml.safe_load(fp) or {}
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}")
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a mapping at top level")
    return data


class RunConfig:
    """Validated run configuration, one dictionary per section"""

    def __init__(self, data):
        self.data = copy.deepcopy(data)
        self.validate()

    def __getitem__(self, section):
        return self.data[section]

    def __getattr__(self, section):
        data = self.__dict__.get("data", {})
        if section in data:
            return data[section]
        raise AttributeError(section)

    @property
    def seed(self):
        return int(self.data["seed"])

    @property
    def threads(self):
        return int(self.data["output"]["threads"])

    @property
    def out(self):
        return Path(self.data["output"]["directory"])

    @property
    def cache_dir(self):
        return Path(os.environ.get(CACHE_ENV, self.out / "cache"))

    @property
    def tau(self):
        re, im = self.data["torus"]["tau"]
        return complex(re, im)

    def to_dict(self):
        return copy.deepcopy(self.data)

    def with_overrides(self, **overrides):
        """Copy with `section.key=value` style overrides applied, then revalidated"""
        data = copy.deepcopy(self.data)
        for path, value in overrides.items():
            node = data
            *parents, leaf = path.split(".")
            for part in parents:
                node = node.setdefault(part, {})
            node[leaf] = value
        return RunConfig(data)

    def validate(self):
        data = self.data
        required = ["seed", "torus", "fuchsian", "summation", "quadrature",
                    "verification", "agmon", "exhaustion", "caps", "output"]
        missing = [key for key in required if key not in data]
        if missing:
            raise ConfigError(f"config lacks sections: {', '.join(missing)}")
        self._check_tolerances(data)
        tau = data["torus"]["tau"]
        if len(tau) != 2 or tau[1] <= 0:
            raise ConfigError(f"torus.tau must be [Re, Im] with Im > 0, got {tau}")
        for section, key, least in (
            ("torus", "N", 1), ("fuchsian", "N", 2), ("verification", "surjectivity_N", 1),
            ("agmon", "flat_N", 1), ("agmon", "disc_t", 2),
        ):
            values = data[section][key]
            if not values or any(int(n) != n or n < least for n in values):
                raise ConfigError(f"{section}.{key} needs integers >= {least}, got {values}")
        if data["exhaustion"]["N"] < 1 or data["verification"]["idempotency_N"] < 1:
            raise ConfigError("line bundle powers must be >= 1")
        if data["caps"]["elements"] < MIN_ELEMENT_CAP:
            raise ConfigError(f"caps.elements must be at least {MIN_ELEMENT_CAP}")
        if data["caps"]["word_length"] < MIN_WORD_CAP:
            raise ConfigError(f"caps.word_length must be at least {MIN_WORD_CAP}")
        if data["output"]["threads"] < 1:
            raise ConfigError("output.threads must be >= 1")
        radius = data["torus"]["radius"]
        if radius is not None and radius < 0:
            raise ConfigError("torus.radius must be nonnegative")
        if data["summation"]["beta"] <= 0:
            raise ConfigError("summation.beta must be positive")
        if data["fuchsian"]["certificate"] not in ("envelope", "fitted"):
            raise ConfigError("fuchsian.certificate is 'envelope' or 'fitted'")

    @staticmethod
    def _check_tolerances(data):
        for section, values in data.items():
            if not isinstance(values, dict):
                continue
            for key, value in values.items():
                if key.endswith(("tolerance", "rtol", "ratio")) and not (
                    isinstance(value, (int, float)) and value > 0
                ):
                    raise ConfigError(f"{section}.{key} must be a positive number, got {value}")


def load_config(path=None, **overrides):
    """Defaults from custom_config.yml, merged with a user file, then `section.key` overrides"""
    data = _read_yaml(DEFAULT_CONFIG_PATH)
    if path is not None:
        data = merge_dicts_recursively(data, _read_yaml(path))
    config = RunConfig(data)
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return config.with_overrides(**overrides) if overrides else config
