"""Experiment configuration: one TOML file, sections per experiment.

Validation failures raise ConfigError with the offending `section.key`
in the message so a config can be fixed without reading source.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .lattice import SimplexConfig

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "simplex_from_section"]


class ConfigError(ValueError):
    """A configuration file is malformed or semantically invalid."""


def load_config(path: str | Path) -> "ExperimentConfig":
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file {p} does not exist")
    try:
        with open(p, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {p} is not valid TOML: {exc}") from exc
    return ExperimentConfig(data=data, source=str(p))


def _type_name(t) -> str:
    return getattr(t, "__name__", str(t))


@dataclass
class ExperimentConfig:
    """Raw parsed config plus typed, validated access."""

    data: dict[str, Any]
    source: str = "<memory>"

    def section(self, name: str) -> dict[str, Any]:
        sec = self.data.get(name)
        if sec is None:
            raise ConfigError(f"{name}: section missing from {self.source}")
        if not isinstance(sec, dict):
            raise ConfigError(f"{name}: expected a table")
        return sec

    def has_section(self, name: str) -> bool:
        return isinstance(self.data.get(name), dict)

    def get(
        self,
        section: str,
        key: str,
        kind,
        default=None,
        required: bool = False,
        positive: bool = False,
    ):
        sec = self.section(section)
        if key not in sec:
            if required:
                raise ConfigError(f"{section}.{key}: required key missing")
            return default
        val = sec[key]
        if kind is float and isinstance(val, int) and not isinstance(val, bool):
            val = float(val)
        if kind is int and isinstance(val, bool):
            raise ConfigError(f"{section}.{key}: expected {_type_name(kind)}, got bool")
        if not isinstance(val, kind):
            raise ConfigError(
                f"{section}.{key}: expected {_type_name(kind)}, got {type(val).__name__}"
            )
        if positive and val <= 0:
            raise ConfigError(f"{section}.{key}: must be positive")
        return val

    def get_int_list(
        self, section: str, key: str, default: Sequence[int] | None = None
    ) -> list[int]:
        sec = self.section(section)
        if key not in sec:
            if default is None:
                raise ConfigError(f"{section}.{key}: required key missing")
            return list(default)
        val = sec[key]
        if not isinstance(val, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in val
        ):
            raise ConfigError(f"{section}.{key}: expected a list of integers")
        return list(val)

    def get_float_list(
        self, section: str, key: str, default: Sequence[float] | None = None
    ) -> list[float]:
        sec = self.section(section)
        if key not in sec:
            if default is None:
                raise ConfigError(f"{section}.{key}: required key missing")
            return list(default)
        val = sec[key]
        if not isinstance(val, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in val
        ):
            raise ConfigError(f"{section}.{key}: expected a list of numbers")
        return [float(v) for v in val]

    def simplex(self, section: str = "common") -> SimplexConfig:
        return simplex_from_section(self.section(section), section)


def simplex_from_section(sec: dict[str, Any], where: str) -> SimplexConfig:
    n = sec.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ConfigError(f"{where}.n: expected a positive integer")
    verts = sec.get("vertices")
    if (
        not isinstance(verts, list)
        or not verts
        or not all(
            isinstance(v, list)
            and all(isinstance(c, int) and not isinstance(c, bool) for c in v)
            for v in verts
        )
    ):
        raise ConfigError(f"{where}.vertices: expected a non-empty list of integer vectors")
    try:
        return SimplexConfig(n=n, vertices=tuple(tuple(v) for v in verts))
    except ValueError as exc:
        raise ConfigError(f"{where}.vertices: {exc}") from exc
