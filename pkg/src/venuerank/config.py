"""Run configuration and ``key=value`` override files."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from typing import Any, Mapping, TypeVar

T = TypeVar("T")


class ConfigError(ValueError):
    """Unknown key or unparsable value in an override file."""


@dataclass(frozen=True)
class TrainConfig:
    n_trees: int = 100
    learning_rate: float = 0.1
    max_leaves: int = 8
    min_instances_per_leaf: int = 5
    lambda_reg: float = 1e-4
    epochs: int = 50
    folds: int = 5
    cutoff: int = 5
    run_tag: str = "venuerank"

    def ranker_kwargs(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "learning_rate": self.learning_rate,
            "max_leaves": self.max_leaves,
            "min_instances_per_leaf": self.min_instances_per_leaf,
        }


def read_overrides(path: os.PathLike | str) -> dict[str, str]:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are skipped."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            out[key.strip()] = value.strip()
    return out


def _coerce(raw: str, default: Any, key: str) -> Any:
    try:
        if isinstance(default, bool):
            if raw.lower() not in ("true", "false", "1", "0"):
                raise ValueError(raw)
            return raw.lower() in ("true", "1")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return raw


def apply_overrides(obj: T, overrides: Mapping[str, str], strict: bool = True) -> T:
    """Return a copy of dataclass ``obj`` with matching keys replaced."""
    names = {f.name for f in fields(obj)}
    if strict:
        unknown = sorted(set(overrides) - names)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    changes = {
        key: _coerce(value, getattr(obj, key), key)
        for key, value in overrides.items()
        if key in names
    }
    return replace(obj, **changes)
