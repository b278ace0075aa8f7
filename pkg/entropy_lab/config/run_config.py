"""Run configuration: a flat ``key = value`` file merged with CLI flags."""

from collections.abc import Mapping
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

from ..core.constants import (
    BubbleDefaults,
    Command,
    MinimizerDefaults,
    Observable,
    OptimizerDefaults,
    OutputFormat,
)
from ..core.exceptions import ConfigError
from ..inequalities.search import SearchBudget

_LIST_KEYS = frozenset({"q_grid", "eps_grid"})


@dataclass(slots=True, frozen=True)
class RunConfig:
    """Everything one CLI experiment needs."""

    command: Command
    n: int = 3
    p: float = 2.0
    q: float | None = None
    q_grid: tuple[float, ...] | None = None
    eps_grid: tuple[float, ...] = BubbleDefaults.EPS_GRID
    family: str = "default"
    nash_family: str | None = None
    restarts: int = OptimizerDefaults.RESTARTS
    max_evals: int = OptimizerDefaults.MAX_EVALS
    seed: int = OptimizerDefaults.SEED
    output: str = "-"
    fmt: OutputFormat = OutputFormat.CSV
    delta: float | None = None
    c_value: float = 1.0
    a_factor: float = 1.0
    b_value: float = 0.0
    observable: Observable | None = None
    profile: str | None = None
    workers: int | None = None
    max_iter: int = MinimizerDefaults.MAX_ITER
    nodes: int = MinimizerDefaults.NODES

    @property
    def budget(self) -> SearchBudget:
        return SearchBudget(self.restarts, self.max_evals, self.seed)

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "RunConfig":
        """Build a config from parsed strings or typed values.

        Raises:
            ConfigError: On unknown keys or values of the wrong type.
        """
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(values) - set(known))
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        if "command" not in values or values["command"] is None:
            raise ConfigError("configuration needs a command")

        parsed: dict[str, Any] = {}
        for key, raw in values.items():
            if raw is None:
                continue
            try:
                parsed[key] = _convert(key, raw)
            except ValueError as e:
                raise ConfigError(f"invalid value {raw!r} for {key}: {e}") from e
        return cls(**parsed)


def _floats(raw: Any) -> tuple[float, ...]:
    if isinstance(raw, str):
        items = [item.strip() for item in raw.split(",") if item.strip()]
    else:
        items = list(raw)
    return tuple(float(item) for item in items)


def _convert(key: str, raw: Any) -> Any:
    if key in _LIST_KEYS:
        return _floats(raw)
    match key:
        case "command":
            return Command(raw)
        case "fmt":
            return OutputFormat(raw)
        case "observable":
            return Observable(raw)
        case "n" | "restarts" | "max_evals" | "seed" | "workers" | "max_iter" | "nodes":
            value = float(raw)
            if not value.is_integer():
                raise ValueError("expected an integer")
            return int(value)
        case "p" | "q" | "delta" | "c_value" | "a_factor" | "b_value":
            return float(raw)
        case _:
            return str(raw)


def load_config_file(path: str | Path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment, dashes in keys become underscores.

    Raises:
        ConfigError: If the file cannot be read or a line has no ``=``.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e

    values: dict[str, str] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        key, sep, value = content.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{path}:{number}: expected 'key = value', got {line!r}")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def merge(file_values: Mapping[str, Any], flag_values: Mapping[str, Any]) -> dict[str, Any]:
    """File values overridden by every flag that was actually given."""
    merged = dict(file_values)
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    return merged
