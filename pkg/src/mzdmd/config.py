"""Experiment configuration: defaults, key-value config files, validation.

The config file format is plain ``key = value`` text with ``#`` comments.
Every key is optional; omitted keys fall back to the benchmark defaults
(dt=0.1, t_max=50, n_points=501, sigma=1, n_mc=1000, n_u=100, lr=1e-3,
iterations=5, resolved_init=(1, 0)).  Unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .optim import AdamConfig
from .oscillator import SimConfig

METHODS = ("dmd", "mz-dmd", "t-model", "projection", "all")
FITTING_METHODS = ("dmd", "mz-dmd", "t-model")


@dataclass(frozen=True)
class ExperimentConfig:
    sim: SimConfig
    adam: AdamConfig
    n_u: int = 100
    method: str = "all"
    resolved_init: tuple[float, float] = (1.0, 0.0)
    output_dir: Path = Path("results")
    emit_plots: bool = False

    def __post_init__(self):
        if self.n_u < 1:
            raise ValueError("n_u must be at least 1")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {', '.join(METHODS)}")
        init = tuple(float(v) for v in self.resolved_init)
        if len(init) != 2:
            raise ValueError("resolved_init must hold exactly two values")
        object.__setattr__(self, "resolved_init", init)
        object.__setattr__(self, "output_dir", Path(self.output_dir))


def default_config() -> ExperimentConfig:
    """The benchmark defaults used throughout the package."""
    return ExperimentConfig(sim=SimConfig(), adam=AdamConfig())


def _parse_bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {value!r}")


def _parse_pair(value: str) -> tuple[float, float]:
    parts = [p for p in re.split(r"[,\s]+", value.strip()) if p]
    if len(parts) != 2:
        raise ValueError(f"expected two numbers, got {value!r}")
    return float(parts[0]), float(parts[1])


def _parse_method(value: str) -> str:
    if value not in METHODS:
        raise ValueError(f"expected one of {', '.join(METHODS)}, got {value!r}")
    return value


_CASTERS = {
    "dt": float,
    "t_max": float,
    "n_points": int,
    "sigma": float,
    "n_mc": int,
    "seed": int,
    "n_u": int,
    "lr": float,
    "beta1": float,
    "beta2": float,
    "epsilon": float,
    "iterations": int,
    "method": _parse_method,
    "resolved_init": _parse_pair,
    "output_dir": Path,
    "emit_plots": _parse_bool,
}

_SIM_KEYS = ("dt", "t_max", "n_points", "sigma", "n_mc", "seed")
_ADAM_KEYS = {"lr": "learning_rate", "beta1": "beta1", "beta2": "beta2",
              "epsilon": "epsilon", "iterations": "iterations"}


def build_config(overrides: dict) -> ExperimentConfig:
    """Merge overrides into the defaults and validate the result."""
    unknown = set(overrides) - set(_CASTERS)
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(sorted(unknown))}")
    base = default_config()
    try:
        sim = dataclasses.replace(
            base.sim, **{k: overrides[k] for k in _SIM_KEYS if k in overrides}
        )
        adam = dataclasses.replace(
            base.adam, **{v: overrides[k] for k, v in _ADAM_KEYS.items() if k in overrides}
        )
        top = {
            k: overrides[k]
            for k in ("n_u", "method", "resolved_init", "output_dir", "emit_plots")
            if k in overrides
        }
        return dataclasses.replace(base, sim=sim, adam=adam, **top)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(path) -> ExperimentConfig:
    """Parse a key-value config file.

    Raises :class:`ConfigError` with the line number for malformed lines and
    with the field name for unknown keys or constraint violations.
    """
    text = Path(path).read_text()
    raw: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value'", line=lineno)
        key, _, value = body.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CASTERS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'", field=key, line=lineno)
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'", field=key, line=lineno)
        try:
            raw[key] = _CASTERS[key](value)
        except (ValueError, TypeError) as exc:
            raise ConfigError(
                f"line {lineno}: invalid value for '{key}': {exc}", field=key, line=lineno
            ) from exc
    return build_config(raw)
