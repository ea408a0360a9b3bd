"""Run configuration: a flat TOML file with network parameters and the sweep.

Example::

    p_t_dbm = 20.0
    n = 5
    sweep_variable = "p_t_dbm"
    sweep_values = [0.0, 5.0, 10.0]
    trials = 1000000
    seed = 1
    fading_mode = "model-faithful"
    fit_mode = "moment"
    output_path = "coverage.csv"

Any :class:`SystemParams` field may appear at top level; missing ones take
their defaults.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .mcsim import FadingMode
from .params import ConfigError, SystemParams

SWEEP_VARIABLES = ("p_t_dbm", "n", "beta", "rho_i")
FIT_MODES = ("paper", "moment")
_RUN_KEYS = ("sweep_variable", "sweep_values", "trials", "seed", "fading_mode", "fit_mode", "output_path")
_U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams = field(default_factory=SystemParams)
    sweep_variable: str = "p_t_dbm"
    sweep_values: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    trials: int = 1_000_000
    seed: int = 1
    fading_mode: FadingMode = FadingMode.MODEL_FAITHFUL
    fit_mode: str = "moment"
    output_path: str = "out.csv"

    def __post_init__(self):
        object.__setattr__(self, "fading_mode", FadingMode.parse(self.fading_mode))
        object.__setattr__(self, "sweep_values", tuple(self.sweep_values))
        if self.sweep_variable not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep_variable must be one of {SWEEP_VARIABLES}, got {self.sweep_variable!r}")
        if not self.sweep_values:
            raise ConfigError("sweep_values must not be empty")
        if self.fit_mode not in FIT_MODES:
            raise ConfigError(f"fit_mode must be one of {FIT_MODES}, got {self.fit_mode!r}")
        if isinstance(self.trials, bool) or not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials must be a positive integer")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed <= _U64_MAX:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        # every sweep point must itself be a valid configuration
        for v in self.sweep_values:
            self.params_at(v)

    def params_at(self, value) -> SystemParams:
        data = self.params.to_dict()
        data[self.sweep_variable] = value
        return SystemParams.from_dict(data)


def from_dict(data: dict) -> RunConfig:
    unknown = set(data) - set(_RUN_KEYS) - {f.name for f in fields(SystemParams)}
    if unknown:
        raise ConfigError(f"unknown key(s): {sorted(unknown)}")
    params = SystemParams.from_dict({k: v for k, v in data.items() if k not in _RUN_KEYS})
    params.check_feasible()
    run = {k: data[k] for k in _RUN_KEYS if k in data}
    try:
        return RunConfig(params=params, **run)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def loads(text: str) -> RunConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return from_dict(data)


def load(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return loads(text)


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    s = str(v).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{s}"'


def dumps(cfg: RunConfig) -> str:
    lines = [f"{k} = {_toml_value(v)}" for k, v in cfg.params.to_dict().items()]
    lines += [
        f"sweep_variable = {_toml_value(cfg.sweep_variable)}",
        f"sweep_values = {_toml_value(list(cfg.sweep_values))}",
        f"trials = {cfg.trials}",
        f"seed = {cfg.seed}",
        f"fading_mode = {_toml_value(cfg.fading_mode.value)}",
        f"fit_mode = {_toml_value(cfg.fit_mode)}",
        f"output_path = {_toml_value(cfg.output_path)}",
    ]
    return "\n".join(lines) + "\n"
