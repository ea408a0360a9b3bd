"""Physical and network constants of the two-user RIS-NOMA downlink."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace

# BS density of one per disc of radius 300 m
DEFAULT_LAMBDA_B = 1.0 / (300.0**2 * math.pi)


class ConfigError(ValueError):
    """Invalid or infeasible system configuration."""


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


def default_window_radius(lambda_b: float) -> float:
    """Ten nearest-neighbour length scales, ``10/sqrt(pi lambda_b)``."""
    return 10.0 / math.sqrt(math.pi * lambda_b)


@dataclass(frozen=True)
class SystemParams:
    """Network configuration.

    Powers are in dBm at this boundary; use :attr:`p_t` and :attr:`noise`
    for watts.  Distances are in metres and ``lambda_b`` is per square metre.
    ``window_radius=None`` selects :func:`default_window_radius`.
    """

    lambda_b: float = DEFAULT_LAMBDA_B
    p_t_dbm: float = 20.0
    noise_dbm: float = -90.0
    alpha_t: float = 4.0
    alpha_c: float = 4.0
    a_c: float = 0.6
    a_t: float = 0.4
    n: int = 5
    beta: float = 1.0
    rho_i: float = 0.5
    r_c: float = 50.0
    A: float = 1.0
    C_t: float = 1.0
    C_c: float = 1.0
    gamma_sic_th: float = 1e-2
    gamma_t_th: float = 1e-2
    gamma_c_th: float = 1e-2
    window_radius: float | None = None

    def __post_init__(self):
        if self.window_radius is None and self.lambda_b > 0:
            object.__setattr__(self, "window_radius", default_window_radius(self.lambda_b))
        problems = self._structural_problems()
        if problems:
            raise ConfigError("; ".join(problems))

    def _structural_problems(self) -> list[str]:
        out = []
        if not self.lambda_b > 0:
            out.append("lambda_b must be > 0")
        if not (self.alpha_t > 2 and self.alpha_c > 2):
            out.append("path-loss exponents must exceed 2 (interference diverges otherwise)")
        if not (0 < self.a_t < 1 and 0 < self.a_c < 1):
            out.append("power coefficients must lie in (0, 1)")
        if abs(self.a_c + self.a_t - 1.0) > 1e-9:
            out.append("a_c + a_t must equal 1")
        if not self.a_c > self.a_t:
            out.append("a_c must exceed a_t")
        if int(self.n) != self.n or self.n < 1:
            out.append("n must be a positive integer")
        if not 0 <= self.beta <= 1:
            out.append("beta must lie in [0, 1]")
        if not 0 <= self.rho_i <= 1:
            out.append("rho_i must lie in [0, 1]")
        for name in ("r_c", "A", "C_t", "C_c", "window_radius"):
            value = getattr(self, name)
            if value is None or not value > 0:
                out.append(f"{name} must be > 0")
        for name in ("gamma_sic_th", "gamma_t_th", "gamma_c_th"):
            if not getattr(self, name) >= 0:
                out.append(f"{name} must be >= 0")
        if not math.isfinite(self.p_t_dbm) or not math.isfinite(self.noise_dbm):
            out.append("powers must be finite")
        return out

    def infeasibilities(self) -> list[str]:
        """Threshold settings under which a user can never be covered."""
        out = []
        if self.a_c - self.gamma_sic_th * self.a_t <= 0:
            out.append("gamma_sic_th >= a_c/a_t: SIC stage can never succeed")
        if self.a_c - self.gamma_c_th * self.a_t <= 0:
            out.append("gamma_c_th >= a_c/a_t: connected user can never be covered")
        return out

    def check_feasible(self) -> None:
        problems = self.infeasibilities()
        if problems:
            raise ConfigError("; ".join(problems))

    @property
    def p_t(self) -> float:
        """Transmit power in watts."""
        return dbm_to_watts(self.p_t_dbm)

    @property
    def noise(self) -> float:
        """Noise power in watts."""
        return dbm_to_watts(self.noise_dbm)

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SystemParams":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown parameter(s): {sorted(unknown)}")
        kwargs = {}
        for key, value in data.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                if not (key == "window_radius" and value is None):
                    raise ConfigError(f"{key} must be a number, got {value!r}")
                kwargs[key] = value
            elif key == "n":
                if int(value) != value:
                    raise ConfigError(f"n must be an integer, got {value!r}")
                kwargs[key] = int(value)
            else:
                kwargs[key] = float(value)
        return cls(**kwargs)
