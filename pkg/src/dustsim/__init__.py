"""Passive vs. active dust-collecting robots: closed-form model, Monte Carlo
cross-checks, parameter sweeps and census tallies."""

from dustsim.errors import ConfigError, DomainError, DustSimError, ParamError, ParseError
from dustsim.model import (
    ActiveRobotParams,
    BreakEven,
    DustParams,
    Verdict,
    Winner,
    active_min_speed,
    active_rate,
    break_even_speeds,
    compare,
    critical_alpha,
    passive_rate,
    rain_verdict,
    threshold_alpha,
)

__version__ = "0.1.0"

__all__ = [
    "ActiveRobotParams",
    "BreakEven",
    "ConfigError",
    "DomainError",
    "DustParams",
    "DustSimError",
    "ParamError",
    "ParseError",
    "Verdict",
    "Winner",
    "active_min_speed",
    "active_rate",
    "break_even_speeds",
    "compare",
    "critical_alpha",
    "passive_rate",
    "rain_verdict",
    "threshold_alpha",
]
