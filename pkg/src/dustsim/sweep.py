"""Efficiency curves over robot speed, as in the passive-vs-active comparison figure."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

from dustsim.errors import DomainError, ParamError
from dustsim.model import (
    DEFAULT_EPSILON,
    ActiveRobotParams,
    DustParams,
    Winner,
    active_min_speed,
    active_rate,
    break_even_speeds,
    compare,
    critical_alpha,
)

CSV_HEADER = ("h", "beta", "d_active", "d_passive", "passive_wins")

DEFAULT_ALPHA = 16.0
DEFAULT_H_VALUES = (0.1, 0.5, 1.0)
DEFAULT_BETA_MIN = 0.2
DEFAULT_BETA_MAX = 5.0
DEFAULT_BETA_STEP = 0.02


def beta_grid(start: float = DEFAULT_BETA_MIN, stop: float = DEFAULT_BETA_MAX,
              step: float = DEFAULT_BETA_STEP) -> tuple[float, ...]:
    """Inclusive grid ``start, start + step, ..., stop``.

    Points are computed as ``start + i * step`` and rounded to 12 decimals so
    that e.g. 2.0 lands exactly on 2.0 instead of 1.9999999999999998.
    """
    if not (step > 0 and start > 0 and stop >= start):
        raise ParamError(f"bad beta grid start={start!r} stop={stop!r} step={step!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 12) for i in range(n))


@dataclass(frozen=True)
class SweepSpec:
    beta_grid: tuple[float, ...] = field(default_factory=beta_grid)
    h_values: tuple[float, ...] = DEFAULT_H_VALUES
    alpha: float = DEFAULT_ALPHA
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        grid = tuple(float(b) for b in self.beta_grid)
        hs = tuple(float(h) for h in self.h_values)
        if not grid:
            raise ParamError("beta grid is empty")
        if any(b <= 0 or not math.isfinite(b) for b in grid):
            raise ParamError("beta grid values must be finite and > 0")
        if any(b2 <= b1 for b1, b2 in zip(grid, grid[1:])):
            raise ParamError("beta grid must be strictly increasing")
        if any(h < 0 or not math.isfinite(h) for h in hs):
            raise ParamError("h values must be finite and >= 0")
        if len(set(hs)) != len(hs):
            raise ParamError("h values must be distinct")
        DustParams(self.alpha)
        object.__setattr__(self, "beta_grid", grid)
        object.__setattr__(self, "h_values", hs)
        object.__setattr__(self, "alpha", float(self.alpha))


@dataclass(frozen=True)
class CurvePoint:
    h: float
    beta: float
    d_active: float
    d_passive: float
    passive_wins: bool


def run_sweep(spec: SweepSpec) -> list[CurvePoint]:
    """One point per (h, beta), sorted by h then beta."""
    dust = DustParams(spec.alpha)
    points = []
    for h in sorted(spec.h_values):
        for beta in spec.beta_grid:
            robot = ActiveRobotParams(beta, h)
            verdict = compare(dust, robot, spec.epsilon)
            points.append(CurvePoint(
                h=h,
                beta=beta,
                d_active=active_rate(dust, robot),
                d_passive=verdict.d_passive,
                passive_wins=verdict.winner is Winner.PASSIVE,
            ))
    return points


@dataclass(frozen=True)
class CrossoverSummary:
    alpha: float
    h: float
    roots: tuple[float, ...] | None
    exists: bool | None
    tangent: bool | None
    active_min_speed: float | None
    critical_alpha: float | None
    grid_interval: tuple[float, float] | None
    grid_min_beta: float | None
    consistent: bool | None
    notes: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "h": self.h,
            "roots": list(self.roots) if self.roots is not None else None,
            "exists": self.exists,
            "tangent": self.tangent,
            "active_min_speed": self.active_min_speed,
            "critical_alpha": self.critical_alpha,
            "grid_interval": list(self.grid_interval) if self.grid_interval else None,
            "grid_min_beta": self.grid_min_beta,
            "consistent": self.consistent,
            "notes": list(self.notes),
        }


def _grid_step_near(grid: list[float], x: float) -> float:
    if len(grid) < 2:
        return 0.0
    steps = [b - a for a, b in zip(grid, grid[1:])]
    i = min(range(len(grid)), key=lambda k: abs(grid[k] - x))
    return max(steps[max(0, i - 1)], steps[min(i, len(steps) - 1)])


def annotate_crossover(points: list[CurvePoint], alpha: float, h: float) -> CrossoverSummary:
    """Compare the grid's passive-wins region with the analytic break-even roots.

    ``consistent`` is true when every grid boundary of the passive-wins region
    sits within one grid step of the matching analytic root. When the analytic
    quantities are undefined (``h <= 0`` or ``alpha <= 0``) only grid data is
    reported.
    """
    pts = sorted((p for p in points if p.h == h), key=lambda p: p.beta)
    if points and not pts:
        raise ParamError(f"no sweep points for h={h!r}")
    grid = [p.beta for p in pts]
    wins = [p.beta for p in pts if p.passive_wins]
    grid_interval = (wins[0], wins[-1]) if wins else None
    grid_min = min(pts, key=lambda p: p.d_active).beta if pts else None

    try:
        dust = DustParams(alpha)
        be = break_even_speeds(dust, h)
        beta_star = active_min_speed(dust, h)
        a_crit = critical_alpha(h)
    except DomainError as exc:
        return CrossoverSummary(alpha, h, None, None, None, None, None, grid_interval,
                                grid_min, None, (str(exc),))

    exists = be.interval is not None
    if exists:
        lo, hi = be.interval
        # roots past either end of the grid can only be seen as the grid end
        lo, hi = max(lo, grid[0]), min(hi, grid[-1])
        if grid_interval is None:
            # an interval narrower than the grid spacing may hold no grid point
            consistent = hi - lo <= _grid_step_near(grid, lo)
        else:
            consistent = (abs(grid_interval[0] - lo) <= _grid_step_near(grid, lo) + 1e-12
                          and abs(grid_interval[1] - hi) <= _grid_step_near(grid, hi) + 1e-12)
    else:
        consistent = grid_interval is None
    return CrossoverSummary(
        alpha=float(alpha),
        h=float(h),
        roots=be.roots,
        exists=exists,
        tangent=be.tangent,
        active_min_speed=beta_star,
        critical_alpha=a_crit,
        grid_interval=grid_interval,
        grid_min_beta=grid_min,
        consistent=consistent,
    )


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def to_csv(points: list[CurvePoint]) -> str:
    """Render points as CSV text: 9 significant digits, ``true``/``false``, LF."""
    out = io.StringIO()
    out.write(",".join(CSV_HEADER) + "\n")
    for p in sorted(points, key=lambda p: (p.h, p.beta)):
        out.write(",".join((
            _fmt(p.h), _fmt(p.beta), _fmt(p.d_active), _fmt(p.d_passive),
            "true" if p.passive_wins else "false",
        )) + "\n")
    return out.getvalue()
