"""Closed-form dust-collection rates for passive and active robots.

A passive robot sits still and collects whatever falls on its unit footprint,
so its rate is just the deposition intensity ``alpha``. An active robot moving
at speed ``beta`` that can pick up dust of height ``h`` collects
``h * beta**3 + alpha / beta``. All quantities are dimensionless model units.

The passive robot wins exactly when ``alpha > h * beta**4 / (beta - 1)`` for
``beta > 1``; for ``beta <= 1`` it never wins.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from dustsim.errors import DomainError, ParamError

DEFAULT_EPSILON = 1e-9

# argmin of g(beta) = h * beta**4 / (beta - 1) on beta > 1; g' = h b^3 (3b - 4) / (b - 1)^2
TANGENT_BETA = 4.0 / 3.0

_ROOT_WIDTH = 1e-12
_ROOT_RESIDUAL = 1e-9


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ParamError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class DustParams:
    """Deposition intensity: dust mass per unit area per unit time."""

    alpha: float

    def __post_init__(self):
        alpha = _check_finite("alpha", self.alpha)
        if alpha < 0:
            raise ParamError(f"alpha must be >= 0, got {alpha!r}")
        object.__setattr__(self, "alpha", alpha)


@dataclass(frozen=True)
class ActiveRobotParams:
    """Speed ``beta`` (> 0) and collectible dust height ``h`` (>= 0)."""

    beta: float
    h: float = 0.0

    def __post_init__(self):
        beta = _check_finite("beta", self.beta)
        h = _check_finite("h", self.h)
        if beta <= 0:
            raise ParamError(f"beta must be > 0, got {beta!r}")
        if h < 0:
            raise ParamError(f"h must be >= 0, got {h!r}")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "h", h)


class Winner(str, enum.Enum):
    PASSIVE = "PassiveWins"
    ACTIVE = "ActiveWins"
    TIE = "Tie"


@dataclass(frozen=True)
class Verdict:
    winner: Winner
    margin: float
    epsilon: float
    d_passive: float
    d_active: float

    def as_dict(self) -> dict:
        return {
            "verdict": self.winner.value,
            "margin": self.margin,
            "epsilon": self.epsilon,
            "d_passive": self.d_passive,
            "d_active": self.d_active,
        }


@dataclass(frozen=True)
class BreakEven:
    """Speeds ``beta > 1`` at which both robots collect equally.

    ``roots`` is strictly increasing; ``residuals[i]`` is ``|g(roots[i]) - alpha|``.
    Between two roots the passive robot wins.
    """

    roots: tuple[float, ...]
    residuals: tuple[float, ...]
    tangent: bool = False

    @property
    def interval(self) -> tuple[float, float] | None:
        if len(self.roots) == 2:
            return self.roots
        return None


def passive_rate(dust: DustParams) -> float:
    return dust.alpha


def active_rate(dust: DustParams, robot: ActiveRobotParams) -> float:
    beta = robot.beta
    return robot.h * beta**3 + dust.alpha / beta


def _threshold(h: float, beta: float) -> float:
    return h * beta**4 / (beta - 1.0)


def threshold_alpha(robot: ActiveRobotParams) -> float:
    """Deposition rate above which the passive robot wins, for ``beta > 1``."""
    if robot.beta <= 1.0:
        raise DomainError(
            f"threshold closed form requires beta > 1, got beta={robot.beta!r}"
        )
    return _threshold(robot.h, robot.beta)


def compare(
    dust: DustParams, robot: ActiveRobotParams, epsilon: float = DEFAULT_EPSILON
) -> Verdict:
    """Compare the two rates directly, with a relative tie band.

    The band is ``epsilon * max(1, |D_passive|, |D_active|)``.
    """
    epsilon = float(epsilon)
    if not epsilon >= 0 or not math.isfinite(epsilon):
        raise ParamError(f"epsilon must be finite and >= 0, got {epsilon!r}")
    d_passive = passive_rate(dust)
    d_active = active_rate(dust, robot)
    margin = d_passive - d_active
    band = epsilon * max(1.0, abs(d_passive), abs(d_active))
    if abs(margin) <= band:
        winner = Winner.TIE
    elif margin > 0:
        winner = Winner.PASSIVE
    else:
        winner = Winner.ACTIVE
    return Verdict(winner, margin, epsilon, d_passive, d_active)


def critical_alpha(h: float) -> float:
    """Smallest deposition rate for which some speed lets the passive robot win.

    This is ``min over beta > 1 of h * beta**4 / (beta - 1) = 256 h / 27``.
    """
    h = float(h)
    if not h > 0:
        raise DomainError(f"critical alpha requires h > 0, got h={h!r}")
    return 256.0 * h / 27.0


def _bisect(g, alpha: float, lo: float, hi: float) -> float:
    """Root of ``g(b) = alpha`` in ``[lo, hi]`` where ``g(lo) - alpha`` and
    ``g(hi) - alpha`` have opposite signs."""
    f_lo = g(lo) - alpha
    if f_lo == 0.0:
        return lo
    if g(hi) - alpha == 0.0:
        return hi
    tol_res = _ROOT_RESIDUAL * max(1.0, alpha)
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = g(mid) - alpha
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        if hi - lo <= _ROOT_WIDTH * max(1.0, hi) and abs(f_mid) <= tol_res:
            break
    # return whichever end sits closer to the level set
    return lo if abs(g(lo) - alpha) <= abs(g(hi) - alpha) else hi


def break_even_speeds(dust: DustParams, h: float) -> BreakEven:
    """All ``beta > 1`` solving ``h * beta**4 / (beta - 1) = alpha``.

    ``g`` falls on ``(1, 4/3]`` and rises on ``[4/3, inf)``; each branch gets its
    own bisection, with the bracket pushed outward until ``g`` exceeds alpha.
    """
    alpha = dust.alpha
    h = float(h)
    if not h > 0:
        raise DomainError(f"break-even speeds require h > 0, got h={h!r}")
    if not alpha > 0:
        raise DomainError(f"break-even speeds require alpha > 0, got alpha={alpha!r}")

    def g(beta: float) -> float:
        return _threshold(h, beta)

    a_crit = critical_alpha(h)
    if abs(alpha - a_crit) <= _ROOT_RESIDUAL * max(1.0, alpha):
        return BreakEven((TANGENT_BETA,), (abs(g(TANGENT_BETA) - alpha),), tangent=True)
    if alpha < a_crit:
        return BreakEven((), ())

    # falling branch: approach 1 from above until g overshoots
    gap = TANGENT_BETA - 1.0
    while g(1.0 + gap) <= alpha:
        gap *= 0.5
        if 1.0 + gap <= 1.0:
            raise DomainError(f"lower break-even speed for alpha={alpha!r} is not representable")
    low = _bisect(g, alpha, 1.0 + gap, TANGENT_BETA)

    hi = 2.0 * TANGENT_BETA
    while g(hi) <= alpha:
        hi *= 2.0
    high = _bisect(g, alpha, TANGENT_BETA, hi)

    roots = (low, high)
    return BreakEven(roots, tuple(abs(g(r) - alpha) for r in roots))


def active_min_speed(dust: DustParams, h: float) -> float:
    """Speed minimizing the active rate: the stationary point of
    ``h b^3 + alpha / b``, i.e. ``(alpha / (3 h)) ** (1/4)``."""
    h = float(h)
    alpha = dust.alpha
    if not h > 0:
        raise DomainError(f"active minimum requires h > 0, got h={h!r}")
    if not alpha > 0:
        raise DomainError(f"active minimum requires alpha > 0, got alpha={alpha!r}")
    return (alpha / (3.0 * h)) ** 0.25


def rain_verdict(
    rain_rate: float,
    run_speed: float,
    body_h: float,
    epsilon: float = DEFAULT_EPSILON,
) -> Verdict:
    """Stand still or run through the rain?

    Same comparison as :func:`compare` with rain as dust and the runner as the
    active robot. ``Winner.PASSIVE`` maps to the advice "stand still",
    ``Winner.ACTIVE`` to "run".
    """
    return compare(DustParams(rain_rate), ActiveRobotParams(run_speed, body_h), epsilon)
