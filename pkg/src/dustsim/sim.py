"""Seeded Monte Carlo checks of the dust-collection model.

Dust arrives as a Poisson point process in space and time with intensity
``alpha / particle_mass`` per unit area per unit time; every particle weighs
``particle_mass``. Three experiments are available:

* ``PASSIVE``: a stationary 1x1 footprint; mean collected mass is ``alpha * T``.
* ``OCCLUSION``: a 1x1 robot translating at speed ``beta`` along a torus lane
  crosses a fixed transverse unit line once per lap. Each crossing covers a
  line point for ``1 / beta`` time and picks up ``alpha / beta`` on average.
* ``ACTIVE``: the model's sweep term ``h * beta**3`` per unit time added
  deterministically, plus falling-dust pickup sampled per line crossing.

Randomness: trial ``i`` under master seed ``s`` draws from
``numpy.random.Generator(PCG64(SeedSequence([s, i, ...])))``, so a trial's
stream depends only on ``(s, i)`` and trials may run in any order or in
parallel. Crossing pickups are drawn in fixed blocks of ``CROSSING_BLOCK``
crossings, each block with its own stream, so runs that differ only in the
number of crossings agree on their common prefix.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from dustsim.errors import ConfigError, ParamError
from dustsim.model import ActiveRobotParams

Z95 = 1.96
MIN_CROSSINGS = 10
CROSSING_BLOCK = 256

# stream tags keep the passive footprint and the crossing blocks independent
_PASSIVE_STREAM = 0
_CROSSING_STREAM = 1


class Mode(str, enum.Enum):
    PASSIVE = "PassiveFootprint"
    OCCLUSION = "OcclusionCrossing"
    ACTIVE = "ActiveModelFaithful"

    @classmethod
    def parse(cls, text: str) -> "Mode":
        key = text.strip().lower()
        aliases = {
            "passive": cls.PASSIVE,
            "passivefootprint": cls.PASSIVE,
            "occlusion": cls.OCCLUSION,
            "occlusioncrossing": cls.OCCLUSION,
            "active": cls.ACTIVE,
            "activemodelfaithful": cls.ACTIVE,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ParamError(f"unknown simulation mode {text!r}") from None


class CrossingConvention(str, enum.Enum):
    """How many line crossings the active robot makes per unit time."""

    PER_UNIT_DISTANCE = "per_unit_distance"  # beta crossings per unit time
    PER_UNIT_TIME = "per_unit_time"  # one crossing per unit time

    def rate(self, beta: float) -> float:
        return beta if self is CrossingConvention.PER_UNIT_DISTANCE else 1.0


@dataclass(frozen=True)
class Arena:
    """Periodic rectangle the robot drives around in."""

    width: float = 10.0
    height: float = 10.0

    def __post_init__(self):
        for name in ("width", "height"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 1.0:
                raise ParamError(f"arena {name} must be finite and >= 1, got {value!r}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class DepositionProcess:
    alpha: float
    particle_mass: float = 1.0
    seed: int = 42

    def __post_init__(self):
        alpha = float(self.alpha)
        pm = float(self.particle_mass)
        if not math.isfinite(alpha) or alpha < 0:
            raise ParamError(f"alpha must be finite and >= 0, got {alpha!r}")
        if not math.isfinite(pm) or pm <= 0:
            raise ParamError(f"particle_mass must be finite and > 0, got {pm!r}")
        seed = int(self.seed)
        if not 0 <= seed < 2**64:
            raise ParamError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "particle_mass", pm)
        object.__setattr__(self, "seed", seed)

    @property
    def intensity(self) -> float:
        """Particle arrivals per unit area per unit time."""
        return self.alpha / self.particle_mass

    def generator(self, trial: int, *stream: int) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence([self.seed, trial, *stream])))


@dataclass(frozen=True)
class SimConfig:
    duration: float
    trials: int = 30
    mode: Mode = Mode.PASSIVE
    robot: ActiveRobotParams | None = None
    arena: Arena = field(default_factory=Arena)
    crossing_convention: CrossingConvention = CrossingConvention.PER_UNIT_DISTANCE
    threads: int = 1

    def __post_init__(self):
        duration = float(self.duration)
        if not math.isfinite(duration) or duration <= 0:
            raise ParamError(f"duration must be finite and > 0, got {duration!r}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ParamError(f"trials must be a positive integer, got {self.trials!r}")
        if int(self.threads) != self.threads or self.threads < 1:
            raise ParamError(f"threads must be a positive integer, got {self.threads!r}")
        object.__setattr__(self, "duration", duration)
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "threads", int(self.threads))
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "crossing_convention", CrossingConvention(self.crossing_convention))
        if self.mode is not Mode.PASSIVE and self.robot is None:
            raise ParamError(f"mode {self.mode.value} needs robot parameters")


@dataclass(frozen=True)
class SimResult:
    mode: Mode
    per_trial_mass: tuple[float, ...]
    mean: float
    std_error: float
    ci95_low: float
    ci95_high: float
    analytic_prediction: float
    seed: int
    params: dict
    crossing_convention: str | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "params": self.params,
            "per_trial_mass": list(self.per_trial_mass),
            "mean": self.mean,
            "std_error": self.std_error,
            "ci95": [self.ci95_low, self.ci95_high],
            "analytic_prediction": self.analytic_prediction,
            "seed": self.seed,
            "crossing_convention": self.crossing_convention,
            "diagnostics": self.diagnostics,
        }


@dataclass(frozen=True)
class _Trial:
    mass: float
    deposited: float
    crossings: int = 0
    occlusion_time: float = 0.0
    occlusion_error: float = 0.0
    pickup_per_crossing: float = 0.0


def _aggregate(
    trials: list[_Trial],
    dep: DepositionProcess,
    cfg: SimConfig,
    analytic: float,
    convention: str | None,
    extra: dict | None = None,
) -> SimResult:
    masses = np.array([t.mass for t in trials], dtype=float)
    n = masses.size
    mean = float(masses.mean())
    std_error = float(masses.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    params = {
        "alpha": dep.alpha,
        "particle_mass": dep.particle_mass,
        "duration": cfg.duration,
        "trials": cfg.trials,
        "arena_width": cfg.arena.width,
        "arena_height": cfg.arena.height,
    }
    if cfg.mode is not Mode.PASSIVE:
        params["beta"] = cfg.robot.beta
        params["h"] = cfg.robot.h
    diagnostics = {"per_trial_deposited": [t.deposited for t in trials]}
    if extra:
        diagnostics.update(extra)
    return SimResult(
        mode=cfg.mode,
        per_trial_mass=tuple(float(m) for m in masses),
        mean=mean,
        std_error=std_error,
        ci95_low=mean - Z95 * std_error,
        ci95_high=mean + Z95 * std_error,
        analytic_prediction=analytic,
        seed=dep.seed,
        params=params,
        crossing_convention=convention,
        diagnostics=diagnostics,
    )


def _run_trials(fn, cfg: SimConfig) -> list[_Trial]:
    if cfg.threads == 1 or cfg.trials == 1:
        return [fn(i) for i in range(cfg.trials)]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        # map preserves trial order
        return list(pool.map(fn, range(cfg.trials)))


def _check_mode(cfg: SimConfig, mode: Mode):
    if cfg.mode is not mode:
        raise ParamError(f"config mode is {cfg.mode.value}, expected {mode.value}")


def run_passive(dep: DepositionProcess, cfg: SimConfig) -> SimResult:
    """Stationary unit footprint somewhere in the arena for ``cfg.duration``.

    Arrivals over the whole arena are Poisson; each lands uniformly, so the
    number on the footprint is a binomial thinning with probability
    ``1 / area``.
    """
    _check_mode(cfg, Mode.PASSIVE)
    area = cfg.arena.width * cfg.arena.height
    lam = dep.intensity * area * cfg.duration

    def trial(i: int) -> _Trial:
        rng = dep.generator(i, _PASSIVE_STREAM)
        total = int(rng.poisson(lam))
        on_footprint = int(rng.binomial(total, 1.0 / area))
        return _Trial(on_footprint * dep.particle_mass, total * dep.particle_mass)

    trials = _run_trials(trial, cfg)
    return _aggregate(trials, dep, cfg, dep.alpha * cfg.duration, None)


def _crossing_block(dep: DepositionProcess, beta: float, trial: int, block: int):
    """Pickup and deposited mass for ``CROSSING_BLOCK`` consecutive crossings.

    Coordinates are relative to the line: the robot's front edge is at
    ``beta * tau`` at time ``tau`` after it reaches the line, and the robot
    covers ``[front - 1, front]`` across the full lane height. During the
    occlusion window ``tau in [0, 1/beta]`` the robot stays inside the
    2x1 box ``x in [-1, 1]``, so only arrivals there can land on it.
    """
    rng = dep.generator(trial, _CROSSING_STREAM, block)
    window = 1.0 / beta
    counts = rng.poisson(dep.intensity * 2.0 * window, size=CROSSING_BLOCK)
    total = int(counts.sum())
    tau = rng.random(total) * window
    x = rng.random(total) * 2.0 - 1.0
    front = beta * tau
    hit = (x >= front - 1.0) & (x <= front)
    owner = np.repeat(np.arange(CROSSING_BLOCK), counts)
    picked = np.bincount(owner[hit], minlength=CROSSING_BLOCK)
    return picked * dep.particle_mass, counts * dep.particle_mass


def crossing_pickups(dep: DepositionProcess, beta: float, trial: int, n: int):
    """Per-crossing pickup and deposited mass for the first ``n`` crossings of a trial."""
    blocks = [_crossing_block(dep, beta, trial, b) for b in range(-(-n // CROSSING_BLOCK))]
    if not blocks:
        return np.zeros(0), np.zeros(0)
    picked = np.concatenate([b[0] for b in blocks])[:n]
    deposited = np.concatenate([b[1] for b in blocks])[:n]
    return picked, deposited


def occlusion_times(beta: float, lap: float, n: int, line_x: float | None = None) -> np.ndarray:
    """How long a point on the line stays covered during each of ``n`` crossings.

    The robot's front edge starts at 0 and reaches ``line_x + k * lap`` on the
    k-th crossing; the back edge clears it one unit later.
    """
    if line_x is None:
        line_x = lap / 2.0
    k = np.arange(n, dtype=float)
    enter = (line_x + k * lap) / beta
    leave = (line_x + 1.0 + k * lap) / beta
    return leave - enter


def _occlusion_trials(dep: DepositionProcess, cfg: SimConfig, n_cross: int):
    beta = cfg.robot.beta

    def trial(i: int) -> _Trial:
        picked, deposited = crossing_pickups(dep, beta, i, n_cross)
        occ = occlusion_times(beta, cfg.arena.width, n_cross)
        total = float(picked.sum())
        return _Trial(
            mass=total,
            deposited=float(deposited.sum()),
            crossings=n_cross,
            occlusion_time=float(occ.mean()),
            occlusion_error=float(np.max(np.abs(occ - 1.0 / beta))),
            pickup_per_crossing=total / n_cross,
        )

    return _run_trials(trial, cfg)


def _require_crossings(n_cross: int):
    if n_cross < MIN_CROSSINGS:
        raise ConfigError(
            f"only {n_cross} line crossings fit in the run; need at least {MIN_CROSSINGS}"
        )


def run_occlusion(dep: DepositionProcess, robot: ActiveRobotParams, cfg: SimConfig) -> SimResult:
    """Robot laps the torus lane and crosses a fixed unit line once per lap.

    Reports the mean pickup per crossing; the model predicts ``alpha / beta``.
    Occlusion times go in ``diagnostics``.
    """
    _check_mode(cfg, Mode.OCCLUSION)
    if cfg.robot != robot:
        cfg = SimConfig(cfg.duration, cfg.trials, cfg.mode, robot, cfg.arena, cfg.crossing_convention, cfg.threads)
    n_cross = int(math.floor(cfg.duration * robot.beta / cfg.arena.width))
    _require_crossings(n_cross)
    trials = _occlusion_trials(dep, cfg, n_cross)
    per_crossing = [_Trial(t.pickup_per_crossing, t.deposited / n_cross) for t in trials]
    extra = {
        "crossings_per_trial": n_cross,
        "occlusion_time_per_crossing": float(np.mean([t.occlusion_time for t in trials])),
        "occlusion_time_max_error": float(max(t.occlusion_error for t in trials)),
        "occlusion_time_predicted": 1.0 / robot.beta,
    }
    return _aggregate(per_crossing, dep, cfg, dep.alpha / robot.beta, None, extra)


def run_active_model_faithful(
    dep: DepositionProcess, robot: ActiveRobotParams, cfg: SimConfig
) -> SimResult:
    """Sweep term ``h * beta**3 * T`` plus sampled falling-dust pickup.

    The robot makes ``floor(rate * T)`` crossings, where ``rate`` comes from
    ``cfg.crossing_convention`` (``beta`` per unit time by default), and each
    crossing picks up falling dust exactly as in :func:`run_occlusion`.
    """
    _check_mode(cfg, Mode.ACTIVE)
    rate = cfg.crossing_convention.rate(robot.beta)
    n_cross = int(math.floor(rate * cfg.duration))
    _require_crossings(n_cross)
    sweep = robot.h * robot.beta**3 * cfg.duration

    def trial(i: int) -> _Trial:
        picked, deposited = crossing_pickups(dep, robot.beta, i, n_cross)
        falling = float(picked.sum())
        return _Trial(
            mass=sweep + falling,
            deposited=float(deposited.sum()),
            crossings=n_cross,
            pickup_per_crossing=falling / n_cross,
        )

    trials = _run_trials(trial, cfg)
    analytic = (robot.h * robot.beta**3 + dep.alpha / robot.beta * rate) * cfg.duration
    extra = {
        "crossings_per_trial": n_cross,
        "crossing_rate": rate,
        "sweep_mass": sweep,
        "per_trial_pickup_per_crossing": [t.pickup_per_crossing for t in trials],
        "pickup_per_crossing": float(np.mean([t.pickup_per_crossing for t in trials])),
        "pickup_per_crossing_predicted": dep.alpha / robot.beta,
    }
    return _aggregate(trials, dep, cfg, analytic, cfg.crossing_convention.value, extra)


def simulate(dep: DepositionProcess, cfg: SimConfig) -> SimResult:
    if cfg.mode is Mode.PASSIVE:
        return run_passive(dep, cfg)
    if cfg.mode is Mode.OCCLUSION:
        return run_occlusion(dep, cfg.robot, cfg)
    return run_active_model_faithful(dep, cfg.robot, cfg)


def seed_replay(cfg: SimConfig, dep: DepositionProcess) -> SimResult:
    """Run the configuration twice and insist on identical output."""
    first = simulate(dep, cfg)
    second = simulate(dep, cfg)
    if first != second:
        raise RuntimeError(f"simulation with seed {dep.seed} is not reproducible")
    return first
