import math

import numpy as np
import pytest

from dustsim import ActiveRobotParams, ConfigError, ParamError
from dustsim.sim import (
    Arena,
    CrossingConvention,
    DepositionProcess,
    Mode,
    SimConfig,
    crossing_pickups,
    occlusion_times,
    run_active_model_faithful,
    run_occlusion,
    run_passive,
    seed_replay,
    simulate,
)


def occlusion_cfg(duration, beta, h=0.0, trials=5, **kw):
    robot = ActiveRobotParams(beta, h)
    return robot, SimConfig(duration, trials, Mode.OCCLUSION, robot, **kw)


def active_cfg(duration, beta, h, trials=5, **kw):
    robot = ActiveRobotParams(beta, h)
    return robot, SimConfig(duration, trials, Mode.ACTIVE, robot, **kw)


# --- parameter objects -------------------------------------------------------

@pytest.mark.parametrize("duration", [0, -1, math.inf])
def test_config_rejects_bad_duration(duration):
    with pytest.raises(ParamError):
        SimConfig(duration)


def test_config_rejects_bad_trials():
    with pytest.raises(ParamError):
        SimConfig(10, trials=0)


def test_config_needs_robot_for_moving_modes():
    with pytest.raises(ParamError):
        SimConfig(10, mode=Mode.OCCLUSION)


def test_arena_at_least_footprint():
    with pytest.raises(ParamError):
        Arena(0.5, 10)


@pytest.mark.parametrize("kw", [{"alpha": -1}, {"alpha": 1, "particle_mass": 0},
                                {"alpha": 1, "seed": -1}, {"alpha": 1, "seed": 2**64}])
def test_deposition_validation(kw):
    with pytest.raises(ParamError):
        DepositionProcess(**kw)


def test_mode_parse():
    assert Mode.parse("Passive") is Mode.PASSIVE
    assert Mode.parse("OcclusionCrossing") is Mode.OCCLUSION
    assert Mode.parse("active") is Mode.ACTIVE
    with pytest.raises(ParamError):
        Mode.parse("roomba")


def test_mode_mismatch_rejected():
    with pytest.raises(ParamError):
        run_passive(DepositionProcess(1), SimConfig(10, mode=Mode.ACTIVE, robot=ActiveRobotParams(2, 0)))


# --- passive footprint -------------------------------------------------------

@pytest.mark.statistical
def test_passive_mean_matches_poisson():
    res = run_passive(DepositionProcess(10, seed=42), SimConfig(1000, 30))
    sigma = math.sqrt(10 * 1000) * 1.0
    assert abs(res.mean - 10_000) <= 1.96 * sigma / math.sqrt(30)
    assert res.analytic_prediction == 10_000


def test_passive_zero_intensity():
    res = run_passive(DepositionProcess(0, seed=1), SimConfig(123.0, 7))
    assert res.per_trial_mass == (0.0,) * 7
    assert res.mean == 0.0 and res.std_error == 0.0


def test_result_statistics_consistent():
    res = run_passive(DepositionProcess(2.5, seed=3), SimConfig(40, 12))
    masses = np.array(res.per_trial_mass)
    assert res.mean == pytest.approx(masses.mean(), rel=1e-15)
    assert res.std_error == pytest.approx(masses.std(ddof=1) / math.sqrt(12))
    assert res.ci95_low == pytest.approx(res.mean - 1.96 * res.std_error)
    assert res.ci95_high == pytest.approx(res.mean + 1.96 * res.std_error)
    assert all(m >= 0 for m in masses)


@pytest.mark.statistical
@pytest.mark.parametrize("alpha,particle_mass,duration", [(3.0, 1.0, 2.0), (3.0, 0.5, 2.0), (0.7, 1.0, 5.0)])
def test_poisson_law(alpha, particle_mass, duration):
    n = 10_000
    dep = DepositionProcess(alpha, particle_mass, seed=11)
    res = run_passive(dep, SimConfig(duration, n))
    counts = np.array(res.per_trial_mass) / particle_mass
    lam = alpha / particle_mass * 1.0 * duration
    assert abs(counts.mean() - lam) <= 5 * math.sqrt(lam / n)
    assert abs(counts.var(ddof=1) - lam) <= 5 * math.sqrt((lam + 2 * lam**2) / n)
    # arena-wide arrivals follow the same law on area 100
    total = np.array(res.diagnostics["per_trial_deposited"]) / particle_mass
    assert abs(total.mean() - 100 * lam) <= 5 * math.sqrt(100 * lam / n)


@pytest.mark.statistical
def test_passive_convergence_rate():
    res = run_passive(DepositionProcess(4.0, seed=5), SimConfig(500, 40))
    assert abs(res.mean / 500 - 4.0) <= 1.96 * res.std_error / 500


def test_passive_mass_conservation():
    res = run_passive(DepositionProcess(1.5, seed=9), SimConfig(50, 20))
    for got, total in zip(res.per_trial_mass, res.diagnostics["per_trial_deposited"]):
        assert 0 <= got <= total


# --- occlusion ---------------------------------------------------------------

def test_occlusion_time_exact_at_beta_two():
    robot, cfg = occlusion_cfg(5000, 2.0, trials=2)
    res = run_occlusion(DepositionProcess(8, seed=42), robot, cfg)
    assert res.diagnostics["occlusion_time_per_crossing"] == 0.5
    assert res.diagnostics["occlusion_time_max_error"] == 0.0
    assert np.all(occlusion_times(2.0, 10.0, 1000) == 0.5)


@pytest.mark.parametrize("beta", [0.3, 1.7, 3.1415, 7.0])
def test_occlusion_time_geometry(beta):
    occ = occlusion_times(beta, 10.0, 500)
    # floating error only; far below any time step
    assert np.max(np.abs(occ - 1 / beta)) < 1e-9


@pytest.mark.statistical
def test_occlusion_pickup():
    robot, cfg = occlusion_cfg(5000, 2.0, trials=30)
    res = run_occlusion(DepositionProcess(8, seed=42), robot, cfg)
    assert res.diagnostics["crossings_per_trial"] >= 1000
    assert res.analytic_prediction == 4.0
    assert abs(res.mean - 4.0) <= 0.05 * 4.0


@pytest.mark.statistical
@pytest.mark.parametrize("alpha,beta", [(3.0, 0.5), (10.0, 4.0)])
def test_occlusion_pickup_other_speeds(alpha, beta):
    robot, cfg = occlusion_cfg(10 * 2000 / beta, beta, trials=10)
    res = run_occlusion(DepositionProcess(alpha, seed=8), robot, cfg)
    assert abs(res.mean - alpha / beta) <= 4 * res.std_error + 1e-12


def test_occlusion_zero_alpha():
    robot, cfg = occlusion_cfg(1000, 3.0)
    res = run_occlusion(DepositionProcess(0, seed=1), robot, cfg)
    assert res.per_trial_mass == (0.0,) * 5


def test_occlusion_needs_ten_crossings():
    robot, cfg = occlusion_cfg(49, 2.0)  # 9 laps of a 10-wide torus
    with pytest.raises(ConfigError):
        run_occlusion(DepositionProcess(1), robot, cfg)
    robot, cfg = occlusion_cfg(50, 2.0)
    run_occlusion(DepositionProcess(1), robot, cfg)


def test_crossing_mass_conservation():
    picked, deposited = crossing_pickups(DepositionProcess(5.0, seed=2), 1.5, 0, 700)
    assert picked.shape == deposited.shape == (700,)
    assert np.all(picked >= 0) and np.all(picked <= deposited)


def test_crossing_prefix_stable():
    dep = DepositionProcess(5.0, seed=2)
    long, _ = crossing_pickups(dep, 1.5, 3, 1000)
    short, _ = crossing_pickups(dep, 1.5, 3, 300)
    assert np.array_equal(long[:300], short)


# --- model-faithful active robot ----------------------------------------------

def test_active_deterministic_sweep():
    robot, cfg = active_cfg(10, 2.0, 1.0, trials=3)
    res = run_active_model_faithful(DepositionProcess(0, seed=4), robot, cfg)
    assert res.per_trial_mass == (80.0, 80.0, 80.0)
    assert res.analytic_prediction == 80.0
    assert res.crossing_convention == "per_unit_distance"


def test_active_all_zero():
    robot, cfg = active_cfg(100, 2.0, 0.0)
    res = run_active_model_faithful(DepositionProcess(0, seed=4), robot, cfg)
    assert res.per_trial_mass == (0.0,) * 5


@pytest.mark.statistical
def test_active_pickup_per_crossing():
    robot, cfg = active_cfg(1000, 2.0, 0.0, trials=10)
    res = run_active_model_faithful(DepositionProcess(8, seed=42), robot, cfg)
    assert res.diagnostics["crossings_per_trial"] >= 1000
    assert abs(res.diagnostics["pickup_per_crossing"] - 4.0) <= 0.2
    # one crossing per unit distance makes the falling term alpha per unit time
    assert res.analytic_prediction == pytest.approx(8 * 1000)


def test_active_per_unit_time_convention():
    robot, cfg = active_cfg(200, 2.0, 0.5, crossing_convention=CrossingConvention.PER_UNIT_TIME)
    res = run_active_model_faithful(DepositionProcess(6, seed=4), robot, cfg)
    assert res.analytic_prediction == pytest.approx((0.5 * 8 + 6 / 2) * 200)
    assert res.diagnostics["crossings_per_trial"] == 200


def test_active_reduces_to_occlusion():
    dep = DepositionProcess(8, seed=13)
    arena = Arena(1.0, 1.0)  # one lap per unit distance: same crossing count in both modes
    robot, occ_cfg = occlusion_cfg(600, 2.0, arena=arena)
    _, act_cfg = active_cfg(600, 2.0, 0.0, arena=arena)
    occ = run_occlusion(dep, robot, occ_cfg)
    act = run_active_model_faithful(dep, robot, act_cfg)
    assert occ.diagnostics["crossings_per_trial"] == act.diagnostics["crossings_per_trial"] == 1200
    assert list(occ.per_trial_mass) == act.diagnostics["per_trial_pickup_per_crossing"]


def test_active_mass_conservation():
    robot, cfg = active_cfg(300, 1.5, 0.2)
    res = run_active_model_faithful(DepositionProcess(3, seed=5), robot, cfg)
    sweep = res.diagnostics["sweep_mass"]
    for got, total in zip(res.per_trial_mass, res.diagnostics["per_trial_deposited"]):
        assert 0 <= got - sweep <= total + 1e-9


# --- determinism ---------------------------------------------------------------

@pytest.mark.parametrize("mode", list(Mode))
def test_seed_replay(mode):
    robot = None if mode is Mode.PASSIVE else ActiveRobotParams(2.0, 0.3)
    cfg = SimConfig(200, 6, mode, robot)
    dep = DepositionProcess(3.0, seed=7)
    a = seed_replay(cfg, dep)
    b = simulate(dep, cfg)
    assert a == b


def test_different_seeds_differ():
    cfg = SimConfig(200, 6)
    a = simulate(DepositionProcess(3.0, seed=7), cfg)
    b = simulate(DepositionProcess(3.0, seed=8), cfg)
    assert a.per_trial_mass != b.per_trial_mass


@pytest.mark.parametrize("mode", list(Mode))
def test_threads_do_not_change_results(mode):
    robot = None if mode is Mode.PASSIVE else ActiveRobotParams(2.0, 0.3)
    dep = DepositionProcess(3.0, seed=7)
    seq = simulate(dep, SimConfig(200, 4, mode, robot, threads=1))
    par = simulate(dep, SimConfig(200, 4, mode, robot, threads=4))
    assert seq == par


def test_trial_stream_depends_only_on_seed_and_index():
    dep = DepositionProcess(3.0, seed=7)
    few = simulate(dep, SimConfig(200, 3))
    many = simulate(dep, SimConfig(200, 9))
    assert many.per_trial_mass[:3] == few.per_trial_mass


def test_json_document_keys():
    doc = run_passive(DepositionProcess(1.0, seed=42), SimConfig(10, 2)).to_json_dict()
    for key in ("mode", "params", "per_trial_mass", "mean", "std_error", "ci95",
                "analytic_prediction", "seed", "crossing_convention"):
        assert key in doc
    assert doc["mode"] == "PassiveFootprint"
    assert len(doc["ci95"]) == 2
