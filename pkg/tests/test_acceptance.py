"""Monte-Carlo reproductions of the published experiments. Run with `pytest -m slow`."""
import numpy as np
import pytest

from cpdbandit.commands.common import load_config
from cpdbandit.services.bench import bench_detection_cost
from cpdbandit.services.eta_sweep import eta_sweep
from cpdbandit.services.metrics import attribute_restarts, check_regret_identity, compute_metrics
from cpdbandit.services.policies import UCBLCPD
from cpdbandit.services.policies.impcpd import impcpd_max_phase
from cpdbandit.services.runner import environment_from_spec, run_experiment

pytestmark = pytest.mark.slow

ACTIVE = ("UCBL-CPD", "ImpCPD")
PASSIVE = ("DUCB", "SW-UCB", "DTS")


@pytest.fixture(scope="module")
def expt1():
    config = load_config("expt1")
    result = run_experiment(config)
    return result, compute_metrics(result.runs, result.env, result.failures, result.labels)


@pytest.fixture(scope="module")
def expt3():
    config = load_config("expt3")
    result = run_experiment(config)
    return result, compute_metrics(result.runs, result.env, result.failures, result.labels)


def test_false_alarm_rate_on_stationary_stream():
    runs, alarms = 500, 0
    for r in range(runs):
        rewards = (np.random.default_rng([2000, r]).random(2000) < 0.5).astype(float)
        policy = UCBLCPD(1, delta=0.01)
        for t in range(1, 2001):
            arm = policy.select(t)
            if policy.update(arm, rewards[t - 1], t).restart is not None:
                alarms += 1
                break
    assert alarms / runs <= 0.05


class TestExperiment1:
    def test_no_failures(self, expt1):
        result, _ = expt1
        assert result.failures == []
        assert len(result.runs) == 50 * 10

    def test_early_changepoints_detected_quickly(self, expt1):
        _, metrics = expt1
        for label in ACTIVE:
            for g in (0, 1):
                stats = metrics.policies[label].per_changepoint[g]
                assert stats.detection_rate >= 0.8, (label, g)
                assert np.median(stats.delays) < 500, (label, g)

    def test_active_beat_passive(self, expt1):
        _, metrics = expt1
        regret = {label: pm.mean_final_regret for label, pm in metrics.policies.items()}
        for active in ACTIVE:
            for passive in PASSIVE:
                assert regret[active] < regret[passive], (active, passive)

    def test_oracles_lowest(self, expt1):
        _, metrics = expt1
        regret = {label: pm.mean_final_regret for label, pm in metrics.policies.items()}
        worst_oracle = max(regret["Oracle-UCB1"], regret["Oracle-TS"])
        others = [v for label, v in regret.items() if not label.startswith("Oracle")]
        assert worst_oracle < min(others)

    def test_regret_identity_on_every_run(self, expt1):
        result, _ = expt1
        for run in result.runs:
            check_regret_identity(run, result.env)


class TestExperiment3:
    def test_active_policies_catch_every_change(self, expt3):
        result, _ = expt3
        env = result.env
        for label in ACTIVE:
            runs = [r for r in result.runs if r.policy == label]
            complete = sum(
                len(attribute_restarts([e.time for e in r.events], env.changepoints, env.horizon).detections) == 3
                for r in runs
            )
            assert complete > len(runs) / 2, label

    def test_impcpd_beats_passive(self, expt3):
        _, metrics = expt3
        regret = {label: pm.mean_final_regret for label, pm in metrics.policies.items()}
        assert regret["ImpCPD"] < regret["DUCB"]
        assert regret["ImpCPD"] < regret["DTS"]

    def test_regret_identity_on_every_run(self, expt3):
        result, _ = expt3
        for run in result.runs:
            check_regret_identity(run, result.env)


def test_radius_ordering_experiment4():
    config = load_config("expt4")
    result = run_experiment(config)
    metrics = compute_metrics(result.runs, result.env, result.failures, result.labels)
    regret = {label: pm.mean_final_regret for label, pm in metrics.policies.items()}
    assert regret["UCBL-CPD"] <= regret["UCBP-CPD"] <= regret["UCB-CPD"]


def test_detection_cost_experiment5():
    config = load_config("expt5_bench")
    env = environment_from_spec(config.environment)
    rows = bench_detection_cost(env, config.policies, config.bench.horizons, repeats=5, seed=config.seed)
    by_key = {(r.policy, r.horizon): r for r in rows}
    for horizon in config.bench.horizons:
        ucbl = by_key["UCBL-CPD", horizon]
        imp = by_key["ImpCPD", horizon]
        assert ucbl.scan_calls == horizon - env.n_arms * (1 + ucbl.restarts)
        assert imp.scan_calls <= (impcpd_max_phase(horizon, 0.05) + 1) * (imp.restarts + 1)
        assert imp.wall_ms_median < ucbl.wall_ms_median


def test_eta_trend():
    config = load_config("eta_sweep")
    env = environment_from_spec(config.environment)
    rows = eta_sweep(
        [list(s.means) for s in env.segments],
        config.eta_sweep.etas,
        config.eta_sweep.base_cost,
        config.policies,
        range(config.replications),
        seed=config.seed,
    )
    success = {(r.policy, r.eta): r.success_mean for r in rows}
    assert success["UCBL-CPD", 1.0] > success["UCBL-CPD", 0.2]
    for eta in config.eta_sweep.etas:
        assert success["UCBL-CPD", eta] >= success["ImpCPD", eta]
