import math

import numpy as np
import pytest

from cpdbandit.helpers.errors import InconsistentTraceError
from cpdbandit.services.metrics import (
    DETECTION,
    FALSE_ALARM,
    ORACLE_RESET,
    attribute_restarts,
    check_regret_identity,
    compute_metrics,
    decomposed_regret,
    segment_pull_counts,
)
from cpdbandit.services.runner import RestartRecord, RunResult, run_experiment

from tests.conftest import EXPT1_ROWS, make_config


def make_run(env, arms, restart_times=(), policy="P", replication=0, is_oracle=False):
    arms = np.asarray(arms, dtype=np.int64)
    T = len(arms)
    means = env.mean_table[1:T + 1]
    inst = means.max(axis=1) - means[np.arange(T), arms]
    restarts = np.zeros(T, dtype=bool)
    for t in restart_times:
        restarts[t - 1] = True
    events = [RestartRecord(replication, policy, t, arm=0, split=1, direction="up", oracle=is_oracle)
              for t in restart_times]
    return RunResult(
        replication=replication,
        policy=policy,
        arms=arms,
        rewards=np.zeros(T),
        inst_regret=inst,
        restarts=restarts,
        events=events,
        detects_changes=not is_oracle,
        is_oracle=is_oracle,
    )


class TestAttributeRestarts:
    def test_delay_and_false_alarm(self):
        attribution = attribute_restarts([1042, 500], [1000], 2000)
        assert attribution.detections == {0: 1042}
        assert attribution.delay(0, [1000]) == 42
        assert attribution.false_alarms == (500,)

    def test_second_restart_in_window_is_false_alarm(self):
        attribution = attribute_restarts([1042, 1100], [1000], 2000)
        assert attribution.detections == {0: 1042}
        assert attribution.false_alarms == (1100,)

    def test_last_window_closes_at_horizon(self):
        attribution = attribute_restarts([2000], [1000], 2000)
        assert attribution.detections == {0: 2000}

    def test_restart_on_the_changepoint_step_precedes_it(self):
        attribution = attribute_restarts([1001], [1001, 2001], 3000)
        assert attribution.detections == {}
        assert attribution.false_alarms == (1001,)

    def test_restart_on_a_later_changepoint_closes_the_previous_window(self):
        attribution = attribute_restarts([2001], [1001, 2001], 3000)
        assert attribution.detections == {0: 2001}
        assert attribution.false_alarms == ()
        attribution = attribute_restarts([1500, 2001], [1001, 2001], 3000)
        assert attribution.detections == {0: 1500}
        assert attribution.false_alarms == (2001,)

    def test_no_changepoints(self):
        attribution = attribute_restarts([10, 20], [], 100)
        assert attribution.detections == {}
        assert attribution.false_alarms == (10, 20)


class TestRegretIdentity:
    def test_decomposition_matches_trace(self, expt1_env):
        config = make_config(list(zip((1, 1001, 2001, 3001), EXPT1_ROWS)), 4000,
                             [{"name": "ucbl_cpd"}, {"name": "dts"}])
        for run in run_experiment(config).runs:
            check_regret_identity(run, expt1_env)
            assert decomposed_regret(run, expt1_env) == pytest.approx(run.final_regret, abs=1e-9)

    def test_pull_counts_per_segment(self, expt1_env):
        arms = [2] * 1000 + [1] * 1000 + [0] * 2000
        counts = segment_pull_counts(make_run(expt1_env, arms), expt1_env)
        assert counts.tolist() == [[0, 0, 1000], [0, 1000, 0], [1000, 0, 0], [1000, 0, 0]]
        assert decomposed_regret(make_run(expt1_env, arms), expt1_env) == pytest.approx(1000 * 0.1)

    def test_tampered_trace_raises(self, expt1_env):
        run = make_run(expt1_env, [0] * 4000)
        run.inst_regret[10] += 0.5
        with pytest.raises(InconsistentTraceError):
            check_regret_identity(run, expt1_env)


class TestComputeMetrics:
    def test_success_rate(self, expt1_env):
        run = make_run(expt1_env, [0] * 4000, restart_times=[500, 1050, 3100])
        metrics = compute_metrics([run], expt1_env)
        pm = metrics.policies["P"]
        assert pm.detections == 2
        assert pm.misses == 1
        assert pm.false_alarms == 1
        assert pm.success_rates == [pytest.approx(2 / 3)]
        assert pm.delays == [49, 99]
        assert [s.delays for s in pm.per_changepoint] == [[49], [], [99]]
        assert [e.kind for e in metrics.events] == [FALSE_ALARM, DETECTION, DETECTION]
        assert metrics.events[1].delay == 49

    def test_oracle_resets_excluded(self, expt1_env):
        oracle = make_run(expt1_env, [0] * 4000, restart_times=[1001, 2001, 3001], policy="O", is_oracle=True)
        metrics = compute_metrics([oracle], expt1_env)
        pm = metrics.policies["O"]
        assert pm.detections == pm.false_alarms == pm.misses == 0
        assert [e.kind for e in metrics.events] == [ORACLE_RESET] * 3
        row = pm.summary_row()
        assert row["detections"] is None
        assert row["mean_delay"] is None

    def test_summary_over_replications(self, expt1_env):
        runs = [make_run(expt1_env, [2] * 4000, replication=r) for r in range(3)]
        pm = compute_metrics(runs, expt1_env).policies["P"]
        assert pm.runs == 3
        assert pm.std_final_regret == 0.0
        assert pm.mean_final_regret == pytest.approx(runs[0].final_regret)
        assert math.isnan(pm.mean_delay)
        assert pm.misses == 9

    def test_labels_without_runs(self, expt1_env):
        metrics = compute_metrics([], expt1_env, labels=["A", "B"])
        assert list(metrics.policies) == ["A", "B"]
        assert math.isnan(metrics.policies["A"].mean_final_regret)
