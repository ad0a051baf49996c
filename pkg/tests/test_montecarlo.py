import numpy as np
import pytest

from randconsensus.analysis import dominant_left_eigvec_closed, exact_variance
from randconsensus.errors import AllTrialsDiverged, ValidationError
from randconsensus.graph import Scenario, build_graph
from randconsensus.montecarlo import (
    BLOCK_STEPS,
    run_ensemble,
    run_trajectory,
    write_ensemble_csv,
    write_histogram_csv,
    write_summary_json,
)
from randconsensus.random_net import BatchUpdater, trial_stream

from .conftest import complete_graph


def test_constant_initial_is_immediate(mixed_triangle):
    res = run_trajectory(mixed_triangle, [0.4, 0.4, 0.4], trial_stream(1, 0))
    assert res.converged and res.steps == 0
    assert res.consensus_value == pytest.approx(0.4, abs=1e-15)


def test_relaxed_complete_graph_one_step():
    g = complete_graph(5, 1.0, relaxed=True)
    x = np.array([0.0, 1.0, 4.0, 2.0, 3.0])
    res = run_trajectory(g, x, trial_stream(9, 0))
    assert res.converged and res.steps == 1
    assert res.consensus_value == pytest.approx(2.0, abs=1e-15)


def test_single_edge_mean(single_edge):
    stats = run_ensemble(Scenario(single_edge, [0.0, 1.0], trials=20_000, master_seed=5))
    assert abs(stats.mean - 0.5) <= 3 * stats.standard_error
    ev = exact_variance(single_edge, [0.0, 1.0]).exact_variance
    assert stats.std**2 == pytest.approx(ev, rel=0.05)


def test_trajectory_matches_ensemble_entry(mixed_triangle):
    x = [0.0, 0.5, 1.0]
    stats = run_ensemble(Scenario(mixed_triangle, x, trials=40, master_seed=77))
    for t in (0, 17, 39):
        res = run_trajectory(mixed_triangle, x, trial_stream(77, t))
        assert res.consensus_value == stats.all_values[t]
        assert res.steps == stats.steps[t]


def test_determinism_and_single_trial(mixed_triangle):
    sc = Scenario(mixed_triangle, [0.0, 0.5, 1.0], trials=1, master_seed=3)
    a, b = run_ensemble(sc), run_ensemble(sc)
    assert a.all_values.tobytes() == b.all_values.tobytes()
    assert a.std == 0.0 and not a.std_defined


def test_consensus_stays_in_hull_and_spread_shrinks(mixed_triangle):
    x = np.array([-1.0, 0.25, 2.0])
    for t in range(20):
        res = run_trajectory(mixed_triangle, x, trial_stream(123, t), record=True)
        spread = res.path.max(axis=1) - res.path.min(axis=1)
        assert np.all(np.diff(spread) <= 1e-15)
        assert x.min() <= res.consensus_value <= x.max()
        assert res.path.shape == (res.steps + 1, 3)


def test_non_convergence_is_reported(mixed_triangle, path3):
    # the leaves of a path never hold equal values after a finite number of steps
    res = run_trajectory(path3, [0.0, 0.5, 1.0], trial_stream(1, 0), tol=1e-10, max_steps=2)
    assert not res.converged and res.steps == 2
    sc = Scenario(path3, [0.0, 0.5, 1.0], trials=3, master_seed=1, max_steps=1)
    with pytest.raises(AllTrialsDiverged):
        run_ensemble(sc)


def test_bad_tolerance(mixed_triangle):
    with pytest.raises(ValidationError):
        run_trajectory(mixed_triangle, [0.0, 0.5, 1.0], trial_stream(1, 0), tol=0.0)


def test_weighted_state_has_no_drift():
    # v1^T x(k) is a martingale under i.i.d. weights with mean E W
    g = build_graph([(0, 1), (1, 2), (2, 3), (0, 2)], [0.3, 0.6, 0.45, 0.8])
    v1 = dominant_left_eigvec_closed(g).v1_ew
    rng = np.random.default_rng(42)
    upd = BatchUpdater(g)
    x0 = np.array([1.0, -2.0, 0.5, 3.0])
    x = np.tile(x0, (20_000, 1))
    target = v1 @ x0
    for _ in range(3 * BLOCK_STEPS):
        x = upd.step(x, rng.random((x.shape[0], upd.m)))
        proj = x @ v1
        se = proj.std(ddof=1) / np.sqrt(proj.size)
        assert abs(proj.mean() - target) <= 4.5 * se + 1e-12


def test_workers_do_not_change_output(mixed_triangle, tmp_path):
    sc = Scenario(mixed_triangle, [0.0, 0.5, 1.0], trials=2100, master_seed=8)
    one, two = run_ensemble(sc, workers=1), run_ensemble(sc, workers=2)
    write_ensemble_csv(one, tmp_path / "a.csv")
    write_ensemble_csv(two, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_writers(mixed_triangle, tmp_path):
    stats = run_ensemble(Scenario(mixed_triangle, [0.0, 0.5, 1.0], trials=50, master_seed=2, bins=5))
    write_ensemble_csv(stats, tmp_path / "e.csv")
    write_histogram_csv(stats, tmp_path / "h.csv")
    write_summary_json(stats, tmp_path / "s.json")
    lines = (tmp_path / "e.csv").read_text().splitlines()
    assert lines[0] == "trial,consensus_value,steps,converged" and len(lines) == 51
    hist = (tmp_path / "h.csv").read_text().splitlines()
    assert len(hist) == 6 and sum(int(r.split(",")[2]) for r in hist[1:]) == 50
