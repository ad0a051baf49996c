import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from randconsensus.graph import build_graph
from randconsensus.random_net import (
    BatchUpdater,
    realization_from_mask,
    sample_realization,
    trial_stream,
    weight_matrix,
    write_edge_list,
)

from .conftest import connected_graphs


def test_single_edge_edge_frequencies(single_edge):
    rng = np.random.default_rng(7)
    draws = np.array([sample_realization(single_edge, rng).adjacency[[0, 1], [1, 0]] for _ in range(40_000)])
    freq = draws.mean(axis=0)
    assert abs(freq[0] - 0.5) <= 0.01
    assert abs(freq[1] - 0.5) <= 0.01
    # the two directions are sampled independently
    assert abs(np.corrcoef(draws[:, 0], draws[:, 1])[0, 1]) <= 0.02


def test_star_center_in_degree_is_binomial():
    star = build_graph([(0, 1), (0, 2), (0, 3), (0, 4)], [0.5] * 5)
    rng = np.random.default_rng(11)
    indeg = np.array([sample_realization(star, rng).in_degrees[0] for _ in range(40_000)])
    observed = np.bincount(indeg, minlength=5)
    expected = stats.binom.pmf(np.arange(5), 4, 0.5) * indeg.size
    assert stats.chisquare(observed, expected).pvalue > 0.01


def test_weight_matrix_examples(single_edge):
    none = realization_from_mask(single_edge, [False, False])
    np.testing.assert_array_equal(weight_matrix(none), np.eye(2))
    both = realization_from_mask(single_edge, [True, True])
    np.testing.assert_array_equal(weight_matrix(both), np.full((2, 2), 0.5))
    one = realization_from_mask(single_edge, [True, False])  # 0 -> 1 only
    np.testing.assert_array_equal(weight_matrix(one), [[1.0, 0.0], [0.5, 0.5]])


def test_path_center_listening_to_both(path3):
    # lexicographic directed pairs: (0,1) (1,0) (1,2) (2,1)
    real = realization_from_mask(path3, [True, False, False, True])
    w = weight_matrix(real)
    np.testing.assert_allclose(w[1], [1 / 3, 1 / 3, 1 / 3])
    np.testing.assert_array_equal(w[0], [1, 0, 0])
    np.testing.assert_array_equal(w[2], [0, 0, 1])


@settings(max_examples=50, deadline=None)
@given(connected_graphs(max_nodes=6), st.integers(0, 2**32 - 1))
def test_realization_invariants(g, seed):
    real = sample_realization(g, np.random.default_rng(seed))
    a = real.adjacency
    assert np.all(a <= g.adjacency)
    assert not np.any(np.diag(a))
    w = weight_matrix(real)
    np.testing.assert_allclose(w.sum(axis=1), 1.0, rtol=0, atol=1e-15)
    assert np.all(w >= 0)
    assert np.all(np.diag(w) > 0)
    assert np.all((w > 0) == ((a.T + np.eye(g.n)) > 0))


def test_streams_are_reproducible_and_distinct():
    a = trial_stream(5, 3).random(8)
    b = trial_stream(5, 3).random(8)
    c = trial_stream(5, 4).random(8)
    d = trial_stream(6, 3).random(8)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


@settings(max_examples=30, deadline=None)
@given(connected_graphs(max_nodes=6), st.integers(0, 2**32 - 1))
def test_batch_updater_matches_dense_product(g, seed):
    rng = np.random.default_rng(seed)
    upd = BatchUpdater(g)
    u = rng.random((3, upd.m))
    x = rng.normal(size=(3, g.n))
    y = upd.step(x, u)
    pairs = g.directed_edges()
    for b in range(3):
        w = weight_matrix(realization_from_mask(g, u[b] < g.probs[pairs[:, 1]]))
        np.testing.assert_allclose(y[b], w @ x[b], rtol=0, atol=1e-14)


def test_edge_list_dump(tmp_path, path3):
    real = realization_from_mask(path3, [True, False, True, True])
    write_edge_list(real, tmp_path / "e.txt")
    assert (tmp_path / "e.txt").read_text() == "0 1\n1 2\n2 1\n"


def test_mask_length_mismatch_rejected(single_edge):
    with pytest.raises(IndexError):
        realization_from_mask(single_edge, [True, False, True])
