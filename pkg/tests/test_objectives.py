import math

import numpy as np
import pytest
import scipy.sparse as sp

from graphshift.errors import ConfigError, DimensionError
from graphshift.objectives import (adversarial_loss, anneal_weights, class_aggregates,
                                   make_pseudo_labels, posterior_scores, pseudo_label_loss,
                                   refresh_pseudo_state, scores_against_clusters,
                                   supervised_loss)


def quad_loop_scores(p_dense, y_hat, node_set, n_classes):
    """Reference posterior scores: explicit loops over clusters and classes."""
    agg = np.zeros((n_classes, p_dense.shape[1]))
    for k in range(n_classes):
        members = [n for n, y in zip(node_set, y_hat) if y == k]
        if members:
            agg[k] = p_dense[members].mean(axis=0)
    w = np.zeros(len(node_set))
    for idx, (n, y) in enumerate(zip(node_set, y_hat)):
        affin = [float(p_dense[n] @ agg[k]) for k in range(n_classes)]
        rest = (sum(affin) - affin[y]) / (n_classes - 1)
        w[idx] = affin[y] - rest
    return w


def test_supervised_loss_hand_values():
    probs = np.array([[1.0, 0.0], [0.25, 0.75]])
    labels = np.array([0, 1])
    assert supervised_loss(probs, labels, np.array([True, False])) == pytest.approx(0.0, abs=1e-12)
    want = -(math.log(1.0) + math.log(0.75)) / 2
    assert supervised_loss(probs, labels, np.array([True, True])) == pytest.approx(want, abs=1e-12)
    with pytest.raises(ConfigError):
        supervised_loss(probs, labels, np.zeros(2, dtype=bool))


def test_supervised_loss_clamps_zero_probability():
    probs = np.array([[0.0, 1.0]])
    val = supervised_loss(probs, np.array([0]), np.array([True]))
    assert np.isfinite(val)
    assert val == pytest.approx(-math.log(1e-12), abs=1e-6)


def test_adversarial_loss_hand_value():
    val = adversarial_loss(np.array([0.5, 0.5]), np.array([0.5]))
    assert val == pytest.approx(2 * math.log(2.0), abs=1e-12)
    # perfect discrimination drives the loss to zero
    assert adversarial_loss(np.array([1.0]), np.array([0.0])) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(ConfigError):
        adversarial_loss(np.array([]), np.array([0.5]))


def test_make_pseudo_labels_ties_pick_smallest():
    probs = np.array([[0.4, 0.4, 0.2], [0.1, 0.45, 0.45], [0.2, 0.3, 0.5]])
    assert make_pseudo_labels(probs).tolist() == [0, 1, 2]


def test_class_aggregates_mean_rows():
    p = sp.csr_matrix(np.array([[1.0, 0.0, 2.0],
                                [0.0, 4.0, 0.0],
                                [3.0, 0.0, 1.0]]))
    agg = class_aggregates(p, np.array([0, 1, 2]), np.array([0, 1, 0]), 3)
    assert np.array_equal(agg[0], [2.0, 0.0, 1.5])  # mean of rows 0 and 2
    assert np.array_equal(agg[1], [0.0, 4.0, 0.0])
    assert np.array_equal(agg[2], [0.0, 0.0, 0.0])  # empty class stays zero
    with pytest.raises(DimensionError):
        class_aggregates(p, np.array([0, 1]), np.array([0]), 3)


def test_posterior_scores_match_quad_loop():
    rng = np.random.default_rng(6)
    for _ in range(10):
        n = int(rng.integers(4, 13))
        c = int(rng.integers(2, 5))
        dense = rng.random((n, n)) * (rng.random((n, n)) < 0.5)
        p = sp.csr_matrix(dense)
        node_set = np.arange(n)
        y_hat = rng.integers(0, c, n)
        w = posterior_scores(p, y_hat, node_set, c)
        want = quad_loop_scores(dense, y_hat, node_set, c)
        assert np.allclose(w, want, rtol=0, atol=1e-10)


def test_posterior_scores_sign_property():
    # two well-separated cliques: a node scores its own cluster above the other
    dense = np.zeros((6, 6))
    dense[:3, :3] = 1.0
    dense[3:, 3:] = 1.0
    np.fill_diagonal(dense, 0.0)
    p = sp.csr_matrix(dense)
    y_hat = np.array([0, 0, 0, 1, 1, 1])
    w = posterior_scores(p, y_hat, np.arange(6), 2)
    assert (w > 0).all()
    # swapping every label is only a renaming of the class ids, so the
    # scores cannot change
    flipped = posterior_scores(p, 1 - y_hat, np.arange(6), 2)
    assert np.array_equal(flipped, w)
    # whereas one node dragged into the wrong cluster scores negative while
    # the consistently assigned nodes stay positive
    y_bad = np.array([0, 0, 0, 0, 1, 1])
    w_bad = posterior_scores(p, y_bad, np.arange(6), 2)
    assert w_bad[3] < 0
    assert (w_bad[[0, 1, 2, 4, 5]] > 0).all()


def test_posterior_scores_validation():
    p = sp.csr_matrix(np.eye(3))
    with pytest.raises(ConfigError):
        posterior_scores(p, np.array([0]), np.array([], dtype=np.int64), 2)
    with pytest.raises(ConfigError):
        posterior_scores(p, np.array([0, 1, 0]), np.arange(3), 1)
    with pytest.raises(DimensionError):
        posterior_scores(p, np.array([0, 1]), np.arange(3), 2)


def test_scores_against_clusters_separate_sets():
    # cluster rows come from nodes 0 and 2; node 1 is scored against them.
    # affinity is neighborhood overlap: row1 . row0 = 2*1 + 1*2 = 4, row1 . row2 = 0
    dense = np.array([[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 5.0]])
    p = sp.csr_matrix(dense)
    w, agg = scores_against_clusters(p, np.array([0, 2]), np.array([0, 1]),
                                     np.array([1]), np.array([0]), 2)
    assert np.array_equal(agg[0], [1.0, 2.0, 0.0])
    assert np.array_equal(agg[1], [0.0, 0.0, 5.0])
    assert w[0] == pytest.approx(4.0, abs=1e-12)


def test_anneal_weights_two_points():
    w = anneal_weights(np.array([0.1, 0.9]))
    # larger score ranks first: weight beta, the other 0.8 + 0.2 * (1 + cos(pi/2)) / 1
    assert w[1] == pytest.approx(1.2, abs=1e-12)
    assert w[0] == pytest.approx(1.0, abs=1e-12)


def test_anneal_weights_properties():
    rng = np.random.default_rng(2)
    scores = rng.normal(size=50)
    w = anneal_weights(scores, alpha=0.8, beta=1.2)
    assert (w >= 0.8 - 1e-12).all() and (w <= 1.2 + 1e-12).all()
    order = np.argsort(-scores, kind="stable")
    assert (np.diff(w[order]) <= 1e-12).all()  # nonincreasing along the ranking
    assert w[order][0] == pytest.approx(1.2, abs=1e-12)


def test_anneal_weights_ties_by_position():
    w = anneal_weights(np.array([0.5, 0.5, 0.5]))
    assert w[0] > w[1] > w[2]


def test_anneal_weights_single_and_errors():
    assert anneal_weights(np.array([3.0]))[0] == pytest.approx(1.2, abs=1e-12)
    with pytest.raises(ConfigError):
        anneal_weights(np.array([]))
    with pytest.raises(ConfigError):
        anneal_weights(np.array([1.0]), alpha=1.2, beta=0.8)


def test_pseudo_label_loss_hand_value():
    probs = np.array([[0.5, 0.5], [0.9, 0.1]])
    node_set = np.array([0, 1])
    y_hat = np.array([0, 0])
    weights = np.array([1.0, 2.0])
    ce = -(1.0 * math.log(0.5) + 2.0 * math.log(0.9)) / 2
    q = probs.mean(axis=0)
    div = float((q * np.log(q)).sum())
    assert pseudo_label_loss(probs, y_hat, weights, node_set) == pytest.approx(ce + div, abs=1e-12)
    with pytest.raises(ConfigError):
        pseudo_label_loss(probs, y_hat, weights, np.array([], dtype=np.int64))
    with pytest.raises(DimensionError):
        pseudo_label_loss(probs, y_hat[:1], weights, node_set)


def refresh_fixture(n=8, c=2, seed=0, n_labeled=3):
    rng = np.random.default_rng(seed)
    dense_s = rng.random((n, n)) * (rng.random((n, n)) < 0.6)
    dense_t = rng.random((n, n)) * (rng.random((n, n)) < 0.6)
    probs_s = rng.dirichlet(np.ones(c), n)
    probs_t = rng.dirichlet(np.ones(c), n)
    labels = rng.integers(0, c, n)
    mask = np.zeros(n, dtype=bool)
    mask[:n_labeled] = True
    return (sp.csr_matrix(dense_s), sp.csr_matrix(dense_t), probs_s, probs_t,
            labels, mask)


def test_refresh_pseudo_state_scopes():
    p_s, p_t, probs_s, probs_t, labels, mask = refresh_fixture()
    state = refresh_pseudo_state(p_s, p_t, probs_s, probs_t, labels, mask, 2)
    # source CE runs over unlabeled nodes only; target covers every node
    assert np.array_equal(state.source.nodes, np.nonzero(~mask)[0])
    assert np.array_equal(state.target.nodes, np.arange(8))
    assert np.array_equal(state.source.y_hat, make_pseudo_labels(probs_s)[~mask])
    assert state.source.weights.shape == state.source.nodes.shape
    assert state.target.aggregates.shape == (2, 8)


def test_refresh_keeps_ground_truth_in_clusters():
    p_s, p_t, probs_s, probs_t, labels, mask = refresh_fixture(seed=3)
    state = refresh_pseudo_state(p_s, p_t, probs_s, probs_t, labels, mask, 2)
    # cluster membership for scoring: labeled nodes contribute their true class,
    # unlabeled their argmax
    cluster_labels = np.where(mask, labels, make_pseudo_labels(probs_s))
    want, _ = scores_against_clusters(p_s, np.arange(8), cluster_labels,
                                      state.source.nodes, state.source.y_hat, 2)
    assert np.allclose(state.source.raw, want, rtol=0, atol=1e-12)


def test_refresh_requires_unlabeled_source():
    p_s, p_t, probs_s, probs_t, labels, _ = refresh_fixture()
    with pytest.raises(ConfigError):
        refresh_pseudo_state(p_s, p_t, probs_s, probs_t, labels,
                             np.ones(8, dtype=bool), 2)
