import numpy as np
import pytest
import scipy.sparse as sp

from graphshift.backend import HAVE_NUMBA
from graphshift.errors import ConfigError
from graphshift.graph_io import Graph, SyntheticConfig, generate_pair
from graphshift.walks import (WalkConfig, cooccurrence, pair_counts, random_table,
                              sample_walks, walk_table)

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")


def path_graph():
    return Graph(sp.csr_matrix(np.array([[0., 1.], [1., 0.]])), np.zeros((2, 1)))


def test_random_table_deterministic():
    a = random_table(7, 5, 9)
    b = random_table(7, 5, 9)
    assert a.dtype == np.uint64
    assert a.shape == (5, 9)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, random_table(8, 5, 9))


def test_random_table_spread():
    # counter-based mixing should fill the u64 range roughly uniformly
    t = random_table(0, 100, 100).ravel()
    assert np.unique(t).size == t.size
    assert (t > np.uint64(2**63)).mean() == pytest.approx(0.5, abs=0.05)


def test_walks_alternate_on_path_graph():
    cfg = WalkConfig(walks_per_node=3, walk_length=6, window=2, seed=1)
    for walk in sample_walks(path_graph(), cfg):
        assert walk.size == 6  # walk_length counts nodes, start included
        start = walk[0]
        assert np.array_equal(walk, (start + np.arange(6)) % 2)


def test_isolated_node_walk_stops():
    adj = sp.csr_matrix((np.ones(2), (np.array([0, 1]), np.array([1, 0]))), shape=(3, 3))
    g = Graph(adj, np.zeros((3, 1)))
    cfg = WalkConfig(walks_per_node=2, walk_length=5, window=2, seed=0)
    walks = sample_walks(g, cfg)
    assert len(walks) == 6  # node-major: walks_per_node per node
    for walk in walks[4:]:
        assert np.array_equal(walk, [2])


def test_walk_table_padding():
    adj = sp.csr_matrix((np.ones(2), (np.array([0, 1]), np.array([1, 0]))), shape=(3, 3))
    g = Graph(adj, np.zeros((3, 1)))
    cfg = WalkConfig(walks_per_node=1, walk_length=4, window=2, seed=0)
    walks, lengths = walk_table(g.adjacency, cfg)
    assert walks.shape == (3, 4)
    assert lengths.tolist() == [4, 4, 1]
    assert (walks[2, 1:] == -1).all()


def test_pair_counts_hand_oracle_window1():
    walks = np.array([[0, 1, 0]], dtype=np.int64)
    lengths = np.array([3], dtype=np.int64)
    f = pair_counts(walks, lengths, 1, 2).toarray()
    assert np.array_equal(f, [[0., 2.], [2., 0.]])


def test_pair_counts_hand_oracle_window2_self():
    walks = np.array([[0, 1, 0]], dtype=np.int64)
    lengths = np.array([3], dtype=np.int64)
    f = pair_counts(walks, lengths, 2, 2, count_self=True).toarray()
    assert np.array_equal(f, [[2., 2.], [2., 0.]])
    f = pair_counts(walks, lengths, 2, 2, count_self=False).toarray()
    assert np.array_equal(f, [[0., 2.], [2., 0.]])


def test_window_larger_than_walk():
    walks = np.array([[0, 1]], dtype=np.int64)
    lengths = np.array([2], dtype=np.int64)
    f = pair_counts(walks, lengths, 10, 2).toarray()
    # the single positional pair emits one count in each direction
    assert np.array_equal(f, [[0., 1.], [1., 0.]])


def test_cooccurrence_list_form_pads_ragged():
    walks = [np.array([0, 1, 2], dtype=np.int64), np.array([2], dtype=np.int64)]
    f = cooccurrence(walks, 2, 3).toarray()
    want = np.zeros((3, 3))
    for a, b in ((0, 1), (1, 2), (0, 2)):  # each positional pair emits both orderings
        want[a, b] += 1
    assert np.array_equal(f, want + want.T)


def test_counts_symmetric():
    pair = generate_pair(SyntheticConfig(n_nodes=40, n_classes=2, attr_dim=3,
                                         p_in=0.3, p_out=0.05, seed=2))
    cfg = WalkConfig(walks_per_node=4, walk_length=12, window=3, seed=5)
    walks, lengths = walk_table(pair.source.adjacency, cfg)
    f = pair_counts(walks, lengths, cfg.window, pair.source.n_nodes)
    assert (f != f.T).nnz == 0
    assert (f.data >= 0).all()


@needs_numba
def test_backend_parity_bitwise():
    pair = generate_pair(SyntheticConfig(n_nodes=60, n_classes=3, attr_dim=3,
                                         p_in=0.2, p_out=0.03, seed=3))
    cfg = WalkConfig(walks_per_node=3, walk_length=15, window=4, seed=11)
    wn, ln = walk_table(pair.source.adjacency, cfg, backend_name="numba")
    wp, lp = walk_table(pair.source.adjacency, cfg, backend_name="numpy")
    assert np.array_equal(wn, wp)
    assert np.array_equal(ln, lp)
    fn = pair_counts(wn, ln, cfg.window, 60, backend_name="numba")
    fp = pair_counts(wp, lp, cfg.window, 60, backend_name="numpy")
    assert (fn != fp).nnz == 0
    assert np.array_equal(fn.data, fp.data)


def test_walk_config_validation():
    with pytest.raises(ConfigError):
        WalkConfig(walks_per_node=0)
    with pytest.raises(ConfigError):
        WalkConfig(walk_length=0)
    with pytest.raises(ConfigError):
        WalkConfig(window=0)


def test_bad_backend_name():
    with pytest.raises(ConfigError):
        walk_table(path_graph().adjacency, WalkConfig(seed=0), backend_name="bogus")
