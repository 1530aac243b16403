import numpy as np
import pytest
import scipy.sparse as sp

from graphshift.errors import ConfigError, DataError
from graphshift.graph_io import (UNLABELED, Graph, DomainPair, SyntheticConfig,
                                 adjacency_from_edges, generate_pair, load_attr_names,
                                 load_graph, split_labels, union_align, write_attr_file,
                                 write_edge_file, write_label_file)


def small_graph(n=6, seed=0, n_classes=2):
    rng = np.random.default_rng(seed)
    dense = (rng.random((n, n)) < 0.4).astype(float)
    dense = np.triu(dense, 1)
    dense = dense + dense.T
    attrs = rng.normal(size=(n, 3))
    labels = rng.integers(0, n_classes, n)
    return Graph(sp.csr_matrix(dense), attrs, labels)


def test_adjacency_from_edges_symmetrizes_and_binarizes():
    a = adjacency_from_edges(4, [0, 1, 0, 2, 2], [1, 0, 1, 2, 3])
    dense = a.toarray()
    assert np.array_equal(dense, dense.T)
    assert dense[0, 1] == 1.0 and dense[1, 0] == 1.0  # duplicates collapse
    assert dense[2, 2] == 0.0  # self-loop dropped
    assert dense[2, 3] == 1.0


def test_round_trip(tmp_path):
    g = small_graph()
    ep, ap, lp = tmp_path / "e.txt", tmp_path / "a.txt", tmp_path / "l.txt"
    write_edge_file(ep, g.adjacency)
    write_attr_file(ap, g.attributes)
    write_label_file(lp, g.labels)
    g2 = load_graph(str(ep), str(ap), str(lp))
    assert (g2.adjacency != g.adjacency).nnz == 0
    assert np.array_equal(g2.attributes, g.attributes)  # repr round trip is exact
    assert np.array_equal(g2.labels, g.labels)


def test_partial_labels_round_trip(tmp_path):
    g = small_graph()
    labels = g.labels.copy()
    labels[2] = UNLABELED
    write_label_file(tmp_path / "l.txt", labels)
    write_edge_file(tmp_path / "e.txt", g.adjacency)
    write_attr_file(tmp_path / "a.txt", g.attributes)
    g2 = load_graph(str(tmp_path / "e.txt"), str(tmp_path / "a.txt"), str(tmp_path / "l.txt"))
    assert g2.labels[2] == UNLABELED
    assert np.array_equal(np.delete(g2.labels, 2), np.delete(labels, 2))


def test_sparse_attr_format(tmp_path):
    ap = tmp_path / "a.txt"
    ap.write_text("sparse 3 4\n0 1 2.5\n2 0 -1.0\n")
    ep = tmp_path / "e.txt"
    ep.write_text("0 1\n")
    g = load_graph(str(ep), str(ap))
    want = np.zeros((3, 4))
    want[0, 1] = 2.5
    want[2, 0] = -1.0
    assert np.array_equal(g.attributes, want)


@pytest.mark.parametrize("content,lineno", [
    ("0 1\nbad line here\n", 2),
    ("0 1\n5 0\n", 2),      # node id out of range for n=3
    ("0\n", 1),             # wrong field count
])
def test_edge_parse_errors_carry_line_numbers(tmp_path, content, lineno):
    ap = tmp_path / "a.txt"
    ap.write_text("3 2\n0 0\n0 0\n0 0\n")
    ep = tmp_path / "e.txt"
    ep.write_text(content)
    with pytest.raises(DataError, match=f":{lineno}:"):
        load_graph(str(ep), str(ap))


def test_attr_parse_errors(tmp_path):
    ep = tmp_path / "e.txt"
    ep.write_text("")
    ap = tmp_path / "a.txt"
    ap.write_text("2 2\n0 0\n0 nan\n")
    with pytest.raises(DataError, match=":3:"):
        load_graph(str(ep), str(ap))
    ap.write_text("2 2\n0 0\n")
    with pytest.raises(DataError):
        load_graph(str(ep), str(ap))  # row count mismatch


def test_label_errors(tmp_path):
    ep, ap = tmp_path / "e.txt", tmp_path / "a.txt"
    ep.write_text("0 1\n")
    ap.write_text("3 1\n0\n0\n0\n")
    lp = tmp_path / "l.txt"
    lp.write_text("0 1\n0 2\n")
    with pytest.raises(DataError, match="duplicate"):
        load_graph(str(ep), str(ap), str(lp))
    lp.write_text("0 -3\n")
    with pytest.raises(DataError, match="negative"):
        load_graph(str(ep), str(ap), str(lp))


def test_graph_validation():
    attrs = np.zeros((3, 2))
    asym = sp.csr_matrix(np.array([[0., 1., 0.], [0., 0., 0.], [0., 0., 0.]]))
    with pytest.raises(DataError):
        Graph(asym, attrs)
    loop = sp.csr_matrix(np.array([[1., 0., 0.], [0., 0., 0.], [0., 0., 0.]]))
    with pytest.raises(DataError):
        Graph(loop, attrs)
    ok = sp.csr_matrix((3, 3))
    with pytest.raises(DataError):
        Graph(ok, np.array([[np.inf, 0.]] * 3))
    with pytest.raises(DataError):
        Graph(ok, attrs, labels=np.array([0, 1, -2]))
    with pytest.raises(DataError):
        Graph(ok, attrs, labeled_mask=np.ones(3, dtype=bool))  # mask without labels


def test_domain_pair_validation():
    s = small_graph()
    t = Graph(s.adjacency, np.zeros((6, 4)))  # attr dim mismatch
    with pytest.raises(DataError):
        DomainPair(s, t)
    unlabeled = Graph(s.adjacency, s.attributes)
    with pytest.raises(DataError):
        DomainPair(unlabeled, small_graph(seed=1))


def test_union_align_hand_example():
    s = Graph(sp.csr_matrix((2, 2)), np.array([[1., 2.], [3., 4.]]), np.array([0, 1]))
    t = Graph(sp.csr_matrix((2, 2)), np.array([[5., 6.], [7., 8.]]))
    pair = union_align(s, t, ["alpha", "beta"], ["beta", "gamma"])
    # union vocabulary is sorted: [alpha, beta, gamma]
    assert np.array_equal(pair.source.attributes, [[1., 2., 0.], [3., 4., 0.]])
    assert np.array_equal(pair.target.attributes, [[0., 5., 6.], [0., 7., 8.]])
    with pytest.raises(DataError, match="duplicate"):
        union_align(s, t, ["alpha", "alpha"], ["beta", "gamma"])
    with pytest.raises(DataError):
        union_align(s, t, ["alpha"], ["beta", "gamma"])


def test_attr_names_loader(tmp_path):
    p = tmp_path / "names.txt"
    p.write_text("word_a\nword_b\n")
    assert load_attr_names(str(p)) == ["word_a", "word_b"]
    p.write_text("word_a\n\nword_b\n")
    with pytest.raises(DataError, match=":2:"):
        load_attr_names(str(p))


def test_split_labels_exact_count():
    g = small_graph(n=40, seed=2)
    for rate, want in ((0.05, 2), (0.1, 4), (1.0, 40)):
        got = split_labels(g, rate, 0)
        assert got.labeled_mask.sum() == want
    assert np.array_equal(split_labels(g, 0.2, 5).labeled_mask,
                          split_labels(g, 0.2, 5).labeled_mask)
    assert not np.array_equal(split_labels(g, 0.2, 5).labeled_mask,
                              split_labels(g, 0.2, 6).labeled_mask)


def test_split_labels_errors():
    g = small_graph()
    with pytest.raises(ConfigError):
        split_labels(g, 0.0, 0)
    with pytest.raises(ConfigError):
        split_labels(g, 1.5, 0)
    with pytest.raises(ConfigError):
        split_labels(g, 0.01, 0)  # rounds to zero nodes
    bare = Graph(g.adjacency, g.attributes)
    with pytest.raises(ConfigError):
        split_labels(bare, 0.5, 0)


def test_generate_pair_deterministic():
    cfg = SyntheticConfig(n_nodes=50, n_classes=3, attr_dim=4, p_in=0.2, p_out=0.02, seed=9)
    a, b = generate_pair(cfg), generate_pair(cfg)
    assert (a.source.adjacency != b.source.adjacency).nnz == 0
    assert np.array_equal(a.source.attributes, b.source.attributes)
    assert np.array_equal(a.target.labels, b.target.labels)
    c = generate_pair(SyntheticConfig(n_nodes=50, n_classes=3, attr_dim=4,
                                      p_in=0.2, p_out=0.02, seed=10))
    assert not np.array_equal(a.source.attributes, c.source.attributes)


def test_generate_pair_shapes_and_masks():
    cfg = SyntheticConfig(n_nodes=60, n_classes=3, attr_dim=5, p_in=0.3, p_out=0.02,
                          mean_offset=0.5, seed=1)
    pair = generate_pair(cfg)
    assert pair.source.n_nodes == pair.target.n_nodes == 60
    assert pair.source.labeled_mask.all()
    assert not pair.target.labeled_mask.any()
    assert (pair.target.labels >= 0).all()  # held for evaluation only
    # block structure: within-class edge rate dominates cross-class
    for g in (pair.source, pair.target):
        dense = g.adjacency.toarray()
        same = g.labels[:, None] == g.labels[None, :]
        off = ~np.eye(60, dtype=bool)
        assert dense[same & off].mean() > dense[~same].mean()


def test_generate_pair_degree_shift():
    cfg = SyntheticConfig(n_nodes=200, n_classes=2, attr_dim=3, p_in=0.2, p_out=0.02,
                          p_in_target=0.08, p_out_target=0.02, seed=4)
    pair = generate_pair(cfg)
    assert pair.source.degrees().mean() > pair.target.degrees().mean()


def test_synthetic_config_validation():
    with pytest.raises(ConfigError):
        SyntheticConfig(n_nodes=0)
    with pytest.raises(ConfigError):
        SyntheticConfig(n_classes=1)
    with pytest.raises(ConfigError):
        SyntheticConfig(p_in=1.5)
