"""Graph containers, file formats, attribute-space alignment, synthetic pairs.

File formats (all ASCII, 0-indexed node ids):
  edge file:  one "src dst" pair per line
  attr file:  header "N d" + N dense rows, or header "sparse N d" + "node col value" lines
  label file: "node class" per line; nodes absent from the file are unlabeled
  name file:  one attribute name per line

Graphs are treated as immutable after construction; operations return new
objects and never mutate their inputs.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, DataError

UNLABELED = -1


def _parse_fields(line, lineno, path, n_fields, kinds):
    parts = line.split()
    if len(parts) != n_fields:
        raise DataError(f"{path}:{lineno}: expected {n_fields} fields, got {len(parts)}")
    out = []
    for p, kind in zip(parts, kinds):
        try:
            out.append(kind(p))
        except ValueError:
            raise DataError(f"{path}:{lineno}: cannot parse {p!r} as {kind.__name__}") from None
    return out


def adjacency_from_edges(n_nodes, src, dst):
    """Symmetric 0/1 CSR with zero diagonal from (possibly duplicated) edge endpoints."""
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    keep = src != dst  # self-loops dropped
    src, dst = src[keep], dst[keep]
    rows = np.concatenate([src, dst])
    cols = np.concatenate([dst, src])
    a = sp.coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n_nodes, n_nodes)).tocsr()
    a.data[:] = 1.0  # collapse duplicates to 0/1
    a.eliminate_zeros()
    return a


@dataclass
class Graph:
    """One domain: sparse adjacency, dense node attributes, optional labels.

    labels uses -1 for "no label"; labeled_mask marks the nodes whose label
    training may access (defaults to all nodes that have one).
    """
    adjacency: sp.csr_matrix
    attributes: np.ndarray
    labels: np.ndarray | None = None
    labeled_mask: np.ndarray | None = None

    def __post_init__(self):
        a = self.adjacency.tocsr().astype(np.float64)
        a.sum_duplicates()
        self.adjacency = a
        n = a.shape[0]
        if a.shape[0] != a.shape[1]:
            raise DataError(f"adjacency must be square, got {a.shape}")
        self.attributes = np.ascontiguousarray(self.attributes, dtype=np.float64)
        if self.attributes.ndim != 2 or self.attributes.shape[0] != n:
            raise DataError(f"attributes must be ({n}, d), got {self.attributes.shape}")
        if not np.isfinite(self.attributes).all():
            raise DataError("attributes contain non-finite values")
        if (a != a.T).nnz != 0:
            raise DataError("adjacency is not symmetric")
        if a.diagonal().any():
            raise DataError("adjacency has nonzero diagonal")
        if a.nnz and not (np.unique(a.data) == np.array([1.0])).all():
            raise DataError("adjacency must be 0/1")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape != (n,):
                raise DataError(f"labels must have shape ({n},)")
            if (self.labels < UNLABELED).any():
                raise DataError("labels must be >= 0 (or -1 for unlabeled)")
        if self.labeled_mask is None:
            self.labeled_mask = (self.labels >= 0) if self.labels is not None else np.zeros(n, dtype=bool)
        self.labeled_mask = np.asarray(self.labeled_mask, dtype=bool)
        if self.labeled_mask.shape != (n,):
            raise DataError(f"labeled_mask must have shape ({n},)")
        if self.labeled_mask.any():
            if self.labels is None or (self.labels[self.labeled_mask] < 0).any():
                raise DataError("labeled_mask selects nodes without labels")

    @property
    def n_nodes(self):
        return self.adjacency.shape[0]

    @property
    def attr_dim(self):
        return self.attributes.shape[1]

    @property
    def n_classes(self):
        if self.labels is None or not (self.labels >= 0).any():
            return None
        return int(self.labels.max()) + 1

    def degrees(self):
        return np.asarray(self.adjacency.sum(axis=1)).ravel().astype(np.int64)


@dataclass
class DomainPair:
    """Aligned source/target graphs sharing attribute columns and label space."""
    source: Graph
    target: Graph

    def __post_init__(self):
        if self.source.attr_dim != self.target.attr_dim:
            raise DataError(
                f"attribute dims differ: source {self.source.attr_dim}, target {self.target.attr_dim}"
            )
        if self.source.labels is None or not (self.source.labels >= 0).any():
            raise DataError("source graph must carry labels")

    @property
    def n_classes(self):
        c = self.source.n_classes
        ct = self.target.n_classes
        if ct is not None:
            c = max(c, ct)
        return c


def load_graph(edge_path, attr_path, label_path=None):
    """Load one domain from disk. Symmetrizes, collapses duplicate edges, drops self-loops."""
    attrs = _load_attrs(attr_path)
    n = attrs.shape[0]
    src, dst = [], []
    with open(edge_path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            i, j = _parse_fields(line, lineno, edge_path, 2, (int, int))
            if not (0 <= i < n and 0 <= j < n):
                raise DataError(f"{edge_path}:{lineno}: node id out of range [0, {n})")
            src.append(i)
            dst.append(j)
    labels = None
    if label_path is not None:
        labels = np.full(n, UNLABELED, dtype=np.int64)
        seen = set()
        with open(label_path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                i, c = _parse_fields(line, lineno, label_path, 2, (int, int))
                if not 0 <= i < n:
                    raise DataError(f"{label_path}:{lineno}: node id out of range [0, {n})")
                if c < 0:
                    raise DataError(f"{label_path}:{lineno}: negative class id")
                if i in seen:
                    raise DataError(f"{label_path}:{lineno}: duplicate label for node {i}")
                seen.add(i)
                labels[i] = c
    return Graph(adjacency_from_edges(n, src, dst), attrs, labels)


def _load_attrs(path):
    with open(path) as fh:
        header = fh.readline()
        parts = header.split()
        sparse = len(parts) == 3 and parts[0] == "sparse"
        dims = parts[1:] if sparse else parts
        if len(dims) != 2:
            raise DataError(f"{path}:1: header must be 'N d' or 'sparse N d'")
        try:
            n, d = int(dims[0]), int(dims[1])
        except ValueError:
            raise DataError(f"{path}:1: header must be 'N d' or 'sparse N d'") from None
        if n < 1 or d < 1:
            raise DataError(f"{path}:1: N and d must be positive")
        x = np.zeros((n, d))
        if sparse:
            for lineno, line in enumerate(fh, 2):
                line = line.strip()
                if not line:
                    continue
                i, j, v = _parse_fields(line, lineno, path, 3, (int, int, float))
                if not (0 <= i < n and 0 <= j < d):
                    raise DataError(f"{path}:{lineno}: index out of range for ({n}, {d})")
                if not np.isfinite(v):
                    raise DataError(f"{path}:{lineno}: non-finite attribute value")
                x[i, j] = v
        else:
            row = 0
            for lineno, line in enumerate(fh, 2):
                line = line.strip()
                if not line:
                    continue
                if row >= n:
                    raise DataError(f"{path}:{lineno}: more than {n} attribute rows")
                vals = line.replace(",", " ").split()
                if len(vals) != d:
                    raise DataError(f"{path}:{lineno}: expected {d} values, got {len(vals)}")
                try:
                    x[row] = [float(v) for v in vals]
                except ValueError:
                    raise DataError(f"{path}:{lineno}: cannot parse attribute value") from None
                if not np.isfinite(x[row]).all():
                    raise DataError(f"{path}:{lineno}: non-finite attribute value")
                row += 1
            if row != n:
                raise DataError(f"{path}: expected {n} attribute rows, got {row}")
    return x


def load_attr_names(path):
    names = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            name = line.strip()
            if not name:
                raise DataError(f"{path}:{lineno}: empty attribute name")
            names.append(name)
    return names


def union_align(source, target, source_names, target_names):
    """Re-embed both attribute matrices into the union vocabulary (sorted order).

    Columns absent from a domain are zero-filled; shared names land in the
    same column of both domains.
    """
    for g, names, which in ((source, source_names, "source"), (target, target_names, "target")):
        if len(names) != g.attr_dim:
            raise DataError(f"{which}: {len(names)} attribute names for {g.attr_dim} columns")
        if len(set(names)) != len(names):
            raise DataError(f"{which}: duplicate attribute names")
    union = sorted(set(source_names) | set(target_names))
    pos = {name: k for k, name in enumerate(union)}

    def remap(g, names):
        x = np.zeros((g.n_nodes, len(union)))
        cols = [pos[nm] for nm in names]
        x[:, cols] = g.attributes
        return Graph(g.adjacency, x, g.labels, g.labeled_mask)

    return DomainPair(remap(source, source_names), remap(target, target_names))


def split_labels(g, rate, seed):
    """Mask exactly round(rate * N) nodes as labeled, chosen uniformly; returns a new Graph."""
    if g.labels is None or (g.labels < 0).any():
        raise ConfigError("split_labels requires labels for all nodes")
    if not 0.0 < rate <= 1.0:
        raise ConfigError(f"label rate must be in (0, 1], got {rate}")
    n = g.n_nodes
    k = round(rate * n)
    if k == 0:
        raise ConfigError(f"label rate {rate} selects zero of {n} nodes")
    idx = np.random.default_rng(seed).choice(n, size=k, replace=False)
    mask = np.zeros(n, dtype=bool)
    mask[idx] = True
    return Graph(g.adjacency, g.attributes, g.labels, mask)


@dataclass
class SyntheticConfig:
    """Two-domain stochastic block model with per-class Gaussian attributes.

    The target domain shifts the attribute means by mean_offset on every
    coordinate, scales the noise std by cov_scale, and may use different
    block probabilities (degree/mixing shift).
    """
    n_nodes: int = 300
    n_classes: int = 3
    attr_dim: int = 16
    p_in: float = 0.1
    p_out: float = 0.01
    p_in_target: float | None = None
    p_out_target: float | None = None
    mean_offset: float = 0.0
    cov_scale: float = 1.0
    noise_std: float = 1.0
    class_means: np.ndarray | None = field(default=None, repr=False)
    seed: int = 0

    def __post_init__(self):
        if self.n_classes < 2:
            raise ConfigError("n_classes must be >= 2")
        if self.n_nodes < self.n_classes:
            raise ConfigError("n_nodes must be >= n_classes")
        if self.attr_dim < 1:
            raise ConfigError("attr_dim must be >= 1")
        for nm in ("p_in", "p_out", "p_in_target", "p_out_target"):
            v = getattr(self, nm)
            if v is not None and not 0.0 <= v <= 1.0:
                raise ConfigError(f"{nm} must be in [0, 1], got {v}")
        if self.cov_scale <= 0:
            raise ConfigError("cov_scale must be positive")
        if self.noise_std < 0:
            raise ConfigError("noise_std must be nonnegative")


def _block_sizes(n, c):
    sizes = np.full(c, n // c, dtype=np.int64)
    sizes[: n % c] += 1
    return sizes


def _sbm(rng, labels, p_same, p_diff):
    n = labels.size
    same = labels[:, None] == labels[None, :]
    prob = np.where(same, p_same, p_diff)
    draw = rng.random((n, n))
    upper = np.triu(draw < prob, k=1)
    a = upper | upper.T
    return sp.csr_matrix(a.astype(np.float64))


def generate_pair(cfg):
    """Deterministic synthetic DomainPair. Source mask is all-true (trim with split_labels);
    target labels are stored for evaluation only."""
    rng = np.random.default_rng(cfg.seed)
    c, d = cfg.n_classes, cfg.attr_dim
    means = cfg.class_means
    if means is None:
        means = rng.normal(0.0, 1.0, size=(c, d))
    else:
        means = np.asarray(means, dtype=np.float64)
        if means.shape != (c, d):
            raise ConfigError(f"class_means must have shape ({c}, {d})")
    labels = np.repeat(np.arange(c), _block_sizes(cfg.n_nodes, c))

    a_s = _sbm(rng, labels, cfg.p_in, cfg.p_out)
    x_s = means[labels] + rng.normal(0.0, 1.0, size=(cfg.n_nodes, d)) * cfg.noise_std

    p_in_t = cfg.p_in if cfg.p_in_target is None else cfg.p_in_target
    p_out_t = cfg.p_out if cfg.p_out_target is None else cfg.p_out_target
    a_t = _sbm(rng, labels, p_in_t, p_out_t)
    x_t = (means[labels] + cfg.mean_offset
           + rng.normal(0.0, 1.0, size=(cfg.n_nodes, d)) * (cfg.noise_std * cfg.cov_scale))

    source = Graph(a_s, x_s, labels.copy(), np.ones(cfg.n_nodes, dtype=bool))
    target = Graph(a_t, x_t, labels.copy(), np.zeros(cfg.n_nodes, dtype=bool))
    return DomainPair(source, target)


def write_edge_file(path, adjacency):
    coo = sp.triu(adjacency, k=1).tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as fh:
        for i, j in zip(coo.row[order], coo.col[order]):
            fh.write(f"{i} {j}\n")


def write_attr_file(path, attrs):
    n, d = attrs.shape
    with open(path, "w") as fh:
        fh.write(f"{n} {d}\n")
        for row in attrs:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def write_label_file(path, labels):
    with open(path, "w") as fh:
        for i, c in enumerate(labels):
            if c >= 0:
                fh.write(f"{i} {c}\n")
