"""Topology reconstruction: co-occurrence counts -> PPMI -> normalized propagation.

The positive pointwise mutual information of the walk co-occurrence matrix
replaces the raw adjacency as graph structure; the propagation operator is
the symmetric degree normalization of (P + I). Natural logarithm throughout.
"""
import hashlib
import json
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DataError, DegenerateInputError
from .walks import WalkConfig, pair_counts, walk_table


@dataclass
class PpmiMatrix:
    """Reconstructed structure P and its propagation operator S, both CSR."""
    P: sp.csr_matrix
    S: sp.csr_matrix

    @property
    def n_nodes(self):
        return self.P.shape[0]


def ppmi(f):
    """Positive PMI of a nonnegative count matrix.

    P_ij = max(log((F_ij/T) / ((R_i/T) * (C_j/T))), 0) over stored entries,
    with T the grand total and R/C the row/column sums; F_ij = 0 stays 0.
    """
    f = f.tocsr()
    if f.nnz == 0 or (f.data < 0).any():
        if f.nnz and (f.data < 0).any():
            raise DataError("count matrix has negative entries")
        raise DegenerateInputError("all-zero count matrix: no co-occurrences to reconstruct from")
    total = float(f.data.sum())
    rows = np.asarray(f.sum(axis=1)).ravel()
    cols = np.asarray(f.sum(axis=0)).ravel()
    coo = f.tocoo()
    ratio = coo.data * total / (rows[coo.row] * cols[coo.col])
    vals = np.log(ratio)
    np.maximum(vals, 0.0, out=vals)
    p = sp.coo_matrix((vals, (coo.row, coo.col)), shape=f.shape).tocsr()
    p.eliminate_zeros()
    return p


def propagation(p):
    """S = D^{-1/2} (P + I) D^{-1/2} with D the row-sum degrees of P + I.

    Computed as data * (dinv_i * dinv_j), which keeps S exactly symmetric
    for symmetric P (the scalar product commutes bitwise).
    """
    n = p.shape[0]
    pt = (p + sp.identity(n, format="csr")).tocoo()
    deg = np.zeros(n)
    np.add.at(deg, pt.row, pt.data)
    if (deg <= 0).any():
        raise DataError("nonpositive degree in P + I; P must be nonnegative")
    dinv = 1.0 / np.sqrt(deg)
    vals = pt.data * (dinv[pt.row] * dinv[pt.col])
    return sp.coo_matrix((vals, (pt.row, pt.col)), shape=p.shape).tocsr()


def reconstruct(g, cfg, use_ppmi=True, backend_name=None):
    """Full pipeline for one domain. use_ppmi=False keeps the raw adjacency as P."""
    if use_ppmi:
        walks, lengths = walk_table(g.adjacency, cfg, backend_name)
        f = pair_counts(walks, lengths, cfg.window, g.n_nodes, cfg.count_self, backend_name)
        p = ppmi(f)
    else:
        p = g.adjacency.copy()
    return PpmiMatrix(p, propagation(p))


def walk_config_hash(cfg, use_ppmi=True):
    key = (cfg.walks_per_node, cfg.walk_length, cfg.window, cfg.seed, cfg.count_self, bool(use_ppmi))
    return hashlib.sha256(repr(key).encode()).hexdigest()


def graph_structure_hash(adjacency):
    a = adjacency.tocsr()
    a.sum_duplicates()
    h = hashlib.sha256()
    h.update(repr(a.shape).encode())
    h.update(np.ascontiguousarray(a.indptr, dtype=np.int64).tobytes())
    h.update(np.ascontiguousarray(a.indices, dtype=np.int64).tobytes())
    return h.hexdigest()


def save_ppmi(path, pm, graph_sha=None, walk_sha=None):
    """Coordinate text cache: first line N, then "row col value" with repr floats
    (shortest round-tripping decimal, so the reload is bit-exact). A JSON
    sidecar <path>.meta.json carries the hashes used for staleness checks."""
    coo = pm.P.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as fh:
        fh.write(f"{pm.P.shape[0]}\n")
        for i, j, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{i} {j} {float(v)!r}\n")
    meta = {"version": 1, "graph_sha": graph_sha, "walk_sha": walk_sha}
    with open(path + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=1)


def load_ppmi(path):
    """Reload a cache written by save_ppmi; S is recomputed from P (deterministic).

    Returns (PpmiMatrix, meta_dict_or_None)."""
    with open(path) as fh:
        first = fh.readline().strip()
        try:
            n = int(first)
        except ValueError:
            raise DataError(f"{path}:1: expected node count, got {first!r}") from None
        if n < 1:
            raise DataError(f"{path}:1: node count must be positive")
        rows, cols, vals = [], [], []
        for lineno, line in enumerate(fh, 2):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 'row col value'")
            try:
                i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                raise DataError(f"{path}:{lineno}: cannot parse entry") from None
            if not (0 <= i < n and 0 <= j < n):
                raise DataError(f"{path}:{lineno}: index out of range [0, {n})")
            if not np.isfinite(v):
                raise DataError(f"{path}:{lineno}: non-finite value")
            rows.append(i)
            cols.append(j)
            vals.append(v)
    p = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    meta = None
    try:
        with open(path + ".meta.json") as fh:
            meta = json.load(fh)
    except FileNotFoundError:
        pass
    return PpmiMatrix(p, propagation(p)), meta
