"""Random-walk sampling and windowed co-occurrence counting.

Randomness comes from a counter-based table: entry (walk, step) is a
splitmix64-mixed function of (seed, walk id, step), computed vectorized up
front. The stepping and pair-emission kernels exist as numba and pure-numpy
twins that consume the same table, so both backends produce bit-identical
walks and counts; walks are row-independent, which is also what makes the
numba path trivially parallelizable.

Dead-end walks terminate early and their remaining table entries go unused.
"""
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import backend
from .errors import ConfigError, DataError

if backend.HAVE_NUMBA:
    from numba import njit
else:  # pragma: no cover - identity decorator keeps module importable
    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap if not (args and callable(args[0])) else args[0]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31 = np.uint64(30), np.uint64(27), np.uint64(31)


@dataclass(frozen=True)
class WalkConfig:
    walks_per_node: int = 10
    walk_length: int = 40
    window: int = 5
    seed: int = 0
    count_self: bool = True

    def __post_init__(self):
        if self.walks_per_node < 1:
            raise ConfigError("walks_per_node must be >= 1")
        if self.walk_length < 2:
            raise ConfigError("walk_length must be >= 2")
        if not 1 <= self.window < self.walk_length:
            raise ConfigError("window must satisfy 1 <= window < walk_length")


def _fmix64(x):
    x = (x ^ (x >> _S30)) * _MIX1
    x = (x ^ (x >> _S27)) * _MIX2
    return x ^ (x >> _S31)


def random_table(seed, n_walks, n_steps):
    """uint64 table of shape (n_walks, n_steps); entry (w, t) depends only on (seed, w, t)."""
    seed_u = np.uint64(seed % 2**64)
    wkey = _fmix64((np.arange(n_walks, dtype=np.uint64) + np.uint64(1)) * _GOLDEN + seed_u)
    tkey = (np.arange(n_steps, dtype=np.uint64) + np.uint64(1)) * _GOLDEN
    return _fmix64(wkey[:, None] + tkey[None, :])


@njit(cache=True)
def _steps_numba(indptr, indices, starts, table, walks, lengths):
    n_walks, length = walks.shape
    for w in range(n_walks):
        cur = starts[w]
        walks[w, 0] = cur
        ln = 1
        for t in range(1, length):
            deg = indptr[cur + 1] - indptr[cur]
            if deg == 0:
                break
            r = table[w, t - 1]
            cur = indices[indptr[cur] + np.int64(r % np.uint64(deg))]
            walks[w, t] = cur
            ln += 1
        lengths[w] = ln


def _steps_numpy(indptr, indices, starts, table, walks, lengths):
    n_walks, length = walks.shape
    degs = indptr[1:] - indptr[:-1]
    cur = starts.copy()
    walks[:, 0] = starts
    alive = np.ones(n_walks, dtype=bool)
    for t in range(1, length):
        alive &= degs[cur] > 0
        if not alive.any():
            break
        idx = np.nonzero(alive)[0]
        sub = cur[idx]
        off = (table[idx, t - 1] % degs[sub].astype(np.uint64)).astype(np.int64)
        nxt = indices[indptr[sub] + off]
        cur[idx] = nxt
        walks[idx, t] = nxt
        lengths[idx] += 1


def walk_table(adjacency, cfg, backend_name=None):
    """All walks as a padded int64 array (pad -1) plus per-walk lengths.

    walks_per_node walks start at every node, ordered node-major; walk w is
    reproducible from (cfg.seed, w) alone.
    """
    be = backend.resolve(backend_name)
    indptr = adjacency.indptr.astype(np.int64)
    indices = adjacency.indices.astype(np.int64)
    n = adjacency.shape[0]
    starts = np.repeat(np.arange(n, dtype=np.int64), cfg.walks_per_node)
    table = random_table(cfg.seed, starts.size, cfg.walk_length - 1)
    walks = np.full((starts.size, cfg.walk_length), -1, dtype=np.int64)
    lengths = np.ones(starts.size, dtype=np.int64)
    step = _steps_numba if be == "numba" else _steps_numpy
    step(indptr, indices, starts, table, walks, lengths)
    return walks, lengths


def sample_walks(g, cfg, backend_name=None):
    """Walks as a list of variable-length int64 arrays (public convenience form)."""
    walks, lengths = walk_table(g.adjacency, cfg, backend_name)
    return [walks[w, : lengths[w]].copy() for w in range(walks.shape[0])]


@njit(cache=True)
def _emit_pairs_numba(walks, lengths, window, count_self, rows, cols):
    k = 0
    for w in range(walks.shape[0]):
        ln = lengths[w]
        dmax = min(window, ln - 1)
        for d in range(1, dmax + 1):
            for p in range(ln - d):
                a = walks[w, p]
                b = walks[w, p + d]
                if a == b and not count_self:
                    continue
                rows[k] = a
                cols[k] = b
                k += 1
                rows[k] = b
                cols[k] = a
                k += 1
    return k


def _emit_pairs_numpy(walks, lengths, window, count_self):
    length = walks.shape[1]
    parts_r, parts_c = [], []
    for d in range(1, window + 1):
        if d >= length:
            break
        valid = (np.arange(length - d)[None, :] + d) < lengths[:, None]
        a = walks[:, : length - d][valid]
        b = walks[:, d:][valid]
        if not count_self:
            keep = a != b
            a, b = a[keep], b[keep]
        parts_r += [a, b]
        parts_c += [b, a]
    if not parts_r:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.concatenate(parts_r), np.concatenate(parts_c)


def pair_counts(walks, lengths, window, n_nodes, count_self=True, backend_name=None):
    """Co-occurrence count matrix F (CSR, float64-exact integer counts).

    Every ordered position pair (p, q), q != p, |p - q| <= window inside a
    walk increments F[node_p, node_q], so F is symmetric by construction.
    count_self=False skips pairs where both positions hold the same node.
    """
    be = backend.resolve(backend_name)
    if walks.shape[0] and (lengths.max() > walks.shape[1] or lengths.min() < 1):
        raise DataError("walk lengths inconsistent with walk table")
    if be == "numba":
        cap = 0
        for d in range(1, window + 1):
            cap += 2 * int(np.maximum(lengths - d, 0).sum())
        rows = np.empty(cap, dtype=np.int64)
        cols = np.empty(cap, dtype=np.int64)
        k = _emit_pairs_numba(walks, lengths, window, count_self, rows, cols)
        rows, cols = rows[:k], cols[:k]
    else:
        rows, cols = _emit_pairs_numpy(walks, lengths, window, count_self)
    if rows.size:
        lo, hi = min(rows.min(), cols.min()), max(rows.max(), cols.max())
        if lo < 0 or hi >= n_nodes:
            raise DataError(f"walk node id outside [0, {n_nodes})")
    f = sp.coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n_nodes, n_nodes)).tocsr()
    f.sum_duplicates()
    return f


def cooccurrence(walk_list, window, n_nodes, count_self=True, backend_name=None):
    """pair_counts over a plain list of node sequences."""
    if window < 1:
        raise ConfigError("window must be >= 1")
    walk_list = [np.asarray(w, dtype=np.int64) for w in walk_list]
    if any(w.ndim != 1 or w.size == 0 for w in walk_list):
        raise DataError("every walk must be a nonempty 1-d sequence")
    n_walks = len(walk_list)
    length = max((w.size for w in walk_list), default=1)
    walks = np.full((n_walks, max(length, 1)), -1, dtype=np.int64)
    lengths = np.empty(n_walks, dtype=np.int64)
    for i, w in enumerate(walk_list):
        walks[i, : w.size] = w
        lengths[i] = w.size
    if n_walks == 0:
        return sp.csr_matrix((n_nodes, n_nodes))
    return pair_counts(walks, lengths, window, n_nodes, count_self, backend_name)
