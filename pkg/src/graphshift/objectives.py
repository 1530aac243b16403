"""Loss values and the pseudo-label machinery.

Everything here is value-level numpy (no tape): the trainer differentiates
through its own fused tape ops and uses these functions for the per-epoch
pseudo-state refresh, for reporting, and as reference values in tests.
Pseudo labels, posterior scores and annealed weights are refreshed once per
epoch and held constant within it; no gradient flows through them.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError

CLAMP = 1e-12


def _log(p):
    return np.log(np.maximum(p, CLAMP))


def supervised_loss(probs, labels, mask):
    """Mean negative log-likelihood of the true class over the masked nodes."""
    rows = np.nonzero(np.asarray(mask))[0]
    if rows.size == 0:
        raise ConfigError("supervised_loss over an empty labeled set")
    picked = probs[rows, np.asarray(labels, dtype=np.int64)[rows]]
    return float(-_log(picked).mean())


def adversarial_loss(d_source, d_target):
    """-E[log D(h^s)] - E[log(1 - D(h^t))] for discriminator probabilities."""
    d_source = np.asarray(d_source, dtype=np.float64).ravel()
    d_target = np.asarray(d_target, dtype=np.float64).ravel()
    if d_source.size == 0 or d_target.size == 0:
        raise ConfigError("adversarial_loss over an empty domain")
    return float(-_log(d_source).mean() - _log(1.0 - d_target).mean())


def make_pseudo_labels(probs):
    """Row argmax; ties resolve to the smallest class index."""
    return np.argmax(probs, axis=1).astype(np.int64)


def class_aggregates(p, cluster_nodes, cluster_labels, n_classes):
    """Mean reconstructed-structure row per class: (C, N) dense; empty class -> zero row."""
    cluster_nodes = np.asarray(cluster_nodes, dtype=np.int64)
    cluster_labels = np.asarray(cluster_labels, dtype=np.int64)
    if cluster_nodes.shape != cluster_labels.shape:
        raise DimensionError("cluster nodes/labels must align")
    agg = np.zeros((n_classes, p.shape[1]))
    sub = p[cluster_nodes].toarray()
    for k in range(n_classes):
        members = cluster_labels == k
        if members.any():
            agg[k] = sub[members].mean(axis=0)
    return agg


def scores_against_clusters(p, cluster_nodes, cluster_labels, score_nodes, score_labels, n_classes):
    """Own-cluster affinity minus the mean affinity to the other clusters.

    w_i = P_i . agg_{y_i} - (1/(C-1)) sum_{k != y_i} P_i . agg_k, where P_i is
    node i's row of the reconstructed structure and agg_k the class-k mean row.
    """
    if n_classes < 2:
        raise ConfigError("posterior scores need at least 2 classes")
    score_nodes = np.asarray(score_nodes, dtype=np.int64)
    score_labels = np.asarray(score_labels, dtype=np.int64)
    agg = class_aggregates(p, cluster_nodes, cluster_labels, n_classes)
    affin = p[score_nodes] @ agg.T  # (n_score, C)
    affin = np.asarray(affin)
    own = affin[np.arange(score_nodes.size), score_labels]
    rest = affin.sum(axis=1) - own
    return own - rest / (n_classes - 1), agg


def posterior_scores(p, y_hat, node_set, n_classes):
    """Scores for node_set with clusters formed over that same node_set."""
    p = getattr(p, "P", p)  # accept PpmiMatrix or raw CSR
    node_set = np.asarray(node_set, dtype=np.int64)
    y_hat = np.asarray(y_hat, dtype=np.int64)
    if node_set.size == 0:
        raise ConfigError("posterior_scores over an empty node set")
    if y_hat.shape != node_set.shape:
        raise DimensionError("y_hat must align with node_set")
    w, _ = scores_against_clusters(p, node_set, y_hat, node_set, y_hat, n_classes)
    return w


def anneal_weights(w, alpha=0.8, beta=1.2):
    """Cosine ramp over the score ranking: rank 0 (largest w) gets beta, the
    ramp decays toward alpha with rank. Ties in w break by position index."""
    w = np.asarray(w, dtype=np.float64)
    if w.size == 0:
        raise ConfigError("anneal_weights over an empty score vector")
    if beta < alpha:
        raise ConfigError("beta must be >= alpha")
    n = w.size
    order = np.lexsort((np.arange(n), -w))
    ranks = np.empty(n, dtype=np.int64)
    ranks[order] = np.arange(n)
    return alpha + 0.5 * (beta - alpha) * (1.0 + np.cos(ranks / n * np.pi))


def pseudo_label_loss(probs, y_hat, weights, node_set):
    """Weighted pseudo-label CE plus the diversity term sum_k q_k log q_k,
    q = mean prediction over node_set. Scalar value form of the training term."""
    node_set = np.asarray(node_set, dtype=np.int64)
    if node_set.size == 0:
        raise ConfigError("pseudo_label_loss over an empty node set")
    y_hat = np.asarray(y_hat, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.float64)
    if y_hat.shape != node_set.shape or weights.shape != node_set.shape:
        raise DimensionError("y_hat and weights must align with node_set")
    sub = probs[node_set]
    ce = float(-(weights * _log(sub[np.arange(node_set.size), y_hat])).sum() / node_set.size)
    q = sub.mean(axis=0)
    div = float((q * _log(q)).sum())
    return ce + div


@dataclass
class DomainPseudo:
    """Per-domain frozen pseudo state for one epoch."""
    nodes: np.ndarray       # nodes the PL cross-entropy runs over
    y_hat: np.ndarray       # pseudo labels, aligned with nodes
    raw: np.ndarray         # posterior scores, aligned
    weights: np.ndarray     # annealed weights, aligned
    aggregates: np.ndarray  # (C, N) class mean rows used for the scores


@dataclass
class PseudoState:
    source: DomainPseudo
    target: DomainPseudo


def refresh_pseudo_state(p_source, p_target, probs_source, probs_target,
                         source_labels, source_mask, n_classes, alpha=0.8, beta=1.2):
    """Once-per-epoch recomputation from current eval-mode predictions.

    Source: CE set = unlabeled nodes; labeled nodes still join their true
    class's cluster for the aggregates (their labels are certain). Target:
    everything is unlabeled, clusters and CE set are all nodes. Raises
    ConfigError when the source has no unlabeled nodes (nothing to
    pseudo-label there).
    """
    n_s = probs_source.shape[0]
    unl = np.nonzero(~np.asarray(source_mask))[0]
    if unl.size == 0:
        raise ConfigError("no unlabeled source nodes to pseudo-label")
    y_unl = make_pseudo_labels(probs_source[unl])
    cluster_labels = np.asarray(source_labels, dtype=np.int64).copy()
    cluster_labels[unl] = y_unl  # labeled nodes keep ground truth in the clusters
    all_s = np.arange(n_s)
    w_s, agg_s = scores_against_clusters(p_source, all_s, cluster_labels, unl, y_unl, n_classes)
    src = DomainPseudo(unl, y_unl, w_s, anneal_weights(w_s, alpha, beta), agg_s)

    all_t = np.arange(probs_target.shape[0])
    y_t = make_pseudo_labels(probs_target)
    w_t, agg_t = scores_against_clusters(p_target, all_t, y_t, all_t, y_t, n_classes)
    tgt = DomainPseudo(all_t, y_t, w_t, anneal_weights(w_t, alpha, beta), agg_t)
    return PseudoState(src, tgt)


@dataclass
class LossReport:
    """Scalar loss values of one epoch's training forward."""
    l_sup: float
    l_at: float
    l_pl_source: float
    l_pl_target: float
    total: float

    @property
    def l_pl(self):
        return 0.5 * (self.l_pl_source + self.l_pl_target)
