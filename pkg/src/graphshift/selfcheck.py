"""End-to-end gradient verification on a small two-domain fixture.

The adversarial part makes this subtle: after the reversal boundary, the
composed gradient is not the gradient of the single summed scalar for every
parameter at once. Finite differences therefore check two scalars built from
the same forward values:

  encoder-side groups (W1, W2, xi1, xi2, classifier):
      L_sup + lambda1 * L_pl - lambda2 * L_at   (discriminator held fixed)
  discriminator group:
      L_at                                      (encoder params held fixed)

Both match the single tape backward of L_sup + lambda1*L_pl + L_at routed
through the boundary, which is exactly the gradient the trainer uses.
Dropout is off here (finite differences need a smooth function).
"""
from dataclasses import dataclass

import numpy as np

from . import model, objectives
from .errors import ConfigError
from .graph_io import DomainPair, SyntheticConfig, generate_pair, split_labels
from .kernel import Tape, bce_with_logits, cross_entropy, diversity, grad_check, grl, wsum
from .ppmi import reconstruct
from .walks import WalkConfig

GROUPS = {
    "W1": ("W1",),
    "W2": ("W2",),
    "xi1": ("xi1",),
    "xi2": ("xi2",),
    "classifier": ("Wc1", "bc1", "Wc2", "bc2"),
    "discriminator": ("wd", "bd"),
}
_ALL = tuple(n for names in GROUPS.values() for n in names)


@dataclass
class Fixture:
    pair: DomainPair
    pm_source: object
    pm_target: object
    arrays: dict
    pseudo: objectives.PseudoState
    labeled_idx: np.ndarray
    lambda1: float
    lambda2: float
    shift_position: str


def build_fixture(seed=7, lambda1=1.0, lambda2=0.7, shift_position="post"):
    """12-node-per-domain pair, tiny widths, frozen pseudo state from the init point."""
    scfg = SyntheticConfig(n_nodes=12, n_classes=3, attr_dim=5,
                           p_in=0.6, p_out=0.2, mean_offset=0.8, cov_scale=1.2, seed=seed)
    pair = generate_pair(scfg)
    pair = DomainPair(split_labels(pair.source, 1 / 3, seed), pair.target)
    wcfg = WalkConfig(walks_per_node=4, walk_length=8, window=2, seed=seed)
    pm_s = reconstruct(pair.source, wcfg)
    pm_t = reconstruct(pair.target, wcfg)
    enc, shift, head = model.init_params(12, 5, hidden_dim=6, embed_dim=4, clf_hidden=3,
                                         n_classes=3, eps=0.5, seed=seed)
    arrays = {
        "W1": enc.W1, "W2": enc.W2, "xi1": shift.xi1, "xi2": shift.xi2,
        "Wc1": head.Wc1, "bc1": head.bc1, "Wc2": head.Wc2, "bc2": head.bc2,
        "wd": head.wd, "bd": head.bd,
    }
    probs_s = model.predict_probs(pm_s.S, pair.source.attributes, enc, head, shift, shift_position)
    probs_t = model.predict_probs(pm_t.S, pair.target.attributes, enc, head)
    pseudo = objectives.refresh_pseudo_state(pm_s.P, pm_t.P, probs_s, probs_t,
                                             pair.source.labels, pair.source.labeled_mask, 3)
    return Fixture(pair, pm_s, pm_t, arrays, pseudo,
                   np.nonzero(pair.source.labeled_mask)[0], lambda1, lambda2, shift_position)


def _forward(fix):
    """(enc_scalar, disc_scalar, composed grads) at the fixture's current arrays."""
    tape = Tape()
    pv = {name: tape.leaf(fix.arrays[name]) for name in _ALL}
    xs = tape.leaf(fix.pair.source.attributes, track=False)
    xt = tape.leaf(fix.pair.target.attributes, track=False)
    hs = model.encode_source(tape, fix.pm_source.S, xs, pv, True, fix.shift_position)
    ht = model.encode_target(tape, fix.pm_target.S, xt, pv)
    logits_s, probs_s = model.classify(tape, hs, pv)
    logits_t, probs_t = model.classify(tape, ht, pv)
    l_sup = cross_entropy(tape, logits_s, fix.pair.source.labels[fix.labeled_idx], fix.labeled_idx)
    ps, pt = fix.pseudo.source, fix.pseudo.target
    ce_s = cross_entropy(tape, logits_s, ps.y_hat, ps.nodes, ps.weights)
    dv_s = diversity(tape, probs_s, ps.nodes)
    ce_t = cross_entropy(tape, logits_t, pt.y_hat, pt.nodes, pt.weights)
    dv_t = diversity(tape, probs_t, pt.nodes)
    zs, _ = model.discriminate(tape, grl(tape, hs, fix.lambda2), pv)
    zt, _ = model.discriminate(tape, grl(tape, ht, fix.lambda2), pv)
    at_s = bce_with_logits(tape, zs, 1.0)
    at_t = bce_with_logits(tape, zt, 0.0)
    half = 0.5 * fix.lambda1
    loss = wsum(tape, [(1.0, l_sup), (half, ce_s), (half, dv_s), (half, ce_t), (half, dv_t),
                       (1.0, at_s), (1.0, at_t)])
    tape.backward(loss)
    l_pl = 0.5 * (ce_s.value + dv_s.value + ce_t.value + dv_t.value)
    l_at = at_s.value + at_t.value
    enc_scalar = l_sup.value + fix.lambda1 * l_pl - fix.lambda2 * l_at
    grads = {name: pv[name].grad for name in _ALL}
    return enc_scalar, l_at, grads


def run_gradcheck(step=1e-5, groups=None, seed=7):
    """Per-group max relative errors of analytic vs central-difference gradients."""
    fix = build_fixture(seed=seed)
    if groups is None:
        groups = list(GROUPS)
    bad = [g for g in groups if g not in GROUPS]
    if bad:
        raise ConfigError(f"unknown gradcheck groups {bad}; know {sorted(GROUPS)}")
    results = {}
    for group in groups:
        names = GROUPS[group]
        scalar_index = 1 if group == "discriminator" else 0

        def f(_params, idx=scalar_index):
            out = _forward(fix)
            return out[idx], out[2]

        results[group] = grad_check(f, {n: fix.arrays[n] for n in names}, step)
    return results
