"""Full-batch training loop: supervised + pseudo-label + adversarial objectives,
adaptive-moment updates for weights, normalized-step updates for the shifts.

Gradient routing per epoch: one tape backward of
    L_sup + lambda1 * L_pl + L_at(through the reversal boundary)
gives the discriminator its plain dL_at gradient while the encoder and shifts
receive -lambda2 * dL_at plus the supervised/pseudo parts; that composed
gradient drives both the weight updates and the shift rule. lambda2 ramps
linearly with the epoch index (m/M, 1-based during fit).

Determinism: every random stream (walks per domain, init, per-domain dropout)
is derived from cfg.seed with fixed tags; runs are single-threaded and
bit-reproducible.
"""
import dataclasses
import hashlib
import time
from dataclasses import dataclass

import numpy as np

from . import kernel, model, objectives
from .errors import ConfigError, NumericalError
from .kernel import Tape, bce_with_logits, cross_entropy, diversity, grl, wsum
from .metrics import micro_macro_f1
from .model import SHIFT_MODES, SHIFT_POSITIONS
from .ppmi import reconstruct
from .walks import WalkConfig

# seed-derivation tags (arbitrary fixed constants)
_TAG_WALK_SOURCE, _TAG_WALK_TARGET = 101, 102
_TAG_DROP_SOURCE, _TAG_DROP_TARGET = 201, 202


@dataclass
class TrainConfig:
    epochs: int = 200
    lr: float = 1e-3
    weight_decay: float = 1e-3
    dropout: float = 0.1
    lambda1: float = 1.0
    lambda2_mode: str = "linear"  # "linear": m/epochs; "constant": lambda2_value
    lambda2_value: float = 1.0
    eps: float = 0.5
    alpha: float = 0.8
    beta: float = 1.2
    shift_mode: str = "unbounded"
    shift_step: float | None = None  # None -> lr
    shift_position: str = "post"
    hidden_dim: int = 512
    embed_dim: int = 512
    clf_hidden: int = 128
    walks_per_node: int = 10
    walk_length: int = 40
    window: int = 5
    count_self: bool = True
    use_neg: bool = True
    use_shift: bool = True
    use_at: bool = True
    use_pl: bool = True
    seed: int = 0
    eval_every: int = 1
    checkpoint_every: int = 0  # 0: final checkpoint only

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.lr <= 0:
            raise ConfigError("lr must be positive")
        if self.weight_decay < 0:
            raise ConfigError("weight_decay must be nonnegative")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError("dropout must be in [0, 1)")
        if self.lambda1 < 0:
            raise ConfigError("lambda1 must be nonnegative")
        if self.lambda2_mode not in ("linear", "constant"):
            raise ConfigError("lambda2_mode must be 'linear' or 'constant'")
        if self.lambda2_value < 0:
            raise ConfigError("lambda2_value must be nonnegative")
        if self.eps <= 0:
            raise ConfigError("eps must be positive")
        if self.beta < self.alpha:
            raise ConfigError("beta must be >= alpha")
        if self.shift_mode not in SHIFT_MODES:
            raise ConfigError(f"shift_mode must be one of {SHIFT_MODES}")
        if self.shift_step is not None and self.shift_step <= 0:
            raise ConfigError("shift_step must be positive")
        if self.shift_position not in SHIFT_POSITIONS:
            raise ConfigError(f"shift_position must be one of {SHIFT_POSITIONS}")
        for nm in ("hidden_dim", "embed_dim", "clf_hidden", "walks_per_node", "window", "eval_every"):
            if getattr(self, nm) < 1:
                raise ConfigError(f"{nm} must be >= 1")
        if self.walk_length < 2:
            raise ConfigError("walk_length must be >= 2")
        if self.window >= self.walk_length:
            raise ConfigError("window must be < walk_length")
        if self.checkpoint_every < 0:
            raise ConfigError("checkpoint_every must be >= 0")

    def walk_config(self, domain):
        if domain not in ("source", "target"):
            raise ConfigError(f"domain must be 'source' or 'target', got {domain!r}")
        tag = _TAG_WALK_SOURCE if domain == "source" else _TAG_WALK_TARGET
        wseed = int(np.random.SeedSequence([self.seed, tag]).generate_state(1, np.uint64)[0])
        return WalkConfig(self.walks_per_node, self.walk_length, self.window,
                          seed=wseed, count_self=self.count_self)


def config_hash(cfg):
    canon = repr(sorted(dataclasses.asdict(cfg).items()))
    return hashlib.sha256(canon.encode()).hexdigest()


def variant_name(cfg):
    off = [nm for nm in ("neg", "shift", "at", "pl") if not getattr(cfg, f"use_{nm}")]
    if not off:
        return "full"
    if set(off) == {"neg", "shift", "at", "pl"}:
        return "source-only"
    if set(off) == {"at", "pl"}:
        return "supervised-only"
    return "wo-" + "-".join(off)


def source_only_config(cfg):
    """The no-adaptation control: raw adjacency, no shifts, supervised loss only."""
    return dataclasses.replace(cfg, use_neg=False, use_shift=False, use_at=False, use_pl=False)


def lambda2(m, max_epochs):
    """Linear ramp m / M over the epoch index."""
    if max_epochs < 1:
        raise ConfigError("max_epochs must be >= 1")
    if not 0 <= m <= max_epochs:
        raise ConfigError(f"epoch index {m} outside [0, {max_epochs}]")
    return m / max_epochs


def update_shift(xi, grad, step, mode, eps):
    """Normalized shift step: xi - step * g / ||g||_F, unchanged when g = 0.

    g is the composed objective gradient (adversarial part already reversed),
    so this descends the joint objective while opposing the discriminator.
    Projected mode then rescales back into the Frobenius eps-ball.
    """
    nrm = float(np.linalg.norm(grad))
    if nrm == 0.0:
        new = xi.copy()
    else:
        new = xi - step * (grad / nrm)
    if mode == "projected":
        n2 = float(np.linalg.norm(new))
        if n2 > eps:
            new = new * (eps / n2)
    return new


class AdamW:
    """Adaptive-moment update with decoupled weight decay, per-parameter step count
    (a parameter skipped in some epoch keeps its moments and count unchanged)."""

    def __init__(self, lr, weight_decay=0.0, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.weight_decay = weight_decay
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.state = {}

    def step(self, params, grads):
        for name, p in params.items():
            g = grads.get(name)
            if g is None:
                continue
            m, v, t = self.state.get(name, (np.zeros_like(p), np.zeros_like(p), 0))
            t += 1
            m = self.beta1 * m + (1.0 - self.beta1) * g
            v = self.beta2 * v + (1.0 - self.beta2) * g * g
            self.state[name] = (m, v, t)
            mhat = m / (1.0 - self.beta1 ** t)
            vhat = v / (1.0 - self.beta2 ** t)
            p -= self.lr * (mhat / (np.sqrt(vhat) + self.eps) + self.weight_decay * p)


@dataclass
class EpochReport:
    epoch: int
    lambda2: float
    l_sup: float
    l_at: float
    l_pl: float
    xi1_norm: float
    xi2_norm: float
    micro_f1: float
    macro_f1: float
    target_entropy: float
    pseudo_acc: float
    wall_time: float

# wall_time is nondeterministic, so it stays out of the CSV (summary JSON
# carries the run total); everything below reproduces bit-identically.
CSV_COLUMNS = ("epoch", "lambda2", "l_sup", "l_at", "l_pl", "xi1_norm", "xi2_norm",
               "micro_f1", "macro_f1", "target_entropy", "pseudo_acc")


def write_epoch_csv(path, reports):
    with open(path, "w") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for r in reports:
            row = [repr(float(getattr(r, c))) if c != "epoch" else str(r.epoch)
                   for c in CSV_COLUMNS]
            fh.write(",".join(row) + "\n")


def evaluate(probs, labels, n_classes):
    """(micro_f1, macro_f1) of the argmax prediction over nodes with a label."""
    labels = np.asarray(labels, dtype=np.int64)
    valid = labels >= 0
    if not valid.any():
        raise ConfigError("evaluate needs at least one labeled node")
    pred = objectives.make_pseudo_labels(probs)
    return micro_macro_f1(pred[valid], labels[valid], n_classes)


def _entropy(probs):
    q = probs.mean(axis=0)
    return float(-(q * np.log(np.maximum(q, 1e-12))).sum())


@dataclass
class TrainState:
    cfg: TrainConfig
    pair: object
    pm_source: object
    pm_target: object
    enc: model.EncoderParams
    shift: model.ShiftParams
    head: model.HeadParams
    opt: AdamW
    rng_drop_source: np.random.Generator
    rng_drop_target: np.random.Generator
    labeled_idx: np.ndarray
    n_classes: int


def _check_finite(name, arr, epoch):
    if not np.isfinite(arr).all():
        raise NumericalError(f"non-finite {name} at epoch {epoch}")


def train_epoch(state, m):
    """One full-batch epoch at (1-based) epoch index m; returns an EpochReport."""
    cfg = state.cfg
    t0 = time.perf_counter()
    lam2 = lambda2(m, cfg.epochs) if cfg.lambda2_mode == "linear" else cfg.lambda2_value
    src, tgt = state.pair.source, state.pair.target

    # (1) refresh the frozen pseudo state from current eval-mode predictions
    pseudo = None
    pseudo_acc = float("nan")
    if cfg.use_pl:
        probs_s = model.predict_probs(state.pm_source.S, src.attributes, state.enc, state.head,
                                      state.shift if cfg.use_shift else None, cfg.shift_position)
        probs_t = model.predict_probs(state.pm_target.S, tgt.attributes, state.enc, state.head)
        pseudo = objectives.refresh_pseudo_state(
            state.pm_source.P, state.pm_target.P, probs_s, probs_t,
            src.labels, src.labeled_mask, state.n_classes, cfg.alpha, cfg.beta)
        truth = src.labels[pseudo.source.nodes]
        if (truth >= 0).all():
            pseudo_acc = float((pseudo.source.y_hat == truth).mean())

    # (2) training forward on a fresh tape
    tape = Tape()
    pv = model.param_vars(tape, state.enc, state.shift if cfg.use_shift else None, state.head)
    xs = tape.leaf(src.attributes, track=False)
    xt = tape.leaf(tgt.attributes, track=False)
    hs = model.encode_source(tape, state.pm_source.S, xs, pv, cfg.use_shift, cfg.shift_position,
                             cfg.dropout, True, state.rng_drop_source)
    ht = model.encode_target(tape, state.pm_target.S, xt, pv, cfg.dropout, True, state.rng_drop_target)
    logits_s, probs_s_var = model.classify(tape, hs, pv)

    terms = [(1.0, cross_entropy(tape, logits_s, src.labels[state.labeled_idx], state.labeled_idx))]
    l_sup = terms[0][1].value
    l_pl_s = l_pl_t = float("nan")
    if cfg.use_pl:
        ce_s = cross_entropy(tape, logits_s, pseudo.source.y_hat, pseudo.source.nodes,
                             pseudo.source.weights)
        dv_s = diversity(tape, probs_s_var, pseudo.source.nodes)
        logits_t, probs_t_var = model.classify(tape, ht, pv)
        ce_t = cross_entropy(tape, logits_t, pseudo.target.y_hat, pseudo.target.nodes,
                             pseudo.target.weights)
        dv_t = diversity(tape, probs_t_var, pseudo.target.nodes)
        half = 0.5 * cfg.lambda1
        terms += [(half, ce_s), (half, dv_s), (half, ce_t), (half, dv_t)]
        l_pl_s = ce_s.value + dv_s.value
        l_pl_t = ce_t.value + dv_t.value

    l_at = float("nan")
    at_active = cfg.use_at and lam2 > 0.0
    if at_active:
        zs, _ = model.discriminate(tape, grl(tape, hs, lam2), pv)
        zt, _ = model.discriminate(tape, grl(tape, ht, lam2), pv)
        at_s = bce_with_logits(tape, zs, 1.0)
        at_t = bce_with_logits(tape, zt, 0.0)
        # coefficient 1: the discriminator sees plain dL_at, the boundary
        # already scales the encoder side by -lambda2
        terms += [(1.0, at_s), (1.0, at_t)]
        l_at = at_s.value + at_t.value
    elif cfg.use_at:
        l_at = objectives.adversarial_loss(
            kernel.sigmoid(hs.value @ state.head.wd + state.head.bd),
            kernel.sigmoid(ht.value @ state.head.wd + state.head.bd))

    loss = wsum(tape, terms)
    if not np.isfinite(loss.value):
        raise NumericalError(f"non-finite loss at epoch {m}")
    tape.backward(loss)

    # (3) updates
    weight_names = ("W1", "W2", "Wc1", "bc1", "Wc2", "bc2", "wd", "bd")
    params = {nm: pv[nm].value for nm in weight_names}
    grads = {}
    for nm in weight_names:
        g = pv[nm].grad
        if g is not None:
            _check_finite(f"gradient of {nm}", g, m)
        grads[nm] = g
    state.opt.step(params, grads)

    if cfg.use_shift:
        step = cfg.lr if cfg.shift_step is None else cfg.shift_step
        for nm, attr in (("xi1", "xi1"), ("xi2", "xi2")):
            g = pv[nm].grad
            if g is None:
                continue
            _check_finite(f"gradient of {nm}", g, m)
            setattr(state.shift, attr,
                    update_shift(getattr(state.shift, attr), g, step, cfg.shift_mode, cfg.eps))

    # (4) evaluation cadence (post-update, eval mode)
    micro = macro = entropy = float("nan")
    if m % cfg.eval_every == 0 or m == cfg.epochs:
        probs_eval = model.predict_probs(state.pm_target.S, tgt.attributes, state.enc, state.head)
        entropy = _entropy(probs_eval)
        if tgt.labels is not None and (tgt.labels >= 0).any():
            micro, macro = evaluate(probs_eval, tgt.labels, state.n_classes)

    xi1_n, xi2_n = state.shift.norms()
    l_pl = 0.5 * (l_pl_s + l_pl_t) if cfg.use_pl else float("nan")
    return EpochReport(m, lam2, l_sup, l_at, l_pl, xi1_n, xi2_n,
                       micro, macro, entropy, pseudo_acc, time.perf_counter() - t0)


@dataclass
class FitResult:
    enc: model.EncoderParams
    shift: model.ShiftParams
    head: model.HeadParams
    reports: list
    pm_source: object
    pm_target: object
    cfg_hash: str


def fit(pair, cfg=None, pm_source=None, pm_target=None, epoch_callback=None):
    """Train on a DomainPair; returns FitResult with per-epoch reports.

    Precomputed PpmiMatrix objects may be injected (cache path); otherwise
    both domains are reconstructed here according to cfg.
    """
    cfg = cfg or TrainConfig()
    if not pair.source.labeled_mask.any():
        raise ConfigError("source graph has no labeled nodes")
    if cfg.use_pl and pair.source.labeled_mask.all():
        raise ConfigError("use_pl requires unlabeled source nodes")
    n_classes = pair.n_classes
    if n_classes < 2:
        raise ConfigError("need at least 2 classes")
    if (pair.source.labels[pair.source.labeled_mask] >= n_classes).any():
        raise ConfigError("label outside the class space")

    if pm_source is None:
        pm_source = reconstruct(pair.source, cfg.walk_config("source"), cfg.use_neg)
    if pm_target is None:
        pm_target = reconstruct(pair.target, cfg.walk_config("target"), cfg.use_neg)

    enc, shift, head = model.init_params(
        pair.source.n_nodes, pair.source.attr_dim, cfg.hidden_dim, cfg.embed_dim,
        cfg.clf_hidden, n_classes, cfg.eps, cfg.shift_mode, cfg.seed)
    state = TrainState(
        cfg=cfg, pair=pair, pm_source=pm_source, pm_target=pm_target,
        enc=enc, shift=shift, head=head,
        opt=AdamW(cfg.lr, cfg.weight_decay),
        rng_drop_source=np.random.default_rng(np.random.SeedSequence([cfg.seed, _TAG_DROP_SOURCE])),
        rng_drop_target=np.random.default_rng(np.random.SeedSequence([cfg.seed, _TAG_DROP_TARGET])),
        labeled_idx=np.nonzero(pair.source.labeled_mask)[0],
        n_classes=n_classes,
    )
    reports = []
    for m in range(1, cfg.epochs + 1):
        report = train_epoch(state, m)
        reports.append(report)
        if epoch_callback is not None:
            epoch_callback(state, report)
    return FitResult(state.enc, state.shift, state.head, reports,
                     pm_source, pm_target, config_hash(cfg))
