"""Two-layer graph-convolutional encoder with per-node source shifts, plus
classification and domain-discrimination heads, parameter init, checkpoints.

The encoder is H = S (dropout(relu(S X W1) [+ xi1])) W2 [+ xi2]: convolution
weights are shared across domains, the additive shifts xi exist only for the
source pass. shift_position chooses whether xi1 enters before or after the
hidden nonlinearity ("pre" / "post"); the final layer is linear either way.
"""
from dataclasses import dataclass

import numpy as np

from . import kernel
from .errors import ConfigError, DataError
from .kernel import Tape, add, dropout, linear, relu, softmax_rows, spmm

CHECKPOINT_VERSION = "1"
SHIFT_MODES = ("unbounded", "projected")
SHIFT_POSITIONS = ("post", "pre")


@dataclass
class EncoderParams:
    W1: np.ndarray  # attr_dim x hidden
    W2: np.ndarray  # hidden x embed


@dataclass
class ShiftParams:
    """Per-source-node additive shifts, one matrix per encoder layer."""
    xi1: np.ndarray  # n_source x hidden
    xi2: np.ndarray  # n_source x embed
    eps: float
    mode: str

    def __post_init__(self):
        if self.mode not in SHIFT_MODES:
            raise ConfigError(f"shift mode must be one of {SHIFT_MODES}")
        if self.eps <= 0:
            raise ConfigError("shift radius eps must be positive")

    def norms(self):
        return float(np.linalg.norm(self.xi1)), float(np.linalg.norm(self.xi2))


@dataclass
class HeadParams:
    Wc1: np.ndarray  # embed x clf_hidden
    bc1: np.ndarray
    Wc2: np.ndarray  # clf_hidden x n_classes
    bc2: np.ndarray
    wd: np.ndarray   # embed x 1
    bd: np.ndarray


def _glorot(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def init_params(n_source, attr_dim, hidden_dim, embed_dim, clf_hidden, n_classes,
                eps=0.5, shift_mode="unbounded", seed=0):
    """Deterministic init: scaled-uniform weights, zero biases, xi ~ U(-eps, eps).

    In projected mode each xi layer is rescaled into its Frobenius eps-ball
    immediately, so the constraint holds from the first forward on.
    """
    if n_classes < 2:
        raise ConfigError("n_classes must be >= 2")
    rng = np.random.default_rng(seed)
    enc = EncoderParams(
        W1=_glorot(rng, attr_dim, hidden_dim),
        W2=_glorot(rng, hidden_dim, embed_dim),
    )
    head = HeadParams(
        Wc1=_glorot(rng, embed_dim, clf_hidden),
        bc1=np.zeros(clf_hidden),
        Wc2=_glorot(rng, clf_hidden, n_classes),
        bc2=np.zeros(n_classes),
        wd=_glorot(rng, embed_dim, 1),
        bd=np.zeros(1),
    )
    xi1 = rng.uniform(-eps, eps, size=(n_source, hidden_dim))
    xi2 = rng.uniform(-eps, eps, size=(n_source, embed_dim))
    if shift_mode == "projected":
        for xi in (xi1, xi2):
            nrm = np.linalg.norm(xi)
            if nrm > eps:
                xi *= eps / nrm
    return enc, ShiftParams(xi1, xi2, eps, shift_mode), head


def param_vars(tape, enc, shift=None, head=None):
    """Wrap parameter arrays as tracked tape Vars, fixed key order."""
    out = {"W1": tape.leaf(enc.W1), "W2": tape.leaf(enc.W2)}
    if shift is not None:
        out["xi1"] = tape.leaf(shift.xi1)
        out["xi2"] = tape.leaf(shift.xi2)
    if head is not None:
        out["Wc1"] = tape.leaf(head.Wc1)
        out["bc1"] = tape.leaf(head.bc1)
        out["Wc2"] = tape.leaf(head.Wc2)
        out["bc2"] = tape.leaf(head.bc2)
        out["wd"] = tape.leaf(head.wd)
        out["bd"] = tape.leaf(head.bd)
    return out


def encode_target(tape, s, x, pv, dropout_rate=0.0, train=False, rng=None):
    """H^t = S relu(S X W1) W2 with dropout after the hidden activation."""
    h1 = relu(tape, spmm(tape, s, linear(tape, x, pv["W1"])))
    h1 = dropout(tape, h1, dropout_rate, train, rng)
    return spmm(tape, s, linear(tape, h1, pv["W2"]))


def encode_source(tape, s, x, pv, use_shift=True, shift_position="post",
                  dropout_rate=0.0, train=False, rng=None):
    """Source pass: same stack plus the additive shifts. With xi = 0 this is
    bitwise-identical to encode_target on the same inputs and RNG state."""
    if shift_position not in SHIFT_POSITIONS:
        raise ConfigError(f"shift_position must be one of {SHIFT_POSITIONS}")
    a1 = spmm(tape, s, linear(tape, x, pv["W1"]))
    if use_shift and shift_position == "pre":
        a1 = add(tape, a1, pv["xi1"])
    z1 = relu(tape, a1)
    if use_shift and shift_position == "post":
        z1 = add(tape, z1, pv["xi1"])
    z1 = dropout(tape, z1, dropout_rate, train, rng)
    h = spmm(tape, s, linear(tape, z1, pv["W2"]))
    if use_shift:
        h = add(tape, h, pv["xi2"])
    return h


def classify(tape, h, pv):
    """One-hidden-layer softmax classifier; returns (logits Var, probs Var)."""
    z = relu(tape, linear(tape, h, pv["Wc1"], pv["bc1"]))
    logits = linear(tape, z, pv["Wc2"], pv["bc2"])
    return logits, softmax_rows(tape, logits)


def discriminate(tape, h, pv):
    """Single logistic layer; returns (logit Var of shape (N, 1), probs ndarray)."""
    z = linear(tape, h, pv["wd"], pv["bd"])
    return z, kernel.sigmoid(z.value).ravel()


def encode_values(s, x, enc, shift=None, shift_position="post"):
    """Eval-mode embeddings as a plain array (shifted source pass when shift given)."""
    tape = Tape()
    pv = param_vars(tape, enc, shift)
    xv = tape.leaf(x, track=False)
    if shift is not None:
        h = encode_source(tape, s, xv, pv, True, shift_position)
    else:
        h = encode_target(tape, s, xv, pv)
    return h.value


def predict_probs(s, x, enc, head, shift=None, shift_position="post"):
    """Eval-mode class probabilities (no dropout, fresh throwaway tape)."""
    tape = Tape()
    pv = param_vars(tape, enc, shift, head)
    xv = tape.leaf(x, track=False)
    if shift is not None:
        h = encode_source(tape, s, xv, pv, True, shift_position)
    else:
        h = encode_target(tape, s, xv, pv)
    _, probs = classify(tape, h, pv)
    return probs.value


def save_checkpoint(path, enc, shift, head, config_hash="", config_json=""):
    """config_json optionally embeds the resolved training config so that a
    later eval can rebuild the exact propagation operator."""
    np.savez(
        path,
        version=np.array(CHECKPOINT_VERSION),
        config_hash=np.array(config_hash),
        config_json=np.array(config_json),
        W1=enc.W1, W2=enc.W2,
        xi1=shift.xi1, xi2=shift.xi2,
        shift_eps=np.array(shift.eps),
        shift_mode=np.array(shift.mode),
        **{
            "classifier.W1": head.Wc1, "classifier.b1": head.bc1,
            "classifier.W2": head.Wc2, "classifier.b2": head.bc2,
            "discriminator.w": head.wd, "discriminator.b": head.bd,
        },
    )


def load_checkpoint(path):
    """Returns (enc, shift, head, config_hash, config_json); arrays round-trip bit-exact."""
    with np.load(path) as z:
        version = str(z["version"])
        if version != CHECKPOINT_VERSION:
            raise DataError(f"unknown checkpoint version {version!r}")
        enc = EncoderParams(W1=z["W1"], W2=z["W2"])
        shift = ShiftParams(
            xi1=z["xi1"], xi2=z["xi2"],
            eps=float(z["shift_eps"]), mode=str(z["shift_mode"]),
        )
        head = HeadParams(
            Wc1=z["classifier.W1"], bc1=z["classifier.b1"],
            Wc2=z["classifier.W2"], bc2=z["classifier.b2"],
            wd=z["discriminator.w"], bd=z["discriminator.b"],
        )
        cj = str(z["config_json"]) if "config_json" in z.files else ""
        return enc, shift, head, str(z["config_hash"]), cj
