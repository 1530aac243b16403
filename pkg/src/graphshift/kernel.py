"""Reverse-mode scalar-loss differentiation over a fixed tape of known ops.

Not a general autodiff system: only the operations this model needs exist,
each with a hand-written backward. A Tape records op closures in forward
order; backward(loss) seeds d_loss = 1 and replays them reversed, skipping
branches whose output never received a gradient. float64 everywhere.

Single-threaded by design: a Tape must not be shared across threads.
"""
import numpy as np

from .errors import ConfigError, DimensionError, NumericalError


class Var:
    """Array (or python-float scalar) plus accumulated gradient.

    track=False marks constants whose gradient nobody reads; accumulation
    into them is skipped (saves an N x d allocation for the input matrix).
    """
    __slots__ = ("value", "grad", "track")

    def __init__(self, value, track=True):
        self.value = value
        self.grad = None
        self.track = track


class Tape:
    def __init__(self):
        self._records = []

    def leaf(self, value, track=True):
        if isinstance(value, np.ndarray):
            value = np.ascontiguousarray(value, dtype=np.float64)
        return Var(value, track)

    def _push(self, out, backward):
        self._records.append((out, backward))

    def backward(self, loss):
        """Accumulate gradients of the scalar loss into every tracked Var."""
        if not np.isscalar(loss.value) and getattr(loss.value, "ndim", 1) != 0:
            raise DimensionError("backward expects a scalar loss Var")
        loss.grad = 1.0
        for out, fn in reversed(self._records):
            if out.grad is not None:
                fn(out.grad)


def _acc(var, g):
    if not var.track:
        return
    var.grad = g if var.grad is None else var.grad + g


def spmm(tape, s, x):
    """Sparse-constant @ dense-Var product; backward multiplies by s.T."""
    if s.shape[1] != x.value.shape[0]:
        raise DimensionError(f"spmm: {s.shape} @ {x.value.shape}")
    out = Var(s @ x.value)

    def backward(g):
        _acc(x, s.T @ g)

    tape._push(out, backward)
    return out


def linear(tape, x, w, b=None):
    if x.value.shape[1] != w.value.shape[0]:
        raise DimensionError(f"linear: {x.value.shape} @ {w.value.shape}")
    y = x.value @ w.value
    if b is not None:
        if b.value.shape != (w.value.shape[1],):
            raise DimensionError(f"linear: bias shape {b.value.shape}")
        y = y + b.value
    out = Var(y)

    def backward(g):
        _acc(x, g @ w.value.T)
        _acc(w, x.value.T @ g)
        if b is not None:
            _acc(b, g.sum(axis=0))

    tape._push(out, backward)
    return out


def add(tape, a, b):
    if a.value.shape != b.value.shape:
        raise DimensionError(f"add: {a.value.shape} vs {b.value.shape}")
    out = Var(a.value + b.value)

    def backward(g):
        _acc(a, g)
        _acc(b, g)

    tape._push(out, backward)
    return out


def relu(tape, x):
    out = Var(np.maximum(x.value, 0.0))
    # subgradient at exactly 0 is 0
    mask = x.value > 0.0

    def backward(g):
        _acc(x, g * mask)

    tape._push(out, backward)
    return out


def dropout(tape, x, rate, train, rng):
    """Inverted dropout: survivors scale by 1/(1-rate); identity when not training."""
    if not 0.0 <= rate < 1.0:
        raise ConfigError(f"dropout rate must be in [0, 1), got {rate}")
    if not train or rate == 0.0:
        return x
    mask = (rng.random(x.value.shape) >= rate) / (1.0 - rate)
    out = Var(x.value * mask)

    def backward(g):
        _acc(x, g * mask)

    tape._push(out, backward)
    return out


def grl(tape, x, weight):
    """Gradient reversal boundary: identity forward, backward is -weight * g."""
    out = Var(x.value)

    def backward(g):
        _acc(x, -weight * g)

    tape._push(out, backward)
    return out


def softmax_rows(tape, z):
    shifted = z.value - z.value.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    p = e / e.sum(axis=1, keepdims=True)
    out = Var(p)

    def backward(g):
        _acc(z, p * (g - (g * p).sum(axis=1, keepdims=True)))

    tape._push(out, backward)
    return out


def sigmoid(x):
    """Stable elementwise logistic (plain function, not a tape op)."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def cross_entropy(tape, logits, classes, rows, weights=None):
    """(1/|rows|) sum_r w_r * (logsumexp(z_r) - z_r[y_r]); fused log-softmax form."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        raise ConfigError("cross_entropy over an empty node set")
    classes = np.asarray(classes, dtype=np.int64)
    if classes.shape != rows.shape:
        raise DimensionError("classes must align with rows")
    n_classes = logits.value.shape[1]
    if (classes < 0).any() or (classes >= n_classes).any():
        raise ConfigError(f"class ids outside [0, {n_classes})")
    w = np.ones(rows.size) if weights is None else np.asarray(weights, dtype=np.float64)
    if w.shape != rows.shape:
        raise DimensionError("weights must align with rows")
    z = logits.value[rows]
    m = z.max(axis=1, keepdims=True)
    lse = (m + np.log(np.exp(z - m).sum(axis=1, keepdims=True))).ravel()
    picked = z[np.arange(rows.size), classes]
    out = Var(float((w * (lse - picked)).sum() / rows.size))
    p = np.exp(z - lse[:, None])

    def backward(g):
        d = p * w[:, None]
        d[np.arange(rows.size), classes] -= w
        full = np.zeros_like(logits.value)
        np.add.at(full, rows, d * (g / rows.size))
        _acc(logits, full)

    tape._push(out, backward)
    return out


def bce_with_logits(tape, z, target):
    """mean(softplus(z) - target * z): -log sigmoid(z) at target 1, -log(1 - sigmoid(z)) at 0."""
    flat = z.value.ravel()
    if flat.size == 0:
        raise ConfigError("bce_with_logits over an empty set")
    val = float((np.logaddexp(0.0, flat) - target * flat).mean())
    out = Var(val)

    def backward(g):
        d = (sigmoid(flat) - target) * (g / flat.size)
        _acc(z, d.reshape(z.value.shape))

    tape._push(out, backward)
    return out


def diversity(tape, probs, rows):
    """sum_k q_k log q_k for q = column mean of probs[rows]; minimizing it spreads mass."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        raise ConfigError("diversity over an empty node set")
    q = probs.value[rows].mean(axis=0)
    qc = np.maximum(q, 1e-12)
    out = Var(float((q * np.log(qc)).sum()))

    def backward(g):
        d = (np.log(qc) + 1.0) * (g / rows.size)
        full = np.zeros_like(probs.value)
        full[rows] = d
        _acc(probs, full)

    tape._push(out, backward)
    return out


def wsum(tape, terms):
    """Weighted sum of scalar Vars: terms = [(coef, var), ...]."""
    out = Var(float(sum(c * v.value for c, v in terms)))

    def backward(g):
        for c, v in terms:
            _acc(v, c * g)

    tape._push(out, backward)
    return out


def grad_check(f, params, step=1e-5):
    """Max relative error between analytic gradients and central differences.

    f(params) must return (loss: float, grads: dict matching params' keys).
    Relative error per entry: |a - n| / max(|a|, |n|, 1e-8). Perturbs entries
    in place and restores them.
    """
    loss0, grads = f(params)
    if not np.isfinite(loss0):
        raise NumericalError("non-finite loss at the checking point")
    worst = 0.0
    for name, p in params.items():
        g = grads[name]
        if g is None:
            raise NumericalError(f"no gradient produced for {name}")
        if not np.isfinite(g).all():
            raise NumericalError(f"non-finite gradient for {name}")
        for idx in np.ndindex(p.shape):
            orig = p[idx]
            p[idx] = orig + step
            lp, _ = f(params)
            p[idx] = orig - step
            lm, _ = f(params)
            p[idx] = orig
            if not (np.isfinite(lp) and np.isfinite(lm)):
                raise NumericalError(f"non-finite loss while perturbing {name}{list(idx)}")
            num = (lp - lm) / (2.0 * step)
            rel = abs(g[idx] - num) / max(abs(g[idx]), abs(num), 1e-8)
            worst = max(worst, rel)
    return worst
