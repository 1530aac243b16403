"""Micro/macro F1 for single-label multiclass predictions.

Micro-F1 reduces to plain accuracy in this setting. Macro-F1 averages the
per-class F1 over all n_classes declared classes with the 0/0 -> 0
convention, so classes absent from both predictions and labels contribute 0.
"""
import numpy as np

from .errors import ConfigError, DimensionError


def micro_macro_f1(pred, labels, n_classes):
    pred = np.asarray(pred, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if pred.shape != labels.shape or pred.ndim != 1:
        raise DimensionError("pred and labels must be equal-length vectors")
    if pred.size == 0:
        raise ConfigError("micro_macro_f1 over an empty node set")
    if n_classes < 2:
        raise ConfigError("n_classes must be >= 2")
    if (pred < 0).any() or (pred >= n_classes).any() or (labels < 0).any() or (labels >= n_classes).any():
        raise ConfigError(f"class ids outside [0, {n_classes})")
    micro = float((pred == labels).mean())
    tp = np.bincount(labels[pred == labels], minlength=n_classes).astype(np.float64)
    pred_ct = np.bincount(pred, minlength=n_classes).astype(np.float64)
    true_ct = np.bincount(labels, minlength=n_classes).astype(np.float64)
    denom = pred_ct + true_ct  # = 2 TP + FP + FN
    f1 = np.divide(2.0 * tp, denom, out=np.zeros(n_classes), where=denom > 0)
    return micro, float(f1.mean())
