"""Cross-entropy loss with analytic gradient."""

from __future__ import annotations

import numpy as np


def cross_entropy_with_grads(logits: np.ndarray,
                             labels: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean negative log-likelihood of the true class, and d(loss)/d(logits).

    Args:
        logits: (B, C) raw scores, C >= 2.
        labels: (B,) integer class indices.

    Returns:
        (loss, grad) where grad = (softmax - onehot) / B.
    """
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if logits.ndim != 2 or logits.shape[0] == 0:
        raise ValueError("logits must be a non-empty (batch, classes) array")
    b, c = logits.shape
    if labels.shape != (b,):
        raise ValueError(f"labels shape {labels.shape} does not match batch {b}")
    if labels.min() < 0 or labels.max() >= c:
        raise ValueError("labels out of range")
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - log_z
    rows = np.arange(b)
    loss = float(-log_probs[rows, labels].mean())
    grad = np.exp(log_probs)
    grad[rows, labels] -= 1.0
    return loss, grad / b
