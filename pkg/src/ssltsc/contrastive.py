"""Similarity and the temperature-scaled contrastive loss over view pairs.

A batch of N source windows yields 2N embeddings; rows 2t and 2t+1 are the
positive pair of window t. For each view i with partner j, the per-pair
term is

    l(i, j) = -log( exp(sim(z_i, z_j)/tau) / sum_{k != i} exp(sim(z_i, z_k)/tau) )

and the batch loss is the mean of l over all 2N ordered pairs. Similarity
is cosine by default; a plain dot-product mode is available.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .augment import AugmentSpec, make_view_pairs
from .nn import Network

SIMILARITY_MODES = ("cosine", "dot")
_NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class ContrastiveBatch:
    """Embeddings arranged as interleaved positive pairs, plus loss settings."""

    embeddings: np.ndarray  # (2N, d)
    temperature: float = 0.05
    similarity: str = "cosine"

    def __post_init__(self) -> None:
        z = np.asarray(self.embeddings, dtype=np.float64)
        object.__setattr__(self, "embeddings", z)
        if z.ndim != 2 or z.shape[0] < 2 or z.shape[0] % 2 != 0:
            raise ValueError("embeddings must be (2N, d) with N >= 1")
        if not np.all(np.isfinite(z)):
            raise ValueError("embeddings must be finite")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.similarity not in SIMILARITY_MODES:
            raise ValueError(f"similarity must be one of {SIMILARITY_MODES}")


def similarity(u: np.ndarray, v: np.ndarray, mode: str = "cosine") -> float:
    """Dot product, or cosine (dot of unit-normalized vectors)."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError("u and v must be 1-D vectors of equal dimension")
    if mode == "dot":
        return float(u @ v)
    if mode == "cosine":
        nu, nv = np.linalg.norm(u), np.linalg.norm(v)
        if nu <= _NORM_FLOOR or nv <= _NORM_FLOOR:
            raise ValueError("cosine similarity undefined for (near-)zero vector")
        return float(u @ v / (nu * nv))
    raise ValueError(f"similarity must be one of {SIMILARITY_MODES}")


def nt_xent_loss(batch: ContrastiveBatch) -> tuple[float, np.ndarray]:
    """Batch loss and its analytic gradient w.r.t. the embeddings.

    The log-sum-exp is stabilized by max subtraction, so tau as small as
    0.05 cannot overflow. With N=1 there are no negatives and the loss is
    exactly 0.
    """
    z = batch.embeddings
    n_rows, _ = z.shape
    tau = batch.temperature

    if batch.similarity == "cosine":
        norms = np.linalg.norm(z, axis=1)
        if np.any(norms <= _NORM_FLOOR):
            raise ValueError("cosine similarity undefined for (near-)zero embedding row")
        u = z / norms[:, None]
        sim = u @ u.T
    else:
        sim = z @ z.T

    logits = sim / tau
    np.fill_diagonal(logits, -np.inf)  # k == i excluded from the denominator

    row_max = logits.max(axis=1)
    shifted = np.exp(logits - row_max[:, None])
    lse = row_max + np.log(shifted.sum(axis=1))

    rows = np.arange(n_rows)
    partner = rows ^ 1
    losses = lse - logits[rows, partner]
    loss = float(losses.mean())

    # d(loss)/d(logits): softmax minus the positive indicator, averaged.
    softmax = shifted / shifted.sum(axis=1, keepdims=True)
    gl = softmax
    gl[rows, partner] -= 1.0
    gl /= n_rows * tau
    gsym = gl + gl.T

    if batch.similarity == "dot":
        grad = gsym @ z
    else:
        gu = gsym @ u
        grad = (gu - (gu * u).sum(axis=1, keepdims=True) * u) / norms[:, None]
    return loss, grad


def contrastive_batch_grads(x: np.ndarray, spec: AugmentSpec, encoder: Network,
                            temperature: float, similarity_mode: str,
                            rng: np.random.Generator) -> float:
    """View pairs -> encoder -> NT-Xent; accumulates encoder gradients.

    Returns the batch loss. The caller owns zeroing grads and stepping the
    optimizer. This is the exact gradient used by pretraining updates.
    """
    if x.shape[0] == 0:
        raise ValueError("batch must be nonempty")
    views = make_view_pairs(x, spec, rng)
    embeddings = encoder.forward(views)
    loss, grad = nt_xent_loss(
        ContrastiveBatch(embeddings, temperature=temperature, similarity=similarity_mode)
    )
    encoder.backward(grad)
    return loss
