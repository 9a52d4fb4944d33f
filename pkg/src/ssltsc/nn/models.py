"""Encoder and classifier builders, seeded initialization, forward APIs."""

from __future__ import annotations

import numpy as np

from .layers import AsChannels, Conv1d, Dense, GlobalAvgPool, Network, ReLU

ENCODER_KINDS = ("mlp", "cnn")


def _uniform_init(rng: np.random.Generator, fan_in: int, fan_out: int,
                  shape: tuple[int, ...]) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape)


def _dense(rng: np.random.Generator, n_in: int, n_out: int) -> Dense:
    return Dense(_uniform_init(rng, n_in, n_out, (n_in, n_out)), np.zeros(n_out))


def build_mlp_encoder(input_len: int, embedding_dim: int = 64,
                      hidden: tuple[int, ...] = (256, 128),
                      rng: np.random.Generator | None = None) -> Network:
    rng = rng if rng is not None else np.random.default_rng(0)
    widths = (input_len, *hidden, embedding_dim)
    layers: list = []
    for i in range(len(widths) - 1):
        layers.append(_dense(rng, widths[i], widths[i + 1]))
        if i < len(widths) - 2:
            layers.append(ReLU())
    return Network(layers, "mlp", input_len, embedding_dim)


def build_cnn_encoder(input_len: int, embedding_dim: int = 64,
                      channels: tuple[int, int] = (16, 32), kernel: int = 8,
                      stride: int = 4,
                      rng: np.random.Generator | None = None) -> Network:
    rng = rng if rng is not None else np.random.default_rng(0)
    c1, c2 = channels
    len1 = Conv1d.out_length(input_len, kernel, stride)
    if len1 < kernel:
        raise ValueError(
            f"input_len {input_len} too short for two conv layers "
            f"(kernel {kernel}, stride {stride}: first output length {len1})"
        )
    len2 = Conv1d.out_length(len1, kernel, stride)
    if len2 < 1:
        raise ValueError(f"input_len {input_len} too short: second conv output empty")
    layers = [
        AsChannels(),
        Conv1d(_uniform_init(rng, 1 * kernel, c1 * kernel, (c1, 1, kernel)),
               np.zeros(c1), stride),
        ReLU(),
        Conv1d(_uniform_init(rng, c1 * kernel, c2 * kernel, (c2, c1, kernel)),
               np.zeros(c2), stride),
        ReLU(),
        GlobalAvgPool(),
        _dense(rng, c2, embedding_dim),
    ]
    return Network(layers, "cnn", input_len, embedding_dim)


def build_encoder(kind: str, input_len: int, embedding_dim: int = 64,
                  rng: np.random.Generator | None = None, **kwargs) -> Network:
    if kind == "mlp":
        return build_mlp_encoder(input_len, embedding_dim, rng=rng, **kwargs)
    if kind == "cnn":
        return build_cnn_encoder(input_len, embedding_dim, rng=rng, **kwargs)
    raise ValueError(f"encoder kind must be one of {ENCODER_KINDS}, got {kind!r}")


def build_classifier(embedding_dim: int = 64, hidden: int = 32,
                     rng: np.random.Generator | None = None) -> Network:
    """Shallow MLP head mapping embeddings to 2 logits."""
    rng = rng if rng is not None else np.random.default_rng(0)
    layers = [_dense(rng, embedding_dim, hidden), ReLU(), _dense(rng, hidden, 2)]
    return Network(layers, "classifier", embedding_dim, 2)


def encode(batch: np.ndarray, encoder: Network) -> np.ndarray:
    """(B, T) -> (B, embedding_dim) deterministic forward pass."""
    return encoder.forward(batch)


def classify(embeddings: np.ndarray, classifier: Network) -> np.ndarray:
    """(B, d) -> (B, 2) logits."""
    return classifier.forward(embeddings)


def predict_labels(logits: np.ndarray) -> np.ndarray:
    """Argmax over logits; ties resolve to class 0."""
    return np.argmax(logits, axis=1)
