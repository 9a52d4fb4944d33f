"""Two-phase training: contrastive pretraining, then a classifier on the
frozen encoder. Plus the end-to-end supervised baseline sharing the same
architecture.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .augment import AugmentSpec
from .contrastive import SIMILARITY_MODES, contrastive_batch_grads
from .data import Dataset
from .nn import (Adam, Network, build_classifier, build_encoder, classify,
                 cross_entropy_with_grads, encode, predict_labels)
from .nn.models import ENCODER_KINDS
from .rng import derive_rng


class SingleClassDataWarning(UserWarning):
    """Labeled training data contains one class only."""


@dataclass(frozen=True)
class TrainConfig:
    """Everything a training run needs besides the data."""

    pretrain_epochs: int = 100
    classifier_epochs: int = 100
    learning_rate: float = 0.001
    batch_size: int = 64
    augment: AugmentSpec = field(default_factory=AugmentSpec)
    temperature: float = 0.05
    similarity: str = "cosine"
    encoder: str = "mlp"
    embedding_dim: int = 64
    classifier_hidden: int = 32
    pretrain_pool: str = "full"  # or "complement": pretrain only on unlabeled subjects
    seed: int = 0

    def __post_init__(self) -> None:
        if self.pretrain_epochs < 0 or self.classifier_epochs < 0:
            raise ValueError("epoch counts must be >= 0")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.similarity not in SIMILARITY_MODES:
            raise ValueError(f"similarity must be one of {SIMILARITY_MODES}")
        if self.encoder not in ENCODER_KINDS:
            raise ValueError(f"encoder must be one of {ENCODER_KINDS}")
        if self.embedding_dim < 1 or self.classifier_hidden < 1:
            raise ValueError("embedding_dim and classifier_hidden must be >= 1")
        if self.pretrain_pool not in ("full", "complement"):
            raise ValueError("pretrain_pool must be 'full' or 'complement'")


def _batches(n: int, batch_size: int, order: np.ndarray):
    # last partial batch is kept
    for lo in range(0, n, batch_size):
        yield order[lo:lo + batch_size]


def pretrain_encoder(d_unlabeled: Dataset, cfg: TrainConfig) -> tuple[Network, list[float]]:
    """Contrastive pretraining over the unlabeled pool.

    Returns the encoder and the per-epoch mean loss (per ordered pair).
    With pretrain_epochs=0 the encoder is returned at its seeded
    initialization, untouched.
    """
    if d_unlabeled.n_segments == 0:
        raise ValueError("pretraining pool is empty")
    encoder = build_encoder(cfg.encoder, d_unlabeled.segment_length, cfg.embedding_dim,
                            rng=derive_rng(cfg.seed, "init-encoder"))
    optimizer = Adam()
    curve: list[float] = []
    m = d_unlabeled.n_segments
    for epoch in range(cfg.pretrain_epochs):
        order = derive_rng(cfg.seed, "pretrain-shuffle", epoch).permutation(m)
        aug_rng = derive_rng(cfg.seed, "augment", epoch)
        total, weight = 0.0, 0
        for idx in _batches(m, cfg.batch_size, order):
            encoder.zero_grads()
            loss = contrastive_batch_grads(
                d_unlabeled.values[idx], cfg.augment, encoder,
                cfg.temperature, cfg.similarity, aug_rng,
            )
            optimizer.step(encoder.param_items(), encoder.grad_items(), cfg.learning_rate)
            total += loss * 2 * len(idx)
            weight += 2 * len(idx)
        curve.append(total / weight)
    return encoder, curve


def _check_labels(d_labeled: Dataset) -> np.ndarray:
    if d_labeled.labels is None:
        raise ValueError("labeled dataset required")
    if d_labeled.n_segments == 0:
        raise ValueError("labeled dataset is empty")
    labels = d_labeled.labels.astype(np.int64)
    if len(np.unique(labels)) < 2:
        warnings.warn("labeled training data contains a single class",
                      SingleClassDataWarning, stacklevel=3)
    return labels


def train_classifier(d_labeled: Dataset, encoder: Network, cfg: TrainConfig) -> Network:
    """Fit the classifier head on frozen-encoder representations.

    The encoder is used for inference only; its parameters are bit-identical
    before and after. Embeddings are computed once and reused each epoch.
    """
    labels = _check_labels(d_labeled)
    embeddings = encode(d_labeled.values, encoder)
    classifier = build_classifier(cfg.embedding_dim, cfg.classifier_hidden,
                                  rng=derive_rng(cfg.seed, "init-classifier"))
    optimizer = Adam()
    m = d_labeled.n_segments
    for epoch in range(cfg.classifier_epochs):
        order = derive_rng(cfg.seed, "classifier-shuffle", epoch).permutation(m)
        for idx in _batches(m, cfg.batch_size, order):
            logits = classifier.forward(embeddings[idx])
            _, grad = cross_entropy_with_grads(logits, labels[idx])
            classifier.zero_grads()
            classifier.backward(grad)
            optimizer.step(classifier.param_items(), classifier.grad_items(),
                           cfg.learning_rate)
    return classifier


def train_supervised_baseline(d_labeled: Dataset,
                              cfg: TrainConfig) -> tuple[Network, Network]:
    """End-to-end cross-entropy training of the same encoder+classifier
    architecture; no augmentation, no contrastive phase. Runs for
    cfg.classifier_epochs epochs."""
    labels = _check_labels(d_labeled)
    encoder = build_encoder(cfg.encoder, d_labeled.segment_length, cfg.embedding_dim,
                            rng=derive_rng(cfg.seed, "init-encoder"))
    classifier = build_classifier(cfg.embedding_dim, cfg.classifier_hidden,
                                  rng=derive_rng(cfg.seed, "init-classifier"))
    optimizer = Adam()

    def _prefixed(items_of) -> list[tuple[str, np.ndarray]]:
        return ([(f"encoder.{n}", a) for n, a in items_of(encoder)]
                + [(f"classifier.{n}", a) for n, a in items_of(classifier)])

    m = d_labeled.n_segments
    for epoch in range(cfg.classifier_epochs):
        order = derive_rng(cfg.seed, "supervised-shuffle", epoch).permutation(m)
        for idx in _batches(m, cfg.batch_size, order):
            logits = classifier.forward(encoder.forward(d_labeled.values[idx]))
            _, grad = cross_entropy_with_grads(logits, labels[idx])
            encoder.zero_grads()
            classifier.zero_grads()
            encoder.backward(classifier.backward(grad))
            optimizer.step(_prefixed(lambda net: net.param_items()),
                           _prefixed(lambda net: net.grad_items()),
                           cfg.learning_rate)
    return encoder, classifier


def predict(ds: Dataset, encoder: Network, classifier: Network) -> np.ndarray:
    """Boolean predictions per segment; logit ties resolve to False."""
    logits = classify(encode(ds.values, encoder), classifier)
    return predict_labels(logits) == 1
