"""Metrics, leave-one-subject-out protocol, and the experiment harnesses:
label-fraction sweep, training-subject-count sweep, and the augmentation
x encoder comparison table.

Folds and sweep cells are independent jobs; with jobs > 1 they run in a
process pool, and results are merged in deterministic order so parallel
output is identical to serial.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .data import Dataset, partition_labels, split_loso
from .protocol import (TrainConfig, predict, pretrain_encoder, train_classifier,
                       train_supervised_baseline)
from .rng import derive_rng, derive_seed

METHODS = ("cudle", "supervised")
METRIC_NAMES = ("accuracy", "precision", "recall", "f1")
AUGMENT_KINDS = ("flip", "blockout", "crop_resize", "gaussian_noise")

# Mean test-set metrics reported for the crop-and-resize + MLP cell by the
# original clinical study (private data; shown for format comparison only,
# never asserted against synthetic results).
CLINICAL_REFERENCE_CELL = {
    "augmentation": "crop_resize",
    "encoder": "mlp",
    "accuracy": 73.55,
    "precision": 73.92,
    "recall": 66.03,
    "f1": 69.75,
}


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @classmethod
    def from_predictions(cls, preds: np.ndarray, labels: np.ndarray) -> ConfusionCounts:
        preds = np.asarray(preds, dtype=bool)
        labels = np.asarray(labels, dtype=bool)
        if preds.shape != labels.shape or preds.ndim != 1 or preds.size == 0:
            raise ValueError("preds and labels must be equal-length, nonempty 1-D")
        return cls(
            tp=int(np.sum(preds & labels)),
            fp=int(np.sum(preds & ~labels)),
            fn=int(np.sum(~preds & labels)),
            tn=int(np.sum(~preds & ~labels)),
        )

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    flags: tuple[str, ...] = ()
    fold: str = ""

    def as_dict(self) -> dict:
        return {
            "fold": self.fold,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "flags": list(self.flags),
        }


def compute_metrics(preds: np.ndarray, labels: np.ndarray, fold: str = "") -> MetricsReport:
    """Accuracy, precision, recall, F1 with the positive class = True.

    Zero-denominator precision/recall are reported as 0 with a flag; F1 is
    the harmonic mean 2PR/(P+R), or 0 when P+R = 0.
    """
    counts = ConfusionCounts.from_predictions(preds, labels)
    flags = []
    accuracy = (counts.tp + counts.tn) / counts.total
    if counts.tp + counts.fp == 0:
        precision = 0.0
        flags.append("no_positive_predictions")
    else:
        precision = counts.tp / (counts.tp + counts.fp)
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    labels = np.asarray(labels, dtype=bool)
    if len(np.unique(labels)) < 2:
        flags.append("single_class_test")
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return MetricsReport(accuracy, precision, recall, f1, tuple(flags), fold)


def mean_metrics(reports: list[MetricsReport]) -> dict[str, float]:
    """Unweighted (macro) average of each metric across folds."""
    return {
        name: float(np.mean([getattr(r, name) for r in reports]))
        for name in METRIC_NAMES
    }


def _select_labeled_subjects(cfg: TrainConfig, train: Dataset, test_subject: str,
                             k: int | None, rep: int) -> set[str]:
    subjects = sorted(train.subjects)
    if k is None:
        return set(subjects)
    if not 1 <= k <= len(subjects):
        raise ValueError(f"labeled subject count {k} outside 1..{len(subjects)}")
    order = derive_rng(cfg.seed, "label-subjects", test_subject, rep).permutation(len(subjects))
    return {subjects[i] for i in order[:k]}


def _run_fold(args: tuple) -> MetricsReport:
    ds, method, cfg, test_subject, k, rep = args
    train, test = split_loso(ds, test_subject)
    labeled = _select_labeled_subjects(cfg, train, test_subject, k, rep)
    fold_cfg = replace(cfg, seed=derive_seed(cfg.seed, "fold", test_subject))
    d_labeled, d_unlabeled = partition_labels(train, labeled, pool=cfg.pretrain_pool)
    if method == "cudle":
        encoder, _ = pretrain_encoder(d_unlabeled, fold_cfg)
        classifier = train_classifier(d_labeled, encoder, fold_cfg)
    elif method == "supervised":
        encoder, classifier = train_supervised_baseline(d_labeled, fold_cfg)
    else:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    fold_id = test_subject if rep == 0 else f"{test_subject}/rep{rep}"
    return compute_metrics(predict(test, encoder, classifier), test.labels, fold=fold_id)


def _map_jobs(fn, args_list: list[tuple], jobs: int) -> list:
    if jobs <= 1 or len(args_list) <= 1:
        return [fn(args) for args in args_list]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, args_list))


def run_loso(ds: Dataset, method: str, cfg: TrainConfig,
             label_subjects_per_fold: int | None = None, rep: int = 0,
             jobs: int = 1) -> tuple[list[MetricsReport], dict[str, float]]:
    """One fold per subject, folds ordered by subject id.

    For "cudle", each fold pretrains on the training pool (labels erased)
    and fits the classifier on the labeled subjects' segments; "supervised"
    trains end to end on the labeled segments only.
    """
    subjects = sorted(ds.subjects)
    if len(subjects) < 2:
        raise ValueError("leave-one-subject-out needs >= 2 subjects")
    args = [(ds, method, cfg, s, label_subjects_per_fold, rep) for s in subjects]
    reports = _map_jobs(_run_fold, args, jobs)
    return reports, mean_metrics(reports)


def sweep_label_fraction(ds: Dataset, cfg: TrainConfig,
                         subject_counts: tuple[int, ...] = (1, 2, 5, 10, 15, 19),
                         reps: int = 1, jobs: int = 1) -> list[dict]:
    """Vary how many training subjects contribute labels.

    Pretraining for "cudle" always uses the full training pool; only the
    labeled subset shrinks. Returns one row per (count, method) with mean
    metrics over folds (and over `reps` seeded label selections).
    """
    n_train = len(ds.subjects) - 1
    for k in subject_counts:
        if k > n_train:
            raise ValueError(f"labeled subject count {k} exceeds fold size {n_train}")
    subjects = sorted(ds.subjects)
    rows = []
    for k in subject_counts:
        for method in METHODS:
            args = [(ds, method, cfg, s, k, rep)
                    for rep in range(reps) for s in subjects]
            reports = _map_jobs(_run_fold, args, jobs)
            rows.append({
                "k": k,
                "fraction": k / n_train,
                "method": method,
                **mean_metrics(reports),
                "folds": [r.as_dict() for r in reports],
            })
    return rows


def _run_subject_count_cell(args: tuple) -> MetricsReport:
    ds, method, cfg, test_subject, n = args
    train, test = split_loso(ds, test_subject)
    subjects = sorted(train.subjects)
    if not 1 <= n <= len(subjects):
        raise ValueError(f"training subject count {n} outside 1..{len(subjects)}")
    order = derive_rng(cfg.seed, "train-subset", test_subject).permutation(len(subjects))
    chosen = {subjects[i] for i in order[:n]}
    sub = train.subset(np.isin(train.subject_ids, sorted(chosen)))
    fold_cfg = replace(cfg, seed=derive_seed(cfg.seed, "fold", test_subject))
    if method == "cudle":
        d_labeled, d_unlabeled = partition_labels(sub, chosen, pool=cfg.pretrain_pool)
        encoder, _ = pretrain_encoder(d_unlabeled, fold_cfg)
        classifier = train_classifier(d_labeled, encoder, fold_cfg)
    elif method == "supervised":
        encoder, classifier = train_supervised_baseline(sub, fold_cfg)
    else:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    return compute_metrics(predict(test, encoder, classifier), test.labels,
                           fold=test_subject)


def sweep_train_subjects(ds: Dataset, cfg: TrainConfig,
                         n_values: tuple[int, ...] | None = None,
                         jobs: int = 1) -> list[dict]:
    """Vary how many subjects' data (fully labeled) is available for training.

    For each n and each held-out test subject, trains on a seeded n-subject
    subset disjoint from the test subject, then averages over test subjects.
    At n = n_subjects - 1 this coincides exactly with full-label LOSO.
    """
    subjects = sorted(ds.subjects)
    max_n = len(subjects) - 1
    if n_values is None:
        n_values = tuple(range(1, max_n + 1))
    for n in n_values:
        if not 1 <= n <= max_n:
            raise ValueError(f"training subject count {n} outside 1..{max_n}")
    rows = []
    for n in n_values:
        for method in METHODS:
            args = [(ds, method, cfg, s, n) for s in subjects]
            reports = _map_jobs(_run_subject_count_cell, args, jobs)
            rows.append({
                "n": n,
                "method": method,
                **mean_metrics(reports),
                "folds": [r.as_dict() for r in reports],
            })
    return rows


def compare_augmentations(ds: Dataset, cfg: TrainConfig, jobs: int = 1) -> list[dict]:
    """Full-label LOSO for every augmentation x encoder cell.

    Returns 8 rows with mean metrics in percent, mirroring the published
    table layout (see CLINICAL_REFERENCE_CELL for the comparison format).
    """
    rows = []
    for kind in AUGMENT_KINDS:
        for encoder_kind in ("cnn", "mlp"):
            cell_cfg = replace(cfg, encoder=encoder_kind,
                               augment=replace(cfg.augment, kind=kind))
            reports, mean = run_loso(ds, "cudle", cell_cfg, jobs=jobs)
            rows.append({
                "augmentation": kind,
                "encoder": encoder_kind,
                **{name: 100.0 * mean[name] for name in METRIC_NAMES},
                "folds": [r.as_dict() for r in reports],
            })
    return rows
