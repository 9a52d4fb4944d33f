"""Dataset model for windowed physiological recordings.

Covers overlapping-window segmentation with event labeling, per-subject
standardization, leave-one-subject-out splitting, label partitioning for
semi-supervised training, and the CSV on-disk format.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np


class DegenerateSubjectWarning(UserWarning):
    """A subject's pooled standard deviation is ~0; its values were zeroed."""


class DatasetParseError(ValueError):
    """Malformed dataset file; message names the offending line."""


@dataclass(frozen=True)
class RawRecording:
    """One subject's continuous signal plus timestamped use events.

    Args:
        subject_id: Opaque subject identifier.
        sample_rate: Samples per minute (positive integer).
        samples: Signal values, one per sample.
        event_times: Minutes-from-start of use events, sorted, each within
            [0, duration).
    """

    subject_id: str
    sample_rate: int
    samples: np.ndarray
    event_times: np.ndarray

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        events = np.asarray(self.event_times, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "event_times", events)
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if samples.ndim != 1 or samples.size < 1:
            raise ValueError("samples must be a non-empty 1-D sequence")
        if events.size:
            if np.any(np.diff(events) < 0):
                raise ValueError("event_times must be sorted ascending")
            if events[0] < 0 or events[-1] >= self.duration_minutes:
                raise ValueError("event_times must lie within [0, duration)")

    @property
    def duration_minutes(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class Segment:
    """One fixed-length window cut from a recording."""

    subject_id: str
    values: np.ndarray
    label: bool
    window_start: int  # minutes from start of the recording


@dataclass(frozen=True)
class Dataset:
    """Ordered collection of equal-length segments, stored as parallel arrays.

    ``labels`` is None for datasets whose labels have been stripped for
    pretraining.
    """

    values: np.ndarray  # (m, T) float64
    labels: np.ndarray | None  # (m,) bool, or None
    subject_ids: np.ndarray  # (m,) str
    window_starts: np.ndarray  # (m,) int

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        sids = np.asarray(self.subject_ids)
        starts = np.asarray(self.window_starts, dtype=np.int64)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "subject_ids", sids)
        object.__setattr__(self, "window_starts", starts)
        if values.ndim != 2:
            raise ValueError("values must be a (segments, T) array")
        m = values.shape[0]
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=bool)
            object.__setattr__(self, "labels", labels)
            if labels.shape != (m,):
                raise ValueError("labels length must match segment count")
        if sids.shape != (m,) or starts.shape != (m,):
            raise ValueError("subject_ids and window_starts must match segment count")

    @classmethod
    def from_segments(cls, segments: list[Segment]) -> Dataset:
        if not segments:
            raise ValueError("no segments")
        lengths = {seg.values.size for seg in segments}
        if len(lengths) != 1:
            raise ValueError(f"segments have mixed lengths: {sorted(lengths)}")
        return cls(
            values=np.stack([np.asarray(s.values, dtype=np.float64) for s in segments]),
            labels=np.array([s.label for s in segments], dtype=bool),
            subject_ids=np.array([s.subject_id for s in segments]),
            window_starts=np.array([s.window_start for s in segments], dtype=np.int64),
        )

    @property
    def n_segments(self) -> int:
        return self.values.shape[0]

    @property
    def segment_length(self) -> int:
        return self.values.shape[1]

    @property
    def subjects(self) -> set[str]:
        return set(self.subject_ids.tolist())

    @property
    def labeled(self) -> bool:
        return self.labels is not None

    def segments(self) -> list[Segment]:
        if self.labels is None:
            raise ValueError("dataset has no labels")
        return [
            Segment(str(self.subject_ids[i]), self.values[i], bool(self.labels[i]),
                    int(self.window_starts[i]))
            for i in range(self.n_segments)
        ]

    def subset(self, mask: np.ndarray) -> Dataset:
        mask = np.asarray(mask, dtype=bool)
        return Dataset(
            values=self.values[mask],
            labels=None if self.labels is None else self.labels[mask],
            subject_ids=self.subject_ids[mask],
            window_starts=self.window_starts[mask],
        )

    def strip_labels(self) -> Dataset:
        return replace(self, labels=None)


def segment_recording(rec: RawRecording, window_minutes: int,
                      stride_minutes: int) -> list[Segment]:
    """Cut a recording into overlapping windows and label them by events.

    A window starting at minute ``s`` spans the half-open interval
    [s, s + window) and is labeled True iff at least one event time falls
    inside it. Returns floor((L - W) / S) + 1 segments ordered by start.
    """
    if stride_minutes <= 0:
        raise ValueError(f"stride_minutes must be positive, got {stride_minutes}")
    if window_minutes <= 0:
        raise ValueError(f"window_minutes must be positive, got {window_minutes}")
    t_samples = rec.sample_rate * window_minutes
    stride_samples = rec.sample_rate * stride_minutes
    if t_samples > rec.samples.size:
        raise ValueError(
            f"recording too short: {rec.samples.size} samples < one "
            f"{window_minutes}-minute window ({t_samples} samples)"
        )
    n_windows = (rec.samples.size - t_samples) // stride_samples + 1
    segments = []
    for j in range(n_windows):
        start_min = j * stride_minutes
        lo = j * stride_samples
        label = bool(
            np.any((rec.event_times >= start_min)
                   & (rec.event_times < start_min + window_minutes))
        )
        segments.append(
            Segment(rec.subject_id, rec.samples[lo:lo + t_samples].copy(), label, start_min)
        )
    return segments


def standardize_per_subject(ds: Dataset) -> Dataset:
    """Zero-mean, unit-std each subject's pooled sample values.

    The mean and standard deviation (population convention, divisor n) are
    pooled over every value of every segment belonging to the subject. A
    subject with ~zero pooled std gets all values set to 0 and a
    DegenerateSubjectWarning.
    """
    values = ds.values.copy()
    for subject in sorted(ds.subjects):
        mask = ds.subject_ids == subject
        pool = values[mask]
        std = pool.std()
        if std < 1e-12:
            values[mask] = 0.0
            warnings.warn(
                f"subject {subject!r} has ~zero pooled std; values set to 0",
                DegenerateSubjectWarning,
                stacklevel=2,
            )
        else:
            values[mask] = (pool - pool.mean()) / std
    return replace(ds, values=values)


def split_loso(ds: Dataset, test_subject: str) -> tuple[Dataset, Dataset]:
    """Split into (train, test) where test holds exactly one subject."""
    if test_subject not in ds.subjects:
        raise ValueError(f"unknown subject id: {test_subject!r}")
    mask = ds.subject_ids == test_subject
    return ds.subset(~mask), ds.subset(mask)


def partition_labels(train: Dataset, labeled_subjects: set[str],
                     pool: str = "full") -> tuple[Dataset, Dataset]:
    """Partition a training set for two-phase training.

    Returns (labeled, unlabeled): the labeled part holds the segments of
    ``labeled_subjects`` with labels retained; the unlabeled part has its
    labels stripped. With ``pool="full"`` (default) the unlabeled part is
    the whole training set; ``pool="complement"`` restricts it to the
    segments of subjects outside ``labeled_subjects``.
    """
    labeled_subjects = set(labeled_subjects)
    if not labeled_subjects:
        raise ValueError("classifier requires >=1 labeled subject")
    unknown = labeled_subjects - train.subjects
    if unknown:
        raise ValueError(f"labeled subjects not in training set: {sorted(unknown)}")
    if pool not in ("full", "complement"):
        raise ValueError(f"pool must be 'full' or 'complement', got {pool!r}")
    mask = np.isin(train.subject_ids, sorted(labeled_subjects))
    d_labeled = train.subset(mask)
    d_unlabeled = train if pool == "full" else train.subset(~mask)
    return d_labeled, d_unlabeled.strip_labels()


def _header(t: int) -> list[str]:
    return ["subject_id", "label", "window_start"] + [f"v{i}" for i in range(t)]


def write_dataset(ds: Dataset, path: str | Path) -> None:
    """Write a labeled dataset as CSV (UTF-8, LF line endings).

    Values are written with shortest round-tripping decimal representation,
    so read(write(ds)) reproduces every float bit-exactly.
    """
    if ds.labels is None:
        raise ValueError("cannot write a dataset without labels")
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_header(ds.segment_length))
        for i in range(ds.n_segments):
            writer.writerow(
                [str(ds.subject_ids[i]), int(ds.labels[i]), int(ds.window_starts[i])]
                + [repr(float(v)) for v in ds.values[i]]
            )


def read_dataset(path: str | Path) -> Dataset:
    """Read a dataset CSV written by :func:`write_dataset`."""
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetParseError(f"{path}: no segments (empty file)") from None
        if header[:3] != ["subject_id", "label", "window_start"]:
            raise DatasetParseError(
                f"{path}: line 1: bad header, expected subject_id,label,window_start,v0,..."
            )
        t = len(header) - 3
        if t < 1 or header[3:] != [f"v{i}" for i in range(t)]:
            raise DatasetParseError(f"{path}: line 1: bad value columns in header")
        sids, labels, starts, rows = [], [], [], []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != t + 3:
                raise DatasetParseError(
                    f"{path}: line {lineno}: expected {t + 3} cells, got {len(row)}"
                )
            if row[1] not in ("0", "1"):
                raise DatasetParseError(
                    f"{path}: line {lineno}: label must be 0 or 1, got {row[1]!r}"
                )
            try:
                start = int(row[2])
                values = [float(cell) for cell in row[3:]]
            except ValueError as exc:
                raise DatasetParseError(f"{path}: line {lineno}: {exc}") from None
            sids.append(row[0])
            labels.append(row[1] == "1")
            starts.append(start)
            rows.append(values)
    if not rows:
        raise DatasetParseError(f"{path}: no segments")
    return Dataset(
        values=np.array(rows, dtype=np.float64),
        labels=np.array(labels, dtype=bool),
        subject_ids=np.array(sids),
        window_starts=np.array(starts, dtype=np.int64),
    )
