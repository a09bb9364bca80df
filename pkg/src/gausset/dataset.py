"""Labeled datasets and their reduction to sufficient statistics.

The model never sees raw patterns after ingestion: a dataset is reduced
once to per-class counts, per-class feature sums and one pooled raw
second-moment matrix. Those sums are additive, so statistics from
shards of a dataset can be merged in any order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyDimension, NonFiniteValue, ParseError, ShapeMismatch
from .linalg import symmetrize


@dataclass(frozen=True)
class LabeledDataset:
    """Patterns with class labels.

    ``patterns`` is a (T, N) float array, ``labels`` a (T,) int array of
    0-based class indices into ``class_names``. Declared classes with no
    occurrences are allowed (that is how openset classes enter a fit).
    """

    patterns: np.ndarray
    labels: np.ndarray
    class_names: tuple

    def __post_init__(self):
        patterns = np.atleast_2d(np.asarray(self.patterns, dtype=np.float64))
        labels = np.asarray(self.labels, dtype=np.int64)
        names = tuple(str(n) for n in self.class_names)
        if len(names) < 1:
            raise ValueError("at least one class must be declared")
        if len(set(names)) != len(names):
            raise ValueError("class names must be unique")
        if patterns.size == 0:
            patterns = patterns.reshape(0, patterns.shape[1] if patterns.ndim == 2 else 0)
        if patterns.shape[0] != labels.shape[0]:
            raise ShapeMismatch(
                f"{patterns.shape[0]} patterns but {labels.shape[0]} labels"
            )
        # Unknown labels are a hard error, never silently dropped.
        if labels.size and (labels.min() < 0 or labels.max() >= len(names)):
            raise ValueError("label index out of range for the declared classes")
        if not np.all(np.isfinite(patterns)):
            raise NonFiniteValue("dataset contains non-finite pattern values")
        object.__setattr__(self, "patterns", patterns)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "class_names", names)
        patterns.flags.writeable = False
        labels.flags.writeable = False

    @property
    def dim(self) -> int:
        return self.patterns.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def n_patterns(self) -> int:
        return self.patterns.shape[0]


@dataclass(frozen=True)
class SufficientStats:
    """Per-class counts, per-class sums, and the pooled second moment.

    ``counts[k]`` is the number of patterns of class k, column k of
    ``f`` is the sum of those patterns, and ``scatter`` is the sum of
    x x^T over every pattern regardless of class.
    """

    counts: np.ndarray   # (K,) int64
    f: np.ndarray        # (N, K)
    scatter: np.ndarray  # (N, N), symmetric

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        f = np.asarray(self.f, dtype=np.float64)
        scatter = np.asarray(self.scatter, dtype=np.float64)
        if counts.ndim != 1 or f.ndim != 2 or f.shape[1] != counts.shape[0]:
            raise ShapeMismatch("counts and per-class sums disagree in class count")
        if scatter.shape != (f.shape[0], f.shape[0]):
            raise ShapeMismatch("scatter shape does not match the feature dimension")
        if np.any(counts < 0):
            raise ValueError("negative class count")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "scatter", scatter)
        counts.flags.writeable = False
        f.flags.writeable = False
        scatter.flags.writeable = False

    @property
    def dim(self) -> int:
        return self.f.shape[0]

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def zeros(cls, dim: int, n_classes: int) -> "SufficientStats":
        return cls(np.zeros(n_classes, dtype=np.int64),
                   np.zeros((dim, n_classes)),
                   np.zeros((dim, dim)))


def accumulate(ds: LabeledDataset) -> SufficientStats:
    """Reduce a dataset to its sufficient statistics in one pass.

    Sums run in input row order, so the result is deterministic for a
    given dataset. Raises :class:`EmptyDimension` for zero feature
    columns.
    """
    if ds.dim == 0:
        raise EmptyDimension("dataset has no feature columns")
    counts = np.bincount(ds.labels, minlength=ds.n_classes).astype(np.int64)
    f = np.zeros((ds.n_classes, ds.dim))
    np.add.at(f, ds.labels, ds.patterns)
    scatter = symmetrize(ds.patterns.T @ ds.patterns)
    return SufficientStats(counts, f.T, scatter)


def merge(a: SufficientStats, b: SufficientStats) -> SufficientStats:
    """Elementwise sum of two statistics over the same classes."""
    if a.dim != b.dim or a.n_classes != b.n_classes:
        raise ShapeMismatch(
            f"cannot merge stats of shape (N={a.dim}, K={a.n_classes}) "
            f"with (N={b.dim}, K={b.n_classes})"
        )
    return SufficientStats(a.counts + b.counts, a.f + b.f,
                           symmetrize(a.scatter + b.scatter))


def _parse_cell(text, line, column):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"cannot parse {text!r} as a number", line, column) from None
    if not math.isfinite(value):
        raise NonFiniteValue(f"non-finite value {text!r}", line, column)
    return value


def load_csv(path, label_column: str = "label", extra_classes=()) -> LabeledDataset:
    """Load a labeled dataset from a headed CSV file.

    The column named ``label_column`` holds class labels; every other
    column is a feature, in header order. Classes are indexed in order
    of first appearance, with any ``extra_classes`` not present in the
    file appended after (their counts are zero).
    """
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("file is empty, expected a header row", line=1) from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise ParseError(f"no column named {label_column!r} in header", line=1)
        label_idx = header.index(label_column)
        feature_names = [h for i, h in enumerate(header) if i != label_idx]

        class_names: list = []
        class_index: dict = {}
        rows = []
        labels = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"row has {len(row)} cells, header has {len(header)}", line_no
                )
            label = row[label_idx].strip()
            if label not in class_index:
                class_index[label] = len(class_names)
                class_names.append(label)
            labels.append(class_index[label])
            rows.append([
                _parse_cell(cell, line_no, header[i])
                for i, cell in enumerate(row) if i != label_idx
            ])

    for name in extra_classes:
        name = str(name)
        if name not in class_index:
            class_index[name] = len(class_names)
            class_names.append(name)
    if not class_names:
        class_names = [str(n) for n in extra_classes] or ["unlabeled"]
    patterns = np.asarray(rows, dtype=np.float64)
    if patterns.size == 0:
        patterns = np.zeros((0, len(feature_names)))
    return LabeledDataset(patterns, np.asarray(labels, dtype=np.int64),
                          tuple(class_names))


def load_features(path):
    """Load an unlabeled feature CSV. Returns (feature_names, patterns)."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError("file is empty, expected a header row", line=1) from None
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"row has {len(row)} cells, header has {len(header)}", line_no
                )
            rows.append([_parse_cell(cell, line_no, header[i])
                         for i, cell in enumerate(row)])
    patterns = np.asarray(rows, dtype=np.float64)
    if patterns.size == 0:
        patterns = np.zeros((0, len(header)))
    return header, patterns
