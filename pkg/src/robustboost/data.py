"""Columnar tabular data with missing-value masks, CSV loading, and
deterministic train/test splitting.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

DEFAULT_MISSING_TOKENS = ("", "NA", "NaN", "?")


class CsvParseError(ValueError):
    pass


class SplitError(ValueError):
    pass


@dataclass
class TabularDataset:
    columns: list  # per-feature float arrays; missing cells hold 0.0
    missing: list  # per-feature bool masks
    labels: np.ndarray  # int class ids in [0, n_classes)
    feature_names: list
    class_names: list  # original label tokens, first-appearance order

    @property
    def n_samples(self) -> int:
        return len(self.labels)

    @property
    def n_features(self) -> int:
        return len(self.columns)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def subset(self, rows) -> "TabularDataset":
        rows = np.asarray(rows)
        return TabularDataset(
            columns=[c[rows] for c in self.columns],
            missing=[m[rows] for m in self.missing],
            labels=self.labels[rows],
            feature_names=list(self.feature_names),
            class_names=list(self.class_names),
        )

    def with_labels(self, labels) -> "TabularDataset":
        labels = np.asarray(labels)
        if labels.shape != self.labels.shape:
            raise ValueError("label array shape mismatch")
        return TabularDataset(
            columns=self.columns,
            missing=self.missing,
            labels=labels,
            feature_names=list(self.feature_names),
            class_names=list(self.class_names),
        )


def from_arrays(X, y, missing=None, feature_names=None, class_names=None) -> TabularDataset:
    """Build a dataset from a dense (n, m) feature matrix and labels."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    cols = [np.ascontiguousarray(X[:, j]) for j in range(X.shape[1])]
    if missing is None:
        masks = [np.isnan(c) for c in cols]
        cols = [np.where(m, 0.0, c) for c, m in zip(cols, masks)]
    else:
        missing = np.asarray(missing, dtype=bool)
        masks = [np.ascontiguousarray(missing[:, j]) for j in range(X.shape[1])]
    if class_names is None:
        class_names = [str(c) for c in sorted(set(y.tolist()))]
        mapping = {c: i for i, c in enumerate(sorted(set(y.tolist())))}
        labels = np.array([mapping[v] for v in y.tolist()], dtype=np.int64)
    else:
        labels = y.astype(np.int64)
    if feature_names is None:
        feature_names = [f"f{j}" for j in range(X.shape[1])]
    return TabularDataset(cols, masks, labels, list(feature_names), list(class_names))


def load_csv(path, label_column, missing_tokens=DEFAULT_MISSING_TOKENS,
             delimiter=",") -> TabularDataset:
    """Load a headered CSV. Feature cells must be numeric or a missing token;
    labels are encoded by first appearance. No imputation is performed.
    """
    missing_tokens = set(missing_tokens)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvParseError(f"{path}: empty file")
        if label_column not in header:
            raise CsvParseError(f"{path}: label column {label_column!r} not in header")
        label_idx = header.index(label_column)
        feature_names = [h for i, h in enumerate(header) if i != label_idx]

        values, masks, raw_labels = [], [], []
        for row_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise CsvParseError(f"{path}: row {row_no} has {len(row)} cells, expected {len(header)}")
            raw_labels.append(row[label_idx])
            vrow, mrow = [], []
            for i, cell in enumerate(row):
                if i == label_idx:
                    continue
                if cell in missing_tokens:
                    vrow.append(0.0)
                    mrow.append(True)
                else:
                    try:
                        vrow.append(float(cell))
                    except ValueError:
                        raise CsvParseError(
                            f"{path}: row {row_no}, column {header[i]!r}: "
                            f"cannot parse {cell!r} as a number"
                        )
                    mrow.append(False)
            values.append(vrow)
            masks.append(mrow)

    class_names = []
    seen = {}
    labels = np.empty(len(raw_labels), dtype=np.int64)
    for i, tok in enumerate(raw_labels):
        if tok not in seen:
            seen[tok] = len(class_names)
            class_names.append(tok)
        labels[i] = seen[tok]

    V = np.array(values, dtype=float).reshape(len(values), len(feature_names))
    M = np.array(masks, dtype=bool).reshape(len(values), len(feature_names))
    return TabularDataset(
        columns=[np.ascontiguousarray(V[:, j]) for j in range(V.shape[1])],
        missing=[np.ascontiguousarray(M[:, j]) for j in range(M.shape[1])],
        labels=labels,
        feature_names=feature_names,
        class_names=class_names,
    )


def dump_csv(dataset: TabularDataset, path, label_column="label",
             missing_token="NA", delimiter=","):
    """Write back to CSV; missing cells become the canonical missing token.

    Present values use repr-shortest float formatting, so load -> dump ->
    load round-trips bit-exactly.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        writer.writerow(list(dataset.feature_names) + [label_column])
        for i in range(dataset.n_samples):
            row = []
            for c, m in zip(dataset.columns, dataset.missing):
                row.append(missing_token if m[i] else repr(float(c[i])))
            row.append(dataset.class_names[dataset.labels[i]])
            writer.writerow(row)


@dataclass
class SplitPlan:
    train_indices: np.ndarray
    test_indices: np.ndarray
    fraction: float
    seed: int
    stratified: bool


def train_test_split(dataset: TabularDataset, fraction: float, seed: int,
                     stratified: bool = True) -> SplitPlan:
    """Deterministic holdout split; stratified mode keeps class proportions
    within one sample per class.
    """
    if not 0.0 < fraction < 1.0:
        raise SplitError(f"fraction must be in (0, 1), got {fraction}")
    rng = np.random.default_rng(seed)
    n = dataset.n_samples
    if stratified:
        train_parts, test_parts = [], []
        for k in range(dataset.n_classes):
            idx = np.nonzero(dataset.labels == k)[0]
            if idx.size < 2:
                raise SplitError(f"class {dataset.class_names[k]!r} has fewer than 2 samples")
            perm = rng.permutation(idx)
            n_train = int(round(fraction * idx.size))
            n_train = min(max(n_train, 1), idx.size - 1)
            train_parts.append(perm[:n_train])
            test_parts.append(perm[n_train:])
        train = np.sort(np.concatenate(train_parts))
        test = np.sort(np.concatenate(test_parts))
    else:
        perm = rng.permutation(n)
        n_train = int(round(fraction * n))
        train = np.sort(perm[:n_train])
        test = np.sort(perm[n_train:])
    return SplitPlan(train, test, fraction, seed, stratified)


def imbalance_ratio(dataset: TabularDataset) -> float:
    """Majority-class count divided by minority-class count."""
    counts = np.bincount(dataset.labels, minlength=dataset.n_classes)
    counts = counts[counts > 0]
    if counts.size < 2:
        raise ValueError("imbalance ratio needs at least 2 classes present")
    return float(counts.max()) / float(counts.min())
