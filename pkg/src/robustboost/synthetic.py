"""Bundled synthetic datasets, generated at runtime so the benchmark and the
acceptance suite need no external files.
"""

from __future__ import annotations

import numpy as np

from .data import TabularDataset, from_arrays


def separable(n: int = 200, seed: int = 0) -> TabularDataset:
    """Two well-separated 2-D Gaussian blobs, balanced classes."""
    rng = np.random.default_rng(seed)
    n0 = n // 2
    n1 = n - n0
    X0 = rng.normal(loc=(-2.0, -2.0), scale=0.5, size=(n0, 2))
    X1 = rng.normal(loc=(2.0, 2.0), scale=0.5, size=(n1, 2))
    X = np.vstack([X0, X1])
    y = np.concatenate([np.zeros(n0, dtype=np.int64), np.ones(n1, dtype=np.int64)])
    perm = rng.permutation(n)
    return from_arrays(X[perm], y[perm], class_names=["0", "1"])


def imbalanced(n: int = 2000, ratio: float = 20.0, seed: int = 0) -> TabularDataset:
    """Overlapping binary task with a majority:minority ratio of ``ratio``.

    The minority blob sits close enough to the majority that a noisy-label
    fit visibly hurts the minority's ranking.
    """
    rng = np.random.default_rng(seed)
    n_min = max(2, int(round(n / (ratio + 1.0))))
    n_maj = n - n_min
    X_maj = rng.normal(loc=(0.0, 0.0, 0.0, 0.0), scale=1.0, size=(n_maj, 4))
    X_min = rng.normal(loc=(2.5, 2.5, 0.0, 0.0), scale=1.0, size=(n_min, 4))
    X = np.vstack([X_maj, X_min])
    y = np.concatenate([np.zeros(n_maj, dtype=np.int64), np.ones(n_min, dtype=np.int64)])
    perm = rng.permutation(n)
    return from_arrays(X[perm], y[perm], class_names=["0", "1"])


def blobs3(n: int = 300, seed: int = 0) -> TabularDataset:
    """Three 2-D Gaussian blobs on a triangle, roughly balanced."""
    rng = np.random.default_rng(seed)
    centers = [(0.0, 2.5), (-2.2, -1.2), (2.2, -1.2)]
    per = [n // 3, n // 3, n - 2 * (n // 3)]
    parts, labels = [], []
    for k, (c, nk) in enumerate(zip(centers, per)):
        parts.append(rng.normal(loc=c, scale=1.0, size=(nk, 2)))
        labels.append(np.full(nk, k, dtype=np.int64))
    X = np.vstack(parts)
    y = np.concatenate(labels)
    perm = rng.permutation(n)
    return from_arrays(X[perm], y[perm], class_names=["0", "1", "2"])


GENERATORS = {
    "separable": separable,
    "imbalanced": imbalanced,
    "blobs3": blobs3,
}


def make(name: str, seed: int = 0) -> TabularDataset:
    if name not in GENERATORS:
        raise ValueError(f"unknown synthetic dataset {name!r}; choose from {sorted(GENERATORS)}")
    return GENERATORS[name](seed=seed)
