"""Evaluation metrics and rank-aggregation statistics.

AUCPR is computed as average precision over the descending-score sweep, with
tied score groups processed atomically. Rank tables use average-tie ranking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata


class MetricError(ValueError):
    pass


def aucpr(scores, labels) -> float:
    """Average precision of a binary ranking.

    Precision is evaluated at the end of each tied-score group and weighted
    by that group's recall increment.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise MetricError("aucpr needs both classes present")

    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order]
    tp = fp = 0
    ap = 0.0
    i = 0
    n = s.size
    while i < n:
        j = i
        while j < n and s[j] == s[i]:
            j += 1
        dtp = int((y[i:j] == 1).sum())
        tp += dtp
        fp += (j - i) - dtp
        if dtp:
            ap += (tp / (tp + fp)) * (dtp / n_pos)
        i = j
    return min(ap, 1.0)


def accuracy(predicted, true) -> float:
    predicted = np.asarray(predicted)
    true = np.asarray(true)
    if predicted.shape != true.shape:
        raise MetricError("prediction/label length mismatch")
    return float((predicted == true).mean())


@dataclass
class RankTable:
    methods: list
    ranks: np.ndarray  # (n_datasets, n_methods), average-tie ranks
    average_rank: np.ndarray  # per method
    top_n_counts: np.ndarray  # (n_methods, n_methods): [m, n-1] = #datasets with rank <= n


def rank_methods(per_dataset_scores, methods, higher_is_better: bool = True) -> RankTable:
    """Rank methods on each dataset (1 = best) and aggregate."""
    S = np.asarray(per_dataset_scores, dtype=float)
    if S.ndim != 2 or S.shape[1] != len(methods):
        raise MetricError("score matrix must be (n_datasets, n_methods)")
    signed = -S if higher_is_better else S
    ranks = np.vstack([rankdata(row, method="average") for row in signed])
    m = len(methods)
    top_n = np.empty((m, m), dtype=int)
    for n in range(1, m + 1):
        top_n[:, n - 1] = (ranks <= n).sum(axis=0)
    return RankTable(
        methods=list(methods),
        ranks=ranks,
        average_rank=ranks.mean(axis=0),
        top_n_counts=top_n,
    )
