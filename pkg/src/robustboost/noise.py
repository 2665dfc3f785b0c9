"""Label-corruption protocols for the benchmark harness.

Binary tasks use a symmetric minority-budget flip: floor(rate * n_minority)
minority labels become majority, and the same count of majority labels become
minority, so class sizes are preserved. Multi-class tasks flip each label to
its successor with probability rate (pair-flipping).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

PROTOCOLS = ("binary_pairflip", "multiclass_pairflip")


@dataclass(frozen=True)
class NoiseSpec:
    rate: float
    protocol: str = "binary_pairflip"
    seed: int = 0
    wrap_last_class: bool = True

    def __post_init__(self):
        if not 0.0 <= self.rate < 0.5:
            raise ValueError(f"noise rate must be in [0, 0.5), got {self.rate}")
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")


@dataclass(frozen=True)
class Flip:
    index: int
    old_label: int
    new_label: int


def inject_binary(labels, spec: NoiseSpec):
    """Flip floor(rate * n_min) labels each way between minority and majority.

    Returns (new_labels, flip_log); replaying the log on the originals
    reproduces new_labels, and replaying twice restores them.
    """
    labels = np.asarray(labels)
    classes = np.unique(labels)
    if classes.size != 2:
        raise ValueError(f"binary protocol needs exactly 2 classes, got {classes.size}")
    counts = np.array([(labels == c).sum() for c in classes])
    minority, majority = classes[np.argmin(counts)], classes[np.argmax(counts)]
    if counts[0] == counts[1]:
        minority, majority = classes[0], classes[1]
    n_flip = int(np.floor(spec.rate * (labels == minority).sum()))

    rng = np.random.default_rng(spec.seed)
    new_labels = labels.copy()
    log = []
    for src, dst in ((minority, majority), (majority, minority)):
        pool = np.nonzero(labels == src)[0]
        if n_flip > pool.size:
            raise ValueError(f"cannot flip {n_flip} samples out of {pool.size}")
        chosen = rng.choice(pool, size=n_flip, replace=False)
        for i in np.sort(chosen):
            new_labels[i] = dst
            log.append(Flip(int(i), int(src), int(dst)))
    return new_labels, log


def inject_multiclass(labels, n_classes: int, spec: NoiseSpec):
    """Each label i independently becomes i+1 with probability rate.

    With wrap_last_class the successor of the last class is class 0;
    otherwise the last class never flips.
    """
    if n_classes < 3:
        raise ValueError("multiclass protocol needs >= 3 classes; use the binary protocol")
    labels = np.asarray(labels)
    rng = np.random.default_rng(spec.seed)
    draw = rng.random(labels.size) < spec.rate
    new_labels = labels.copy()
    log = []
    for i in np.nonzero(draw)[0]:
        old = int(labels[i])
        if old == n_classes - 1 and not spec.wrap_last_class:
            continue
        new = (old + 1) % n_classes
        new_labels[i] = new
        log.append(Flip(int(i), old, new))
    return new_labels, log


def apply_flip_log(labels, log):
    """Replay a flip log; each entry swaps the sample to its new label
    (or back, if the label currently holds the new value).
    """
    out = np.asarray(labels).copy()
    for flip in log:
        if out[flip.index] == flip.old_label:
            out[flip.index] = flip.new_label
        elif out[flip.index] == flip.new_label:
            out[flip.index] = flip.old_label
    return out


def expected_flip_matrix(n_classes: int, rate: float, wrap: bool = True):
    """Materialize the pair-flipping transition matrix and its row sums."""
    P = np.zeros((n_classes, n_classes))
    for i in range(n_classes):
        P[i, i] = 1.0 - rate
        j = (i + 1) % n_classes
        if i == n_classes - 1 and not wrap:
            P[i, i] = 1.0 - rate  # successor undefined: row mass 1 - rate
        else:
            P[i, j] = rate
    return P, P.sum(axis=1)


def write_flip_log(log, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_index", "old_label", "new_label"])
        for flip in log:
            writer.writerow([flip.index, flip.old_label, flip.new_label])


def read_flip_log(path):
    log = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            log.append(Flip(int(row["sample_index"]), int(row["old_label"]),
                            int(row["new_label"])))
    return log
