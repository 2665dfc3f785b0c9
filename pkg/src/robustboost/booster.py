"""Newton boosting loop: accumulate learning-rate-scaled trees on raw scores,
one tree per round (per class in one-vs-all mode), probabilities via sigmoid.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .data import TabularDataset
from .losses import LossSpec, grad_hess, loss_value, make_phat, sigmoid
from .tree import Tree, TreeConfig, grow_tree

MODEL_FORMAT_VERSION = 1


class BoosterConfigError(ValueError):
    pass


class DataError(ValueError):
    pass


class SchemaMismatchError(ValueError):
    pass


class ModelFormatError(ValueError):
    pass


@dataclass(frozen=True)
class BoosterConfig:
    loss: LossSpec = field(default_factory=LossSpec)
    tree: TreeConfig = field(default_factory=TreeConfig)
    learning_rate: float = 0.1
    n_rounds: int = 100
    n_classes: int = 2
    seed: int = 0
    early_stopping_rounds: Optional[int] = None
    subsample: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.learning_rate <= 1.0:
            raise BoosterConfigError(f"learning_rate must be in (0, 1], got {self.learning_rate}")
        if self.n_rounds < 1:
            raise BoosterConfigError("n_rounds must be >= 1")
        if self.n_classes < 2:
            raise BoosterConfigError("n_classes must be >= 2")
        if not 0.0 < self.subsample <= 1.0:
            raise BoosterConfigError(f"subsample must be in (0, 1], got {self.subsample}")
        if self.early_stopping_rounds is not None and self.early_stopping_rounds < 1:
            raise BoosterConfigError("early_stopping_rounds must be >= 1")


@dataclass
class BoosterModel:
    trees: list  # one tree list for binary, n_classes lists otherwise
    init_score: float
    config: BoosterConfig
    n_features: int
    train_loss_history: list = field(default_factory=list)
    valid_loss_history: list = field(default_factory=list)
    best_round: Optional[int] = None

    @property
    def is_binary(self) -> bool:
        return len(self.trees) == 1


def _mean_loss(spec: LossSpec, y01, z) -> float:
    phat = np.clip(make_phat(y01, sigmoid(z)), 1e-15, 1.0 - 1e-15)
    return float(np.mean(loss_value(spec, phat)))


def _sample_rows(rng, n, subsample):
    if subsample >= 1.0:
        return np.arange(n)
    k = max(1, int(round(subsample * n)))
    return np.sort(rng.choice(n, size=k, replace=False))


def fit(data: TabularDataset, config: BoosterConfig,
        valid: Optional[TabularDataset] = None) -> BoosterModel:
    """Train a boosted ensemble. Multi-class rounds build all one-vs-all
    trees from the scores frozen at the round's start.
    """
    y = np.asarray(data.labels)
    if data.n_samples == 0:
        raise DataError("empty dataset")
    # single-sample fits are allowed (degenerate but well-defined Newton step)
    if data.n_samples > 1 and np.unique(y).size < 2:
        raise DataError("need samples from at least 2 classes")
    if y.min() < 0 or y.max() >= config.n_classes:
        raise DataError(f"labels must lie in [0, {config.n_classes})")

    rng = np.random.default_rng(config.seed)
    n = data.n_samples
    binary = config.n_classes == 2
    n_lists = 1 if binary else config.n_classes
    model = BoosterModel(trees=[[] for _ in range(n_lists)], init_score=0.0,
                         config=config, n_features=data.n_features)

    if binary:
        z = np.zeros(n)
        z_valid = np.zeros(valid.n_samples) if valid is not None else None
    else:
        z = np.zeros((n, config.n_classes))
        z_valid = np.zeros((valid.n_samples, config.n_classes)) if valid is not None else None

    best_score = np.inf
    best_round = None
    for t in range(config.n_rounds):
        rows = _sample_rows(rng, n, config.subsample)
        if binary:
            g, h = grad_hess(config.loss, y, z)
            _assert_finite(g, h)
            tree = grow_tree(data.columns, data.missing, rows, g, h, config.tree)
            model.trees[0].append(tree)
            z = z + config.learning_rate * tree.predict(data.columns, data.missing)
            if valid is not None:
                z_valid = z_valid + config.learning_rate * tree.predict(valid.columns, valid.missing)
            model.train_loss_history.append(_mean_loss(config.loss, y, z))
        else:
            new_trees = []
            for k in range(config.n_classes):
                yk = (y == k).astype(np.int64)
                g, h = grad_hess(config.loss, yk, z[:, k])
                _assert_finite(g, h)
                new_trees.append(grow_tree(data.columns, data.missing, rows, g, h, config.tree))
            for k, tree in enumerate(new_trees):
                model.trees[k].append(tree)
                z[:, k] = z[:, k] + config.learning_rate * tree.predict(data.columns, data.missing)
                if valid is not None:
                    z_valid[:, k] = z_valid[:, k] + config.learning_rate * tree.predict(
                        valid.columns, valid.missing)
            model.train_loss_history.append(float(np.mean([
                _mean_loss(config.loss, (y == k).astype(np.int64), z[:, k])
                for k in range(config.n_classes)])))

        if valid is not None:
            yv = np.asarray(valid.labels)
            if binary:
                v = _mean_loss(config.loss, yv, z_valid)
            else:
                v = float(np.mean([
                    _mean_loss(config.loss, (yv == k).astype(np.int64), z_valid[:, k])
                    for k in range(config.n_classes)]))
            model.valid_loss_history.append(v)
            if v < best_score:
                best_score = v
                best_round = t
            if (config.early_stopping_rounds is not None and best_round is not None
                    and t - best_round >= config.early_stopping_rounds):
                break

    if valid is not None and config.early_stopping_rounds is not None and best_round is not None:
        model.trees = [lst[: best_round + 1] for lst in model.trees]
        model.best_round = best_round
    return model


def _assert_finite(g, h):
    if not (np.all(np.isfinite(g)) and np.all(np.isfinite(h))):
        raise AssertionError("non-finite gradient/Hessian from the loss layer")


def _check_schema(model: BoosterModel, data: TabularDataset):
    if data.n_features != model.n_features:
        raise SchemaMismatchError(
            f"model expects {model.n_features} features, got {data.n_features}")


def predict_raw(model: BoosterModel, data: TabularDataset):
    """Accumulated raw scores: init + lr * sum of tree outputs.

    Binary models return shape (n,); multi-class returns (n, n_classes).
    """
    _check_schema(model, data)
    n = data.n_samples
    if model.is_binary:
        z = np.full(n, model.init_score)
        for tree in model.trees[0]:
            z = z + model.config.learning_rate * tree.predict(data.columns, data.missing)
        return z
    z = np.full((n, len(model.trees)), model.init_score)
    for k, lst in enumerate(model.trees):
        for tree in lst:
            z[:, k] = z[:, k] + model.config.learning_rate * tree.predict(data.columns, data.missing)
    return z


def predict_proba(model: BoosterModel, data: TabularDataset):
    """Class probabilities, shape (n, n_classes).

    Binary: sigmoid of the raw score. Multi-class: per-class sigmoids
    normalized to sum to 1 (argmax is unchanged by the normalization).
    """
    z = predict_raw(model, data)
    if model.is_binary:
        p1 = sigmoid(z)
        return np.column_stack([1.0 - p1, p1])
    s = sigmoid(z)
    return s / s.sum(axis=1, keepdims=True)


def predict_label(model: BoosterModel, data: TabularDataset):
    return np.argmax(predict_proba(model, data), axis=1)


def serialize(model: BoosterModel) -> str:
    """Versioned JSON document; round-trips raw predictions bitwise."""
    doc = {
        "format": "robustboost-model",
        "version": MODEL_FORMAT_VERSION,
        "n_classes": model.config.n_classes,
        "n_features": model.n_features,
        "learning_rate": model.config.learning_rate,
        "init_score": model.init_score,
        "loss": dataclasses.asdict(model.config.loss),
        "tree_config": dataclasses.asdict(model.config.tree),
        "booster": {
            "n_rounds": model.config.n_rounds,
            "seed": model.config.seed,
            "subsample": model.config.subsample,
            "early_stopping_rounds": model.config.early_stopping_rounds,
        },
        "trees": [[t.to_dict() for t in lst] for lst in model.trees],
    }
    return json.dumps(doc, indent=1)


def deserialize(text: str) -> BoosterModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"malformed model document: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != "robustboost-model":
        raise ModelFormatError("not a robustboost model document")
    if doc.get("version") != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model version {doc.get('version')!r}, "
            f"expected {MODEL_FORMAT_VERSION}")
    config = BoosterConfig(
        loss=LossSpec(**doc["loss"]),
        tree=TreeConfig(**doc["tree_config"]),
        learning_rate=doc["learning_rate"],
        n_classes=doc["n_classes"],
        n_rounds=max(1, doc["booster"]["n_rounds"]),
        seed=doc["booster"]["seed"],
        subsample=doc["booster"]["subsample"],
        early_stopping_rounds=doc["booster"]["early_stopping_rounds"],
    )
    trees = [[Tree.from_dict(td) for td in lst] for lst in doc["trees"]]
    return BoosterModel(trees=trees, init_score=doc["init_score"], config=config,
                        n_features=doc["n_features"])
