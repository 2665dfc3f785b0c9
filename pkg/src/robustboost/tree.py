"""Regression tree grown from per-sample gradients and Hessians.

Exact greedy split search over midpoint thresholds, Newton leaf weights
-G/(H+lambda), gain-based split acceptance, and learned default directions
for missing values. Growth is best-first up to a leaf cap with a depth
backstop.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

DENOM_EPS = 1e-12


class DegenerateDenominatorError(ZeroDivisionError):
    """|sum_h + lambda| too close to zero for a Newton step."""


@dataclass(frozen=True)
class TreeConfig:
    lam: float = 1.0
    min_samples_leaf: int = 1
    min_sum_hessian: float = 1e-3
    min_gain: float = 0.0
    max_depth: int = 6
    max_leaves: int = 31

    def __post_init__(self):
        if self.lam < 0 or self.min_sum_hessian < 0 or self.min_gain < 0:
            raise ValueError("lam, min_sum_hessian and min_gain must be >= 0")
        if self.min_samples_leaf < 1 or self.max_depth < 1 or self.max_leaves < 1:
            raise ValueError("min_samples_leaf, max_depth, max_leaves must be >= 1")


@dataclass
class SplitCandidate:
    feature: int
    threshold: float
    gain: float
    default_left: bool
    g_left: float
    h_left: float
    g_right: float
    h_right: float
    n_left: int
    n_right: int


@dataclass
class Node:
    # leaf iff feature is None
    feature: Optional[int] = None
    threshold: float = 0.0
    default_left: bool = False
    left: int = -1
    right: int = -1
    weight: float = 0.0


@dataclass
class Tree:
    nodes: list = field(default_factory=list)

    @property
    def n_leaves(self) -> int:
        return sum(1 for n in self.nodes if n.feature is None)

    def predict(self, columns, missing):
        """Evaluate the tree on columnar features with a missing mask."""
        n = len(columns[0])
        out = np.empty(n)
        idx = np.arange(n)
        stack = [(0, idx)]
        while stack:
            node_id, rows = stack.pop()
            node = self.nodes[node_id]
            if node.feature is None:
                out[rows] = node.weight
                continue
            vals = columns[node.feature][rows]
            miss = missing[node.feature][rows]
            go_left = np.where(miss, node.default_left, vals <= node.threshold)
            stack.append((node.left, rows[go_left]))
            stack.append((node.right, rows[~go_left]))
        return out

    def to_dict(self):
        return {
            "nodes": [
                {"leaf": n.weight}
                if n.feature is None
                else {
                    "feature": n.feature,
                    "threshold": n.threshold,
                    "default_left": n.default_left,
                    "left": n.left,
                    "right": n.right,
                }
                for n in self.nodes
            ]
        }

    @classmethod
    def from_dict(cls, d):
        nodes = []
        for nd in d["nodes"]:
            if "leaf" in nd:
                nodes.append(Node(weight=nd["leaf"]))
            else:
                nodes.append(
                    Node(
                        feature=nd["feature"],
                        threshold=nd["threshold"],
                        default_left=nd["default_left"],
                        left=nd["left"],
                        right=nd["right"],
                    )
                )
        return cls(nodes=nodes)


def leaf_weight(sum_g: float, sum_h: float, lam: float) -> float:
    """Newton-optimal leaf output -sum_g / (sum_h + lam)."""
    denom = sum_h + lam
    if abs(denom) < DENOM_EPS:
        raise DegenerateDenominatorError(f"sum_h + lam = {denom}")
    return -sum_g / denom


def leaf_objective(sum_g: float, sum_h: float, lam: float) -> float:
    """Optimal quadratic objective -0.5 * sum_g**2 / (sum_h + lam)."""
    denom = sum_h + lam
    if abs(denom) < DENOM_EPS:
        raise DegenerateDenominatorError(f"sum_h + lam = {denom}")
    return -0.5 * sum_g * sum_g / denom


def _scan_feature(vals, miss, g, h, config: TreeConfig):
    """Best split of one node on one feature; arrays are node-local.

    Returns (gain, threshold, default_left, aggregates...) or None.
    """
    n_miss = int(miss.sum()) if miss.any() else 0
    if n_miss:
        present = ~miss
        pv = vals[present]
        pg = g[present]
        ph = h[present]
        g_miss = float(g[miss].sum())
        h_miss = float(h[miss].sum())
    else:
        pv, pg, ph = vals, g, h
        g_miss = h_miss = 0.0
    if pv.size < 2:
        return None
    order = pv.argsort(kind="stable")
    pv = pv[order]
    # boundaries between consecutive distinct present values
    cut = np.nonzero(pv[:-1] < pv[1:])[0]
    if cut.size == 0:
        return None
    thresholds = 0.5 * (pv[cut] + pv[cut + 1])

    cg = pg[order].cumsum()
    ch = ph[order].cumsum()
    G, H = cg[-1], ch[-1]
    G_tot, H_tot = G + g_miss, H + h_miss
    n_tot = vals.size

    denom_p = H_tot + config.lam
    if abs(denom_p) < DENOM_EPS:
        return None
    parent_term = G_tot * G_tot / denom_p

    gl = cg[cut]
    hl = ch[cut]
    nl = cut + 1

    best = None
    for miss_left in (False, True) if n_miss else (False,):
        GL = gl + g_miss if miss_left else gl
        HL = hl + h_miss if miss_left else hl
        NL = nl + n_miss if miss_left else nl
        GR, HR, NR = G_tot - GL, H_tot - HL, n_tot - NL
        dl, dr = HL + config.lam, HR + config.lam
        with np.errstate(divide="ignore", invalid="ignore"):
            gain = 0.5 * (GL * GL / dl + GR * GR / dr - parent_term)
        bad = (
            (NL < config.min_samples_leaf)
            | (NR < config.min_samples_leaf)
            | (HL < config.min_sum_hessian)
            | (HR < config.min_sum_hessian)
            | (np.abs(dl) <= DENOM_EPS)
            | (np.abs(dr) <= DENOM_EPS)
            | ~np.isfinite(gain)
        )
        gain[bad] = -np.inf
        k = int(np.argmax(gain))  # first max -> lowest threshold among ties
        if gain[k] < config.min_gain or not np.isfinite(gain[k]):
            continue
        cand = (float(gain[k]), float(thresholds[k]), miss_left,
                float(GL[k]), float(HL[k]), float(GR[k]), float(HR[k]),
                int(NL[k]), int(NR[k]))
        # prefer higher gain; on exact tie keep missing-right (first iteration)
        if best is None or cand[0] > best[0]:
            best = cand
    return best


def best_split(columns, missing, rows, g, h, config: TreeConfig) -> Optional[SplitCandidate]:
    """Exact greedy search over all features for the node given by ``rows``.

    Ties in gain resolve to the lowest feature index, then lowest threshold.
    """
    g_node = g[rows]
    h_node = h[rows]
    best = None
    for f in range(len(columns)):
        res = _scan_feature(columns[f][rows], missing[f][rows], g_node, h_node, config)
        if res is None:
            continue
        if best is None or res[0] > best[1][0]:
            best = (f, res)
    if best is None:
        return None
    f, (gain, thr, dl, GL, HL, GR, HR, NL, NR) = best
    return SplitCandidate(
        feature=f, threshold=thr, gain=gain, default_left=dl,
        g_left=GL, h_left=HL, g_right=GR, h_right=HR, n_left=NL, n_right=NR,
    )


def _safe_weight(sum_g, sum_h, lam):
    try:
        return leaf_weight(sum_g, sum_h, lam)
    except DegenerateDenominatorError:
        return 0.0


def grow_tree(columns, missing, rows, g, h, config: TreeConfig) -> Tree:
    """Best-first growth: repeatedly expand the frontier leaf with the
    highest split gain until no leaf admits a split or the leaf cap binds.
    """
    rows = np.asarray(rows)
    tree = Tree(nodes=[Node()])
    sum_g = float(g[rows].sum())
    sum_h = float(h[rows].sum())
    tree.nodes[0].weight = _safe_weight(sum_g, sum_h, config.lam)
    if rows.size == 0 or sum_h < config.min_sum_hessian:
        return tree

    counter = 0  # heap tiebreak: earlier-pushed candidate wins
    heap = []

    def push(node_id, node_rows, depth):
        nonlocal counter
        if depth >= config.max_depth or node_rows.size < 2 * config.min_samples_leaf:
            return
        cand = best_split(columns, missing, node_rows, g, h, config)
        if cand is not None:
            heapq.heappush(heap, (-cand.gain, counter, node_id, node_rows, depth, cand))
            counter += 1

    push(0, rows, 0)
    n_leaves = 1
    while heap and n_leaves < config.max_leaves:
        _, _, node_id, node_rows, depth, cand = heapq.heappop(heap)
        node = tree.nodes[node_id]
        node.feature = cand.feature
        node.threshold = cand.threshold
        node.default_left = cand.default_left

        vals = columns[cand.feature][node_rows]
        miss = missing[cand.feature][node_rows]
        go_left = np.where(miss, cand.default_left, vals <= cand.threshold)
        left_rows, right_rows = node_rows[go_left], node_rows[~go_left]

        node.left = len(tree.nodes)
        tree.nodes.append(Node(weight=_safe_weight(cand.g_left, cand.h_left, config.lam)))
        node.right = len(tree.nodes)
        tree.nodes.append(Node(weight=_safe_weight(cand.g_right, cand.h_right, config.lam)))
        n_leaves += 1

        push(node.left, left_rows, depth + 1)
        push(node.right, right_rows, depth + 1)
    return tree


@dataclass(frozen=True)
class GainScenario:
    """Parameterized gain after part of a node's Hessian mass is negated:
    G_L = mu*G, H_L = nu*H, perturbed sum Hhat = theta*H, Hhat_L = tau*Hhat.
    """

    G: float
    H: float
    mu: float
    nu: float
    theta: float
    tau: float
    lam: float = 0.0


def decomposed_gain(s: GainScenario) -> float:
    """G^2 (mu^2/(tau*theta*H+lam) + (1-mu)^2/((1-tau)*theta*H+lam) - 1/(theta*H+lam))."""
    d1 = s.tau * s.theta * s.H + s.lam
    d2 = (1.0 - s.tau) * s.theta * s.H + s.lam
    d3 = s.theta * s.H + s.lam
    for d in (d1, d2, d3):
        if abs(d) < DENOM_EPS:
            raise DegenerateDenominatorError(f"denominator {d}")
    return s.G**2 * (s.mu**2 / d1 + (1.0 - s.mu) ** 2 / d2 - 1.0 / d3)
