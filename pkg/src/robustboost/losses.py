"""Loss families for Newton boosting, parameterized by the ground-truth-class
probability.

Every family exposes its value and first/second derivatives as functions of
phat, the probability the model assigns to a sample's true class. The chain
rule then maps these to gradients/Hessians in raw-score space, which is what
the tree builder consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FAMILIES = ("cce", "mae", "fl", "gce", "sce", "nce", "rfl")

# Raw scores beyond this magnitude saturate the sigmoid to the point where
# the Hessian underflows to 0 anyway.
Z_CLAMP = 30.0


class LossConfigError(ValueError):
    """Invalid loss family or parameter."""


class PhatDomainError(ValueError):
    """phat outside the open interval (0, 1)."""


@dataclass(frozen=True)
class LossSpec:
    """A loss family plus its hyperparameters.

    Parameters irrelevant to the chosen family are ignored but still
    range-checked. ``eta`` is the safeguard scalar: for mae/nce it shifts
    phat -> phat + eta when phat <= 0.5, for sce it clips phat inside the
    log term. ``eta = 0`` disables the safeguard (used to probe the raw
    losses). ``focal_wrap`` multiplies mae/sce/nce by (1 - phat)**r.
    """

    family: str = "rfl"
    r: float = 1.0
    q: float = 0.5
    eta: float = 1e-2
    sce_alpha: float = 1.0
    sce_beta: float = 1.0
    focal_wrap: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise LossConfigError(f"unknown loss family {self.family!r}")
        if self.r < 0:
            raise LossConfigError(f"r must be >= 0, got {self.r}")
        # q up to and including 1 is accepted; at q=1 gce/rfl(r=0) is exactly mae
        if not 0.0 < self.q <= 1.0:
            raise LossConfigError(f"q must be in (0, 1], got {self.q}")
        if not 0.0 <= self.eta < 0.5:
            raise LossConfigError(f"eta must be in [0, 0.5), got {self.eta}")
        if self.sce_alpha < 0 or self.sce_beta < 0:
            raise LossConfigError("sce_alpha and sce_beta must be >= 0")
        if self.family == "sce" and self.sce_alpha == 0 and self.sce_beta == 0:
            raise LossConfigError("sce needs at least one nonzero weight")


def _check_phat(phat):
    p = np.asarray(phat, dtype=float)
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise PhatDomainError("phat must lie strictly inside (0, 1)")
    return p


def make_phat(y, p):
    """Probability of the ground-truth class: p if y=1, else 1-p."""
    y = np.asarray(y)
    p = np.asarray(p, dtype=float)
    return np.where(y == 1, p, 1.0 - p)


def _safeguarded(spec: LossSpec, phat):
    """Apply the eta perturbation for mae/nce: phat -> phat + eta below 0.5."""
    if spec.family in ("mae", "nce") and spec.eta > 0.0:
        return np.where(phat <= 0.5, phat + spec.eta, phat)
    return phat


def _gce_value(u, q):
    # (1 - u**q) / q via expm1; stable down to q ~ 1e-12
    return -np.expm1(q * np.log(u)) / q


def _raw_value(spec: LossSpec, u):
    fam = spec.family
    if fam == "cce":
        return -np.log(u)
    if fam == "mae":
        return 1.0 - u
    if fam == "fl":
        return -((1.0 - u) ** spec.r) * np.log(u)
    if fam == "gce":
        return _gce_value(u, spec.q)
    if fam == "sce":
        clipped = np.maximum(u, spec.eta) if spec.eta > 0 else u
        return -spec.sce_alpha * np.log(clipped) + spec.sce_beta * (1.0 - u)
    if fam == "nce":
        lu = np.log(u)
        return lu / (lu + np.log1p(-u))
    # rfl
    return ((1.0 - u) ** spec.r) * _gce_value(u, spec.q)


def _raw_d1_d2(spec: LossSpec, u):
    fam = spec.family
    if fam == "cce":
        return -1.0 / u, 1.0 / u**2
    if fam == "mae":
        z = np.zeros_like(u)
        return z - 1.0, z
    if fam == "gce":
        q = spec.q
        return -(u ** (q - 1.0)), (1.0 - q) * u ** (q - 2.0)
    if fam == "sce":
        a, b = spec.sce_alpha, spec.sce_beta
        live = u > spec.eta  # below the clip the log term is constant
        d1 = np.where(live, -a / u, 0.0) - b
        d2 = np.where(live, a / u**2, 0.0)
        return d1, d2
    if fam == "nce":
        A, B = np.log(u), np.log1p(-u)
        D = A + B
        A1, D1 = 1.0 / u, 1.0 / u - 1.0 / (1.0 - u)
        A2, D2 = -1.0 / u**2, -1.0 / u**2 - 1.0 / (1.0 - u) ** 2
        d1 = (A1 * D - A * D1) / D**2
        d2 = (A2 * D - A * D2) / D**2 - 2.0 * D1 * (A1 * D - A * D1) / D**3
        return d1, d2
    # fl and rfl share the focal factor algebra: l = F(u) * G(u)
    r = spec.r
    F = (1.0 - u) ** r
    F1 = -r * (1.0 - u) ** (r - 1.0) if r > 0 else np.zeros_like(u)
    F2 = r * (r - 1.0) * (1.0 - u) ** (r - 2.0) if r > 0 else np.zeros_like(u)
    if fam == "fl":
        G = -np.log(u)
        G1 = -1.0 / u
        G2 = 1.0 / u**2
    else:  # rfl
        q = spec.q
        G = _gce_value(u, q)
        G1 = -(u ** (q - 1.0))
        G2 = (1.0 - q) * u ** (q - 2.0)
    return F1 * G + F * G1, F2 * G + 2.0 * F1 * G1 + F * G2


def _focal_wrapped(spec: LossSpec, u, want_derivs):
    """Optional (1-u)**r imbalance factor around mae/sce/nce."""
    base = _raw_value(spec, u)
    r = spec.r
    F = (1.0 - u) ** r
    if not want_derivs:
        return F * base
    d1, d2 = _raw_d1_d2(spec, u)
    F1 = -r * (1.0 - u) ** (r - 1.0) if r > 0 else np.zeros_like(u)
    F2 = r * (r - 1.0) * (1.0 - u) ** (r - 2.0) if r > 0 else np.zeros_like(u)
    return F * base, F2 * base + 2.0 * F1 * d1 + F * d2, F1 * base + F * d1


def _wraps(spec: LossSpec) -> bool:
    return spec.focal_wrap and spec.family in ("mae", "sce", "nce") and spec.r > 0


def loss_value(spec: LossSpec, phat):
    """Loss value at phat; vectorized over phat."""
    u = _safeguarded(spec, _check_phat(phat))
    if _wraps(spec):
        return _focal_wrapped(spec, u, want_derivs=False)
    return _raw_value(spec, u)


def loss_d1_d2(spec: LossSpec, phat):
    """Analytic first and second derivatives of the loss in phat."""
    u = _safeguarded(spec, _check_phat(phat))
    if _wraps(spec):
        _, d2, d1 = _focal_wrapped(spec, u, want_derivs=True)
        return d1, d2
    return _raw_d1_d2(spec, u)


def sigmoid(z):
    """Numerically stable logistic function."""
    z = np.clip(np.asarray(z, dtype=float), -Z_CLAMP, Z_CLAMP)
    ez = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + ez), ez / (1.0 + ez))


def grad_hess(spec: LossSpec, y, z):
    """Per-sample gradient and Hessian in raw-score space.

    g = d1 * (2y - 1) * phat(1-phat)
    h = d2 * (phat(1-phat))**2 + d1 * phat(1-phat)(1-2*phat)
    """
    y = np.asarray(y)
    z = np.asarray(z, dtype=float)
    # phat = sigmoid(z) for y=1, 1 - sigmoid(z) = sigmoid(-z) for y=0;
    # the signed form is exact under the label/score flip symmetry
    phat = sigmoid(np.where(y == 1, z, -z))
    d1, d2 = loss_d1_d2(spec, phat)
    s = phat * (1.0 - phat)
    sign = np.where(y == 1, 1.0, -1.0)
    g = d1 * sign * s
    h = d2 * s**2 + d1 * s * (1.0 - 2.0 * phat)
    return g, h


@dataclass
class ConditionReport:
    """Result of the Hessian-positivity grid check."""

    holds: bool
    violations: list = field(default_factory=list)  # (phat, H) pairs


def hessian_curve(spec: LossSpec, phat):
    """Hessian expressed as a function of phat for a y=1 sample.

    The eta safeguard is applied to phat throughout the expression, so a
    safeguarded mae/nce reports the curve of the perturbed loss.
    """
    u = _safeguarded(spec, _check_phat(phat))
    if _wraps(spec):
        _, d2, d1 = _focal_wrapped(spec, u, want_derivs=True)
    else:
        d1, d2 = _raw_d1_d2(spec, u)
    s = u * (1.0 - u)
    return d2 * s**2 + d1 * s * (1.0 - 2.0 * u)


def check_necessary_condition(spec: LossSpec, grid_size: int = 1000) -> ConditionReport:
    """Verify H(phat) > 0 on a uniform grid over [0.5, 1 - 1e-6].

    Positivity there is what allows a leaf to keep splitting as predictions
    approach the truth.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    grid = np.linspace(0.5, 1.0 - 1e-6, grid_size)
    H = hessian_curve(spec, grid)
    bad = H <= 0.0
    return ConditionReport(holds=not bool(bad.any()),
                           violations=list(zip(grid[bad].tolist(), H[bad].tolist())))
