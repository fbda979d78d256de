"""Soft-margin RBF-kernel SVM trained by sequential pairwise optimization.

The dual problem is solved two coefficients at a time with the analytic
pair update; working-pair selection follows the classic two-loop scheme
(violators first over non-bound points, then over everything) but with
deterministic index order so identical inputs yield identical models.
Lower-level conventions: labels are +1 (genuine) / -1 (impostor) and the
decision value is f(x) = sum_i coef_i * K(sv_i, x) + bias.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import EmptyClass, LayoutMismatch, NonConvergence
from .features import FeatureVector

DEFAULT_C = 10.0
# Contractual optimality bound checked after training.
KKT_TOL = 1e-3
# Default working tolerance: converging well past the contractual bound
# makes retraining under permuted input orders move decision values by
# less than 1e-6 (the dual optimum is unique for a PD Gram matrix).
CONVERGENCE_TOL = 1e-8
MAX_PAIR_UPDATES = 100_000
_STEP_EPS = 1e-12


def rbf_kernel(a: FeatureVector, b: FeatureVector, gamma: float) -> float:
    """exp(-gamma * ||a - b||^2) over the entries available in both."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if a.layout_id != b.layout_id:
        raise LayoutMismatch(f"layouts differ: {a.layout_id!r} vs {b.layout_id!r}")
    shared = a.available & b.available
    if not shared.any():
        from .errors import NoSharedFeatures

        raise NoSharedFeatures("no feature is available in both vectors")
    diff = a.values[shared] - b.values[shared]
    return float(np.exp(-gamma * np.dot(diff, diff)))


def _gram(vectors: Sequence[FeatureVector], gamma: float) -> np.ndarray:
    """Kernel matrix; vectorized when every entry is available."""
    if all(v.available.all() for v in vectors):
        X = np.stack([v.values for v in vectors])
        sq = np.sum(X * X, axis=1)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
        return np.exp(-gamma * np.maximum(d2, 0.0))
    n = len(vectors)
    K = np.empty((n, n))
    for i in range(n):
        K[i, i] = 1.0
        for j in range(i + 1, n):
            K[i, j] = K[j, i] = rbf_kernel(vectors[i], vectors[j], gamma)
    return K


@dataclass
class RbfSvmModel:
    """Trained SVM: support vectors with dual coefficients (alpha_i * y_i),
    bias, and the kernel/box hyper-parameters.

    ``alphas``/``labels`` retain the full training-set multipliers for
    optimality diagnostics; ``objective_history`` is populated only when
    training tracked it.
    """

    layout_id: str
    support_vectors: tuple[FeatureVector, ...]
    dual_coef: np.ndarray
    bias: float
    gamma: float
    C: float
    n_updates: int = 0
    alphas: Optional[np.ndarray] = None
    labels: Optional[np.ndarray] = None
    objective_history: list = field(default_factory=list)


def decision_value(model: RbfSvmModel, probe: FeatureVector) -> float:
    """f(probe) = sum_i coef_i * K(sv_i, probe) + bias."""
    if probe.layout_id != model.layout_id:
        raise LayoutMismatch(
            f"probe layout {probe.layout_id!r} does not match model layout {model.layout_id!r}"
        )
    acc = model.bias
    for coef, sv in zip(model.dual_coef, model.support_vectors):
        acc += coef * rbf_kernel(sv, probe, model.gamma)
    return float(acc)


def _dual_objective(alphas: np.ndarray, y: np.ndarray, K: np.ndarray) -> float:
    u = alphas * y
    return float(alphas.sum() - 0.5 * (u @ K @ u))


class _Smo:
    """Mutable optimizer state; f(x_i) is maintained as an error cache
    E_i = f(x_i) - y_i with f(x) = sum alpha_j y_j K_ij - b."""

    def __init__(self, K, y, C, tol, max_updates, track_objective):
        self.K = K
        self.y = y
        self.C = C
        self.tol = tol
        self.max_updates = max_updates
        self.n = len(y)
        self.alphas = np.zeros(self.n)
        self.b = 0.0
        self.errors = -y.astype(float)
        self.updates = 0
        self.track = track_objective
        self.objective_history: list[float] = []

    def _take_step(self, i1: int, i2: int) -> bool:
        if i1 == i2:
            return False
        a1, a2 = self.alphas[i1], self.alphas[i2]
        y1, y2 = self.y[i1], self.y[i2]
        e1, e2 = self.errors[i1], self.errors[i2]
        s = y1 * y2
        if s < 0:
            lo, hi = max(0.0, a2 - a1), min(self.C, self.C + a2 - a1)
        else:
            lo, hi = max(0.0, a2 + a1 - self.C), min(self.C, a2 + a1)
        if lo >= hi:
            return False

        k11 = self.K[i1, i1]
        k12 = self.K[i1, i2]
        k22 = self.K[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 0:
            a2_new = a2 + y2 * (e1 - e2) / eta
            a2_new = min(max(a2_new, lo), hi)
        else:
            # Non-positive curvature along the pair direction: compare the
            # objective at the two clip endpoints.
            f1 = y1 * (e1 + self.b) - a1 * k11 - s * a2 * k12
            f2 = y2 * (e2 + self.b) - s * a1 * k12 - a2 * k22
            lo1 = a1 + s * (a2 - lo)
            hi1 = a1 + s * (a2 - hi)
            psi_lo = lo1 * f1 + lo * f2 + 0.5 * lo1**2 * k11 + 0.5 * lo**2 * k22 + s * lo * lo1 * k12
            psi_hi = hi1 * f1 + hi * f2 + 0.5 * hi1**2 * k11 + 0.5 * hi**2 * k22 + s * hi * hi1 * k12
            if psi_lo < psi_hi - _STEP_EPS:
                a2_new = lo
            elif psi_lo > psi_hi + _STEP_EPS:
                a2_new = hi
            else:
                a2_new = a2
        if abs(a2_new - a2) < _STEP_EPS * (a2_new + a2 + _STEP_EPS):
            return False

        a1_new = a1 + s * (a2 - a2_new)
        d1 = y1 * (a1_new - a1)
        d2 = y2 * (a2_new - a2)
        b1 = e1 + d1 * k11 + d2 * k12 + self.b
        b2 = e2 + d1 * k12 + d2 * k22 + self.b
        if 0.0 < a1_new < self.C:
            b_new = b1
        elif 0.0 < a2_new < self.C:
            b_new = b2
        else:
            b_new = 0.5 * (b1 + b2)

        self.errors += d1 * self.K[i1] + d2 * self.K[i2] - (b_new - self.b)
        self.alphas[i1] = a1_new
        self.alphas[i2] = a2_new
        self.b = b_new
        self.updates += 1
        if self.track:
            self.objective_history.append(_dual_objective(self.alphas, self.y, self.K))
        if self.updates > self.max_updates:
            raise NonConvergence(
                f"pair-update cap reached after {self.updates} updates", iterations=self.updates
            )
        return True

    def _examine(self, i2: int) -> bool:
        y2, a2, e2 = self.y[i2], self.alphas[i2], self.errors[i2]
        r2 = e2 * y2
        if not ((r2 < -self.tol and a2 < self.C) or (r2 > self.tol and a2 > 0)):
            return False
        non_bound = np.flatnonzero((self.alphas > 0) & (self.alphas < self.C))
        if len(non_bound) > 1:
            i1 = int(non_bound[np.argmax(np.abs(self.errors[non_bound] - e2))])
            if self._take_step(i1, i2):
                return True
        for i1 in non_bound:
            if self._take_step(int(i1), i2):
                return True
        for i1 in range(self.n):
            if self._take_step(i1, i2):
                return True
        return False

    def run(self):
        examine_all = True
        num_changed = 1
        while num_changed > 0 or examine_all:
            num_changed = 0
            if examine_all:
                candidates = range(self.n)
            else:
                candidates = np.flatnonzero((self.alphas > 0) & (self.alphas < self.C))
            for i in candidates:
                num_changed += self._examine(int(i))
            if examine_all:
                examine_all = False
            elif num_changed == 0:
                examine_all = True


def train_svm(
    positives: Sequence[FeatureVector],
    negatives: Sequence[FeatureVector],
    C: float = DEFAULT_C,
    gamma: Optional[float] = None,
    tol: float = CONVERGENCE_TOL,
    max_updates: int = MAX_PAIR_UPDATES,
    track_objective: bool = False,
) -> RbfSvmModel:
    """Train a binary RBF SVM (positives = genuine, negatives = impostor).

    gamma defaults to 1/(number of features). Raises EmptyClass when a
    class is empty and NonConvergence when the pair-update cap is hit
    before the KKT conditions hold within ``tol``.
    """
    if not positives or not negatives:
        raise EmptyClass("both classes must be non-empty")
    if C <= 0:
        raise ValueError("C must be positive")
    vectors = list(positives) + list(negatives)
    layout_id = vectors[0].layout_id
    for v in vectors:
        if v.layout_id != layout_id:
            raise LayoutMismatch("all training vectors must share one layout")
    if gamma is None:
        gamma = 1.0 / len(vectors[0])
    if gamma <= 0:
        raise ValueError("gamma must be positive")

    y = np.concatenate([np.ones(len(positives)), -np.ones(len(negatives))])
    K = _gram(vectors, gamma)
    smo = _Smo(K, y, C, tol, max_updates, track_objective)
    smo.run()

    sv_idx = np.flatnonzero(smo.alphas > 0)
    return RbfSvmModel(
        layout_id=layout_id,
        support_vectors=tuple(vectors[int(i)] for i in sv_idx),
        dual_coef=smo.alphas[sv_idx] * y[sv_idx],
        bias=-smo.b,
        gamma=gamma,
        C=C,
        n_updates=smo.updates,
        alphas=smo.alphas,
        labels=y,
        objective_history=smo.objective_history,
    )


def kkt_residual(
    model: RbfSvmModel,
    positives: Sequence[FeatureVector],
    negatives: Sequence[FeatureVector],
) -> float:
    """Largest first-order optimality violation over the training set.

    For alpha=0 points the margin must be >= 1, for alpha=C points <= 1,
    and for free points = 1; the residual is the worst shortfall.
    """
    if model.alphas is None:
        raise ValueError("model was trained without retained multipliers")
    vectors = list(positives) + list(negatives)
    y = np.concatenate([np.ones(len(positives)), -np.ones(len(negatives))])
    worst = 0.0
    bound_eps = 1e-9 * max(model.C, 1.0)
    for i, v in enumerate(vectors):
        margin = y[i] * decision_value(model, v)
        a = model.alphas[i]
        if a <= bound_eps:
            viol = max(0.0, 1.0 - margin)
        elif a >= model.C - bound_eps:
            viol = max(0.0, margin - 1.0)
        else:
            viol = abs(margin - 1.0)
        worst = max(worst, viol)
    return worst
