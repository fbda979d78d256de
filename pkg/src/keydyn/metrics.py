"""Evaluation scheme: binary-classification measures, biometric error
rates (FRR/FAR/EER/FER/FTA), threshold sweeps, multi-attempt compounding,
and the EN-50133 access-control limits.

Score convention everywhere: an attempt is accepted iff score <= tau.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import EmptyScores, OutOfRange, ZeroAttempts, ZeroDenominator, ZeroTotal, ZeroUsers

# EN-50133 access-control limits: FRR at most 1%, FAR at most 0.001%.
EN50133_MAX_FRR = 0.01
EN50133_MAX_FAR = 1e-5


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class ScoreSet:
    """Paired score collections: genuine = legitimate attempts,
    impostor = illegitimate attempts. Input to all threshold sweeps."""

    genuine: np.ndarray
    impostor: np.ndarray

    def __post_init__(self):
        genuine = np.asarray(self.genuine, dtype=float)
        impostor = np.asarray(self.impostor, dtype=float)
        genuine.setflags(write=False)
        impostor.setflags(write=False)
        object.__setattr__(self, "genuine", genuine)
        object.__setattr__(self, "impostor", impostor)

    def require_valid(self):
        if len(self.genuine) == 0 or len(self.impostor) == 0:
            raise EmptyScores("both genuine and impostor scores are required")
        if not (np.isfinite(self.genuine).all() and np.isfinite(self.impostor).all()):
            raise EmptyScores("scores must be finite")


@dataclass(frozen=True)
class DetCurve:
    """Threshold sweep trace: strictly increasing thresholds with FAR
    non-decreasing and FRR non-increasing along the curve."""

    thresholds: np.ndarray
    far: np.ndarray
    frr: np.ndarray

    def __iter__(self) -> Iterable[tuple[float, float, float]]:
        return iter(zip(self.thresholds, self.far, self.frr))

    def __len__(self) -> int:
        return len(self.thresholds)

    def to_text(self) -> str:
        """Three-column numeric text (threshold, far, frr) for plotting."""
        lines = [f"{t:.12g}\t{a:.12g}\t{r:.12g}" for t, a, r in self]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RateReport:
    """Operating rates for one evaluation leg, with the EN-50133 flags
    and the full DET trace they were read from."""

    far: float
    frr: float
    eer: float
    threshold_at_eer: float
    en50133_far_ok: bool
    en50133_frr_ok: bool
    det_curve: DetCurve


def accuracy(c: ConfusionCounts) -> float:
    """Correct predictions over all predictions."""
    if c.total == 0:
        raise ZeroTotal("confusion counts sum to zero")
    return (c.tp + c.tn) / c.total


def precision(c: ConfusionCounts) -> float:
    """Fraction of positive identifications that are correct."""
    if c.tp + c.fp == 0:
        raise ZeroDenominator("no positive predictions")
    return c.tp / (c.tp + c.fp)


def recall(c: ConfusionCounts) -> float:
    """Fraction of actual positives correctly identified."""
    if c.tp + c.fn == 0:
        raise ZeroDenominator("no actual positives")
    return c.tp / (c.tp + c.fn)


def f1(c: ConfusionCounts) -> float:
    """Harmonic mean of precision and recall."""
    p = precision(c)
    r = recall(c)
    if p + r == 0:
        raise ZeroDenominator("precision and recall are both zero")
    return 2 * p * r / (p + r)


def far_rate(incorrectly_accepted: int, impostor_attempts: int) -> float:
    """Wrongly accepted impostor attempts over all impostor attempts."""
    if impostor_attempts <= 0:
        raise ZeroAttempts("impostor attempt count must be positive")
    return incorrectly_accepted / impostor_attempts


def frr_rate(incorrectly_rejected: int, genuine_attempts: int) -> float:
    """Wrongly rejected genuine attempts over all genuine attempts."""
    if genuine_attempts <= 0:
        raise ZeroAttempts("genuine attempt count must be positive")
    return incorrectly_rejected / genuine_attempts


def fer_rate(failed_enrollments: int, potential_users: int) -> float:
    """Users whose data recording failed over all potential users."""
    if potential_users <= 0:
        raise ZeroUsers("potential user count must be positive")
    return failed_enrollments / potential_users


def fta_rate(failed_acquisitions: int, potential_users: int) -> float:
    """Users with failed recordings after training over all potential users."""
    if potential_users <= 0:
        raise ZeroUsers("potential user count must be positive")
    return failed_acquisitions / potential_users


def sweep_rates(scores: ScoreSet) -> DetCurve:
    """Sweep the accept-iff-score<=tau rule over every achievable
    operating point.

    Candidate thresholds are the midpoints between adjacent distinct
    pooled scores plus a below-min and an above-max sentinel, which is
    finite and complete: no reachable (FAR, FRR) pair is missed.
    """
    scores.require_valid()
    pooled = np.unique(np.concatenate([scores.genuine, scores.impostor]))
    mids = (pooled[:-1] + pooled[1:]) / 2.0 if len(pooled) > 1 else np.empty(0)
    thresholds = np.concatenate([[pooled[0] - 1.0], mids, [pooled[-1] + 1.0]])

    genuine = np.sort(scores.genuine)
    impostor = np.sort(scores.impostor)
    accepted_impostors = np.searchsorted(impostor, thresholds, side="right")
    accepted_genuine = np.searchsorted(genuine, thresholds, side="right")
    far = accepted_impostors / len(impostor)
    # divide integer rejection counts (not 1 - ratio) so rates are exact
    frr = (len(genuine) - accepted_genuine) / len(genuine)
    return DetCurve(thresholds=thresholds, far=far, frr=frr)


def eer_intersection(scores: ScoreSet) -> tuple[float, float]:
    """(EER, threshold) at the crossing of FAR and FRR.

    Scans the DET curve for the threshold minimizing |FAR - FRR| and
    returns the average of the two rates there; ties resolve to the
    smallest threshold.
    """
    curve = sweep_rates(scores)
    idx = int(np.argmin(np.abs(curve.far - curve.frr)))
    eer = 0.5 * (curve.far[idx] + curve.frr[idx])
    return float(eer), float(curve.thresholds[idx])


def eer_average(far: float, frr: float) -> float:
    """EER from rates at the crossing point: 0.5 * (FAR + FRR)."""
    _check_unit_interval(far=far, frr=frr)
    return 0.5 * (far + frr)


def accuracy_from_eer(eer: float) -> float:
    """Accuracy = 1 - EER."""
    _check_unit_interval(eer=eer)
    return 1.0 - eer


def multi_attempt_far(p: float, n: int) -> float:
    """FAR after n tries when one try succeeds with probability p.

    Compounded attempt by attempt (far' = far + (1-far) * p), which
    equals 1 - (1-p)^n but reproduces the hand-calculated two-attempt
    arithmetic exactly in floating point.
    """
    _check_unit_interval(p=p)
    _check_attempts(n)
    far = 0.0
    for _ in range(n):
        far = far + (1.0 - far) * p
    return far


def multi_attempt_frr(q: float, n: int) -> float:
    """FRR after n tries when one try rejects with probability q: q^n,
    compounded attempt by attempt."""
    _check_unit_interval(q=q)
    _check_attempts(n)
    frr = 1.0
    for _ in range(n):
        frr *= q
    return frr


def en50133_check(far: float, frr: float) -> tuple[bool, bool]:
    """(far_ok, frr_ok) against the EN-50133 limits (FAR <= 0.001%,
    FRR <= 1%), boundary inclusive."""
    _check_unit_interval(far=far, frr=frr)
    return far <= EN50133_MAX_FAR, frr <= EN50133_MAX_FRR


def _check_unit_interval(**named: float):
    for name, value in named.items():
        if not (0.0 <= value <= 1.0):
            raise OutOfRange(f"{name} must lie in [0, 1], got {value}")


def _check_attempts(n: int):
    if n < 1:
        raise OutOfRange(f"attempt count must be at least 1, got {n}")
