"""The three verification classifiers, under one score convention:
lower score = more genuine, and decide() accepts at score <= threshold.

* median vector proximity: per-feature median + MAD band counting
* distance vector classification: Manhattan distance to the centroid of
  standardized training vectors
* RBF SVM: negated decision value of the trained margin (see svm.py)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import EmptyInput, LayoutMismatch, NoSharedFeatures
from .features import FeatureVector
from .preprocess import manhattan_distance
from .svm import RbfSvmModel, decision_value, rbf_kernel, train_svm  # noqa: F401  (re-export)

MVP_BAND_WIDTH = 1.5
_MVP_SPREAD_EPS = 1e-6


class Decision(str, Enum):
    ACCEPT = "ACCEPT"
    REJECT = "REJECT"


@dataclass(frozen=True)
class MedianProximityModel:
    """Per-feature median and median absolute deviation of the training
    vectors. ``degenerate`` marks a model trained from a single vector
    (spread is identically zero there)."""

    median: FeatureVector
    spread: FeatureVector
    degenerate: bool = False

    @property
    def layout_id(self) -> str:
        return self.median.layout_id


@dataclass(frozen=True)
class DistanceVectorModel:
    """Per-feature mean of standardized training vectors."""

    centroid: FeatureVector

    @property
    def layout_id(self) -> str:
        return self.centroid.layout_id


def _columns(vectors: Sequence[FeatureVector]) -> tuple[np.ndarray, np.ndarray, str]:
    if not vectors:
        raise EmptyInput("at least one training vector is required")
    layout_id = vectors[0].layout_id
    for v in vectors:
        if v.layout_id != layout_id:
            raise LayoutMismatch("training vectors must share one layout")
    values = np.stack([v.values for v in vectors])
    available = np.stack([v.available for v in vectors])
    return values, available, layout_id


def train_mvp(vectors: Sequence[FeatureVector]) -> MedianProximityModel:
    """Fit median + MAD per feature over available entries.

    A single training vector leaves the MAD undefined; the model is
    flagged degenerate with spread 0 rather than erroring.
    """
    values, available, layout_id = _columns(vectors)
    n, d = values.shape
    med = np.full(d, np.nan)
    mad = np.full(d, np.nan)
    ok = np.zeros(d, dtype=bool)
    for j in range(d):
        col = values[available[:, j], j]
        if col.size == 0:
            continue
        med[j] = np.median(col)
        mad[j] = np.median(np.abs(col - med[j]))
        ok[j] = True
    return MedianProximityModel(
        median=FeatureVector(layout_id, med, ok),
        spread=FeatureVector(layout_id, mad, ok),
        degenerate=n < 2,
    )


def score_mvp(model: MedianProximityModel, probe: FeatureVector, k: float = MVP_BAND_WIDTH) -> float:
    """Fraction of shared features where the probe strays beyond
    k * (MAD + eps) of the median. Always in [0, 1]; lower = more genuine."""
    if probe.layout_id != model.layout_id:
        raise LayoutMismatch(
            f"probe layout {probe.layout_id!r} does not match model layout {model.layout_id!r}"
        )
    shared = probe.available & model.median.available
    if not shared.any():
        raise NoSharedFeatures("probe shares no available feature with the model")
    deviation = np.abs(probe.values[shared] - model.median.values[shared])
    band = k * (model.spread.values[shared] + _MVP_SPREAD_EPS)
    return float(np.mean(deviation > band))


def train_dvc(vectors: Sequence[FeatureVector]) -> DistanceVectorModel:
    """Centroid (per-feature mean over available entries) of vectors that
    are expected to be standard-scaled already."""
    values, available, layout_id = _columns(vectors)
    d = values.shape[1]
    centroid = np.full(d, np.nan)
    ok = np.zeros(d, dtype=bool)
    for j in range(d):
        col = values[available[:, j], j]
        if col.size == 0:
            continue
        centroid[j] = col.mean()
        ok[j] = True
    return DistanceVectorModel(centroid=FeatureVector(layout_id, centroid, ok))


def score_dvc(model: DistanceVectorModel, probe: FeatureVector) -> float:
    """Manhattan distance from the centroid; the probe must be scaled
    with the same fitted parameters as the training vectors."""
    return manhattan_distance(model.centroid, probe)


def score_svm(model: RbfSvmModel, probe: FeatureVector) -> float:
    """Negated SVM decision value, so lower = more genuine like the
    distance-based scorers."""
    return -decision_value(model, probe)


def decide(score: float, threshold: float) -> Decision:
    """ACCEPT iff score <= threshold (boundary inclusive, so sweeps are
    reproducible bit for bit)."""
    if not (math.isfinite(score) and math.isfinite(threshold)):
        raise ValueError("score and threshold must be finite")
    return Decision.ACCEPT if score <= threshold else Decision.REJECT
