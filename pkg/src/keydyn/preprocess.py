"""Pre-processing toolbox: dedup, threshold filtering, scaling, distances.

Scaling statistics are computed over available (unmasked) entries only.
Degenerate features (constant column, or no readings at all) scale to 0
instead of erroring so pipelines keep running on constant columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import EmptyInput, LayoutMismatch, NoSharedFeatures
from .features import FeatureKind, FeatureVector, timing_features
from .model import Dataset, KeystrokeSample

DEFAULT_MAX_HOLD_MS = 1000.0
DEFAULT_MAX_GAP_MS = 3000.0


class ScalerKind(str, Enum):
    MINMAX = "MINMAX"
    STANDARD = "STANDARD"
    NONE = "NONE"


@dataclass(frozen=True)
class ScalerParams:
    """Fitted per-feature statistics aligned to one layout.

    For MINMAX ``lo``/``hi`` hold per-feature min/max; for STANDARD
    ``lo``/``hi`` hold mean/population-std. ``ok`` marks non-degenerate
    features (spread > 0 and at least one reading seen at fit time).
    """

    kind: ScalerKind
    layout_id: str
    lo: np.ndarray
    hi: np.ndarray
    ok: np.ndarray

    def __post_init__(self):
        for name in ("lo", "hi", "ok"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def _event_signature(sample: KeystrokeSample) -> tuple:
    return tuple(
        (e.key_index, e.key_label, e.down_ms, e.up_ms, e.pressure, e.size, e.x, e.y)
        for e in sample.events
    )


def remove_duplicates(dataset: Dataset) -> Dataset:
    """Keep the first occurrence of each (user_id, sample_id) pair and of
    each byte-identical event list per user. Dedup never crosses users.
    Idempotent."""
    seen_ids: set[tuple[str, str]] = set()
    seen_events: set[tuple] = set()
    kept: list[KeystrokeSample] = []
    for sample in dataset.samples:
        id_key = (sample.user_id, sample.sample_id)
        ev_key = (sample.user_id, _event_signature(sample))
        if id_key in seen_ids or ev_key in seen_events:
            continue
        seen_ids.add(id_key)
        seen_events.add(ev_key)
        kept.append(sample)
    return Dataset(samples=tuple(kept), expected_text=dataset.expected_text)


def filter_by_threshold(
    dataset: Dataset,
    max_du1_ms: float = DEFAULT_MAX_HOLD_MS,
    max_gap_ms: float = DEFAULT_MAX_GAP_MS,
) -> Dataset:
    """Drop samples containing a hold longer than ``max_du1_ms`` or a
    down-down gap longer than ``max_gap_ms`` (pauses/interruptions).
    Idempotent."""
    if max_du1_ms <= 0 or max_gap_ms <= 0:
        raise ValueError("thresholds must be positive")
    kept = []
    for sample in dataset.samples:
        timing = timing_features(sample)
        if np.any(timing[FeatureKind.DU1] > max_du1_ms):
            continue
        if len(timing[FeatureKind.DD]) and np.any(timing[FeatureKind.DD] > max_gap_ms):
            continue
        kept.append(sample)
    return Dataset(samples=tuple(kept), expected_text=dataset.expected_text)


def _stack(vectors: Sequence[FeatureVector]) -> tuple[np.ndarray, np.ndarray, str]:
    if not vectors:
        raise EmptyInput("at least one feature vector is required")
    layout_id = vectors[0].layout_id
    for v in vectors:
        if v.layout_id != layout_id:
            raise LayoutMismatch(f"expected layout {layout_id!r}, got {v.layout_id!r}")
    values = np.stack([v.values for v in vectors])
    available = np.stack([v.available for v in vectors])
    return values, available, layout_id


def fit_scaler(vectors: Sequence[FeatureVector], kind: ScalerKind) -> ScalerParams:
    """Fit per-feature statistics over the available entries of a shared
    layout. Features with no available entries are flagged degenerate."""
    values, available, layout_id = _stack(vectors)
    d = values.shape[1]
    lo = np.zeros(d)
    hi = np.zeros(d)
    ok = np.zeros(d, dtype=bool)

    if kind is ScalerKind.NONE:
        return ScalerParams(kind, layout_id, lo, hi, np.ones(d, dtype=bool))

    for j in range(d):
        col = values[available[:, j], j]
        if col.size == 0:
            continue
        if kind is ScalerKind.MINMAX:
            lo[j], hi[j] = float(col.min()), float(col.max())
            ok[j] = hi[j] > lo[j]
        else:  # STANDARD: population statistics
            lo[j] = float(col.mean())
            hi[j] = float(col.std())
            ok[j] = hi[j] > 0
    return ScalerParams(kind, layout_id, lo, hi, ok)


def apply_scaler(vector: FeatureVector, params: ScalerParams) -> FeatureVector:
    """Scale available entries; masked entries stay masked.

    MINMAX maps to (v-min)/(max-min) clamped to [0,1] so out-of-range
    probe values cannot blow up distance thresholds; STANDARD maps to
    (v-mean)/std. Degenerate features map to 0.
    """
    if vector.layout_id != params.layout_id:
        raise LayoutMismatch(
            f"vector layout {vector.layout_id!r} does not match scaler layout {params.layout_id!r}"
        )
    if params.kind is ScalerKind.NONE:
        return vector

    values = vector.values.copy()
    avail = vector.available
    scaled = np.zeros_like(values)
    span = params.hi - params.lo if params.kind is ScalerKind.MINMAX else params.hi
    with np.errstate(invalid="ignore", divide="ignore"):
        if params.kind is ScalerKind.MINMAX:
            scaled = (values - params.lo) / span
            scaled = np.clip(scaled, 0.0, 1.0)
        else:
            scaled = (values - params.lo) / span
    out = np.where(params.ok, scaled, 0.0)
    out = np.where(avail, out, np.nan)
    return FeatureVector(layout_id=vector.layout_id, values=out, available=avail.copy())


def _shared(a: FeatureVector, b: FeatureVector) -> np.ndarray:
    if a.layout_id != b.layout_id:
        raise LayoutMismatch(f"layouts differ: {a.layout_id!r} vs {b.layout_id!r}")
    shared = a.available & b.available
    if not shared.any():
        raise NoSharedFeatures("no feature is available in both vectors")
    return shared


def manhattan_distance(a: FeatureVector, b: FeatureVector) -> float:
    """L1 distance over the entries available in both vectors."""
    shared = _shared(a, b)
    return float(np.sum(np.abs(a.values[shared] - b.values[shared])))


def euclidean_distance(a: FeatureVector, b: FeatureVector) -> float:
    """L2 distance over the entries available in both vectors."""
    shared = _shared(a, b)
    return float(np.sqrt(np.sum((a.values[shared] - b.values[shared]) ** 2)))
