"""Domain types for keystroke events, samples, datasets, and templates.

All types are immutable values after construction and safe to share
between threads without coordination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class KeystrokeEvent:
    """One key press: down/up timestamps in milliseconds plus optional
    touch sensor readings (pressure, contact size, screen position)."""

    key_index: int
    key_label: str
    down_ms: float
    up_ms: float
    pressure: Optional[float] = None
    size: Optional[float] = None
    x: Optional[float] = None
    y: Optional[float] = None


@dataclass(frozen=True)
class KeystrokeSample:
    """Ordered event sequence for one complete input, owned by a user.

    Overlapping holds (rollover typing) are legal: event i+1 may go down
    before event i comes up, as long as down times never run backwards.
    """

    user_id: str
    sample_id: str
    events: tuple[KeystrokeEvent, ...]

    def __post_init__(self):
        # Accept lists for convenience; store as an immutable tuple.
        if not isinstance(self.events, tuple):
            object.__setattr__(self, "events", tuple(self.events))


@dataclass(frozen=True)
class Dataset:
    """A recorded corpus: samples plus the text they are expected to spell
    (None when samples are free text or texts differ per user)."""

    samples: tuple[KeystrokeSample, ...]
    expected_text: Optional[str] = None

    def __post_init__(self):
        if not isinstance(self.samples, tuple):
            object.__setattr__(self, "samples", tuple(self.samples))

    def user_ids(self) -> list[str]:
        """Distinct user ids in first-seen order."""
        seen: dict[str, None] = {}
        for s in self.samples:
            seen.setdefault(s.user_id, None)
        return list(seen)

    def samples_for(self, user_id: str) -> list[KeystrokeSample]:
        return [s for s in self.samples if s.user_id == user_id]


def _finite(v: float) -> bool:
    return isinstance(v, (int, float)) and math.isfinite(v)


def validate_sample(sample: KeystrokeSample) -> list[str]:
    """Check every sample and event invariant; return one description per
    violation (empty list means the sample is valid).

    Deterministic and side-effect free. Any sample this accepts is
    accepted by every downstream feature extractor.
    """
    violations: list[str] = []
    if not sample.events:
        violations.append("events must be non-empty")
        return violations

    prev_down: Optional[float] = None
    for i, ev in enumerate(sample.events):
        if ev.key_index != i:
            violations.append(f"key_index must equal {i} at index {i}, got {ev.key_index}")
        if not _finite(ev.down_ms):
            violations.append(f"down_ms must be finite at index {i}")
        elif ev.down_ms < 0:
            violations.append(f"down_ms must be non-negative at index {i}")
        if not _finite(ev.up_ms):
            violations.append(f"up_ms must be finite at index {i}")
        if _finite(ev.down_ms) and _finite(ev.up_ms) and ev.up_ms <= ev.down_ms:
            violations.append(f"up_ms must exceed down_ms at index {i}")
        for name, value in (("pressure", ev.pressure), ("size", ev.size)):
            if value is not None:
                if not _finite(value):
                    violations.append(f"{name} must be finite at index {i}")
                elif value < 0:
                    violations.append(f"{name} must be non-negative at index {i}")
        for name, value in (("x", ev.x), ("y", ev.y)):
            if value is not None and not _finite(value):
                violations.append(f"{name} must be finite at index {i}")
        if prev_down is not None and _finite(ev.down_ms) and ev.down_ms < prev_down:
            violations.append(f"down_ms must be non-decreasing at index {i}")
        if _finite(ev.down_ms):
            prev_down = ev.down_ms
    return violations


# The template's model field holds one of the trained classifier types;
# the union is declared here and satisfied by classifiers.py / svm.py.
TrainedModel = Union["MedianProximityModel", "DistanceVectorModel", "RbfSvmModel"]  # noqa: F821


@dataclass(frozen=True)
class UserTemplate:
    """Trained per-user model plus the fitted scaler and decision cut.

    Any vector scored against the template must share its layout_id.
    """

    user_id: str
    layout_id: str
    model: "TrainedModel"
    scaler: "ScalerParams"  # noqa: F821
    threshold: float
    extra: dict = field(default_factory=dict)
