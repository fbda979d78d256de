"""Timing/sensor feature extraction and the per-concept feature layouts.

Interval features over a sample's events (n events):

    DU1_i = up_i   - down_i      hold (dwell) time, n entries
    UD_i  = down_{i+1} - up_i    flight time, n-1 entries (negative under rollover)
    DD_i  = down_{i+1} - down_i  n-1 entries
    UU_i  = up_{i+1}   - up_i    n-1 entries
    DU2_i = up_{i+1}   - down_i  n-1 entries

which gives the identities DD_i = DU1_i + UD_i, UU_i = UD_i + DU1_{i+1},
and DU2_i = DD_i + DU1_{i+1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import SampleTooShort
from .model import KeystrokeSample


class FeatureKind(str, Enum):
    DU1 = "DU1"
    UD = "UD"
    DD = "DD"
    UU = "UU"
    DU2 = "DU2"
    PRESSURE = "PRESSURE"
    SIZE = "SIZE"
    XPOS = "XPOS"
    YPOS = "YPOS"
    AVG_TIME = "AVG_TIME"
    AVG_PRESSURE = "AVG_PRESSURE"
    AVG_SIZE = "AVG_SIZE"
    DEVICE = "DEVICE"


TIMING_KINDS = (FeatureKind.DU1, FeatureKind.UD, FeatureKind.DD, FeatureKind.UU, FeatureKind.DU2)
SENSOR_KINDS = (FeatureKind.PRESSURE, FeatureKind.SIZE, FeatureKind.XPOS, FeatureKind.YPOS)


@dataclass(frozen=True)
class FeatureLayout:
    """Ordered list of (feature_kind, index) entries under a stable id."""

    layout_id: str
    entries: tuple[tuple[FeatureKind, int], ...]

    def __post_init__(self):
        if not isinstance(self.entries, tuple):
            object.__setattr__(self, "entries", tuple(self.entries))
        if len(set(self.entries)) != len(self.entries):
            raise ValueError(f"layout {self.layout_id!r} has duplicate entries")

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class FeatureVector:
    """Real-valued features aligned to a layout, with a per-entry
    availability mask (absent sensor readings are masked, never zeroed)."""

    layout_id: str
    values: np.ndarray
    available: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        available = np.asarray(self.available, dtype=bool)
        if values.shape != available.shape:
            raise ValueError("values and availability mask must have equal length")
        values.setflags(write=False)
        available.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "available", available)

    def __len__(self) -> int:
        return len(self.values)


def timing_features(sample: KeystrokeSample) -> dict[FeatureKind, np.ndarray]:
    """Extract the five interval series from a validated sample."""
    down = np.array([e.down_ms for e in sample.events], dtype=float)
    up = np.array([e.up_ms for e in sample.events], dtype=float)
    return {
        FeatureKind.DU1: up - down,
        FeatureKind.UD: down[1:] - up[:-1],
        FeatureKind.DD: np.diff(down),
        FeatureKind.UU: np.diff(up),
        FeatureKind.DU2: up[1:] - down[:-1],
    }


def sensor_features(sample: KeystrokeSample) -> dict[FeatureKind, list[Optional[float]]]:
    """Per-event sensor readings; an entry is None where the event lacks
    the reading (absence means unavailable, not zero)."""
    return {
        FeatureKind.PRESSURE: [e.pressure for e in sample.events],
        FeatureKind.SIZE: [e.size for e in sample.events],
        FeatureKind.XPOS: [e.x for e in sample.events],
        FeatureKind.YPOS: [e.y for e in sample.events],
    }


def aggregate_features(sample: KeystrokeSample) -> dict[FeatureKind, Optional[float]]:
    """Arithmetic means: hold time over DU1, plus pressure/size over the
    events that carry readings (None when no readings exist)."""
    timing = timing_features(sample)
    sensors = sensor_features(sample)

    def _mean_present(values: list[Optional[float]]) -> Optional[float]:
        present = [v for v in values if v is not None]
        return float(np.mean(present)) if present else None

    return {
        FeatureKind.AVG_TIME: float(np.mean(timing[FeatureKind.DU1])),
        FeatureKind.AVG_PRESSURE: _mean_present(sensors[FeatureKind.PRESSURE]),
        FeatureKind.AVG_SIZE: _mean_present(sensors[FeatureKind.SIZE]),
    }


# AVG_TIME layout entries beyond index 0 fall back to the other interval
# families, giving five distinct per-sample time averages.
_AVG_TIME_SERIES = (FeatureKind.DU1, FeatureKind.UD, FeatureKind.DD, FeatureKind.UU, FeatureKind.DU2)


def build_vector(sample: KeystrokeSample, layout: FeatureLayout) -> FeatureVector:
    """Assemble a FeatureVector aligned to ``layout``.

    Timing entries must have a source event pair (SampleTooShort
    otherwise); sensor entries without an event or a reading are masked;
    DEVICE entries are opaque channels this capture model does not
    provide and are always masked.
    """
    timing = timing_features(sample)
    sensors = sensor_features(sample)
    aggregates = aggregate_features(sample)

    n = len(layout)
    values = np.zeros(n)
    available = np.zeros(n, dtype=bool)

    for pos, (kind, idx) in enumerate(layout.entries):
        if kind in TIMING_KINDS:
            series = timing[kind]
            if idx >= len(series):
                raise SampleTooShort(
                    f"layout {layout.layout_id!r} needs {kind.value}[{idx}] but the "
                    f"sample has {len(sample.events)} events"
                )
            values[pos] = series[idx]
            available[pos] = True
        elif kind in SENSOR_KINDS:
            readings = sensors[kind]
            if idx < len(readings) and readings[idx] is not None:
                values[pos] = readings[idx]
                available[pos] = True
        elif kind is FeatureKind.AVG_TIME:
            series = timing[_AVG_TIME_SERIES[idx % len(_AVG_TIME_SERIES)]]
            if len(series):
                values[pos] = float(np.mean(series))
                available[pos] = True
        elif kind in (FeatureKind.AVG_PRESSURE, FeatureKind.AVG_SIZE):
            agg = aggregates[kind]
            if agg is not None:
                values[pos] = agg
                available[pos] = True
        # FeatureKind.DEVICE: left masked.

    values[~available] = np.nan
    return FeatureVector(layout_id=layout.layout_id, values=values, available=available)


def _entries(*groups: tuple[FeatureKind, int]) -> tuple[tuple[FeatureKind, int], ...]:
    out: list[tuple[FeatureKind, int]] = []
    for kind, count in groups:
        out.extend((kind, i) for i in range(count))
    return tuple(out)


def concept1_layout() -> FeatureLayout:
    """Fixed-password layout: 155 features over 16-event samples
    (hold/flight/digraph intervals, per-key pressure/size/position,
    five time averages, and opaque device channels)."""
    return FeatureLayout(
        layout_id="concept1",
        entries=_entries(
            (FeatureKind.DU1, 16),
            (FeatureKind.UD, 15),
            (FeatureKind.DD, 15),
            (FeatureKind.UU, 15),
            (FeatureKind.DU2, 15),
            (FeatureKind.PRESSURE, 16),
            (FeatureKind.SIZE, 16),
            (FeatureKind.XPOS, 16),
            (FeatureKind.YPOS, 16),
            (FeatureKind.AVG_TIME, 5),
            (FeatureKind.AVG_PRESSURE, 1),
            (FeatureKind.AVG_SIZE, 1),
            (FeatureKind.DEVICE, 8),
        ),
    )


def concept2_layout(x: int) -> FeatureLayout:
    """Message layout parameterized by input length x: hold times (x),
    flight and down-down intervals (x-1 each), per-key pressure/size (x),
    and the two sensor averages -- 5x features total."""
    if x < 1:
        raise ValueError("input length must be at least 1")
    return FeatureLayout(
        layout_id=f"concept2:x={x}",
        entries=_entries(
            (FeatureKind.DU1, x),
            (FeatureKind.UD, x - 1),
            (FeatureKind.DD, x - 1),
            (FeatureKind.PRESSURE, x),
            (FeatureKind.SIZE, x),
            (FeatureKind.AVG_PRESSURE, 1),
            (FeatureKind.AVG_SIZE, 1),
        ),
    )


def concept3_layout() -> FeatureLayout:
    """Numeric-password layout: interval and size features over the first
    seven keys plus opaque device channels."""
    return FeatureLayout(
        layout_id="concept3",
        entries=_entries(
            (FeatureKind.UD, 6),
            (FeatureKind.DD, 6),
            (FeatureKind.UU, 6),
            (FeatureKind.DU2, 6),
            (FeatureKind.SIZE, 6),
            (FeatureKind.DEVICE, 48),
        ),
    )


def layout_by_name(name: str, input_length: Optional[int] = None) -> FeatureLayout:
    """Look up a built-in layout preset; concept2 needs the input length."""
    if name == "concept1":
        return concept1_layout()
    if name == "concept2":
        if input_length is None:
            raise ValueError("concept2 layout needs the input length")
        return concept2_layout(input_length)
    if name == "concept3":
        return concept3_layout()
    raise ValueError(f"unknown layout {name!r}")


def min_events_for(layout: FeatureLayout) -> int:
    """Smallest sample length that satisfies every timing entry."""
    need = 1
    for kind, idx in layout.entries:
        if kind is FeatureKind.DU1:
            need = max(need, idx + 1)
        elif kind in TIMING_KINDS:
            need = max(need, idx + 2)
        elif kind is FeatureKind.AVG_TIME and idx % len(_AVG_TIME_SERIES) != 0:
            need = max(need, 2)
    return need
