"""Shared test helpers: random validated samples and dense vectors."""

from __future__ import annotations

import numpy as np
import pytest

from keydyn.features import FeatureVector
from keydyn.model import KeystrokeEvent, KeystrokeSample


def make_vector(values, layout_id="test", available=None) -> FeatureVector:
    values = np.asarray(values, dtype=float)
    if available is None:
        available = np.ones(len(values), dtype=bool)
    return FeatureVector(layout_id=layout_id, values=values, available=available)


def random_sample(
    rng: np.random.Generator,
    n_events: int,
    user_id: str = "u",
    sample_id: str = "s",
    allow_rollover: bool = True,
    with_sensors: bool = False,
) -> KeystrokeSample:
    """A sample satisfying every invariant, with occasional rollover
    (negative flight) when allowed."""
    events = []
    down = 0.0
    for i in range(n_events):
        hold = rng.uniform(20.0, 250.0)
        up = down + hold
        events.append(
            KeystrokeEvent(
                key_index=i,
                key_label=chr(ord("a") + i % 26),
                down_ms=down,
                up_ms=up,
                pressure=float(rng.uniform(0.1, 1.0)) if with_sensors else None,
                size=float(rng.uniform(4.0, 12.0)) if with_sensors else None,
            )
        )
        if i < n_events - 1:
            # flight >= -hold/2 keeps down_ms strictly increasing even
            # when the next key lands before this one is released
            flight = rng.uniform(-0.5 * hold if allow_rollover else 1.0, 300.0)
            down = down + hold + flight
    return KeystrokeSample(user_id=user_id, sample_id=sample_id, events=tuple(events))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240901)
