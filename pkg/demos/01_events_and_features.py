"""Capture model and timing features, step by step.

A keystroke sample is an ordered list of (down, up) timestamp pairs with
optional touch readings. Five interval families describe typing rhythm:

    DU1  hold time of each key          (n entries)
    UD   flight: release -> next press  (n-1, negative under rollover)
    DD   press -> next press            (n-1)
    UU   release -> next release        (n-1)
    DU2  press -> next release          (n-1)

Run: python3 demos/01_events_and_features.py
"""

import numpy as np

from keydyn import (
    KeystrokeEvent,
    KeystrokeSample,
    aggregate_features,
    build_vector,
    concept2_layout,
    sensor_features,
    timing_features,
    validate_sample,
)
from keydyn.features import FeatureKind

# one typed word: "abc", with the "b" key pressed before "a" is released
sample = KeystrokeSample(
    user_id="demo",
    sample_id="s0",
    events=(
        KeystrokeEvent(0, "a", down_ms=0.0, up_ms=140.0, pressure=0.42, size=8.5),
        KeystrokeEvent(1, "b", down_ms=110.0, up_ms=230.0, pressure=0.47, size=8.1),
        KeystrokeEvent(2, "c", down_ms=300.0, up_ms=395.0, pressure=0.40, size=8.8),
    ),
)

print("violations:", validate_sample(sample) or "none")
print()

timing = timing_features(sample)
for kind in (FeatureKind.DU1, FeatureKind.UD, FeatureKind.DD, FeatureKind.UU, FeatureKind.DU2):
    print(f"{kind.value:>4}: {np.round(timing[kind], 1)}")
print()
print("note UD[0] < 0: the second key went down before the first came up (rollover)")
print()

# the interval identities tie the families together
du1, ud = timing[FeatureKind.DU1], timing[FeatureKind.UD]
print("DD  == DU1[:-1] + UD      :", np.allclose(timing[FeatureKind.DD], du1[:-1] + ud))
print("UU  == UD + DU1[1:]       :", np.allclose(timing[FeatureKind.UU], ud + du1[1:]))
print("DU2 == DD + DU1[1:]       :", np.allclose(timing[FeatureKind.DU2], timing[FeatureKind.DD] + du1[1:]))
print()

print("sensor streams (None = reading absent on that event):")
for kind, values in sensor_features(sample).items():
    print(f"  {kind.value:>8}: {values}")
print("aggregates:", {k.value: v for k, v in aggregate_features(sample).items()})
print()

# a layout fixes which features land where in the numeric vector
layout = concept2_layout(3)
vector = build_vector(sample, layout)
print(f"layout {layout.layout_id!r} has {len(layout)} entries; vector:")
for (kind, idx), value, ok in zip(layout.entries, vector.values, vector.available):
    print(f"  {kind.value:>12}[{idx}] = {value:8.2f}   available={ok}")
