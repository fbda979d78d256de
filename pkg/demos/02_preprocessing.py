"""Pre-processing toolbox: dedup, pause filtering, scaling, distances.

Run: python3 demos/02_preprocessing.py
"""

import numpy as np

from keydyn import (
    Dataset,
    ScalerKind,
    apply_scaler,
    euclidean_distance,
    filter_by_threshold,
    fit_scaler,
    manhattan_distance,
    remove_duplicates,
)
from keydyn.features import FeatureVector
from keydyn.synth import default_profiles, generate_synthetic

dataset = generate_synthetic(default_profiles(2), samples_per_user=4, seed=1)

# duplicate removal keeps the first copy of a re-imported sample
doubled = Dataset(samples=dataset.samples + dataset.samples)
print(f"dedup: {len(doubled.samples)} samples -> {len(remove_duplicates(doubled).samples)}")

# threshold filtering drops samples containing long holds or long pauses
filtered = filter_by_threshold(dataset, max_du1_ms=1000.0, max_gap_ms=3000.0)
print(f"pause filter kept {len(filtered.samples)}/{len(dataset.samples)} samples")
print()


def fv(values):
    values = np.asarray(values, dtype=float)
    return FeatureVector("demo", values, np.ones(len(values), dtype=bool))


train = [fv([2.0, 10.0]), fv([4.0, 30.0]), fv([6.0, 50.0])]

minmax = fit_scaler(train, ScalerKind.MINMAX)
print("min-max scaling maps the training span onto [0, 1]:")
for v in train:
    print(f"  {v.values} -> {apply_scaler(v, minmax).values}")
probe = fv([100.0, -100.0])
print(f"out-of-range probes clamp: {probe.values} -> {apply_scaler(probe, minmax).values}")
print()

standard = fit_scaler(train, ScalerKind.STANDARD)
scaled = np.stack([apply_scaler(v, standard).values for v in train])
print("standard scaling (population statistics):")
print("  column means:", np.round(scaled.mean(axis=0), 12))
print("  column stds: ", np.round(scaled.std(axis=0), 12))
print()

a, b = fv([1.0, 2.0]), fv([3.0, 5.0])
print(f"manhattan({a.values}, {b.values}) = {manhattan_distance(a, b)}")
print(f"euclidean([0,0], [3,4])           = {euclidean_distance(fv([0, 0]), fv([3, 4]))}")
