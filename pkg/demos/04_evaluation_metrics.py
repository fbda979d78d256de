"""Evaluation scheme: confusion measures, FRR/FAR/EER, DET curves,
multi-attempt compounding, and the EN-50133 access-control limits.

Run: python3 demos/04_evaluation_metrics.py
"""

import numpy as np

from keydyn import (
    ConfusionCounts,
    ScoreSet,
    accuracy,
    accuracy_from_eer,
    eer_average,
    eer_intersection,
    en50133_check,
    f1,
    multi_attempt_far,
    multi_attempt_frr,
    precision,
    recall,
    sweep_rates,
)

c = ConfusionCounts(tp=9, tn=89, fp=1, fn=1)
print(f"confusion counts {c}")
print(f"  accuracy={accuracy(c):.4f} precision={precision(c):.4f} "
      f"recall={recall(c):.4f} f1={f1(c):.4f}")
print()

# genuine attempts score low, impostor attempts score high, with overlap
rng = np.random.default_rng(4)
scores = ScoreSet(genuine=rng.normal(1.0, 0.6, 200), impostor=rng.normal(3.0, 0.8, 400))
curve = sweep_rates(scores)
eer, tau = eer_intersection(scores)
print(f"DET curve over {len(curve)} thresholds; FAR rises while FRR falls:")
for i in np.linspace(0, len(curve) - 1, 7, dtype=int):
    print(f"  tau={curve.thresholds[i]:7.3f}  FAR={curve.far[i]:.3f}  FRR={curve.frr[i]:.3f}")
print(f"equal error rate {eer:.4f} at threshold {tau:.3f}")
print(f"single-number summary: accuracy = 1 - EER = {accuracy_from_eer(eer):.4f}")
print()

print("rates at a crossing can also be averaged directly:")
print(f"  eer_average(FAR=0.01, FRR=0.001) = {eer_average(0.01, 0.001)}")
print()

print("allowing retries trades security for comfort:")
for n in (1, 2, 3):
    print(f"  after {n} attempt(s): FAR={multi_attempt_far(0.01, n):.6f} "
          f"FRR={multi_attempt_frr(0.02, n):.6f}")
print()

print("EN-50133 compliance flags (FAR <= 0.001%, FRR <= 1%):")
for far, frr in [(5e-6, 0.005), (5e-6, 0.02), (2e-5, 0.005)]:
    far_ok, frr_ok = en50133_check(far, frr)
    print(f"  FAR={far:g} FRR={frr:g} -> far_ok={far_ok} frr_ok={frr_ok}")
