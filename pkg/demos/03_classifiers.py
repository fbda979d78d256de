"""The three verification classifiers on a toy two-user problem.

All three share one convention: lower score = more genuine, and a probe
is accepted iff score <= threshold.

Run: python3 demos/03_classifiers.py
"""

import numpy as np

from keydyn import (
    decide,
    rbf_kernel,
    score_dvc,
    score_mvp,
    score_svm,
    train_dvc,
    train_mvp,
    train_svm,
)
from keydyn.features import FeatureVector

rng = np.random.default_rng(3)


def fv(values):
    values = np.asarray(values, dtype=float)
    return FeatureVector("demo", values, np.ones(len(values), dtype=bool))


# "alice" types with short holds, "eve" with long ones (already scaled space)
alice_train = [fv(rng.normal([0.0, 0.0], 0.3)) for _ in range(10)]
alice_probe = fv(rng.normal([0.0, 0.0], 0.3))
eve_probe = fv(rng.normal([3.0, 3.0], 0.3))

print("median vector proximity: fraction of features outside the median +- k*MAD band")
mvp = train_mvp(alice_train)
print(f"  alice probe score: {score_mvp(mvp, alice_probe):.2f}")
print(f"  eve probe score:   {score_mvp(mvp, eve_probe):.2f}")
print()

print("distance vector classification: L1 distance to the training centroid")
dvc = train_dvc(alice_train)
print(f"  alice probe score: {score_dvc(dvc, alice_probe):.2f}")
print(f"  eve probe score:   {score_dvc(dvc, eve_probe):.2f}")
print()

print("RBF SVM: margin trained one-vs-rest (alice positive, eve negative)")
eve_train = [fv(rng.normal([3.0, 3.0], 0.3)) for _ in range(10)]
svm = train_svm(alice_train, eve_train, C=10.0, gamma=1.0)
print(f"  kernel K(v, v) = {rbf_kernel(alice_probe, alice_probe, 1.0)} (always 1 at zero distance)")
print(f"  alice probe score: {score_svm(svm, alice_probe):.2f}  (negative = genuine side)")
print(f"  eve probe score:   {score_svm(svm, eve_probe):.2f}")
print()

print("decisions at threshold 0.5 (boundary inclusive):")
for name, score in [("alice/mvp", score_mvp(mvp, alice_probe)), ("eve/mvp", score_mvp(mvp, eve_probe))]:
    print(f"  {name}: score {score:.2f} -> {decide(score, 0.5).value}")
