import numpy as np
import pytest

from keydyn.classifiers import (
    Decision,
    decide,
    score_dvc,
    score_mvp,
    train_dvc,
    train_mvp,
)
from keydyn.errors import EmptyInput, LayoutMismatch, NoSharedFeatures

from conftest import make_vector


# -- median vector proximity ---------------------------------------------------


def test_mvp_symmetric_triples():
    model = train_mvp([make_vector([1, 2]), make_vector([3, 4]), make_vector([5, 6])])
    assert list(model.median.values) == [3.0, 4.0]
    assert list(model.spread.values) == [2.0, 2.0]
    assert not model.degenerate


def test_mvp_constant_input():
    model = train_mvp([make_vector([1, 1]), make_vector([1, 1])])
    assert list(model.median.values) == [1.0, 1.0]
    assert list(model.spread.values) == [0.0, 0.0]


def test_mvp_against_sort_oracle(rng):
    # independent oracle: medians from explicit sorting, MAD re-derived
    vectors = [make_vector(rng.normal(0, 10, 4)) for _ in range(5)]
    model = train_mvp(vectors)
    data = np.stack([v.values for v in vectors])
    for j in range(4):
        col = np.sort(data[:, j])
        med = col[len(col) // 2]  # odd count: middle element
        mad = np.sort(np.abs(data[:, j] - med))[len(col) // 2]
        assert model.median.values[j] == pytest.approx(med)
        assert model.spread.values[j] == pytest.approx(mad)


def test_mvp_empty_raises():
    with pytest.raises(EmptyInput):
        train_mvp([])


def test_mvp_single_vector_degenerate():
    model = train_mvp([make_vector([2.0, 3.0])])
    assert model.degenerate
    assert list(model.spread.values) == [0.0, 0.0]


def test_mvp_score_zero_at_median():
    model = train_mvp([make_vector([1, 2]), make_vector([3, 4]), make_vector([5, 6])])
    assert score_mvp(model, make_vector([3.0, 4.0])) == 0.0


def test_mvp_score_one_when_all_out_of_band():
    model = train_mvp([make_vector([1, 2]), make_vector([3, 4]), make_vector([5, 6])])
    assert score_mvp(model, make_vector([100.0, -100.0])) == 1.0


def test_mvp_counting_rule():
    vectors = [make_vector(np.zeros(10)), make_vector(np.ones(10)), make_vector(2 * np.ones(10))]
    model = train_mvp(vectors)  # median 1, MAD 1 per feature
    probe = np.ones(10)
    probe[:3] = 100.0  # 3 of 10 features far out of band
    assert score_mvp(model, make_vector(probe)) == pytest.approx(0.3)


def test_mvp_score_range(rng):
    vectors = [make_vector(rng.normal(0, 1, 8)) for _ in range(7)]
    model = train_mvp(vectors)
    for _ in range(25):
        s = score_mvp(model, make_vector(rng.normal(0, 3, 8)))
        assert 0.0 <= s <= 1.0


def test_mvp_layout_mismatch():
    model = train_mvp([make_vector([1.0]), make_vector([2.0])])
    with pytest.raises(LayoutMismatch):
        score_mvp(model, make_vector([1.0], layout_id="other"))


def test_mvp_permutation_invariant(rng):
    vectors = [make_vector(rng.normal(0, 5, 6)) for _ in range(9)]
    m1 = train_mvp(vectors)
    m2 = train_mvp(list(reversed(vectors)))
    assert np.array_equal(m1.median.values, m2.median.values)
    assert np.array_equal(m1.spread.values, m2.spread.values)


# -- distance vector classification ---------------------------------------------


def test_dvc_centroid_mean():
    model = train_dvc([make_vector([0, 0]), make_vector([2, 2])])
    assert list(model.centroid.values) == [1.0, 1.0]


def test_dvc_single_vector_identity():
    v = make_vector([3.5, -1.0])
    model = train_dvc([v])
    assert np.array_equal(model.centroid.values, v.values)


def test_dvc_against_summation_oracle(rng):
    vectors = [make_vector(rng.normal(0, 2, 5)) for _ in range(20)]
    model = train_dvc(vectors)
    total = np.zeros(5)
    for v in vectors:
        total += v.values
    assert np.allclose(model.centroid.values, total / 20, atol=1e-12, rtol=0)


def test_dvc_empty_raises():
    with pytest.raises(EmptyInput):
        train_dvc([])


def test_dvc_score_zero_at_centroid():
    model = train_dvc([make_vector([0, 0]), make_vector([2, 2])])
    assert score_dvc(model, make_vector([1.0, 1.0])) == 0.0


def test_dvc_score_l1():
    model = train_dvc([make_vector([1, 1])])
    assert score_dvc(model, make_vector([3.0, 5.0])) == 6.0


def test_dvc_genuine_scores_below_impostor(rng):
    # well separated generators: genuine cluster at 0, impostors at 8
    train = [make_vector(rng.normal(0, 0.5, 6)) for _ in range(10)]
    model = train_dvc(train)
    genuine = [make_vector(rng.normal(0, 0.5, 6)) for _ in range(10)]
    impostor = [make_vector(rng.normal(8, 0.5, 6)) for _ in range(10)]
    g = np.mean([score_dvc(model, v) for v in genuine])
    i = np.mean([score_dvc(model, v) for v in impostor])
    assert g < i
    # cross-checked against exhaustive pairwise L1 distances to the train set
    def avg_pairwise(probes):
        return np.mean(
            [np.abs(p.values - t.values).sum() for p in probes for t in train]
        )

    assert avg_pairwise(genuine) < avg_pairwise(impostor)


def test_dvc_score_nonnegative(rng):
    model = train_dvc([make_vector(rng.normal(0, 1, 4)) for _ in range(5)])
    for _ in range(20):
        assert score_dvc(model, make_vector(rng.normal(0, 3, 4))) >= 0.0


def test_dvc_permutation_invariant(rng):
    vectors = [make_vector(rng.normal(0, 5, 6)) for _ in range(8)]
    m1 = train_dvc(vectors)
    m2 = train_dvc(list(reversed(vectors)))
    assert np.allclose(m1.centroid.values, m2.centroid.values, atol=1e-12)


def test_dvc_masked_features_use_available_subset():
    a = make_vector([1.0, np.nan], available=np.array([True, False]))
    b = make_vector([3.0, 7.0])
    model = train_dvc([a, b])
    assert model.centroid.values[0] == 2.0
    assert model.centroid.values[1] == 7.0  # only one reading
    with pytest.raises(NoSharedFeatures):
        score_dvc(model, make_vector([np.nan, np.nan], available=np.array([False, False])))


# -- decision rule ---------------------------------------------------------------


def test_decide_accepts_below_threshold():
    assert decide(0.2, 0.5) is Decision.ACCEPT


def test_decide_boundary_inclusive():
    assert decide(0.5, 0.5) is Decision.ACCEPT


def test_decide_rejects_above_threshold():
    assert decide(0.6, 0.5) is Decision.REJECT


def test_decide_monotone(rng):
    for _ in range(100):
        tau = float(rng.normal())
        s = float(rng.normal())
        if decide(s, tau) is Decision.ACCEPT:
            assert decide(s - abs(rng.normal()), tau) is Decision.ACCEPT


def test_decide_requires_finite():
    with pytest.raises(ValueError):
        decide(float("nan"), 0.5)
    with pytest.raises(ValueError):
        decide(0.1, float("inf"))
