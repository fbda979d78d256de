import numpy as np
import pytest

from keydyn.errors import EmptyInput, LayoutMismatch, NoSharedFeatures
from keydyn.model import Dataset, KeystrokeEvent, KeystrokeSample
from keydyn.preprocess import (
    ScalerKind,
    apply_scaler,
    euclidean_distance,
    filter_by_threshold,
    fit_scaler,
    manhattan_distance,
    remove_duplicates,
)

from conftest import make_vector, random_sample


def _sample(user_id, sample_id, events):
    return KeystrokeSample(user_id=user_id, sample_id=sample_id, events=tuple(events))


def _two_key(user_id, sample_id, hold=100.0, gap=150.0):
    return _sample(
        user_id,
        sample_id,
        [
            KeystrokeEvent(0, "a", 0, hold),
            KeystrokeEvent(1, "b", gap, gap + hold),
        ],
    )


# -- duplicate removal -------------------------------------------------------


def test_same_sample_stored_twice_collapses():
    s = _two_key("u", "s1")
    ds = remove_duplicates(Dataset(samples=(s, s)))
    assert len(ds.samples) == 1


def test_no_duplicates_keeps_order():
    a, b = _two_key("u", "s1"), _two_key("u", "s2", hold=120.0)
    ds = remove_duplicates(Dataset(samples=(a, b)))
    assert ds.samples == (a, b)


def test_dedup_is_per_user():
    a = _two_key("u", "s1")
    b = _two_key("v", "s1")  # byte-identical events, different user
    ds = remove_duplicates(Dataset(samples=(a, b)))
    assert len(ds.samples) == 2


def test_identical_events_same_user_collapse():
    a = _two_key("u", "s1")
    b = _two_key("u", "s2")  # same event list under a different id
    ds = remove_duplicates(Dataset(samples=(a, b)))
    assert len(ds.samples) == 1


def test_dedup_idempotent(rng):
    samples = [random_sample(rng, 5, user_id="u", sample_id=f"s{i}") for i in range(6)]
    ds = Dataset(samples=tuple(samples + samples[:3]))
    once = remove_duplicates(ds)
    twice = remove_duplicates(once)
    assert once.samples == twice.samples


# -- threshold filtering -----------------------------------------------------


def test_filter_keeps_fast_sample():
    ds = Dataset(samples=(_two_key("u", "s1", hold=100.0, gap=150.0),))
    assert len(filter_by_threshold(ds, 500.0, 2000.0).samples) == 1


def test_filter_drops_long_gap():
    ds = Dataset(samples=(_two_key("u", "s1", hold=100.0, gap=5000.0),))
    assert len(filter_by_threshold(ds, 500.0, 2000.0).samples) == 0


def test_filter_drops_long_hold():
    ds = Dataset(samples=(_two_key("u", "s1", hold=900.0, gap=100.0),))
    assert len(filter_by_threshold(ds, 500.0, 2000.0).samples) == 0


def test_filter_empty_dataset_identity():
    ds = Dataset(samples=())
    assert filter_by_threshold(ds, 500.0, 2000.0).samples == ()


def test_filter_idempotent(rng):
    samples = [random_sample(rng, 6, sample_id=f"s{i}") for i in range(10)]
    ds = Dataset(samples=tuple(samples))
    once = filter_by_threshold(ds)
    assert filter_by_threshold(once).samples == once.samples


def test_filter_rejects_nonpositive_thresholds():
    with pytest.raises(ValueError):
        filter_by_threshold(Dataset(samples=()), 0.0, 100.0)


# -- scaling -----------------------------------------------------------------


def test_minmax_fit_stats():
    vectors = [make_vector([v]) for v in (2.0, 4.0, 6.0)]
    params = fit_scaler(vectors, ScalerKind.MINMAX)
    assert params.lo[0] == 2.0 and params.hi[0] == 6.0


def test_standard_fit_population_std():
    vectors = [make_vector([v]) for v in (1.0, 2.0, 3.0)]
    params = fit_scaler(vectors, ScalerKind.STANDARD)
    assert params.lo[0] == pytest.approx(2.0)
    assert params.hi[0] == pytest.approx(0.8165, abs=1e-4)


def test_all_masked_feature_is_degenerate():
    vectors = [make_vector([1.0, np.nan], available=np.array([True, False])) for _ in range(3)]
    params = fit_scaler(vectors, ScalerKind.MINMAX)
    assert not params.ok[1]


def test_fit_empty_raises():
    with pytest.raises(EmptyInput):
        fit_scaler([], ScalerKind.MINMAX)


def test_minmax_maps_endpoints_and_midpoint():
    vectors = [make_vector([v]) for v in (2.0, 4.0, 6.0)]
    params = fit_scaler(vectors, ScalerKind.MINMAX)
    out = [apply_scaler(v, params).values[0] for v in vectors]
    assert out == [0.0, 0.5, 1.0]


def test_constant_feature_scales_to_zero():
    vectors = [make_vector([5.0]) for _ in range(3)]
    for kind in (ScalerKind.MINMAX, ScalerKind.STANDARD):
        params = fit_scaler(vectors, kind)
        assert [apply_scaler(v, params).values[0] for v in vectors] == [0.0, 0.0, 0.0]


def test_standard_symmetric_triple():
    vectors = [make_vector([v]) for v in (1.0, 2.0, 3.0)]
    params = fit_scaler(vectors, ScalerKind.STANDARD)
    out = [apply_scaler(v, params).values[0] for v in vectors]
    assert out == pytest.approx([-1.2247, 0.0, 1.2247], abs=1e-4)


def test_minmax_clamps_out_of_range():
    params = fit_scaler([make_vector([0.0]), make_vector([10.0])], ScalerKind.MINMAX)
    assert apply_scaler(make_vector([-5.0]), params).values[0] == 0.0
    assert apply_scaler(make_vector([25.0]), params).values[0] == 1.0


def test_apply_layout_mismatch():
    params = fit_scaler([make_vector([1.0], layout_id="a")], ScalerKind.MINMAX)
    with pytest.raises(LayoutMismatch):
        apply_scaler(make_vector([1.0], layout_id="b"), params)


def test_minmax_training_data_lands_in_unit_interval(rng):
    vectors = [make_vector(rng.normal(0, 50, 8)) for _ in range(30)]
    params = fit_scaler(vectors, ScalerKind.MINMAX)
    for v in vectors:
        out = apply_scaler(v, params).values
        assert np.all(out >= 0.0) and np.all(out <= 1.0)


def test_standard_training_data_mean_zero_std_one(rng):
    vectors = [make_vector(rng.normal(3.0, 7.0, 6)) for _ in range(40)]
    params = fit_scaler(vectors, ScalerKind.STANDARD)
    scaled = np.stack([apply_scaler(v, params).values for v in vectors])
    assert np.allclose(scaled.mean(axis=0), 0.0, atol=1e-9)
    assert np.allclose(scaled.std(axis=0), 1.0, atol=1e-9)


def test_standard_invariant_under_affine_rescaling(rng):
    # per-feature affine map a*v+b with a>0 leaves standardized output unchanged
    raw = [rng.normal(0, 10, 5) for _ in range(25)]
    a = rng.uniform(0.5, 4.0, 5)
    b = rng.normal(0, 100, 5)
    base = [make_vector(v) for v in raw]
    mapped = [make_vector(a * v + b) for v in raw]
    params_base = fit_scaler(base, ScalerKind.STANDARD)
    params_mapped = fit_scaler(mapped, ScalerKind.STANDARD)
    for vb, vm in zip(base, mapped):
        sb = apply_scaler(vb, params_base).values
        sm = apply_scaler(vm, params_mapped).values
        assert np.allclose(sb, sm, atol=1e-9)


def test_scaler_ignores_masked_entries():
    vectors = [
        make_vector([1.0, 100.0]),
        make_vector([3.0, np.nan], available=np.array([True, False])),
    ]
    params = fit_scaler(vectors, ScalerKind.MINMAX)
    assert params.lo[1] == params.hi[1] == 100.0
    out = apply_scaler(vectors[1], params)
    assert not out.available[1]


# -- distances ---------------------------------------------------------------


def test_manhattan_example():
    assert manhattan_distance(make_vector([1, 2]), make_vector([3, 5])) == 5.0


def test_euclidean_345():
    assert euclidean_distance(make_vector([0, 0]), make_vector([3, 4])) == 5.0


def test_distance_identity(rng):
    v = make_vector(rng.normal(0, 1, 7))
    assert manhattan_distance(v, v) == 0.0
    assert euclidean_distance(v, v) == 0.0


def test_distance_metric_properties(rng):
    for _ in range(50):
        a = make_vector(rng.normal(0, 5, 6))
        b = make_vector(rng.normal(0, 5, 6))
        c = make_vector(rng.normal(0, 5, 6))
        for dist in (manhattan_distance, euclidean_distance):
            assert dist(a, b) >= 0.0
            assert dist(a, b) == pytest.approx(dist(b, a))
            assert dist(a, c) <= dist(a, b) + dist(b, c) + 1e-9


def test_distance_over_shared_entries_only():
    a = make_vector([1.0, np.nan], available=np.array([True, False]))
    b = make_vector([4.0, 9.0])
    assert manhattan_distance(a, b) == 3.0


def test_distance_no_shared_features():
    a = make_vector([1.0, np.nan], available=np.array([True, False]))
    b = make_vector([np.nan, 9.0], available=np.array([False, True]))
    with pytest.raises(NoSharedFeatures):
        manhattan_distance(a, b)


def test_distance_layout_mismatch():
    with pytest.raises(LayoutMismatch):
        manhattan_distance(make_vector([1.0], layout_id="a"), make_vector([1.0], layout_id="b"))
