import numpy as np
import pytest

from keydyn.features import FeatureKind, timing_features
from keydyn.model import validate_sample
from keydyn.synth import SyntheticProfile, default_profiles, generate_synthetic, impostor_pool


def _profile(user_id="u", hold=100.0, hold_std=10.0, **kw):
    return SyntheticProfile(
        user_id=user_id,
        text=kw.pop("text", ".tie5Roanl"),
        hold_mean_ms=hold,
        hold_std_ms=hold_std,
        flight_mean_ms=kw.pop("flight", 150.0),
        flight_std_ms=kw.pop("flight_std", 20.0),
        **kw,
    )


def test_fixed_seed_is_bitwise_deterministic():
    profiles = default_profiles(3)
    a = generate_synthetic(profiles, 5, seed=42)
    b = generate_synthetic(profiles, 5, seed=42)
    assert a == b


def test_different_seeds_differ():
    profiles = default_profiles(2)
    a = generate_synthetic(profiles, 3, seed=1)
    b = generate_synthetic(profiles, 3, seed=2)
    assert a != b


def test_zero_std_gives_identical_samples():
    profile = _profile(hold_std=0.0, flight_std=0.0)
    ds = generate_synthetic([profile], 4, seed=9)
    first = ds.samples[0]
    du1 = timing_features(first)[FeatureKind.DU1]
    assert np.allclose(du1, profile.hold_mean_ms)
    for s in ds.samples[1:]:
        assert s.events == first.events


def test_separated_profiles_separate_du1_means():
    fast = _profile(user_id="fast", hold=80.0, hold_std=10.0)
    slow = _profile(user_id="slow", hold=200.0, hold_std=10.0)
    ds = generate_synthetic([fast, slow], 30, seed=7)
    means = {}
    for user in ("fast", "slow"):
        du1 = np.concatenate(
            [timing_features(s)[FeatureKind.DU1] for s in ds.samples_for(user)]
        )
        means[user] = du1.mean()
    pooled_std = 10.0
    assert means["slow"] - means["fast"] > 5 * pooled_std


def test_generated_samples_validate():
    ds = generate_synthetic(default_profiles(4), 6, seed=3)
    for s in ds.samples:
        assert validate_sample(s) == []


def test_intervals_truncated_at_one_ms():
    # extreme std forces many raw draws negative; all must clamp to >= 1
    profile = _profile(hold=5.0, hold_std=500.0, flight=5.0, flight_std=500.0)
    ds = generate_synthetic([profile], 10, seed=13)
    for s in ds.samples:
        t = timing_features(s)
        assert np.all(t[FeatureKind.DU1] >= 1.0)
        assert np.all(t[FeatureKind.UD] >= 1.0)


def test_optional_sensors_absent():
    profile = _profile()
    ds = generate_synthetic([profile], 2, seed=4)
    for s in ds.samples:
        assert all(e.pressure is None and e.size is None for e in s.events)


def test_sensor_means_present_when_configured():
    profile = _profile(pressure_mean=0.5, pressure_std=0.05, size_mean=8.0, size_std=0.5)
    ds = generate_synthetic([profile], 3, seed=4)
    for s in ds.samples:
        assert all(e.pressure is not None and e.size is not None for e in s.events)
        assert all(e.pressure >= 0 and e.size >= 0 for e in s.events)


def test_sample_ids_unique_and_ordered():
    ds = generate_synthetic(default_profiles(2), 12, seed=0)
    for user in ds.user_ids():
        ids = [s.sample_id for s in ds.samples_for(user)]
        assert ids == sorted(ids)
        assert len(set(ids)) == len(ids)


def test_expected_text_recorded():
    ds = generate_synthetic(default_profiles(2, text="hello"), 1, seed=0)
    assert ds.expected_text == "hello"


def test_profile_validation():
    with pytest.raises(ValueError):
        _profile(hold=-5.0)
    with pytest.raises(ValueError):
        _profile(hold_std=-1.0)
    with pytest.raises(ValueError):
        _profile(text="")
    with pytest.raises(ValueError):
        generate_synthetic([_profile()], 0, seed=0)


def test_impostor_pool_deterministic():
    a = impostor_pool(text_length=10, pool_size=30, seed=927)
    b = impostor_pool(text_length=10, pool_size=30, seed=927)
    assert a == b
    assert all(len(s.events) == 10 for s in a.samples)
    assert all(validate_sample(s) == [] for s in a.samples)
