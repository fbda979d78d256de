from keydyn.model import Dataset, KeystrokeEvent, KeystrokeSample, validate_sample

from conftest import random_sample


def _sample(events):
    return KeystrokeSample(user_id="u", sample_id="s", events=tuple(events))


def test_valid_two_event_sample():
    s = _sample([KeystrokeEvent(0, "a", 0, 100), KeystrokeEvent(1, "b", 150, 260)])
    assert validate_sample(s) == []


def test_up_equal_down_is_violation():
    s = _sample([KeystrokeEvent(0, "a", 100, 100)])
    assert validate_sample(s) == ["up_ms must exceed down_ms at index 0"]


def test_empty_events_is_violation():
    s = _sample([])
    assert validate_sample(s) == ["events must be non-empty"]


def test_rollover_is_legal():
    # second key pressed before the first is released
    s = _sample([KeystrokeEvent(0, "a", 0, 200), KeystrokeEvent(1, "b", 120, 320)])
    assert validate_sample(s) == []


def test_decreasing_down_is_violation():
    s = _sample([KeystrokeEvent(0, "a", 100, 200), KeystrokeEvent(1, "b", 50, 260)])
    assert any("non-decreasing at index 1" in v for v in validate_sample(s))


def test_key_index_must_count_from_zero():
    s = _sample([KeystrokeEvent(1, "a", 0, 100)])
    assert any("key_index" in v for v in validate_sample(s))


def test_nonfinite_timestamps_flagged():
    s = _sample([KeystrokeEvent(0, "a", 0, float("inf"))])
    assert any("up_ms must be finite" in v for v in validate_sample(s))
    s = _sample([KeystrokeEvent(0, "a", float("nan"), 100)])
    assert any("down_ms must be finite" in v for v in validate_sample(s))


def test_negative_sensor_values_flagged():
    s = _sample([KeystrokeEvent(0, "a", 0, 100, pressure=-0.1)])
    assert any("pressure must be non-negative" in v for v in validate_sample(s))


def test_negative_screen_coordinates_are_fine():
    s = _sample([KeystrokeEvent(0, "a", 0, 100, x=-12.5, y=4.0)])
    assert validate_sample(s) == []


def test_validation_is_deterministic(rng):
    s = random_sample(rng, 8)
    assert validate_sample(s) == validate_sample(s) == []


def test_random_samples_validate(rng):
    for i in range(100):
        n = int(rng.integers(1, 15))
        s = random_sample(rng, n, sample_id=f"s{i}", with_sensors=bool(i % 2))
        assert validate_sample(s) == []


def test_dataset_user_helpers():
    a = _sample([KeystrokeEvent(0, "a", 0, 50)])
    b = KeystrokeSample(user_id="v", sample_id="s", events=a.events)
    ds = Dataset(samples=(a, b))
    assert ds.user_ids() == ["u", "v"]
    assert ds.samples_for("v") == [b]
