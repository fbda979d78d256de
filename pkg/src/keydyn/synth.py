"""Synthetic typist generation.

Stands in for unavailable recorded corpora: each profile describes one
user's event-level normal distributions for hold time, flight time, and
optional touch pressure/size. Draws are independent per feature with no
inter-key correlation, which is sufficient for separation/chance-level
experiments but deliberately not human-realistic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .model import Dataset, KeystrokeEvent, KeystrokeSample

MIN_INTERVAL_MS = 1.0


@dataclass(frozen=True)
class SyntheticProfile:
    """Per-user generator hyper-parameters; pressure/size means of None
    produce samples without those sensor readings."""

    user_id: str
    text: str
    hold_mean_ms: float
    hold_std_ms: float
    flight_mean_ms: float
    flight_std_ms: float
    pressure_mean: Optional[float] = None
    pressure_std: float = 0.0
    size_mean: Optional[float] = None
    size_std: float = 0.0

    def __post_init__(self):
        if not self.text:
            raise ValueError("profile text must be non-empty")
        if self.hold_mean_ms <= 0 or self.flight_mean_ms <= 0:
            raise ValueError("timing means must be positive")
        for std in (self.hold_std_ms, self.flight_std_ms, self.pressure_std, self.size_std):
            if std < 0:
                raise ValueError("standard deviations must be non-negative")


def generate_synthetic(
    profiles: Sequence[SyntheticProfile],
    samples_per_user: int,
    seed: int,
) -> Dataset:
    """Draw ``samples_per_user`` samples for each profile.

    Hold and flight times are truncated at 1 ms (so no rollover appears
    in synthetic data) and pressure/size at 0. Deterministic: a fixed
    seed yields a bitwise-identical dataset.
    """
    if samples_per_user < 1:
        raise ValueError("samples_per_user must be at least 1")
    rng = np.random.default_rng(seed)
    samples: list[KeystrokeSample] = []
    for profile in profiles:
        n = len(profile.text)
        for s in range(samples_per_user):
            holds = np.maximum(MIN_INTERVAL_MS, rng.normal(profile.hold_mean_ms, profile.hold_std_ms, n))
            flights = np.maximum(
                MIN_INTERVAL_MS, rng.normal(profile.flight_mean_ms, profile.flight_std_ms, n - 1)
            )
            pressures = _sensor_draws(rng, profile.pressure_mean, profile.pressure_std, n)
            sizes = _sensor_draws(rng, profile.size_mean, profile.size_std, n)

            events = []
            down = 0.0
            for i, char in enumerate(profile.text):
                up = down + holds[i]
                events.append(
                    KeystrokeEvent(
                        key_index=i,
                        key_label=char,
                        down_ms=down,
                        up_ms=up,
                        pressure=pressures[i] if pressures is not None else None,
                        size=sizes[i] if sizes is not None else None,
                    )
                )
                if i < n - 1:
                    down = up + flights[i]
            samples.append(
                KeystrokeSample(
                    user_id=profile.user_id,
                    sample_id=f"s{s:04d}",
                    events=tuple(events),
                )
            )
    texts = {p.text for p in profiles}
    expected = texts.pop() if len(texts) == 1 else None
    return Dataset(samples=tuple(samples), expected_text=expected)


def _sensor_draws(rng, mean: Optional[float], std: float, n: int) -> Optional[np.ndarray]:
    if mean is None:
        return None
    return np.maximum(0.0, rng.normal(mean, std, n))


def default_profiles(
    n_users: int,
    text: str = ".tie5Roanl",
    hold_means: Optional[Sequence[float]] = None,
    hold_std: float = 12.0,
    flight_mean: float = 150.0,
    flight_std: float = 30.0,
    with_sensors: bool = True,
) -> list[SyntheticProfile]:
    """Evenly spread hold-time means across users; handy for demos and
    the experiment CLI."""
    if hold_means is None:
        hold_means = [70.0 + 25.0 * i for i in range(n_users)]
    if len(hold_means) != n_users:
        raise ValueError("one hold mean per user is required")
    profiles = []
    for i in range(n_users):
        profiles.append(
            SyntheticProfile(
                user_id=f"user{i:02d}",
                text=text,
                hold_mean_ms=float(hold_means[i]),
                hold_std_ms=hold_std,
                flight_mean_ms=flight_mean,
                flight_std_ms=flight_std,
                pressure_mean=0.4 + 0.05 * i if with_sensors else None,
                pressure_std=0.05 if with_sensors else 0.0,
                size_mean=8.0 + 0.5 * i if with_sensors else None,
                size_std=0.6 if with_sensors else 0.0,
            )
        )
    return profiles


def impostor_pool(
    text_length: int,
    pool_size: int = 30,
    seed: int = 927,
) -> Dataset:
    """Deterministic impostor samples used for service threshold sweeps:
    a spread of typing speeds over a synthetic text of the given length."""
    text = "x" * text_length
    profiles = []
    for i in range(6):
        profiles.append(
            SyntheticProfile(
                user_id=f"impostor{i:02d}",
                text=text,
                hold_mean_ms=55.0 + 30.0 * i,
                hold_std_ms=10.0 + 2.0 * i,
                flight_mean_ms=90.0 + 45.0 * i,
                flight_std_ms=25.0,
            )
        )
    per_user = max(1, pool_size // len(profiles))
    return generate_synthetic(profiles, per_user, seed)
