"""Enroll/verify service round trip without any network: drive the HTTP
app in-process, enroll five samples, then verify a genuine probe and a
far-off impostor.

Run: python3 demos/06_service_roundtrip.py
"""

import tempfile

from fastapi.testclient import TestClient

from keydyn.service import KeystrokeService, ServiceConfig, create_app
from keydyn.synth import SyntheticProfile, generate_synthetic


def payload(sample, sample_id=None):
    return {
        "user_id": sample.user_id,
        "sample_id": sample_id or sample.sample_id,
        "events": [
            {"key_label": e.key_label, "down_ms": e.down_ms, "up_ms": e.up_ms}
            for e in sample.events
        ],
    }


alice = SyntheticProfile(
    user_id="alice", text=".tie5Roanl",
    hold_mean_ms=95.0, hold_std_ms=8.0, flight_mean_ms=140.0, flight_std_ms=20.0,
)
mallory = SyntheticProfile(
    user_id="alice", text=".tie5Roanl",  # claims to be alice, types differently
    hold_mean_ms=420.0, hold_std_ms=10.0, flight_mean_ms=650.0, flight_std_ms=30.0,
)
genuine = list(generate_synthetic([alice], 8, seed=5).samples)
impostor = generate_synthetic([mallory], 1, seed=6).samples[0]

with tempfile.TemporaryDirectory() as store:
    client = TestClient(create_app(KeystrokeService(ServiceConfig(store_dir=store))))

    print("enrolling alice (template trains at the 5th sample):")
    for s in genuine[:5]:
        body = client.post("/api/enroll", json=payload(s)).json()
        print(f"  sample {body['samples']}/5 -> trained={body['trained']}")

    body = client.post("/api/verify", json=payload(genuine[6])).json()
    print(f"\ngenuine probe:  decision={body['decision']} score={body['score']:.3f}")

    body = client.post("/api/verify", json=payload(impostor, sample_id="m1")).json()
    print(f"impostor probe: decision={body['decision']} score={body['score']:.3f}")

    print("\nregistered users:", client.get("/api/users").json())
