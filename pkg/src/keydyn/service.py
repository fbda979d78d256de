"""Enroll/verify service with a persistent template store.

Storage is a single versioned JSON document on local disk plus an
append-only JSONL audit log. Raw samples are retained alongside trained
templates so a user can be re-trained under a different layout; treat
the store directory as sensitive (it holds biometric raw data).

Verification never mutates templates (no silent relearning). Writes are
serialized per user; reads work on immutable snapshots.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .classifiers import (
    Decision,
    DistanceVectorModel,
    MedianProximityModel,
    decide,
    score_dvc,
    score_mvp,
    score_svm,
    train_dvc,
    train_mvp,
)
from .errors import (
    InvalidSample,
    KeydynError,
    NotTrained,
    SampleTooShort,
    TrainingFailed,
    UnknownUser,
)
from .features import FeatureVector, build_vector, layout_by_name
from .metrics import ScoreSet, eer_intersection
from .model import KeystrokeEvent, KeystrokeSample, UserTemplate, validate_sample
from .preprocess import ScalerKind, ScalerParams, apply_scaler, fit_scaler
from .svm import RbfSvmModel
from .synth import impostor_pool

STORE_VERSION = 1
DEFAULT_MIN_SAMPLES = 5


@dataclass
class ServiceConfig:
    store_dir: str = "keydyn-store"
    classifier: str = "dvc"
    layout: str = "concept2"
    scaler: ScalerKind = ScalerKind.STANDARD
    min_samples: int = DEFAULT_MIN_SAMPLES
    impostor_pool_size: int = 30
    impostor_pool_seed: int = 927


@dataclass
class EnrollmentStatus:
    user_id: str
    samples: int
    trained: bool


@dataclass
class _UserRecord:
    samples: list[KeystrokeSample] = field(default_factory=list)
    template: Optional[UserTemplate] = None
    created: str = ""
    updated: str = ""
    training_error: Optional[str] = None


# ---------------------------------------------------------------------------
# serialization (field-for-field JSON schema for templates and models)


def _sample_to_dict(s: KeystrokeSample) -> dict:
    return {
        "user_id": s.user_id,
        "sample_id": s.sample_id,
        "events": [
            {
                "key_index": e.key_index,
                "key_label": e.key_label,
                "down_ms": e.down_ms,
                "up_ms": e.up_ms,
                "pressure": e.pressure,
                "size": e.size,
                "x": e.x,
                "y": e.y,
            }
            for e in s.events
        ],
    }


def _sample_from_dict(d: dict) -> KeystrokeSample:
    return KeystrokeSample(
        user_id=d["user_id"],
        sample_id=d["sample_id"],
        events=tuple(KeystrokeEvent(**e) for e in d["events"]),
    )


def _vector_to_dict(v: FeatureVector) -> dict:
    values = [None if not a else val for val, a in zip(v.values.tolist(), v.available.tolist())]
    return {"layout_id": v.layout_id, "values": values}


def _vector_from_dict(d: dict) -> FeatureVector:
    raw = d["values"]
    available = np.array([v is not None for v in raw], dtype=bool)
    values = np.array([v if v is not None else np.nan for v in raw], dtype=float)
    return FeatureVector(layout_id=d["layout_id"], values=values, available=available)


def _scaler_to_dict(p: ScalerParams) -> dict:
    return {
        "kind": p.kind.value,
        "layout_id": p.layout_id,
        "lo": p.lo.tolist(),
        "hi": p.hi.tolist(),
        "ok": p.ok.tolist(),
    }


def _scaler_from_dict(d: dict) -> ScalerParams:
    return ScalerParams(
        kind=ScalerKind(d["kind"]),
        layout_id=d["layout_id"],
        lo=np.array(d["lo"], dtype=float),
        hi=np.array(d["hi"], dtype=float),
        ok=np.array(d["ok"], dtype=bool),
    )


def _model_to_dict(model) -> dict:
    if isinstance(model, DistanceVectorModel):
        return {"type": "dvc", "centroid": _vector_to_dict(model.centroid)}
    if isinstance(model, MedianProximityModel):
        return {
            "type": "mvp",
            "median": _vector_to_dict(model.median),
            "spread": _vector_to_dict(model.spread),
            "degenerate": model.degenerate,
        }
    if isinstance(model, RbfSvmModel):
        return {
            "type": "svm",
            "layout_id": model.layout_id,
            "support_vectors": [_vector_to_dict(v) for v in model.support_vectors],
            "dual_coef": model.dual_coef.tolist(),
            "bias": model.bias,
            "gamma": model.gamma,
            "C": model.C,
        }
    raise TypeError(f"unknown model type {type(model).__name__}")


def _model_from_dict(d: dict):
    if d["type"] == "dvc":
        return DistanceVectorModel(centroid=_vector_from_dict(d["centroid"]))
    if d["type"] == "mvp":
        return MedianProximityModel(
            median=_vector_from_dict(d["median"]),
            spread=_vector_from_dict(d["spread"]),
            degenerate=d["degenerate"],
        )
    if d["type"] == "svm":
        return RbfSvmModel(
            layout_id=d["layout_id"],
            support_vectors=tuple(_vector_from_dict(v) for v in d["support_vectors"]),
            dual_coef=np.array(d["dual_coef"], dtype=float),
            bias=d["bias"],
            gamma=d["gamma"],
            C=d["C"],
        )
    raise ValueError(f"unknown model type {d['type']!r}")


def _template_to_dict(t: UserTemplate) -> dict:
    return {
        "user_id": t.user_id,
        "layout_id": t.layout_id,
        "model": _model_to_dict(t.model),
        "scaler": _scaler_to_dict(t.scaler),
        "threshold": t.threshold,
    }


def _template_from_dict(d: dict) -> UserTemplate:
    return UserTemplate(
        user_id=d["user_id"],
        layout_id=d["layout_id"],
        model=_model_from_dict(d["model"]),
        scaler=_scaler_from_dict(d["scaler"]),
        threshold=d["threshold"],
    )


# ---------------------------------------------------------------------------


class KeystrokeService:
    """Enroll/verify pipeline over a durable template store."""

    def __init__(self, config: Optional[ServiceConfig] = None):
        self.config = config or ServiceConfig()
        self._store_dir = Path(self.config.store_dir)
        self._store_path = self._store_dir / "store.json"
        self._audit_path = self._store_dir / "audit.log"
        self._lock = threading.RLock()
        self._user_locks: dict[str, threading.Lock] = {}
        self._users: dict[str, _UserRecord] = {}
        self._last_audit_ts = 0.0
        self._load()

    # -- persistence ------------------------------------------------------

    def _load(self):
        if not self._store_path.exists():
            return
        with self._store_path.open(encoding="utf-8") as fh:
            data = json.load(fh)
        if data.get("version") != STORE_VERSION:
            raise ValueError(f"unsupported store version {data.get('version')!r}")
        for user_id, rec in data["users"].items():
            self._users[user_id] = _UserRecord(
                samples=[_sample_from_dict(s) for s in rec["samples"]],
                template=_template_from_dict(rec["template"]) if rec["template"] else None,
                created=rec["created"],
                updated=rec["updated"],
                training_error=rec.get("training_error"),
            )
        if self._audit_path.exists():
            with self._audit_path.open(encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        self._last_audit_ts = max(self._last_audit_ts, json.loads(line)["ts"])

    def _save(self):
        with self._lock:
            self._save_locked()

    def _save_locked(self):
        self._store_dir.mkdir(parents=True, exist_ok=True)
        data = {
            "version": STORE_VERSION,
            "users": {
                user_id: {
                    "samples": [_sample_to_dict(s) for s in rec.samples],
                    "template": _template_to_dict(rec.template) if rec.template else None,
                    "created": rec.created,
                    "updated": rec.updated,
                    "training_error": rec.training_error,
                }
                for user_id, rec in self._users.items()
            },
        }
        tmp = self._store_path.with_suffix(".json.tmp")
        with tmp.open("w", encoding="utf-8") as fh:
            json.dump(data, fh)
        os.replace(tmp, self._store_path)

    def _audit(self, entry: dict):
        # Timestamps are forced monotone so the log stays ordered even if
        # the wall clock steps backwards.
        ts = max(time.time(), self._last_audit_ts + 1e-6)
        self._last_audit_ts = ts
        entry = {"ts": ts, **entry}
        self._store_dir.mkdir(parents=True, exist_ok=True)
        with self._audit_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")

    def _user_lock(self, user_id: str) -> threading.Lock:
        with self._lock:
            return self._user_locks.setdefault(user_id, threading.Lock())

    # -- training ---------------------------------------------------------

    def _build_vectors(self, samples: list[KeystrokeSample]):
        n_events = len(samples[0].events)
        layout = layout_by_name(self.config.layout, input_length=n_events)
        return layout, [build_vector(s, layout) for s in samples]

    def _fit(self, vectors: list[FeatureVector]):
        scaler = fit_scaler(vectors, self.config.scaler)
        scaled = [apply_scaler(v, scaler) for v in vectors]
        if self.config.classifier == "dvc":
            model = train_dvc(scaled)
            scorer = lambda m, v: score_dvc(m, v)  # noqa: E731
        elif self.config.classifier == "mvp":
            model = train_mvp(scaled)
            scorer = lambda m, v: score_mvp(m, v)  # noqa: E731
        else:
            raise TrainingFailed(f"service classifier {self.config.classifier!r} is not trainable here")
        return scaler, model, scorer

    def _score_with(self, template: UserTemplate, vector: FeatureVector) -> float:
        scaled = apply_scaler(vector, template.scaler)
        model = template.model
        if isinstance(model, DistanceVectorModel):
            return score_dvc(model, scaled)
        if isinstance(model, MedianProximityModel):
            return score_mvp(model, scaled)
        return score_svm(model, scaled)

    def _train_template(self, user_id: str, samples: list[KeystrokeSample]) -> UserTemplate:
        layout, vectors = self._build_vectors(samples)

        # Genuine side of the threshold sweep: leave-one-out scores, so
        # the swept threshold never sees a sample inside its own model.
        genuine_scores = []
        for i in range(len(vectors)):
            rest = vectors[:i] + vectors[i + 1 :]
            scaler_i, model_i, scorer_i = self._fit(rest)
            genuine_scores.append(scorer_i(model_i, apply_scaler(vectors[i], scaler_i)))

        scaler, model, scorer = self._fit(vectors)
        pool = impostor_pool(
            text_length=len(samples[0].events),
            pool_size=self.config.impostor_pool_size,
            seed=self.config.impostor_pool_seed,
        )
        impostor_scores = []
        for sample in pool.samples:
            try:
                v = build_vector(sample, layout)
            except SampleTooShort:
                continue
            impostor_scores.append(scorer(model, apply_scaler(v, scaler)))

        scores = ScoreSet(genuine=np.array(genuine_scores), impostor=np.array(impostor_scores))
        _, threshold = eer_intersection(scores)
        return UserTemplate(
            user_id=user_id,
            layout_id=layout.layout_id,
            model=model,
            scaler=scaler,
            threshold=threshold,
        )

    # -- public operations --------------------------------------------------

    def enroll(self, user_id: str, sample: KeystrokeSample) -> EnrollmentStatus:
        """Store one enrollment sample; train the template once the
        minimum count is reached. Idempotent on duplicate sample_id."""
        violations = validate_sample(sample)
        if violations:
            raise InvalidSample(violations)
        with self._user_lock(user_id):
            now = _now_iso()
            rec = self._users.get(user_id)
            if rec is None:
                rec = _UserRecord(created=now, updated=now)
                self._users[user_id] = rec
            if any(s.sample_id == sample.sample_id for s in rec.samples):
                return EnrollmentStatus(user_id, len(rec.samples), rec.template is not None)
            if rec.samples and len(sample.events) != len(rec.samples[0].events):
                raise InvalidSample(
                    [
                        f"event count {len(sample.events)} does not match enrollment "
                        f"length {len(rec.samples[0].events)}"
                    ]
                )
            rec.samples.append(sample)
            rec.updated = now
            if rec.template is None and len(rec.samples) >= self.config.min_samples:
                try:
                    rec.template = self._train_template(user_id, rec.samples)
                    rec.training_error = None
                except KeydynError as exc:
                    rec.training_error = f"{type(exc).__name__}: {exc}"
                    self._save()
                    raise TrainingFailed(rec.training_error) from exc
            self._save()
            return EnrollmentStatus(user_id, len(rec.samples), rec.template is not None)

    def verify(self, user_id: str, sample: KeystrokeSample) -> tuple[Decision, float]:
        """Score a probe against the stored template and decide with the
        stored threshold. Every attempt lands in the audit log."""
        violations = validate_sample(sample)
        if violations:
            raise InvalidSample(violations)
        rec = self._users.get(user_id)
        if rec is None:
            raise UnknownUser(f"user {user_id!r} is not enrolled")
        if rec.template is None:
            raise NotTrained(
                f"user {user_id!r} has {len(rec.samples)} of {self.config.min_samples} samples"
            )
        template = rec.template
        try:
            layout = layout_by_name(
                self.config.layout, input_length=len(rec.samples[0].events)
            )
            vector = build_vector(sample, layout)
            score = self._score_with(template, vector)
        except KeydynError as exc:
            raise InvalidSample([f"{type(exc).__name__}: {exc}"]) from exc
        decision = decide(score, template.threshold)
        with self._lock:
            self._audit(
                {
                    "user_id": user_id,
                    "sample_id": sample.sample_id,
                    "score": score,
                    "decision": decision.value,
                }
            )
        return decision, score

    def list_users(self) -> list[EnrollmentStatus]:
        with self._lock:
            return [
                EnrollmentStatus(user_id, len(rec.samples), rec.template is not None)
                for user_id, rec in sorted(self._users.items())
            ]

    def reset(self, user_id: str) -> bool:
        """Remove the user's samples, template, and audit entries."""
        with self._user_lock(user_id):
            if user_id not in self._users:
                raise UnknownUser(f"user {user_id!r} is not enrolled")
            with self._lock:
                del self._users[user_id]
                self._save()
                if self._audit_path.exists():
                    kept = []
                    with self._audit_path.open(encoding="utf-8") as fh:
                        for line in fh:
                            if line.strip() and json.loads(line).get("user_id") != user_id:
                                kept.append(line)
                    with self._audit_path.open("w", encoding="utf-8") as fh:
                        fh.writelines(kept)
            return True


def _now_iso() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


# ---------------------------------------------------------------------------
# HTTP layer


# request schemas live at module level so FastAPI can resolve the
# (PEP 563 stringified) annotations of the route handlers
from pydantic import BaseModel, Field


class EventIn(BaseModel):
    key_label: str
    down_ms: float
    up_ms: float
    pressure: Optional[float] = None
    size: Optional[float] = None
    x: Optional[float] = None
    y: Optional[float] = None


class SampleIn(BaseModel):
    user_id: str = Field(min_length=1)
    sample_id: str = Field(min_length=1)
    events: list[EventIn]


def sample_from_payload(body: SampleIn) -> KeystrokeSample:
    """Wire events carry no key_index; it is assigned by position."""
    events = tuple(
        KeystrokeEvent(
            key_index=i,
            key_label=e.key_label,
            down_ms=e.down_ms,
            up_ms=e.up_ms,
            pressure=e.pressure,
            size=e.size,
            x=e.x,
            y=e.y,
        )
        for i, e in enumerate(body.events)
    )
    return KeystrokeSample(user_id=body.user_id, sample_id=body.sample_id, events=events)


def create_app(service: Optional[KeystrokeService] = None, static_dir: Optional[str] = None):
    """Build the FastAPI app around a service instance.

    Paths: POST /api/enroll, POST /api/verify, GET /api/users,
    DELETE /api/users/{id}, GET /api/health; the capture UI bundle is
    served at / when ``static_dir`` exists.
    """
    from fastapi import FastAPI, Request
    from fastapi.responses import JSONResponse

    svc = service or KeystrokeService()
    app = FastAPI(title="keydyn", version="0.1.0")

    def _error(status: int, code: str, message: str, details=None) -> JSONResponse:
        body = {"error_code": code, "message": message}
        if details is not None:
            body["details"] = details
        return JSONResponse(status_code=status, content=body)

    @app.exception_handler(InvalidSample)
    async def _invalid(request: Request, exc: InvalidSample):
        return _error(400, "invalid_sample", "sample failed validation", exc.violations)

    @app.exception_handler(UnknownUser)
    async def _unknown(request: Request, exc: UnknownUser):
        return _error(404, "unknown_user", str(exc))

    @app.exception_handler(NotTrained)
    async def _untrained(request: Request, exc: NotTrained):
        return _error(409, "not_trained", str(exc))

    @app.exception_handler(TrainingFailed)
    async def _failed(request: Request, exc: TrainingFailed):
        return _error(500, "training_failed", str(exc))

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.post("/api/enroll")
    def enroll(body: SampleIn):
        status = svc.enroll(body.user_id, sample_from_payload(body))
        return {"user_id": status.user_id, "samples": status.samples, "trained": status.trained}

    @app.post("/api/verify")
    def verify(body: SampleIn):
        decision, score = svc.verify(body.user_id, sample_from_payload(body))
        return {"decision": decision.value, "score": score}

    @app.get("/api/users")
    def users():
        return [
            {"user_id": s.user_id, "trained": s.trained, "samples": s.samples}
            for s in svc.list_users()
        ]

    @app.delete("/api/users/{user_id}")
    def reset(user_id: str):
        svc.reset(user_id)
        return {"removed": True, "user_id": user_id}

    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
