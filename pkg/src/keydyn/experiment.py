"""Experiment orchestration: per-user enroll/verify legs over a dataset,
DET sweeps and EER aggregation, and comparison report emission.

Per target user, the dataset splits chronologically (by sample_id) into
train and genuine-test partitions; the other users' train partitions
supply impostor negatives for discriminative training and their test
partitions supply impostor probes, so no test sample ever reaches a
fitted scaler or model.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .classifiers import (
    score_dvc,
    score_mvp,
    score_svm,
    train_dvc,
    train_mvp,
)
from .errors import InsufficientSamples, KeydynError, SampleTooShort
from .features import FeatureLayout, FeatureVector, build_vector, layout_by_name
from .metrics import (
    RateReport,
    ScoreSet,
    accuracy_from_eer,
    eer_intersection,
    en50133_check,
    fer_rate,
    fta_rate,
    sweep_rates,
)
from .model import Dataset, KeystrokeSample
from .preprocess import ScalerKind, apply_scaler, filter_by_threshold, fit_scaler, remove_duplicates
from .svm import train_svm


class Classifier(str, Enum):
    MVP = "mvp"
    DVC = "dvc"
    SVM = "svm"


class ThresholdPolicy(str, Enum):
    GLOBAL = "global"
    PER_USER = "per_user"


# Pre-processing pairing used by each classification concept when the
# config does not pin a scaler explicitly. The SVM route standardizes
# too: with raw millisecond features the squared distances dwarf
# gamma=1/d and the kernel matrix degenerates to identity.
_DEFAULT_SCALER = {
    Classifier.MVP: ScalerKind.MINMAX,
    Classifier.DVC: ScalerKind.STANDARD,
    Classifier.SVM: ScalerKind.STANDARD,
}


@dataclass
class ExperimentConfig:
    classifier: Classifier = Classifier.DVC
    layout: str = "concept3"
    scaler: Optional[ScalerKind] = None
    threshold_policy: ThresholdPolicy = ThresholdPolicy.PER_USER
    split_ratio: float = 0.7
    seed: int = 0
    dedup: bool = True
    max_hold_ms: float = 1000.0
    max_gap_ms: float = 3000.0
    svm_c: float = 10.0
    svm_gamma: Optional[float] = None
    mvp_k: float = 1.5

    def __post_init__(self):
        self.classifier = Classifier(self.classifier)
        if self.scaler is not None:
            self.scaler = ScalerKind(self.scaler)
        self.threshold_policy = ThresholdPolicy(self.threshold_policy)
        if not (0.0 < self.split_ratio < 1.0):
            raise ValueError("split_ratio must lie strictly between 0 and 1")

    @property
    def effective_scaler(self) -> ScalerKind:
        return self.scaler if self.scaler is not None else _DEFAULT_SCALER[self.classifier]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["classifier"] = self.classifier.value
        d["scaler"] = None if self.scaler is None else self.scaler.value
        d["effective_scaler"] = self.effective_scaler.value
        d["threshold_policy"] = self.threshold_policy.value
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}  # noqa: C416
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def split_samples(samples: Sequence[KeystrokeSample], ratio: float) -> tuple[list, list]:
    """Chronological split by sample_id: first floor(ratio*n) samples
    train (at least one), the remainder tests."""
    ordered = sorted(samples, key=lambda s: s.sample_id)
    n_train = max(1, math.floor(ratio * len(ordered)))
    n_train = min(n_train, len(ordered) - 1)
    return list(ordered[:n_train]), list(ordered[n_train:])


@dataclass
class SplitVectors:
    """Extraction output for one target user."""

    layout: FeatureLayout
    train: list[FeatureVector]
    genuine_test: list[FeatureVector]
    impostor_test: list[FeatureVector]
    impostor_train: list[FeatureVector]
    warnings: list[str] = field(default_factory=list)
    train_failures: int = 0
    genuine_failures: int = 0
    impostor_failures: int = 0


def _extract(samples, layout) -> tuple[list[FeatureVector], int]:
    vectors, failures = [], 0
    for s in samples:
        try:
            vectors.append(build_vector(s, layout))
        except SampleTooShort:
            failures += 1
    return vectors, failures


def resolve_layout(name: str, train_samples: Sequence[KeystrokeSample]) -> FeatureLayout:
    """Instantiate a layout preset; concept2's length parameter comes
    from the shortest training sample so the layout never references
    events the user's own enrollment data cannot provide."""
    if name == "concept2":
        x = min(len(s.events) for s in train_samples)
        return layout_by_name(name, input_length=x)
    return layout_by_name(name)


def split_genuine_impostor(
    dataset: Dataset, target_user: str, config: ExperimentConfig
) -> SplitVectors:
    """Partition and extract vectors for one target user.

    Partitions are disjoint: the target's samples split into train and
    genuine-test; every other user's samples split the same way into
    impostor-train (discriminative negatives) and impostor-test probes.
    """
    target = dataset.samples_for(target_user)
    if len(target) < 2:
        raise InsufficientSamples(f"user {target_user!r} has {len(target)} samples, needs at least 2")
    train_samples, genuine_samples = split_samples(target, config.split_ratio)
    layout = resolve_layout(config.layout, train_samples)

    train, train_failures = _extract(train_samples, layout)
    genuine, genuine_failures = _extract(genuine_samples, layout)

    impostor_train: list[FeatureVector] = []
    impostor_test: list[FeatureVector] = []
    impostor_failures = 0
    warnings: list[str] = []
    others = [u for u in dataset.user_ids() if u != target_user]
    if not others:
        warnings.append("NoImpostors: dataset contains a single user")
    for user in others:
        samples = dataset.samples_for(user)
        if len(samples) < 2:
            vectors, fails = _extract(samples, layout)
            impostor_test.extend(vectors)
            impostor_failures += fails
            continue
        other_train, other_test = split_samples(samples, config.split_ratio)
        vectors, fails = _extract(other_train, layout)
        impostor_train.extend(vectors)
        impostor_failures += fails
        vectors, fails = _extract(other_test, layout)
        impostor_test.extend(vectors)
        impostor_failures += fails

    return SplitVectors(
        layout=layout,
        train=train,
        genuine_test=genuine,
        impostor_test=impostor_test,
        impostor_train=impostor_train,
        warnings=warnings,
        train_failures=train_failures,
        genuine_failures=genuine_failures,
        impostor_failures=impostor_failures,
    )


def _train_and_scorer(config: ExperimentConfig, split: SplitVectors):
    """Fit scaler + model on training partitions only; return a probe scorer."""
    scaler = fit_scaler(split.train, config.effective_scaler)
    train_scaled = [apply_scaler(v, scaler) for v in split.train]

    if config.classifier is Classifier.MVP:
        model = train_mvp(train_scaled)
        return scaler, model, lambda v: score_mvp(model, v, k=config.mvp_k)
    if config.classifier is Classifier.DVC:
        model = train_dvc(train_scaled)
        return scaler, model, lambda v: score_dvc(model, v)
    if not split.impostor_train:
        raise InsufficientSamples("SVM training needs impostor negatives from other users")
    negatives = [apply_scaler(v, scaler) for v in split.impostor_train]
    model = train_svm(train_scaled, negatives, C=config.svm_c, gamma=config.svm_gamma)
    return scaler, model, lambda v: score_svm(model, v)


@dataclass
class UserResult:
    user_id: str
    report: RateReport
    n_train: int
    n_genuine: int
    n_impostor: int
    warnings: list[str]
    # rates at the pooled (global) threshold, filled under GLOBAL policy
    global_far: Optional[float] = None
    global_frr: Optional[float] = None


@dataclass
class ExperimentReport:
    """Per-user rate reports plus run-level aggregation and config echo."""

    config: dict
    layout_id: str
    feature_count: int
    users: list[UserResult]
    enrollment_failures: dict[str, str]
    acquisition_failures: dict[str, str]
    mean_eer: float
    pooled_eer: float
    pooled_threshold: float
    accuracy: float
    mean_far: float
    mean_frr: float
    en50133_far_ok: bool
    en50133_frr_ok: bool
    fer: float
    fta: float
    skipped_impostor_probes: int

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "layout_id": self.layout_id,
            "feature_count": self.feature_count,
            "users": [
                {
                    "user_id": u.user_id,
                    "eer": u.report.eer,
                    "threshold_at_eer": u.report.threshold_at_eer,
                    "far": u.report.far,
                    "frr": u.report.frr,
                    "en50133_far_ok": u.report.en50133_far_ok,
                    "en50133_frr_ok": u.report.en50133_frr_ok,
                    "n_train": u.n_train,
                    "n_genuine": u.n_genuine,
                    "n_impostor": u.n_impostor,
                    "warnings": u.warnings,
                    "global_far": u.global_far,
                    "global_frr": u.global_frr,
                }
                for u in self.users
            ],
            "enrollment_failures": self.enrollment_failures,
            "acquisition_failures": self.acquisition_failures,
            "aggregate": {
                "mean_eer": self.mean_eer,
                "pooled_eer": self.pooled_eer,
                "pooled_threshold": self.pooled_threshold,
                "accuracy": self.accuracy,
                "mean_far": self.mean_far,
                "mean_frr": self.mean_frr,
                "en50133_far_ok": self.en50133_far_ok,
                "en50133_frr_ok": self.en50133_frr_ok,
                "fer": self.fer,
                "fta": self.fta,
                "skipped_impostor_probes": self.skipped_impostor_probes,
            },
        }

    def to_machine_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"

    def to_human_text(self) -> str:
        lines = [
            f"classifier={self.config['classifier']} layout={self.layout_id} "
            f"features={self.feature_count} scaler={self.config['effective_scaler']} "
            f"seed={self.config['seed']}",
            "",
            f"{'user':<12} {'EER':>8} {'FAR':>8} {'FRR':>8} {'thresh':>12} {'genuine':>8} {'impostor':>9}",
        ]
        for u in self.users:
            r = u.report
            lines.append(
                f"{u.user_id:<12} {r.eer:>8.4f} {r.far:>8.4f} {r.frr:>8.4f} "
                f"{r.threshold_at_eer:>12.5g} {u.n_genuine:>8} {u.n_impostor:>9}"
            )
        lines += [
            "",
            f"mean EER          {self.mean_eer:.4f}   (accuracy {self.accuracy:.4f})",
            f"pooled EER        {self.pooled_eer:.4f}   (threshold {self.pooled_threshold:.5g})",
            f"EN-50133          FAR {'ok' if self.en50133_far_ok else 'FAIL'}, "
            f"FRR {'ok' if self.en50133_frr_ok else 'FAIL'}",
            f"FER {self.fer:.4f}   FTA {self.fta:.4f}",
        ]
        if self.enrollment_failures:
            lines.append(f"enrollment failures: {self.enrollment_failures}")
        if self.acquisition_failures:
            lines.append(f"acquisition failures: {self.acquisition_failures}")
        return "\n".join(lines) + "\n"


def _user_rate_report(scores: ScoreSet) -> RateReport:
    curve = sweep_rates(scores)
    eer, tau = eer_intersection(scores)
    far = float(np.mean(scores.impostor <= tau))
    frr = float(np.mean(scores.genuine > tau))
    far_ok, frr_ok = en50133_check(far, frr)
    return RateReport(
        far=far,
        frr=frr,
        eer=eer,
        threshold_at_eer=tau,
        en50133_far_ok=far_ok,
        en50133_frr_ok=frr_ok,
        det_curve=curve,
    )


def run_experiment(dataset: Dataset, config: ExperimentConfig) -> ExperimentReport:
    """Run the full verification experiment over every user.

    Per-user failures never abort the run: enrollment failures (cannot
    train a template) count into FER, acquisition failures (trained but
    no usable genuine probe) into FTA.
    """
    ds = remove_duplicates(dataset) if config.dedup else dataset
    ds = filter_by_threshold(ds, config.max_hold_ms, config.max_gap_ms)
    users = sorted(ds.user_ids())
    if len(users) < 2:
        raise InsufficientSamples("an experiment needs at least two users for FAR to be defined")

    results: list[UserResult] = []
    enrollment_failures: dict[str, str] = {}
    acquisition_failures: dict[str, str] = {}
    skipped_impostors = 0
    pooled_genuine: list[np.ndarray] = []
    pooled_impostor: list[np.ndarray] = []
    layout_id = ""
    feature_count = 0

    for user in users:
        try:
            split = split_genuine_impostor(ds, user, config)
            if not split.train:
                raise InsufficientSamples("no training sample fits the layout")
            scaler, model, scorer = _train_and_scorer(config, split)
        except KeydynError as exc:
            enrollment_failures[user] = f"{type(exc).__name__}: {exc}"
            continue
        layout_id = split.layout.layout_id
        feature_count = len(split.layout)
        skipped_impostors += split.impostor_failures

        genuine_scores = [scorer(apply_scaler(v, scaler)) for v in split.genuine_test]
        impostor_scores = [scorer(apply_scaler(v, scaler)) for v in split.impostor_test]
        if split.genuine_failures or not genuine_scores:
            if not genuine_scores:
                acquisition_failures[user] = "no genuine probe fits the layout"
                continue
            acquisition_failures[user] = f"{split.genuine_failures} genuine probes failed extraction"
        if not impostor_scores:
            acquisition_failures.setdefault(user, "no impostor probes available")
            continue

        scores = ScoreSet(genuine=np.array(genuine_scores), impostor=np.array(impostor_scores))
        results.append(
            UserResult(
                user_id=user,
                report=_user_rate_report(scores),
                n_train=len(split.train),
                n_genuine=len(genuine_scores),
                n_impostor=len(impostor_scores),
                warnings=split.warnings,
            )
        )
        pooled_genuine.append(scores.genuine)
        pooled_impostor.append(scores.impostor)

    if results:
        eers = np.array([u.report.eer for u in results])
        mean_eer = float(eers.mean())
        mean_far = float(np.mean([u.report.far for u in results]))
        mean_frr = float(np.mean([u.report.frr for u in results]))
        pooled = ScoreSet(
            genuine=np.concatenate(pooled_genuine), impostor=np.concatenate(pooled_impostor)
        )
        pooled_eer, pooled_tau = eer_intersection(pooled)
        if config.threshold_policy is ThresholdPolicy.GLOBAL:
            # one shared operating point: per-user rates at the pooled threshold
            for u, genuine, impostor in zip(results, pooled_genuine, pooled_impostor):
                u.global_far = float(np.sum(impostor <= pooled_tau) / len(impostor))
                u.global_frr = float(np.sum(genuine > pooled_tau) / len(genuine))
            mean_far = float(np.mean([u.global_far for u in results]))
            mean_frr = float(np.mean([u.global_frr for u in results]))
    else:
        mean_eer = mean_far = mean_frr = float("nan")
        pooled_eer, pooled_tau = float("nan"), float("nan")

    far_ok, frr_ok = en50133_check(mean_far, mean_frr) if results else (False, False)
    return ExperimentReport(
        config=config.to_dict(),
        layout_id=layout_id,
        feature_count=feature_count,
        users=results,
        enrollment_failures=enrollment_failures,
        acquisition_failures=acquisition_failures,
        mean_eer=mean_eer,
        pooled_eer=pooled_eer,
        pooled_threshold=pooled_tau,
        accuracy=accuracy_from_eer(mean_eer) if results else float("nan"),
        mean_far=mean_far,
        mean_frr=mean_frr,
        en50133_far_ok=far_ok,
        en50133_frr_ok=frr_ok,
        fer=fer_rate(len(enrollment_failures), len(users)),
        fta=fta_rate(len(acquisition_failures), len(users)),
        skipped_impostor_probes=skipped_impostors,
    )


class ImitationCategory(str, Enum):
    OPEN = "OPEN"
    SLIGHTLY_HIDDEN = "SLIGHTLY_HIDDEN"
    COVERT = "COVERT"
    SEVERELY_HIDDEN = "SEVERELY_HIDDEN"


class AttackEffort(str, Enum):
    LOW = "LOW"
    MEDIUM = "MEDIUM"
    HIGH = "HIGH"


@dataclass(frozen=True)
class QualitativeScheme:
    """User-supplied qualitative ratings; never inferred from data."""

    comfort: str
    accuracy_rating: str
    availability: str
    cost: str
    imitation_category: ImitationCategory
    attack_effort: AttackEffort

    def to_dict(self) -> dict:
        return {
            "comfort": self.comfort,
            "accuracy_rating": self.accuracy_rating,
            "availability": self.availability,
            "cost": self.cost,
            "imitation_category": ImitationCategory(self.imitation_category).value,
            "attack_effort": AttackEffort(self.attack_effort).value,
        }


def comparison_report(
    reports: Sequence[ExperimentReport], scheme: Optional[QualitativeScheme] = None
) -> dict:
    """Merge experiment runs into a comparison document: one row per run
    (classifier, feature count, EER, derived accuracy, compliance flags)
    plus the qualitative rating block when supplied."""
    if not reports:
        raise ValueError("at least one report is required")
    rows = []
    for r in reports:
        rows.append(
            {
                "classifier": r.config["classifier"],
                "layout_id": r.layout_id,
                "feature_count": r.feature_count,
                "mean_eer": r.mean_eer,
                "accuracy": accuracy_from_eer(r.mean_eer) if math.isfinite(r.mean_eer) else None,
                "en50133_far_ok": r.en50133_far_ok,
                "en50133_frr_ok": r.en50133_frr_ok,
                "fer": r.fer,
                "fta": r.fta,
            }
        )
    doc: dict = {"rows": rows}
    if scheme is None:
        doc["qualitative"] = None
        doc["notice"] = "qualitative ratings not supplied; block omitted"
    else:
        doc["qualitative"] = scheme.to_dict()
    return doc


def comparison_to_machine_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def comparison_to_human_text(doc: dict) -> str:
    lines = [
        f"{'classifier':<12} {'layout':<14} {'features':>8} {'mean EER':>9} "
        f"{'accuracy':>9} {'FAR ok':>7} {'FRR ok':>7}"
    ]
    for row in doc["rows"]:
        acc = f"{row['accuracy']:.4f}" if row["accuracy"] is not None else "n/a"
        lines.append(
            f"{row['classifier']:<12} {row['layout_id']:<14} {row['feature_count']:>8} "
            f"{row['mean_eer']:>9.4f} {acc:>9} "
            f"{'yes' if row['en50133_far_ok'] else 'no':>7} "
            f"{'yes' if row['en50133_frr_ok'] else 'no':>7}"
        )
    if doc.get("qualitative"):
        q = doc["qualitative"]
        lines += [
            "",
            "qualitative ratings:",
            f"  comfort      {q['comfort']}",
            f"  accuracy     {q['accuracy_rating']}",
            f"  availability {q['availability']}",
            f"  cost         {q['cost']}",
            f"  imitation    {q['imitation_category']}",
            f"  attack       {q['attack_effort']}",
        ]
    else:
        lines += ["", doc.get("notice", "")]
    return "\n".join(lines) + "\n"
