"""Keystroke dynamics authentication toolkit.

Pipeline: capture model (KeystrokeEvent/KeystrokeSample) -> preprocessing
(dedup, threshold filter, scaling) -> feature extraction (hold/flight/
digraph intervals plus touch sensors) -> classification (median vector
proximity, distance vector classification, RBF SVM) -> evaluation
(FAR/FRR/EER/FER/FTA, DET curves, EN-50133 compliance), with an
experiment harness, a CLI, and an enroll/verify HTTP service on top.
"""

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
from .errors import KeydynError
from .experiment import (
    Classifier,
    ExperimentConfig,
    QualitativeScheme,
    ThresholdPolicy,
    comparison_report,
    run_experiment,
    split_genuine_impostor,
)
from .features import (
    FeatureKind,
    FeatureLayout,
    FeatureVector,
    aggregate_features,
    build_vector,
    concept1_layout,
    concept2_layout,
    concept3_layout,
    sensor_features,
    timing_features,
)
from .io import CSV_HEADER, load_events_csv, save_events_csv
from .metrics import (
    ConfusionCounts,
    DetCurve,
    RateReport,
    ScoreSet,
    accuracy,
    accuracy_from_eer,
    eer_average,
    eer_intersection,
    en50133_check,
    f1,
    far_rate,
    fer_rate,
    frr_rate,
    fta_rate,
    multi_attempt_far,
    multi_attempt_frr,
    precision,
    recall,
    sweep_rates,
)
from .model import Dataset, KeystrokeEvent, KeystrokeSample, UserTemplate, validate_sample
from .preprocess import (
    ScalerKind,
    ScalerParams,
    apply_scaler,
    euclidean_distance,
    filter_by_threshold,
    fit_scaler,
    manhattan_distance,
    remove_duplicates,
)
from .svm import RbfSvmModel, decision_value, kkt_residual, rbf_kernel, train_svm
from .synth import SyntheticProfile, default_profiles, generate_synthetic

__version__ = "0.1.0"
