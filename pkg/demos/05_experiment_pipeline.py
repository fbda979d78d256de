"""Full experiment: synthesize typists, run the verification pipeline per
user, and aggregate into a comparison document.

Run: python3 demos/05_experiment_pipeline.py
"""

from keydyn import ExperimentConfig, QualitativeScheme, comparison_report, run_experiment
from keydyn.experiment import (
    AttackEffort,
    ImitationCategory,
    comparison_to_human_text,
)
from keydyn.synth import SyntheticProfile, generate_synthetic

# five synthetic typists with clearly different hold times
profiles = [
    SyntheticProfile(
        user_id=f"user{i}",
        text=".tie5Roanl",
        hold_mean_ms=60.0 + 60.0 * i,
        hold_std_ms=12.0,
        flight_mean_ms=150.0,
        flight_std_ms=25.0,
    )
    for i in range(5)
]
dataset = generate_synthetic(profiles, samples_per_user=20, seed=42)
print(f"dataset: {len(dataset.samples)} samples, text {dataset.expected_text!r}")
print()

reports = []
for classifier in ("mvp", "dvc", "svm"):
    config = ExperimentConfig(classifier=classifier, layout="concept3", split_ratio=0.5, seed=42)
    report = run_experiment(dataset, config)
    reports.append(report)
    print(f"{classifier}: mean EER {report.mean_eer:.4f} "
          f"(accuracy {report.accuracy:.4f}), FER {report.fer:.2f}, FTA {report.fta:.2f}")
print()

scheme = QualitativeScheme(
    comfort="high (nothing extra to carry or learn)",
    accuracy_rating="medium (rhythm alone overlaps across people)",
    availability="broad (any keyboard or touchscreen)",
    cost="low (software only)",
    imitation_category=ImitationCategory.SEVERELY_HIDDEN,
    attack_effort=AttackEffort.MEDIUM,
)
print(comparison_to_human_text(comparison_report(reports, scheme)))
