"""Command-line interface.

Subcommands: gen (synthetic dataset -> CSV), run (experiment -> report),
sweep (pooled DET curve export), report (merge runs into a comparison
document), serve (start the enroll/verify service).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .experiment import (
    ExperimentConfig,
    QualitativeScheme,
    comparison_report,
    comparison_to_human_text,
    comparison_to_machine_json,
    run_experiment,
)
from .io import load_events_csv, save_events_csv
from .metrics import ScoreSet, sweep_rates
from .synth import default_profiles, generate_synthetic


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", type=Path, help="JSON config file with experiment fields")
    parser.add_argument("--seed", type=int, help="random seed (echoed into reports)")
    parser.add_argument("--classifier", choices=["mvp", "dvc", "svm"])
    parser.add_argument("--layout", choices=["concept1", "concept2", "concept3"])
    parser.add_argument("--out", type=Path, help="output path (default: stdout)")
    parser.add_argument("--format", choices=["human", "machine"], default="human")


def _load_config(args) -> ExperimentConfig:
    if args.config:
        config = ExperimentConfig.from_json(args.config)
    else:
        config = ExperimentConfig()
    if getattr(args, "classifier", None):
        config.classifier = type(config.classifier)(args.classifier)
    if getattr(args, "layout", None):
        config.layout = args.layout
    if getattr(args, "seed", None) is not None:
        config.seed = args.seed
    return config


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _cmd_gen(args) -> int:
    seed = args.seed if args.seed is not None else 0
    profiles = default_profiles(args.users, text=args.text)
    dataset = generate_synthetic(profiles, args.samples_per_user, seed)
    save_events_csv(dataset, args.out)
    print(f"wrote {len(dataset.samples)} samples for {args.users} users to {args.out}")
    return 0


def _cmd_run(args) -> int:
    config = _load_config(args)
    dataset = load_events_csv(args.data)
    report = run_experiment(dataset, config)
    text = report.to_machine_json() if args.format == "machine" else report.to_human_text()
    _emit(text, args.out)
    return 0


def _cmd_sweep(args) -> int:
    config = _load_config(args)
    dataset = load_events_csv(args.data)
    pooled = _pooled_scores(dataset, config)
    curve = sweep_rates(pooled)
    _emit(curve.to_text(), args.out)
    return 0


def _pooled_scores(dataset, config) -> ScoreSet:
    from .experiment import _train_and_scorer, split_genuine_impostor
    from .preprocess import apply_scaler, filter_by_threshold, remove_duplicates

    ds = remove_duplicates(dataset) if config.dedup else dataset
    ds = filter_by_threshold(ds, config.max_hold_ms, config.max_gap_ms)
    genuine, impostor = [], []
    for user in sorted(ds.user_ids()):
        try:
            split = split_genuine_impostor(ds, user, config)
            scaler, model, scorer = _train_and_scorer(config, split)
        except Exception:
            continue
        genuine.extend(scorer(apply_scaler(v, scaler)) for v in split.genuine_test)
        impostor.extend(scorer(apply_scaler(v, scaler)) for v in split.impostor_test)
    return ScoreSet(genuine=np.array(genuine), impostor=np.array(impostor))


def _cmd_report(args) -> int:
    reports = []
    for path in args.runs:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        reports.append(_report_from_dict(data))
    scheme = None
    if args.qualitative:
        with open(args.qualitative, encoding="utf-8") as fh:
            scheme = QualitativeScheme(**json.load(fh))
    doc = comparison_report(reports, scheme)
    text = (
        comparison_to_machine_json(doc)
        if args.format == "machine"
        else comparison_to_human_text(doc)
    )
    _emit(text, args.out)
    return 0


def _report_from_dict(data: dict):
    # Comparison rows only need run-level fields; per-user curves are not
    # round-tripped through JSON.
    from .experiment import ExperimentReport

    agg = data["aggregate"]
    return ExperimentReport(
        config=data["config"],
        layout_id=data["layout_id"],
        feature_count=data["feature_count"],
        users=[],
        enrollment_failures=data["enrollment_failures"],
        acquisition_failures=data["acquisition_failures"],
        mean_eer=agg["mean_eer"],
        pooled_eer=agg["pooled_eer"],
        pooled_threshold=agg["pooled_threshold"],
        accuracy=agg["accuracy"],
        mean_far=agg["mean_far"],
        mean_frr=agg["mean_frr"],
        en50133_far_ok=agg["en50133_far_ok"],
        en50133_frr_ok=agg["en50133_frr_ok"],
        fer=agg["fer"],
        fta=agg["fta"],
        skipped_impostor_probes=agg["skipped_impostor_probes"],
    )


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import KeystrokeService, ServiceConfig, create_app

    config = ServiceConfig(store_dir=str(args.store))
    if args.classifier:
        config.classifier = args.classifier
    service = KeystrokeService(config)
    app = create_app(service, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="keydyn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a synthetic dataset CSV")
    _add_common(p_gen)
    p_gen.add_argument("--users", type=int, default=5)
    p_gen.add_argument("--samples-per-user", type=int, default=20)
    p_gen.add_argument("--text", default=".tie5Roanl")
    p_gen.set_defaults(func=_cmd_gen)

    p_run = sub.add_parser("run", help="run a verification experiment over a CSV dataset")
    p_run.add_argument("data", type=Path, help="event CSV path")
    _add_common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="export the pooled DET curve as 3-column text")
    p_sweep.add_argument("data", type=Path, help="event CSV path")
    _add_common(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_report = sub.add_parser("report", help="merge machine run reports into a comparison")
    p_report.add_argument("runs", nargs="+", type=Path, help="machine-format run reports")
    _add_common(p_report)
    p_report.add_argument("--qualitative", type=Path, help="JSON file with qualitative ratings")
    p_report.set_defaults(func=_cmd_report)

    p_serve = sub.add_parser("serve", help="start the enroll/verify HTTP service")
    _add_common(p_serve)
    p_serve.add_argument("--store", type=Path, default=Path("keydyn-store"))
    p_serve.add_argument("--static", type=Path, default=None, help="capture UI bundle directory")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surfaced as a clean one-liner, not a traceback
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
