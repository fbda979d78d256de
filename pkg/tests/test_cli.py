import json

from keydyn.cli import main
from keydyn.io import load_events_csv


def _gen(tmp_path, name="data.csv", users=3, samples=10, seed=7):
    out = tmp_path / name
    rc = main(
        [
            "gen",
            "--users",
            str(users),
            "--samples-per-user",
            str(samples),
            "--seed",
            str(seed),
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    return out


def test_gen_writes_loadable_csv(tmp_path):
    out = _gen(tmp_path)
    ds = load_events_csv(out)
    assert len(ds.user_ids()) == 3
    assert len(ds.samples) == 30


def test_run_machine_report(tmp_path):
    data = _gen(tmp_path)
    out = tmp_path / "report.json"
    rc = main(
        ["run", str(data), "--classifier", "dvc", "--layout", "concept3",
         "--seed", "7", "--format", "machine", "--out", str(out)]
    )
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["config"]["classifier"] == "dvc"
    assert 0.0 <= report["aggregate"]["mean_eer"] <= 1.0


def test_run_is_byte_deterministic(tmp_path):
    data = _gen(tmp_path)
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    args = ["run", str(data), "--classifier", "dvc", "--layout", "concept3",
            "--seed", "7", "--format", "machine"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_run_human_format(tmp_path, capsys):
    data = _gen(tmp_path)
    assert main(["run", str(data), "--classifier", "dvc", "--layout", "concept3"]) == 0
    captured = capsys.readouterr()
    assert "mean EER" in captured.out


def test_sweep_exports_three_columns(tmp_path):
    data = _gen(tmp_path)
    out = tmp_path / "det.txt"
    assert main(["sweep", str(data), "--classifier", "dvc", "--layout", "concept3",
                 "--out", str(out)]) == 0
    rows = [line.split("\t") for line in out.read_text().strip().split("\n")]
    assert all(len(r) == 3 for r in rows)
    taus = [float(r[0]) for r in rows]
    assert taus == sorted(taus)


def test_report_merges_runs(tmp_path):
    data = _gen(tmp_path)
    runs = []
    for classifier in ("mvp", "dvc"):
        out = tmp_path / f"{classifier}.json"
        main(["run", str(data), "--classifier", classifier, "--layout", "concept3",
              "--format", "machine", "--out", str(out)])
        runs.append(str(out))
    merged = tmp_path / "comparison.json"
    assert main(["report", *runs, "--format", "machine", "--out", str(merged)]) == 0
    doc = json.loads(merged.read_text())
    assert [row["classifier"] for row in doc["rows"]] == ["mvp", "dvc"]


def test_report_with_qualitative_file(tmp_path):
    data = _gen(tmp_path)
    run_out = tmp_path / "run.json"
    main(["run", str(data), "--classifier", "dvc", "--layout", "concept3",
          "--format", "machine", "--out", str(run_out)])
    ratings = tmp_path / "ratings.json"
    ratings.write_text(json.dumps({
        "comfort": "high", "accuracy_rating": "medium", "availability": "broad",
        "cost": "low", "imitation_category": "SEVERELY_HIDDEN", "attack_effort": "MEDIUM",
    }))
    merged = tmp_path / "cmp.txt"
    assert main(["report", str(run_out), "--qualitative", str(ratings),
                 "--out", str(merged)]) == 0
    assert "imitation" in merged.read_text()


def test_config_file_drives_run(tmp_path):
    data = _gen(tmp_path)
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"classifier": "dvc", "layout": "concept3", "split_ratio": 0.5}))
    out = tmp_path / "report.json"
    assert main(["run", str(data), "--config", str(config), "--format", "machine",
                 "--out", str(out)]) == 0
    assert json.loads(out.read_text())["config"]["split_ratio"] == 0.5


def test_unknown_config_key_fails_cleanly(tmp_path, capsys):
    data = _gen(tmp_path)
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"classifier": "dvc", "nonsense": True}))
    assert main(["run", str(data), "--config", str(config)]) == 1
    assert "unknown config keys" in capsys.readouterr().err


def test_missing_data_fails_cleanly(tmp_path, capsys):
    assert main(["run", str(tmp_path / "absent.csv")]) == 1
    assert "error" in capsys.readouterr().err
