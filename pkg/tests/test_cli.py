"""CLI subcommands end to end on a small data directory."""

from __future__ import annotations

import json

import pytest

from esmkit.service.cli import main


@pytest.fixture(scope="module")
def demo_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "demo"
    rc = main(["demo", "--out", str(out), "--size", "4", "--days", "10", "--seed", "4"])
    assert rc == 0
    return out


def test_demo_produces_data_directory(demo_dir):
    assert (demo_dir / "stm.log").exists()
    assert (demo_dir / "ltm.log").exists()
    assert (demo_dir / "dataset.jsonl").exists()
    assert (demo_dir / "models" / "current.json").exists()
    run = json.loads((demo_dir / "run.json").read_text())
    assert run["policy"] == "adaptive"
    assert len(run["participants"]) == 4


def test_simulate_fixed_policy(tmp_path, capsys):
    rc = main(
        [
            "simulate",
            "--policy",
            "fixed",
            "--days",
            "2",
            "--size",
            "2",
            "--seed",
            "5",
            "--out",
            str(tmp_path / "sim"),
        ]
    )
    assert rc == 0
    metrics = json.loads(capsys.readouterr().out)
    assert metrics["delivered"] > 0


def test_train_prints_metric_table(demo_dir, tmp_path, capsys):
    out = tmp_path / "metrics.txt"
    rc = main(["train", "--data-dir", str(demo_dir), "--family", "gaussian_nb", "--out", str(out)])
    assert rc == 0
    printed = capsys.readouterr().out
    assert "gaussian_nb" in printed
    for column in ("accuracy", "kappa", "precision", "recall", "f1", "auc"):
        assert column in printed
    assert out.read_text().strip() == printed.strip()


def test_report_writes_tables(demo_dir, tmp_path):
    out = tmp_path / "report"
    rc = main(["report", "--data-dir", str(demo_dir), "--out", str(out)])
    assert rc == 0
    summaries = (out / "summaries.tsv").read_text().splitlines()
    assert summaries[0].startswith("participant\tday\tsent")
    assert len(summaries) > 1
    compare = (out / "compare_answered.tsv").read_text().splitlines()
    assert len(compare) == 5  # header + 4 participants
    ranking = (out / "ranking.tsv").read_text().splitlines()
    assert ranking[0] == "participant\tcontribution"
