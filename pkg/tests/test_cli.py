from __future__ import annotations

import json
from pathlib import Path

import pandas as pd
import pytest
from click.testing import CliRunner

from motionseg.cli import cli

PLAIN = ["-R", "0.225", "--offsets", "0", "--no-bundling"]


def _json(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def fix_b_trial(runner: CliRunner, tmp_path: Path) -> tuple[Path, Path]:
    trial = tmp_path / "fixB" / "trial.csv"
    outcome = runner.invoke(cli, ["synth", "-f", "fixB", "-o", str(trial)])
    assert outcome.exit_code == 0, outcome.output
    return trial, trial.with_name("gt.csv")


def test_segment_then_evaluate_render_and_cluster(
    runner: CliRunner, fix_b_trial, tmp_path: Path
):
    trial, gt = fix_b_trial
    out = tmp_path / "out"
    outcome = runner.invoke(cli, ["segment", "-i", str(trial), "-o", str(out), *PLAIN])
    assert outcome.exit_code == 0, outcome.output
    assert "primitives in" in outcome.output
    seg = out / "seg.json"
    assert _json(seg)["meta"]["input"] == "trial.csv"

    outcome = runner.invoke(
        cli, ["eval", "-s", str(seg), "-g", str(gt), "-i", str(trial), *PLAIN]
    )
    assert outcome.exit_code == 0, outcome.output
    assert "strict accuracy" in outcome.output
    report = _json(out / "eval.json")
    assert report["tolerant_accuracy"] >= report["strict_accuracy"]
    overlap = report["overlap"]
    assert f"{overlap['overlap_mean']:.1f}% ± {overlap['overlap_std']:.1f}" in (
        outcome.output
    )

    rendered = tmp_path / "rendered"
    outcome = runner.invoke(
        cli,
        [
            "render", "-s", str(seg), "-i", str(trial), "-g", str(gt),
            "-o", str(rendered), "--png", *PLAIN,
        ],
    )  # fmt: skip
    assert outcome.exit_code == 0, outcome.output
    for name in ("sssm.pgm", "sssm.png", "timeline.svg"):
        assert (rendered / name).exists()

    again = tmp_path / "again"
    outcome = runner.invoke(
        cli, ["cluster", "-s", str(seg), "-i", str(trial), "-o", str(again), *PLAIN]
    )
    assert outcome.exit_code == 0, outcome.output
    assert "cluster 0:" in outcome.output
    assert _json(again / "seg.json")["clusters"] == _json(seg)["clusters"]


def test_gait_symmetry_from_the_command_line(runner: CliRunner, tmp_path: Path):
    trial = tmp_path / "gait" / "trial.csv"
    assert runner.invoke(cli, ["synth", "-f", "gait", "-o", str(trial)]).exit_code == 0
    mirror = trial.with_name("mirror.csv")
    assert mirror.exists()
    outcome = runner.invoke(
        cli,
        [
            "segment", "-i", str(trial), "-o", str(tmp_path / "out"),
            "-R", "0.1", "--offsets", "0", "--no-bundling",
            "--symmetry", "--mirror-map", str(mirror),
        ],
    )  # fmt: skip
    assert outcome.exit_code == 0, outcome.output
    assert "activity 0: phase_shifted" in outcome.output


def test_sweep_writes_grids(runner: CliRunner, fix_b_trial, tmp_path: Path):
    trial, gt = fix_b_trial
    out = tmp_path / "sweep"
    outcome = runner.invoke(
        cli,
        [
            "sweep", "-i", str(trial), "-g", str(gt),
            "--radii", "0.2,0.25", "--offsets", "0",
            "--stop-windows", "4,8", "--no-bundling", "-o", str(out),
        ],
    )  # fmt: skip
    assert outcome.exit_code == 0, outcome.output
    grid = pd.read_csv(out / "accuracy_strict.csv", index_col=0)
    assert grid.shape == (1, 2)
    assert (out / "accuracy_tolerant.svg").exists()
    assert len(pd.read_csv(out / "stop_window.csv")) == 2


def test_sweep_needs_something_to_vary(runner: CliRunner, fix_b_trial, tmp_path: Path):
    trial, gt = fix_b_trial
    outcome = runner.invoke(
        cli, ["sweep", "-i", str(trial), "-g", str(gt), "-o", str(tmp_path / "sweep")]
    )
    assert outcome.exit_code == 2


def test_invalid_config_is_reported(runner: CliRunner, fix_b_trial, tmp_path: Path):
    trial, _ = fix_b_trial
    bad = tmp_path / "bad.toml"
    bad.write_text("slope_limit = 0.5\n", encoding="utf-8")
    outcome = runner.invoke(cli, ["segment", "-i", str(trial), "-c", str(bad)])
    assert outcome.exit_code == 1
    assert "[config]" in outcome.output


def test_malformed_input_is_reported(runner: CliRunner, tmp_path: Path):
    trial = tmp_path / "trial.csv"
    trial.write_text("# rate=30\na,b\n1,2\n3,oops\n", encoding="utf-8")
    outcome = runner.invoke(
        cli, ["segment", "-i", str(trial), "-o", str(tmp_path / "out"), *PLAIN]
    )
    assert outcome.exit_code == 1
    assert "[ingest]" in outcome.output


def test_ragged_row_is_reported_with_its_number(runner: CliRunner, tmp_path: Path):
    trial = tmp_path / "trial.csv"
    trial.write_text("# rate=30\na,b\n1,2\n3,4\n5,6,7\n", encoding="utf-8")
    outcome = runner.invoke(
        cli, ["segment", "-i", str(trial), "-o", str(tmp_path / "out"), *PLAIN]
    )
    assert outcome.exit_code == 1
    assert "expected 2 columns" in outcome.output
    assert "row=3" in outcome.output


def test_batch_summarizes_complete_trials(runner: CliRunner, tmp_path: Path):
    data = tmp_path / "data"
    trial = data / "s01" / "t01" / "trial.csv"
    assert runner.invoke(cli, ["synth", "-f", "fixA", "-o", str(trial)]).exit_code == 0
    incomplete = data / "s01" / "t02"
    incomplete.mkdir(parents=True)
    (incomplete / "trial.csv").write_text(
        trial.read_text(encoding="utf-8"), encoding="utf-8"
    )
    out = tmp_path / "results"
    outcome = runner.invoke(cli, ["batch", "-d", str(data), "-o", str(out), *PLAIN])
    assert outcome.exit_code == 0, outcome.output
    summary = pd.read_csv(out / "summary.csv")
    assert summary["trial"].tolist() == ["t01"]
    assert (out / "s01" / "t01" / "seg.json").exists()
