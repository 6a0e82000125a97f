from __future__ import annotations

from pathlib import Path

from motionseg.dataset import TrialDataset

from .conftest import write_trial


def test_incomplete_trials_are_skipped(fix_a, tmp_path: Path):
    write_trial(fix_a, tmp_path / "s01" / "walk")
    write_trial(fix_a, tmp_path / "s02" / "run")
    mirror = tmp_path / "s02" / "run" / "mirror.csv"
    mirror.write_text("left,right\nc0,c1\n", encoding="utf-8")
    (tmp_path / "s02" / "jump").mkdir()
    (tmp_path / "s02" / "jump" / "trial.csv").write_text("", encoding="utf-8")
    (tmp_path / "s03" / "empty").mkdir(parents=True)
    (tmp_path / "notes.txt").write_text("ignored", encoding="utf-8")

    dataset = TrialDataset(tmp_path)
    assert len(dataset) == 2
    assert list(dataset.subjects) == ["s01", "s02"]
    assert list(dataset["s02"]) == ["run"]
    assert [repr(t) for t in dataset] == ["Trial(s01/walk)", "Trial(s02/run)"]

    walk = dataset["s01", "walk"]
    assert walk.mirror_path is None
    assert dataset["s02", "run"].mirror_path == tmp_path / "s02" / "run" / "mirror.csv"
    assert walk.series.frame_count == fix_a.series.frame_count
    assert walk.ground_truth == fix_a.truth
