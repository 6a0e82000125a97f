from functools import cached_property
from pathlib import Path
from typing import overload

import structlog

from .ingest import load_annotations, load_timeseries
from .models import GroundTruth, TimeSeries

logger = structlog.get_logger(__name__)

TRIAL_FILE = "trial.csv"
ANNOTATION_FILE = "gt.csv"
MIRROR_FILE = "mirror.csv"


class Trial:
    """One recorded trial directory; files are read on first access."""

    def __init__(self, root: Path) -> None:
        self.root = root
        self.subject = root.parent.name
        self.name = root.name

    @property
    def series_path(self) -> Path:
        return self.root / TRIAL_FILE

    @property
    def annotation_path(self) -> Path:
        return self.root / ANNOTATION_FILE

    @property
    def mirror_path(self) -> Path | None:
        path = self.root / MIRROR_FILE
        return path if path.exists() else None

    @cached_property
    def series(self) -> TimeSeries:
        return load_timeseries(self.series_path)

    @cached_property
    def ground_truth(self) -> GroundTruth:
        return load_annotations(self.annotation_path)

    def __repr__(self) -> str:
        return f"Trial({self.subject}/{self.name})"


class TrialDataset:
    """Trials laid out as `root/<subject>/<trial>/`.

    Each trial folder holds trial.csv and gt.csv, and optionally mirror.csv.
    """

    def __init__(self, root: Path) -> None:
        self.root = root
        self.subjects = self._validate()

    def _validate(self) -> dict[str, dict[str, Trial]]:
        data: dict[str, dict[str, Trial]] = {}
        for subject_dir in sorted(self.root.iterdir()):
            if not subject_dir.is_dir():
                continue
            trials: dict[str, Trial] = {}
            for trial_dir in sorted(subject_dir.iterdir()):
                if not trial_dir.is_dir():
                    continue
                missing = [
                    f
                    for f in (TRIAL_FILE, ANNOTATION_FILE)
                    if not (trial_dir / f).exists()
                ]
                if missing:
                    logger.warning(
                        "File not found; skipping",
                        subject=subject_dir.name,
                        trial=trial_dir.name,
                        files=missing,
                    )
                    continue
                trials[trial_dir.name] = Trial(trial_dir)
            if trials:
                data[subject_dir.name] = trials
        logger.info(
            "Loaded dataset",
            root=str(self.root),
            subjects=len(data),
            trials=sum(len(t) for t in data.values()),
        )
        return data

    def __len__(self) -> int:
        return sum(len(trials) for trials in self.subjects.values())

    @overload
    def __getitem__(self, index: str) -> dict[str, Trial]: ...

    @overload
    def __getitem__(self, index: tuple[str, str]) -> Trial: ...

    def __getitem__(self, index: str | tuple[str, str]) -> dict[str, Trial] | Trial:
        if isinstance(index, str):
            return self.subjects[index]
        return self.subjects[index[0]][index[1]]

    def __iter__(self):
        for trials in self.subjects.values():
            yield from trials.values()
