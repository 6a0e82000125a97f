from __future__ import annotations

import json
import logging
from collections.abc import Iterator
from pathlib import Path

import numpy as np
import pytest
import structlog

from motionseg.log import default_logging_setup
from motionseg.log.processors import rich_console_processor


@pytest.fixture
def restore_logging() -> Iterator[None]:
    yield
    root = logging.getLogger()
    for handler in root.handlers:
        handler.close()
    root.handlers.clear()


@pytest.mark.usefixtures("restore_logging")
def test_file_handler_writes_json_lines(tmp_path: Path):
    path = tmp_path / "logs" / "run.log"
    default_logging_setup(
        filename=str(path), filename_add_timestamp=False, handlers="file"
    )
    structlog.get_logger("motionseg.tests").info(
        "Computed neighborhoods", stage="neighborhoods", entries=12
    )
    for handler in logging.getLogger().handlers:
        handler.flush()
    (line,) = path.read_text(encoding="utf-8").splitlines()
    record = json.loads(line)
    assert record["event"] == "Computed neighborhoods"
    assert record["stage"] == "neighborhoods"
    assert record["entries"] == 12
    assert record["level"] == "info"
    assert "timestamp" in record


@pytest.mark.usefixtures("restore_logging")
def test_file_logging_needs_a_name():
    with pytest.raises(ValueError):
        default_logging_setup(filename=None, handlers="file")


def test_console_line_tints_the_stage():
    rendered = rich_console_processor(
        None,
        None,
        {
            "event": "Bundled features",
            "level": "info",
            "stage": "bundling",
            "frames": 400,
            "mean_shift": np.float64(0.0123456789),
        },
    )["event"]
    first, details = rendered.split("\n", 1)
    assert "Bundled features" in first
    assert "[dark_sea_green4]\\[bundling], [/]" in details
    assert "0.0123457" in details
    positions = [details.index(key) for key in ("STAGE", "FRAMES", "MEAN_SHIFT")]
    assert positions == sorted(positions)
