import math
import os

import numpy as np
import pytest

from tesslab.core.errors import InvalidParameterError
from tesslab.infra.artifacts import FileArtifactWriter, format_value

from tests.helpers import read_csv, read_json


@pytest.mark.ut
def test_format_value():
    assert format_value(True) == "1"
    assert format_value(np.bool_(False)) == "0"
    assert format_value(0.1) == "0.10000000000000001"
    assert float(format_value(np.float64(1 / 3))) == 1 / 3
    assert format_value(7) == "7"
    assert format_value("full_sample") == "full_sample"


@pytest.mark.ut
def test_write_csv(tmp_path):
    writer = FileArtifactWriter(tmp_path / "out")
    path = writer.write_csv("points.csv", ("x", "in_window"), [{"x": 0.5, "in_window": True, "extra": 1}])
    assert path == tmp_path / "out" / "points.csv"
    assert read_csv(path) == [{"x": "0.5", "in_window": "1"}]


@pytest.mark.ut
def test_write_empty_csv_keeps_header(tmp_path):
    path = FileArtifactWriter(tmp_path).write_csv("histogram.csv", ("bin_lower", "count"), [])
    assert path.read_text() == "bin_lower,count\n"


@pytest.mark.ut
def test_write_json(tmp_path):
    path = FileArtifactWriter(tmp_path).write_json("summary.json", {"value": math.inf, "n": 2})
    assert read_json(path) == {"value": None, "n": 2}


@pytest.mark.ut
def test_ensure_creates_directory(tmp_path):
    writer = FileArtifactWriter(tmp_path / "a" / "b")
    writer.ensure()
    assert writer.directory.is_dir()


@pytest.mark.ut
def test_ensure_rejects_file(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(InvalidParameterError):
        FileArtifactWriter(blocker / "out").ensure()


@pytest.mark.ut
@pytest.mark.skipif(os.geteuid() == 0, reason="root can write anywhere")
def test_ensure_rejects_read_only_directory(tmp_path):
    locked = tmp_path / "locked"
    locked.mkdir()
    locked.chmod(0o500)
    try:
        with pytest.raises(InvalidParameterError):
            FileArtifactWriter(locked).ensure()
    finally:
        locked.chmod(0o700)
