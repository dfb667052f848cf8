import json

import pytest

from tesslab.bootstrap.cli import EXIT_OK, run

from tests.helpers import read_csv, read_json

ARTIFACTS = ("replications.csv", "oracle.csv", "consistency.csv")


@pytest.fixture
def experiment_data(config_data) -> dict:
    config_data["experiment"] |= {"lambda_values": [16.0, 36.0], "replications": 12, "guard": "auto"}
    return config_data


@pytest.mark.it
def test_results_do_not_depend_on_threads(experiment_data, tmp_path):
    one, two = tmp_path / "one", tmp_path / "two"
    config = json.dumps(experiment_data)
    assert run(["experiment", "-c", config, "--out", str(one), "--threads", "1", "-l", "ERROR"]) == EXIT_OK
    assert run(["experiment", "-c", config, "--out", str(two), "--threads", "2", "-l", "ERROR"]) == EXIT_OK

    for name in ARTIFACTS:
        assert (one / name).read_bytes() == (two / name).read_bytes()
    assert read_json(two / "manifest.json")["threads"] == 2


@pytest.mark.it
def test_manifest_replay_is_bit_identical(experiment_data, tmp_path):
    first, replay = tmp_path / "first", tmp_path / "replay"
    assert run(["experiment", "-c", json.dumps(experiment_data), "--out", str(first), "-l", "ERROR"]) == EXIT_OK
    assert run(["experiment", "-c", str(first / "manifest.json"), "--out", str(replay), "-l", "ERROR"]) == EXIT_OK

    for name in ARTIFACTS:
        assert (first / name).read_bytes() == (replay / name).read_bytes()

    summary, replayed = read_json(first / "summary.json"), read_json(replay / "summary.json")
    assert summary["lambdas"] == replayed["lambdas"]


@pytest.mark.it
def test_seed_changes_results(experiment_data, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    config = json.dumps(experiment_data)
    assert run(["experiment", "-c", config, "--out", str(a), "-l", "ERROR"]) == EXIT_OK
    assert run(["experiment", "-c", config, "--seed", "2", "--out", str(b), "-l", "ERROR"]) == EXIT_OK
    assert (a / "replications.csv").read_bytes() != (b / "replications.csv").read_bytes()


@pytest.mark.it
def test_truncated_experiment_tables(experiment_data, tmp_path):
    experiment_data["experiment"]["kind"] = "truncated_full_sample"
    out = tmp_path / "truncated"
    assert run(["experiment", "-c", json.dumps(experiment_data), "--out", str(out), "-l", "ERROR"]) == EXIT_OK

    summary = read_json(out / "summary.json")
    variance = read_csv(out / "variance.csv")
    assert [float(r["lambda"]) for r in variance] == [16.0, 36.0]
    assert [float(r["lambda_var"]) for r in variance] == pytest.approx([v["lambda_var"] for v in summary["variance"]])
    consistency = read_csv(out / "consistency.csv")
    assert len(consistency) == 2
    assert all(float(r["stderr_difference"]) > 0 for r in consistency)
