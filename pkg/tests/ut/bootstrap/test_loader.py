import json

import pytest

from tesslab.bootstrap.config.loader import ConfigLoader, build_parser
from tesslab.core.errors import ConfigParseError


@pytest.mark.ut
def test_json_file(config_file):
    settings, data = ConfigLoader(str(config_file)).load()
    assert settings.experiment.master_seed == 1
    assert data["experiment"]["replications"] == 10


@pytest.mark.ut
def test_yaml_file(tmp_path):
    file = tmp_path / "run.yaml"
    file.write_text("experiment:\n  model: laguerre\n  replications: 4\n")
    settings, _ = ConfigLoader(str(file)).load()
    assert settings.experiment.model == "laguerre"
    assert settings.experiment.replications == 4


@pytest.mark.ut
def test_inline_json():
    loader = ConfigLoader('{"experiment": {"master_seed": 9}}')
    assert loader.inline
    settings, _ = loader.load()
    assert settings.experiment.master_seed == 9


@pytest.mark.ut
def test_cli_source_wins_over_env(config_file, tmp_path):
    assert ConfigLoader(str(config_file), str(tmp_path / "other.json")).source == str(config_file)
    assert ConfigLoader(None, str(config_file)).source == str(config_file)


@pytest.mark.ut
def test_overrides(config_file, tmp_path):
    settings, data = ConfigLoader(str(config_file)).load(seed=42, out=str(tmp_path / "elsewhere"))
    assert settings.experiment.master_seed == 42
    assert settings.output.dir == tmp_path / "elsewhere"
    assert data["experiment"]["master_seed"] == 42


@pytest.mark.ut
def test_manifest_is_unwrapped(tmp_path, config_data):
    file = tmp_path / "manifest.json"
    file.write_text(json.dumps({"manifest_version": 1, "subcommand": "experiment", "config": config_data}))
    settings, _ = ConfigLoader(str(file)).load()
    assert settings.experiment.guard == 8.0


@pytest.mark.ut
def test_manifest_without_config(tmp_path):
    file = tmp_path / "manifest.json"
    file.write_text(json.dumps({"manifest_version": 1}))
    with pytest.raises(ConfigParseError):
        ConfigLoader(str(file)).read()


@pytest.mark.ut
def test_malformed_json_reports_location():
    with pytest.raises(ConfigParseError) as ex:
        ConfigLoader('{"experiment": ').read()
    assert ex.value.fields[0]["loc"].startswith("line 1")


@pytest.mark.ut
def test_malformed_yaml(tmp_path):
    file = tmp_path / "run.yaml"
    file.write_text("experiment: [unclosed\n")
    with pytest.raises(ConfigParseError):
        ConfigLoader(str(file)).read()


@pytest.mark.ut
def test_top_level_must_be_a_mapping(tmp_path):
    file = tmp_path / "run.json"
    file.write_text("[1, 2]")
    with pytest.raises(ConfigParseError):
        ConfigLoader(str(file)).read()


@pytest.mark.ut
def test_missing_file(tmp_path):
    with pytest.raises(ConfigParseError) as ex:
        ConfigLoader(str(tmp_path / "absent.json")).read()
    assert "absent.json" in str(ex.value)


@pytest.mark.ut
def test_parser():
    args = build_parser().parse_args(["sigma2", "--seed", "3", "--threads", "2", "-l", "DEBUG"])
    assert args.subcommand == "sigma2"
    assert args.seed == 3
    assert args.threads == 2
    assert args.log_level == "DEBUG"
    assert args.config is None
