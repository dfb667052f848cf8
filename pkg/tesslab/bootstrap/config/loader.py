import argparse
import json
import logging
from pathlib import Path
from typing import Any

import yaml
from pydantic_settings import JsonConfigSettingsSource, YamlConfigSettingsSource

from tesslab.bootstrap.config.settings import TessLabConfig
from tesslab.core.errors import ConfigParseError
from tesslab.core.models.run import Subcommand

DEFAULT_CONFIG = "tesslab.json"
MANIFEST_KEY = "manifest_version"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tess-lab",
        description=(
            "Monte Carlo laboratory for weighted Poisson tessellations.\n\n"
            "Samples marked Poisson processes, builds Voronoi, Laguerre and\n"
            "Johnson-Mehl cells, and runs minus-sampling estimators, variance,\n"
            "central limit and diameter tail experiments."
        ),
        formatter_class=argparse.RawTextHelpFormatter
    )

    parser.add_argument(
        "subcommand",
        choices=[s.value for s in Subcommand],
        help=(
            "sample     → points.csv of one guarded realization\n"
            "tessellate → cells and a cell volume histogram\n"
            "estimate   → one estimate with its ledger\n"
            "experiment → estimator vs typical-cell oracle per window volume\n"
            "sigma2     → limiting variance estimate\n"
            "tails      → cone bound and stabilization radius tails\n"
            "clt        → standardized replications against the normal law"
        ),
    )

    parser.add_argument(
        "-c", "--config",
        type=str,
        help=(
            "Path to a JSON or YAML configuration, a manifest.json of an\n"
            "earlier run, or inline JSON text starting with '{'."
        )
    )

    parser.add_argument("--seed", type=int, help="Overrides experiment.master_seed.")
    parser.add_argument("--out", type=str, help="Overrides output.dir.")

    parser.add_argument(
        "--threads",
        type=int,
        help="Worker processes (falls back to TESSLAB_THREADS, then 1).\nResults never depend on it."
    )

    parser.add_argument(
        "-l", "--log-level",
        type=str,
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help=(
            "Logging verbosity.\n"
            "Choose among: DEBUG, INFO, WARNING, ERROR, CRITICAL.\n\n"
            "DEBUG    → per-cell decisions.\n"
            "INFO     → replication progress and guard resolution (default).\n"
            "WARNING  → diagnostics only.\n"
            "ERROR    → only errors.\n"
            "CRITICAL → only critical failures.\n\n"
            "Example:\n"
            "  --log-level DEBUG"
        ),
    )

    return parser


class ConfigLoader:
    """
    Reads the configuration document of a run.

    Resolution order for the source:
      1. Explicit --config argument
      2. TESSLAB_CONFIG environment variable
      3. Default: ./tesslab.json
    """

    def __init__(self, cli_source: str | None = None, env_source: str | None = None) -> None:
        self.source = cli_source or env_source or str(Path.cwd() / DEFAULT_CONFIG)
        self._logger = logging.getLogger("bootstrap.config.loader")

    @property
    def inline(self) -> bool:
        return self.source.lstrip().startswith("{")

    def read(self) -> dict[str, Any]:
        """The raw document, unwrapped from a manifest if it is one."""
        try:
            if self.inline:
                data = json.loads(self.source)
            else:
                data = self._read_file(Path(self.source))
        except json.JSONDecodeError as ex:
            raise ConfigParseError(
                f"Malformed JSON configuration: {ex.msg}",
                [{"loc": f"line {ex.lineno}, column {ex.colno}", "msg": ex.msg}],
            ) from ex
        except yaml.YAMLError as ex:
            mark = getattr(ex, "problem_mark", None)
            loc = f"line {mark.line + 1}, column {mark.column + 1}" if mark else self.source
            raise ConfigParseError(f"Malformed YAML configuration: {ex}", [{"loc": loc, "msg": str(ex)}]) from ex
        except (AttributeError, TypeError, ValueError) as ex:
            raise ConfigParseError(
                "Configuration must be a mapping at top level",
                [{"loc": "<root>", "msg": str(ex)}],
            ) from ex

        if not isinstance(data, dict):
            raise ConfigParseError(
                "Configuration must be a mapping at top level",
                [{"loc": "<root>", "msg": f"got {type(data).__name__}"}],
            )

        if MANIFEST_KEY in data:
            self._logger.info(f"Replaying manifest {self.source} (version {data[MANIFEST_KEY]})")
            data = data.get("config")
            if not isinstance(data, dict):
                raise ConfigParseError("Manifest has no config mapping", [{"loc": "config", "msg": "missing"}])
        return data

    def _read_file(self, file: Path) -> dict[str, Any]:
        if not file.is_file():
            raise ConfigParseError(
                f"Configuration file not found: '{file}'.\n"
                "  - Use --config <file.json>\n"
                "  - Or set the TESSLAB_CONFIG environment variable\n"
                f"  - Or place a '{DEFAULT_CONFIG}' file in the current working directory.",
                [{"loc": "config", "msg": f"no such file {file}"}],
            )
        self._logger.debug(f"Reading configuration {file}")
        if file.suffix in (".yaml", ".yml"):
            return YamlConfigSettingsSource(TessLabConfig, yaml_file=file)()
        return JsonConfigSettingsSource(TessLabConfig, json_file=file)()

    def load(self, seed: int | None = None, out: str | None = None) -> tuple[TessLabConfig, dict[str, Any]]:
        """
        Validated config and the document it came from, with the command
        line overrides applied to both.
        """
        data = self.read()
        if seed is not None:
            _section(data, "experiment")["master_seed"] = seed
        if out is not None:
            _section(data, "output")["dir"] = out
        return TessLabConfig(**data), data


def _section(data: dict[str, Any], name: str) -> dict[str, Any]:
    section = data.setdefault(name, {})
    if not isinstance(section, dict):
        raise ConfigParseError(f"Section '{name}' must be a mapping", [{"loc": name, "msg": "not a mapping"}])
    return section
