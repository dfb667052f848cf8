import logging
import sys
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from tesslab.bootstrap.config.loader import ConfigLoader, build_parser
from tesslab.bootstrap.config.settings import OutputSettings, TessLabConfig
from tesslab.bootstrap.deps import get_dispatcher, get_renderer, get_runtime_env, validation_fields, validation_message
from tesslab.core.dispatcher import RunContext
from tesslab.core.errors import (
    ConfigParseError,
    GuardTooSmallError,
    InvalidParameterError,
    NotStabilizedError,
    TessLabError,
)
from tesslab.core.helpers.utils import scan, setup_logging
from tesslab.core.mcengine.pool import ReplicationPool
from tesslab.core.models.run import Subcommand
from tesslab.infra.artifacts import FileArtifactWriter
from tesslab.infra.format_renderer import JsonRenderer

MANIFEST_VERSION = 1

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_NOT_STABILIZED = 4
EXIT_RUNTIME = 5

logger = logging.getLogger("bootstrap.cli")


def tesslab_version() -> str:
    try:
        return version("tesslab")
    except PackageNotFoundError:
        return "0+unknown"


def exit_code(ex: BaseException) -> int:
    match ex:
        case ConfigParseError():
            return EXIT_PARSE
        case ValidationError() | InvalidParameterError():
            return EXIT_INVALID
        case GuardTooSmallError() | NotStabilizedError():
            return EXIT_NOT_STABILIZED
        case _:
            return EXIT_RUNTIME


def error_document(ex: BaseException) -> dict[str, Any]:
    if isinstance(ex, ValidationError):
        message, fields = validation_message(ex), validation_fields(ex)
    else:
        message, fields = str(ex), list(getattr(ex, "fields", []))
    return {
        "error": {
            "code": exit_code(ex),
            "type": type(ex).__name__,
            "message": message,
            "fields": fields,
        }
    }


def build_manifest(settings: TessLabConfig, ctx: RunContext, threads: int) -> dict[str, Any]:
    """
    The validated config with every resolved value written back, so that
    feeding the manifest to --config replays the run without a pilot.
    """
    config = settings.model_dump(mode="json")
    for path, value in ctx.resolved.items():
        *sections, key = path.split(".")
        target = config
        for section in sections:
            target = target[section]
        target[key] = value
    return {
        "manifest_version": MANIFEST_VERSION,
        "tesslab_version": tesslab_version(),
        "subcommand": ctx.run.subcommand.value,
        "config": config,
        "pilot": ctx.resolution.to_dict() if ctx.resolution is not None else None,
        "threads": threads,
    }


def _report(ex: BaseException, out_dir: Path) -> int:
    document = error_document(ex)
    code = document["error"]["code"]
    logger.error(f"{document['error']['type']}: {document['error']['message']}")
    try:
        FileArtifactWriter(out_dir).write_json("error.json", document)
    except OSError as write_error:
        logger.warning(f"Could not write error.json to {out_dir}: {write_error}")
    print(JsonRenderer().render(document), file=sys.stderr)
    return code


@scan("tesslab.bootstrap.commands")
def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        code = ex.code if isinstance(ex.code, int) else EXIT_PARSE
        if code != EXIT_OK:
            usage = {"error": {"code": code, "type": "UsageError", "message": "Invalid command line", "fields": []}}
            print(JsonRenderer().render(usage), file=sys.stderr)
        return code

    setup_logging(args.log_level)
    out_dir = Path(args.out) if args.out else OutputSettings().dir

    try:
        env = get_runtime_env()
        settings, _ = ConfigLoader(args.config, env.config).load(args.seed, args.out)
        out_dir = settings.output.dir
        run_config = settings.to_domain(Subcommand(args.subcommand))
        threads = args.threads if args.threads is not None else env.threads

        writer = FileArtifactWriter(run_config.output_dir)
        writer.ensure()
        logger.info(f"Running {run_config.subcommand} into {writer.directory} with {threads} worker(s)")
        with ReplicationPool(threads) as pool:
            ctx = RunContext(run_config, pool, writer)
            summary = get_dispatcher().dispatch(run_config.subcommand, ctx)

        writer.write_json("summary.json", summary)
        writer.write_json("manifest.json", build_manifest(settings, ctx, threads))
    except (TessLabError, ValidationError, ArithmeticError) as ex:
        return _report(ex, out_dir)
    except Exception as ex:
        logger.exception(f"Unexpected failure in {args.subcommand}")
        return _report(ex, out_dir)

    print(get_renderer(run_config.output_format).render(summary))
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
