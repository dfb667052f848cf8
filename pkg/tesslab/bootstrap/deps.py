import json
from functools import lru_cache

from pydantic import ValidationError

from tesslab.bootstrap.config.settings import RuntimeEnv
from tesslab.core.dispatcher import CommandDispatcher
from tesslab.core.ports.render import Renderer
from tesslab.infra.format_renderer import JsonRenderer, YamlRenderer


@lru_cache
def get_dispatcher() -> CommandDispatcher:
    return CommandDispatcher()


@lru_cache
def get_renderer(fmt: str = "json") -> Renderer:
    return YamlRenderer() if fmt == "yaml" else JsonRenderer()


def get_runtime_env() -> RuntimeEnv:
    return RuntimeEnv()  # type: ignore[call-arg]


def validation_fields(ex: ValidationError) -> list[dict[str, str]]:
    return [
        {"loc": ".".join(str(part) for part in err["loc"]), "msg": err["msg"]}
        for err in json.loads(ex.json())
    ]


def validation_message(ex: ValidationError) -> str:
    msg = ["Configuration validation failed:"]
    for field in validation_fields(ex):
        msg.append(f"  {field['loc']}: {field['msg']}")
    return "\n".join(msg)
