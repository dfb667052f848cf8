import functools
import logging
from dataclasses import dataclass, field
from typing import Any, Protocol

from tesslab.core.mcengine.guard import GuardResolution, resolve_guard
from tesslab.core.mcengine.pool import ReplicationPool
from tesslab.core.models.run import RunConfig, Subcommand
from tesslab.core.ports.artifacts import ArtifactWriter


@dataclass
class RunContext:
    """
    State shared by a subcommand and the run around it. Values resolved
    while running (guard, r_max) are recorded so the manifest can replay
    the run without a pilot.
    """
    run: RunConfig
    pool: ReplicationPool
    writer: ArtifactWriter
    resolution: GuardResolution | None = None
    resolved: dict[str, Any] = field(default_factory=dict)
    """Dotted config paths mapped to the values they were resolved to."""

    def guard(self) -> float:
        if self.resolution is None:
            self.resolution = resolve_guard(self.run.experiment, self.run.pilot_size, self.pool)
            self.resolved["experiment.guard"] = self.resolution.guard
            logging.getLogger("core.dispatcher").info(
                f"Guard {self.resolution.guard:.6g} ({'pilot' if self.resolution.auto else 'explicit'})"
            )
        return self.resolution.guard


class CommandHandler(Protocol):
    def __call__(self, ctx: RunContext) -> dict[str, Any]:
        ...


class CommandDispatcher:
    def __init__(self) -> None:
        self._commands: dict[Subcommand, CommandHandler] = {}

    @property
    def commands(self) -> list[Subcommand]:
        return list(self._commands)

    def dispatch(self, name: Subcommand, ctx: RunContext) -> dict[str, Any]:
        command = self._commands.get(name)
        if command is None:
            raise RuntimeError(f"Unknown '{name}' Command")
        return command(ctx)

    def command(self, name: Subcommand):
        def decorator(func: CommandHandler):

            @functools.wraps(func)
            def wrapper(ctx: RunContext) -> dict[str, Any]:
                return func(ctx)

            self._commands[Subcommand(name)] = wrapper

            return wrapper

        return decorator
