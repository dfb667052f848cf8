from typing import Any

from tesslab.bootstrap.deps import get_dispatcher
from tesslab.core.dispatcher import RunContext
from tesslab.core.mcengine.experiments import replication_sample
from tesslab.core.models.point import Box
from tesslab.core.models.run import Subcommand

dispatcher = get_dispatcher()


@dispatcher.command(Subcommand.sample)
def cmd_sample(ctx: RunContext) -> dict[str, Any]:
    cfg = ctx.run.experiment
    realization = ctx.run.realization
    i, lam = realization.resolve_lambda(cfg)
    config = replication_sample(cfg, i, ctx.guard(), realization.replication)

    inside = Box.centered(lam).contains(config.positions)
    ctx.writer.write_csv(
        "points.csv",
        ("x", "y", "mark", "in_window"),
        (
            {"x": p[0], "y": p[1], "mark": m, "in_window": bool(w)}
            for p, m, w in zip(config.positions, config.marks, inside)
        ),
    )
    return {
        "lambda": lam,
        "replication": realization.replication,
        "guard": ctx.guard(),
        "carrier": config.carrier.to_dict(),
        "n_points": len(config),
        "n_window": int(inside.sum()),
    }
