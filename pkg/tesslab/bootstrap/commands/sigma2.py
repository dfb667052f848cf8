import logging
from typing import Any

from tesslab.bootstrap.deps import get_dispatcher
from tesslab.core.dispatcher import RunContext
from tesslab.core.mcengine.sigma2 import default_r_max, estimate_sigma2
from tesslab.core.models.run import Subcommand

logger = logging.getLogger("bootstrap.commands.sigma2")

dispatcher = get_dispatcher()


@dispatcher.command(Subcommand.sigma2)
def cmd_sigma2(ctx: RunContext) -> dict[str, Any]:
    cfg = ctx.run.experiment
    options = ctx.run.sigma2
    guard = ctx.guard()

    r_max = options.r_max
    if r_max is None:
        r_max = default_r_max(cfg.model, cfg.mark_dist, cfg.master_seed, cfg.intensity, ctx.run.pilot_size, ctx.pool)
        ctx.resolved["sigma2.r_max"] = r_max
        logger.info(f"Resolved r_max {r_max:.6g} from a pilot of {ctx.run.pilot_size}")

    result = estimate_sigma2(
        cfg.model,
        cfg.characteristic,
        cfg.mark_dist,
        guard,
        r_max,
        options.n_singles,
        options.n_pairs,
        cfg.master_seed,
        cfg.kernel,
        cfg.intensity,
        ctx.pool,
    )
    return {
        "model": cfg.model.value,
        "characteristic": str(cfg.characteristic),
        "guard": guard,
        **result.to_dict(),
    }
