from typing import Any

from tesslab.bootstrap.deps import get_dispatcher
from tesslab.core.dispatcher import RunContext
from tesslab.core.mcengine.tails import diameter_tail_experiment
from tesslab.core.models.run import Subcommand

dispatcher = get_dispatcher()


@dispatcher.command(Subcommand.tails)
def cmd_tails(ctx: RunContext) -> dict[str, Any]:
    cfg = ctx.run.experiment
    options = ctx.run.tails
    result = diameter_tail_experiment(
        cfg.model,
        cfg.mark_dist,
        options.n,
        cfg.master_seed,
        cfg.kernel,
        cfg.intensity,
        pool=ctx.pool,
        quantiles=options.quantiles,
    )

    ctx.writer.write_csv("tails.csv", ("sample", "D_bound", "circumradius"), result.rows())
    ctx.writer.write_csv(
        "survival.csv",
        ("variable", "threshold", "log_survival"),
        (
            {"variable": name, "threshold": t, "log_survival": s}
            for name, fit in (("D", result.fit), ("R", result.stabilization_fit))
            for t, s in zip(fit.thresholds, fit.log_survival)
        ),
    )
    return {"model": cfg.model.value, **result.to_dict()}
