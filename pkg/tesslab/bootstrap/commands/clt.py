from typing import Any

from tesslab.bootstrap.deps import get_dispatcher
from tesslab.core.dispatcher import RunContext
from tesslab.core.mcengine.experiments import predicted_mean, run_clt_experiment
from tesslab.core.mcengine.stats import histogram
from tesslab.core.models.experiment import REPLICATION_COLUMNS
from tesslab.core.models.run import Subcommand

HISTOGRAM_BINS = 30

dispatcher = get_dispatcher()


@dispatcher.command(Subcommand.clt)
def cmd_clt(ctx: RunContext) -> dict[str, Any]:
    cfg = ctx.run.experiment
    options = ctx.run.clt
    lam = max(cfg.lambda_values) if options.lam is None else options.lam
    guard = ctx.guard()

    oracle_mean = predicted_mean(cfg, lam, guard, ctx.pool) if options.oracle_centering else None
    result = run_clt_experiment(cfg, lam, guard, oracle_mean, ctx.pool)

    ctx.writer.write_csv("replications.csv", REPLICATION_COLUMNS, (r.to_row() for r in result.records))
    ctx.writer.write_csv("qq.csv", ("theoretical", "sample"), result.qq_rows())
    ctx.writer.write_csv(
        "histogram.csv", ("bin_lower", "bin_upper", "count"), histogram(result.standardized, HISTOGRAM_BINS)
    )
    return {
        "model": cfg.model.value,
        "characteristic": str(cfg.characteristic),
        "kind": cfg.kind.value,
        "guard": guard,
        "oracle_mean": oracle_mean,
        **result.to_dict(),
    }
