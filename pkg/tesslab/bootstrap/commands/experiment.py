from typing import Any

from tesslab.bootstrap.deps import get_dispatcher
from tesslab.core.dispatcher import RunContext
from tesslab.core.mcengine.experiments import (
    CONSISTENCY_COLUMNS,
    VARIANCE_COLUMNS,
    run_consistency_experiment,
    run_unbiasedness_experiment,
    run_variance_experiment,
)
from tesslab.core.models.experiment import REPLICATION_COLUMNS
from tesslab.core.models.run import Subcommand

dispatcher = get_dispatcher()


@dispatcher.command(Subcommand.experiment)
def cmd_experiment(ctx: RunContext) -> dict[str, Any]:
    cfg = ctx.run.experiment
    guard = ctx.guard()
    results = [run_unbiasedness_experiment(cfg, lam, guard, ctx.pool) for lam in cfg.lambda_values]

    ctx.writer.write_csv(
        "replications.csv",
        REPLICATION_COLUMNS,
        (r.to_row() for result in results for r in result.records),
    )
    ctx.writer.write_csv(
        "oracle.csv",
        ("lambda", "draw", "value"),
        (
            {"lambda": result.lam, "draw": k, "value": v}
            for result in results
            for k, v in enumerate(result.oracle_values)
        ),
    )

    variance = None
    if cfg.kind.truncated:
        variance = run_variance_experiment(cfg, guard, ctx.pool, [r.records for r in results])
        ctx.writer.write_csv("variance.csv", VARIANCE_COLUMNS, (v.to_dict() for v in variance))

    consistency = run_consistency_experiment(cfg, guard, ctx.pool)
    ctx.writer.write_csv("consistency.csv", CONSISTENCY_COLUMNS, (c.to_row() for c in consistency))

    lambda_var = [r.estimator.lambda_var for r in results]
    return {
        "model": cfg.model.value,
        "characteristic": str(cfg.characteristic),
        "kind": cfg.kind.value,
        "guard": guard,
        "lambdas": [r.to_dict() for r in results],
        "lambda_var_ratios": [b / a if a else None for a, b in zip(lambda_var, lambda_var[1:])],
        "variance": [v.to_dict() for v in variance] if variance is not None else None,
        "consistency": [c.to_dict() for c in consistency],
        "n_rejected_typical": sum(r.n_rejected for r in results),
        "n_unbounded": sum(r.n_unbounded for result in results for r in result.records),
    }
