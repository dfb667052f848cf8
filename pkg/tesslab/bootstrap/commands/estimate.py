from typing import Any

from tesslab.bootstrap.deps import get_dispatcher
from tesslab.core.dispatcher import RunContext
from tesslab.core.estimators.estimate import build_ledger, estimate_distribution_function
from tesslab.core.mcengine.experiments import estimate_with_guard, replication_record
from tesslab.core.models.estimate import LEDGER_COLUMNS
from tesslab.core.models.experiment import REPLICATION_COLUMNS
from tesslab.core.models.point import Box
from tesslab.core.models.run import Subcommand

dispatcher = get_dispatcher()


@dispatcher.command(Subcommand.estimate)
def cmd_estimate(ctx: RunContext) -> dict[str, Any]:
    cfg = ctx.run.experiment
    realization = ctx.run.realization
    i, lam = realization.resolve_lambda(cfg)
    window = Box.centered(lam)
    mark_bound = cfg.mark_dist.mu_bound

    result, config = estimate_with_guard(cfg, i, ctx.guard(), cfg.kind, realization.replication)
    record = replication_record(result, config, realization.replication)
    ctx.writer.write_csv("replications.csv", REPLICATION_COLUMNS, [record.to_row()])

    if ctx.run.emit_ledger:
        ctx.writer.write_csv("ledger.csv", LEDGER_COLUMNS, (c.to_row() for c in result.contributions))

    if ctx.run.emit_cells:
        ledger = build_ledger(config, window, cfg.model, cfg.kind, cfg.kernel, mark_bound)
        ctx.writer.write_json("cells.json", {
            "lambda": lam,
            "model": cfg.model.value,
            "kernel": cfg.kernel.to_dict(),
            "cells": [d.cell.to_dict() for d in ledger.decisions],
        })

    summary: dict[str, Any] = {
        **result.to_dict(),
        "characteristic": str(cfg.characteristic),
        "replication": realization.replication,
        "guard": record.guard,
    }
    if realization.t_grid:
        points = estimate_distribution_function(
            config, window, cfg.model, realization.t_grid, cfg.kind, cfg.kernel, realization.base, mark_bound
        )
        ctx.writer.write_csv("distribution.csv", ("t", "value"), ({"t": t, "value": v} for t, v in points))
        summary["distribution"] = [{"t": t, "value": v} for t, v in points]
    return summary
