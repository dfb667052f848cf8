from collections import Counter
from typing import Any

from tesslab.bootstrap.deps import get_dispatcher
from tesslab.core.dispatcher import RunContext
from tesslab.core.estimators.characteristic import evaluate
from tesslab.core.geometry.raster import reaches_grid_edge
from tesslab.core.geometry.tessellate import Tessellator, tessellate
from tesslab.core.mcengine.experiments import replication_sample
from tesslab.core.mcengine.stats import histogram
from tesslab.core.models.cell import CellShape
from tesslab.core.models.characteristic import Characteristic
from tesslab.core.models.point import Box
from tesslab.core.models.run import Subcommand

HISTOGRAM_BINS = 40

dispatcher = get_dispatcher()


@dispatcher.command(Subcommand.tessellate)
def cmd_tessellate(ctx: RunContext) -> dict[str, Any]:
    cfg = ctx.run.experiment
    realization = ctx.run.realization
    i, lam = realization.resolve_lambda(cfg)
    window = Box.centered(lam)
    config = replication_sample(cfg, i, ctx.guard(), realization.replication)

    inside = window.contains(config.positions)
    tessellator = Tessellator(config, cfg.model, cfg.kernel, cfg.mark_dist.mu_bound)
    bounds = tessellator.diameter_bounds(config.positions[inside])
    uncertified = sum(1 for p, d in zip(config.positions[inside], bounds) if not tessellator.certified(p, d))

    cells = [(x, c) for (x, c), w in zip(tessellate(config, window, cfg.model, cfg.kernel), inside) if w]
    volume = Characteristic.volume()
    # raster masks are cut by the window grid; only interior ones have their full volume
    edge = [c.shape is CellShape.raster and reaches_grid_edge(c, window) for _, c in cells]
    volumes = [evaluate(volume, c) for (_, c), e in zip(cells, edge) if c.bounded and not e]
    shapes = Counter(c.shape.value for _, c in cells)

    if ctx.run.emit_cells:
        ctx.writer.write_json("cells.json", {
            "lambda": lam,
            "model": cfg.model.value,
            "kernel": cfg.kernel.to_dict(),
            "cells": [c.to_dict() for _, c in cells],
        })
    ctx.writer.write_csv("histogram.csv", ("bin_lower", "bin_upper", "count"), histogram(volumes, HISTOGRAM_BINS))

    return {
        "lambda": lam,
        "replication": realization.replication,
        "guard": ctx.guard(),
        "n_cells": len(cells),
        "shapes": dict(shapes),
        "n_uncertified": uncertified,
        "n_edge_clipped": sum(edge),
        "mean_volume": sum(volumes) / len(volumes) if volumes else None,
    }
