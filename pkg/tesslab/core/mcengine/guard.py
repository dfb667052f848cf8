import logging
import math
from dataclasses import dataclass
from typing import Any

from tesslab.core.errors import NotStabilizedError
from tesslab.core.mcengine.pool import ReplicationPool
from tesslab.core.mcengine.tails import pilot_quantile
from tesslab.core.models.experiment import ExperimentConfig
from tesslab.core.pointproc.seeds import Stream, seed_path

logger = logging.getLogger("core.mcengine.guard")

PILOT_SIZE = 10_000
PILOT_QUANTILE = 0.9999


@dataclass(frozen=True, slots=True)
class GuardResolution:
    guard: float
    auto: bool
    pilot_quantile: float | None = None
    pilot_size: int = 0
    cap: float = math.inf

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"guard": self.guard, "auto": self.auto}
        if self.auto:
            data |= {
                "quantile": PILOT_QUANTILE,
                "pilot_quantile_D": self.pilot_quantile,
                "pilot_size": self.pilot_size,
                "cap": self.cap,
            }
        return data


def resolve_guard(
    cfg: ExperimentConfig,
    pilot_size: int = PILOT_SIZE,
    pool: ReplicationPool | None = None,
) -> GuardResolution:
    """
    An explicit guard is returned unchanged. Otherwise the guard is
    2 q + mu with q the 0.9999 quantile of the cone bound D over a pilot of
    typical cells, and must not exceed guard_cap_factor window sides of the
    largest window.
    """
    if cfg.guard is not None:
        return GuardResolution(cfg.guard, auto=False)

    cap = cfg.guard_cap(max(cfg.lambda_values))
    q = pilot_quantile(
        cfg.model,
        cfg.mark_dist,
        pilot_size,
        PILOT_QUANTILE,
        seed_path(cfg.master_seed, Stream.pilot),
        cfg.intensity,
        pool,
    )
    guard = 2.0 * q + cfg.mu
    if not math.isfinite(guard) or guard > cap:
        raise NotStabilizedError(f"Pilot guard {guard:.6g} exceeds the cap {cap:.6g}")

    logger.info(f"Resolved guard {guard:.6g} from a pilot of {pilot_size} cells (q={q:.6g}, cap={cap:.6g})")
    return GuardResolution(guard, auto=True, pilot_quantile=q, pilot_size=pilot_size, cap=cap)
