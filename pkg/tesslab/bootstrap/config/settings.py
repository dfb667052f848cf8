from __future__ import annotations

from pathlib import Path
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

from tesslab.core.models.cell import Kernel, KernelMethod, WeightModel
from tesslab.core.models.characteristic import Characteristic, CharacteristicKind
from tesslab.core.models.estimate import EstimatorKind
from tesslab.core.models.experiment import ExperimentConfig
from tesslab.core.models.point import MarkDistribution, MarkLaw
from tesslab.core.models.run import (
    CltOptions,
    RealizationOptions,
    RunConfig,
    Sigma2Options,
    Subcommand,
    TailsOptions,
)


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MarkSettings(StrictModel):
    law: Annotated[
        MarkLaw,
        Field(
            description=(
                "Law of the marks.\n"
                "  point_mass → every mark equals c\n"
                "  uniform    → marks uniform on [a, b]\n"
                "  discrete   → marks take values with the given weights\n"
            ),
            default=MarkLaw.point_mass
        )
    ]

    c: Annotated[float, Field(description="Point mass value.", default=0.0)]
    a: Annotated[float, Field(description="Lower end of the uniform law.", default=0.0)]
    b: Annotated[float, Field(description="Upper end of the uniform law.", default=0.0)]

    values: Annotated[
        list[float],
        Field(description="Support of the discrete law.", default_factory=list)
    ]

    weights: Annotated[
        list[float],
        Field(description="Probabilities of the discrete law; they sum to 1.", default_factory=list)
    ]

    def to_domain(self) -> MarkDistribution:
        match self.law:
            case MarkLaw.point_mass:
                return MarkDistribution.point_mass(self.c)
            case MarkLaw.uniform:
                return MarkDistribution.uniform(self.a, self.b)
            case _:
                return MarkDistribution.discrete(self.values, self.weights)


class CharacteristicSettings(StrictModel):
    kind: Annotated[
        CharacteristicKind,
        Field(
            description=(
                "Characteristic h of a cell.\n"
                "Indicator kinds need t, scaled and indicator_leq need base,\n"
                "constant and scaled read factor."
            ),
            default=CharacteristicKind.volume
        )
    ]

    t: Annotated[float | None, Field(description="Indicator threshold.", default=None)]

    base: Annotated[
        CharacteristicSettings | None,
        Field(description="Wrapped characteristic of indicator_leq and scaled.", default=None)
    ]

    factor: Annotated[float, Field(description="Value of constant, multiplier of scaled.", default=1.0)]

    def to_domain(self) -> Characteristic:
        return Characteristic(
            self.kind,
            t=self.t,
            base=self.base.to_domain() if self.base is not None else None,
            factor=self.factor,
        )


class KernelSettings(StrictModel):
    method: Annotated[
        KernelMethod,
        Field(
            description=(
                "Cell kernel.\n"
                "  exact  → half-plane clipping (Voronoi and Laguerre)\n"
                "  raster → grid assignment, required by Johnson-Mehl\n"
            ),
            default=KernelMethod.exact
        )
    ]

    grid_h: Annotated[
        float | None,
        Field(description="Grid spacing of the raster kernel.", default=None)
    ]

    def to_domain(self) -> Kernel:
        return Kernel(self.method, self.grid_h)


class RuntimeSettings(StrictModel):
    guard_cap_factor: Annotated[
        float,
        Field(
            description=(
                "Largest guard allowed, in window sides.\n"
                "A resolved or doubled guard beyond it fails the run with exit code 4."
            ),
            default=4.0,
            gt=0
        )
    ]

    max_guard_doublings: Annotated[
        int,
        Field(description="Guard doublings tried when a window cell is not certified.", default=3, ge=0)
    ]

    pilot_size: Annotated[
        int,
        Field(description="Typical cells drawn by the pilot run of an auto guard or r_max.", default=10_000, ge=2)
    ]


class ExperimentSettings(StrictModel):
    model: Annotated[
        WeightModel,
        Field(description="Weight function: voronoi, laguerre or johnson_mehl.", default=WeightModel.voronoi)
    ]

    characteristic: Annotated[
        CharacteristicSettings,
        Field(description="Characteristic h being estimated.", default_factory=CharacteristicSettings)
    ]

    intensity: Annotated[float, Field(description="Intensity of the Poisson process.", default=1.0, gt=0)]

    marks: Annotated[
        MarkSettings,
        Field(description="Mark law Q_M.", default_factory=MarkSettings)
    ]

    lambda_values: Annotated[
        list[float],
        Field(description="Window volumes, strictly increasing.", default_factory=lambda: [100.0])
    ]

    replications: Annotated[int, Field(description="Replications per window volume.", default=100)]

    kind: Annotated[
        EstimatorKind,
        Field(description="Estimator.", default=EstimatorKind.full_sample)
    ]

    kernel: Annotated[
        KernelSettings,
        Field(description="Cell kernel.", default_factory=KernelSettings)
    ]

    guard: Annotated[
        float | Literal["auto"],
        Field(
            description=(
                "Guard width around the window, or 'auto' to resolve it as\n"
                "2 q + mu from the 0.9999 quantile q of a pilot of cone bounds.\n"
                "The manifest always records the resolved number."
            ),
            default="auto"
        )
    ]

    master_seed: Annotated[
        int,
        Field(description="Root of every seed path of the run.", default=0, ge=0, lt=2**64)
    ]

    moment_p: Annotated[
        float,
        Field(description="Order p of the reported moment E|xi|^p.", default=2.0, gt=0)
    ]

    def to_domain(self, runtime: RuntimeSettings) -> ExperimentConfig:
        return ExperimentConfig(
            model=self.model,
            characteristic=self.characteristic.to_domain(),
            mark_dist=self.marks.to_domain(),
            lambda_values=tuple(self.lambda_values),
            replications=self.replications,
            intensity=self.intensity,
            kind=self.kind,
            kernel=self.kernel.to_domain(),
            guard=None if self.guard == "auto" else float(self.guard),
            master_seed=self.master_seed,
            moment_p=self.moment_p,
            guard_cap_factor=runtime.guard_cap_factor,
            max_guard_doublings=runtime.max_guard_doublings,
        )


class OutputSettings(StrictModel):
    dir: Annotated[Path, Field(description="Directory receiving every artifact.", default=Path("tesslab-out"))]
    emit_ledger: Annotated[bool, Field(description="Write ledger.csv on estimate.", default=False)]
    emit_cells: Annotated[bool, Field(description="Write cells.json on tessellate and estimate.", default=False)]

    format: Annotated[
        Literal["json", "yaml"],
        Field(description="Format of the summary printed on stdout.", default="json")
    ]


class RealizationSettings(StrictModel):
    lambda_value: Annotated[
        float | None,
        Field(description="Window volume of sample, tessellate and estimate; the largest by default.", default=None)
    ]

    replication: Annotated[int, Field(description="Replication index of the realization.", default=0, ge=0)]

    t_grid: Annotated[
        list[float],
        Field(description="Thresholds of the distribution function estimate.", default_factory=list)
    ]

    base: Annotated[
        CharacteristicSettings | None,
        Field(description="Characteristic whose distribution function is estimated; volume by default.", default=None)
    ]

    def to_domain(self) -> RealizationOptions:
        return RealizationOptions(
            lam=self.lambda_value,
            replication=self.replication,
            t_grid=tuple(self.t_grid),
            base=self.base.to_domain() if self.base is not None else None,
        )


class Sigma2Settings(StrictModel):
    r_max: Annotated[
        float | Literal["auto"],
        Field(
            description="Truncation radius of the pair integral, or 'auto' for twice the 0.999 quantile of 2D + mu.",
            default="auto"
        )
    ]

    n_singles: Annotated[int, Field(description="Single insertions.", default=1000)]
    n_pairs: Annotated[int, Field(description="Pair insertions.", default=1000)]

    def to_domain(self) -> Sigma2Options:
        return Sigma2Options(None if self.r_max == "auto" else float(self.r_max), self.n_singles, self.n_pairs)


class TailsSettings(StrictModel):
    n: Annotated[int, Field(description="Typical cells drawn.", default=10_000)]
    quantile_low: Annotated[float, Field(description="Lower end of the fitted quantile range.", default=0.9)]
    quantile_high: Annotated[float, Field(description="Upper end of the fitted quantile range.", default=0.999)]

    def to_domain(self) -> TailsOptions:
        return TailsOptions(self.n, (self.quantile_low, self.quantile_high))


class CltSettings(StrictModel):
    lambda_value: Annotated[
        float | None,
        Field(description="Window volume of the CLT run; the largest by default.", default=None)
    ]

    oracle_centering: Annotated[
        bool,
        Field(description="Also test the sample centered at the typical-cell oracle mean.", default=True)
    ]

    def to_domain(self) -> CltOptions:
        return CltOptions(self.lambda_value, self.oracle_centering)


class TessLabConfig(BaseSettings):
    model_config = SettingsConfigDict(extra="forbid")

    experiment: Annotated[
        ExperimentSettings,
        Field(description="Process, characteristic, estimator and replications.", default_factory=ExperimentSettings)
    ]

    output: Annotated[
        OutputSettings,
        Field(description="Artifact emission.", default_factory=OutputSettings)
    ]

    realization: Annotated[
        RealizationSettings,
        Field(description="Single realization of sample, tessellate and estimate.", default_factory=RealizationSettings)
    ]

    sigma2: Annotated[
        Sigma2Settings,
        Field(description="Limiting variance estimate.", default_factory=Sigma2Settings)
    ]

    tails: Annotated[
        TailsSettings,
        Field(description="Diameter tail experiment.", default_factory=TailsSettings)
    ]

    clt: Annotated[
        CltSettings,
        Field(description="Central limit experiment.", default_factory=CltSettings)
    ]

    runtime: Annotated[
        RuntimeSettings,
        Field(description="Guard cap, doublings and pilot size.", default_factory=RuntimeSettings)
    ]

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        # the config document is the only source
        return (init_settings,)

    def to_domain(self, subcommand: Subcommand) -> RunConfig:
        return RunConfig(
            subcommand=subcommand,
            experiment=self.experiment.to_domain(self.runtime),
            output_dir=self.output.dir,
            emit_ledger=self.output.emit_ledger,
            emit_cells=self.output.emit_cells,
            output_format=self.output.format,
            pilot_size=self.runtime.pilot_size,
            realization=self.realization.to_domain(),
            sigma2=self.sigma2.to_domain(),
            tails=self.tails.to_domain(),
            clt=self.clt.to_domain(),
        )


class RuntimeEnv(BaseSettings):
    """Speed-only knobs read from TESSLAB_* variables."""
    model_config = SettingsConfigDict(env_prefix="TESSLAB_", extra="ignore")

    threads: Annotated[
        int,
        Field(description="Worker processes; affects speed only, never results.", default=1, ge=1)
    ]

    config: Annotated[
        str | None,
        Field(description="Configuration file used when --config is absent.", default=None)
    ]
