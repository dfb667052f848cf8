import json

import pytest

from tesslab.core.models.cell import Kernel, WeightModel
from tesslab.core.models.characteristic import Characteristic
from tesslab.core.models.estimate import EstimatorKind
from tesslab.core.models.experiment import ExperimentConfig
from tesslab.core.models.point import Box, MarkDistribution
from tesslab.core.pointproc.sampler import lattice_fixture, sample_guarded


@pytest.fixture
def window() -> Box:
    return Box.centered(100.0)


@pytest.fixture
def lattice(window):
    return lattice_fixture(window, 1.0, 0.0)


@pytest.fixture
def voronoi_sample():
    return sample_guarded(Box.centered(25.0), 20.0, 1.0, MarkDistribution.point_mass(0.0), 11)


@pytest.fixture
def laguerre_sample():
    return sample_guarded(Box.centered(25.0), 20.0, 1.0, MarkDistribution.uniform(0.0, 0.5), 12)


@pytest.fixture
def small_experiment() -> ExperimentConfig:
    return ExperimentConfig(
        model=WeightModel.voronoi,
        characteristic=Characteristic.volume(),
        mark_dist=MarkDistribution.point_mass(0.0),
        lambda_values=(16.0, 36.0),
        replications=20,
        kind=EstimatorKind.full_sample,
        kernel=Kernel.exact(),
        guard=8.0,
        master_seed=3,
        guard_cap_factor=10.0,
    )


@pytest.fixture
def config_data(tmp_path) -> dict:
    return {
        "experiment": {
            "model": "voronoi",
            "characteristic": {"kind": "volume"},
            "lambda_values": [16.0],
            "replications": 10,
            "guard": 8.0,
            "master_seed": 1,
        },
        "output": {"dir": str(tmp_path / "out")},
        "runtime": {"pilot_size": 200, "guard_cap_factor": 10.0},
    }


@pytest.fixture
def config_file(tmp_path, config_data):
    file = tmp_path / "tesslab.json"
    file.write_text(json.dumps(config_data))
    return file
