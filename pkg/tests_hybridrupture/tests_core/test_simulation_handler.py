import os
import pytest
import numpy as np

from hybridrupture import ElasticMaterial, RunConfig, SimulationHandler, RunArtifacts, Path, run
from hybridrupture.core.outputs import read_manifest, read_station_series, read_binary_snapshot, RuptureTimeMap
from hybridrupture.exceptions import InvalidScenarioException

from tests_hybridrupture.conftest import configure_env, small_scenario


def small_config(host: ElasticMaterial, directory: Path, **output) -> RunConfig:
    return RunConfig(
        {"explicit": small_scenario(host).to_dict()},
        output={"directory": str(directory), **output},
        kernels={"provider": "synthetic"},
        threads=2
    )


def test__simulation_handler__run(host: ElasticMaterial, test_env: Path, data_to_tests: Path):
    env = configure_env(test_env, data_to_tests)
    directory = data_to_tests.join("run")
    progress = []

    handler = SimulationHandler(small_config(host, directory, snapshot_every=2), env)
    artifacts = handler.run(lambda *args: progress.append(args))

    assert isinstance(artifacts, RunArtifacts)
    assert artifacts.status == "completed"
    assert artifacts.directory == directory
    assert artifacts.result.n_steps == 8
    assert [entry[0] for entry in progress] == list(range(1, 9))

    listed = artifacts.artifacts
    for name in ("manifest.json", "rupture_main.npz", "fault_main_final.npz", os.path.join("stations", "centre.csv")):
        assert name in listed
        assert directory.join(name).exists

    # passos 0, 2, 4, 6 e 8, três campos da falha, .bin e .hdr
    snapshots = [name for name in listed if name.startswith("snapshots")]
    assert len(snapshots) == 5 * 3 * 2

    manifest = read_manifest(directory.join("manifest.json"))
    assert manifest == artifacts.manifest
    assert manifest["n_steps"] == 8
    assert manifest["dt"] == pytest.approx(100.0 * 0.4 / 6000.0)
    assert manifest["config"]["threads"] == 2

    series = read_station_series(directory.join("stations", "centre.csv"))
    assert series.shape == (9, 8)
    assert series[-1, 3] > 0

    rupture = RuptureTimeMap.load(directory.join("rupture_main.npz"))
    assert rupture.arrival(0.0, 0.0) == pytest.approx(handler.dt)


@pytest.mark.asyncio
async def test__simulation_handler__run_async_strip_snapshots(host: ElasticMaterial, test_env: Path, data_to_tests: Path):
    env = configure_env(test_env, data_to_tests)
    directory = data_to_tests.join("strip")

    handler = SimulationHandler(small_config(host, directory, snapshot_every=4, strip_snapshots=True), env)
    artifacts = await handler.run_async()

    assert artifacts.status == "completed"

    field, header = read_binary_snapshot(directory.join("snapshots", "strip_nodes_0000004_speed.bin"))
    assert field.shape == (9, 5, 9)
    assert header["time"] == pytest.approx(4 * handler.dt)
    assert np.all(np.isfinite(field))

    stress, header = read_binary_snapshot(directory.join("snapshots", "strip_cells_0000008_sigma12.bin"))
    assert stress.shape == (8, 4, 8)
    assert header["origin"] == (-350.0, -150.0, -350.0)


def test__simulation_handler__default_directory(host: ElasticMaterial, test_env: Path, data_to_tests: Path):
    env = configure_env(test_env, data_to_tests)
    config = RunConfig({"explicit": small_scenario(host).to_dict()}, kernels={"provider": "synthetic"})

    handler = SimulationHandler(config, env)

    assert handler.directory == data_to_tests.join("outputs", "small")
    assert handler.warnings == []


def test__simulation_handler__invalid(host: ElasticMaterial, test_env: Path, data_to_tests: Path):
    env = configure_env(test_env, data_to_tests)
    config = RunConfig({"explicit": small_scenario(host).to_dict()}, time_step={"policy": "fixed", "dt": 1.0}, kernels={"provider": "synthetic"})

    with pytest.raises(InvalidScenarioException):
        SimulationHandler(config, env)

    assert not data_to_tests.join("outputs").exists


def test__run(host: ElasticMaterial, test_env: Path, data_to_tests: Path):
    env = configure_env(test_env, data_to_tests)
    directory = data_to_tests.join("shortcut")

    artifacts = run(small_config(host, directory), directory, env)

    assert artifacts.status == "completed"
    assert directory.join("manifest.json").exists
