import pytest

from hybridrupture import RunConfig, Station, Path
from hybridrupture.core.kernels import HalfSpaceKernels, SyntheticKernels
from hybridrupture.core.scenarios import tpv3
from hybridrupture.exceptions import InvalidConfigException, InvalidScenarioException

from tests_hybridrupture.conftest import configure_env


def test__run_config__defaults():
    config = RunConfig.from_preset("tpv3", 500.0)
    data = config.to_dict()

    assert config.kind == "preset"
    assert data["time_step"] == {"policy": "cfl", "safety": 0.4}
    assert data["kernels"]["provider"] == "halfspace"
    assert data["output"]["directory"] is None
    assert data["threads"] == 1
    assert data["deterministic"] is True
    assert isinstance(config.kernel_provider(), HalfSpaceKernels)


def test__run_config__save_load(data_to_tests: Path):
    data_to_tests.mkdir(True)
    config = RunConfig.from_preset(
        "stepover", 500.0,
        time_step={"policy": "fixed", "dt": 0.02},
        duration=3.0,
        output={"directory": str(data_to_tests.join("run")), "snapshot_every": 10},
        stations=[Station("P0", "primary", -20e3, 5e3).to_dict()],
        kernels={"provider": "synthetic"},
        threads=4
    )

    path = config.save(data_to_tests.join("config.json"))
    loaded = RunConfig.load(path)

    assert loaded == config
    assert loaded.to_dict() == config.to_dict()
    assert isinstance(loaded.kernel_provider(), SyntheticKernels)


def test__run_config__invalid(data_to_tests: Path):
    with pytest.raises(InvalidConfigException):
        RunConfig({"preset": "tpv3", "dx": 500.0}, time_step={"policy": "fixed"})

    with pytest.raises(InvalidConfigException):
        RunConfig.from_dict({"scenario": {"preset": "tpv3", "dx": -1.0}})

    with pytest.raises(InvalidConfigException):
        RunConfig.from_dict({"scenario": {"preset": "tpv9", "dx": 500.0}})

    with pytest.raises(InvalidConfigException):
        RunConfig.from_dict({"scenario": {"preset": "tpv3", "dx": 500.0}, "time_step": {"policy": "cfl", "safety": 1.5}})

    data_to_tests.mkdir(True)
    broken = data_to_tests.join("broken.json")
    with broken.file("w", True) as file:
        file.write('{"scenario": ')

    with pytest.raises(InvalidConfigException):
        RunConfig.load(broken)


def test__run_config__resolve_scenario():
    config = RunConfig.from_preset("tpv3", 500.0, duration=2.0, l2=4000.0, stations=[{"name": "D", "fault": "main", "x1": 3e3, "x3": 0.0}])
    scenario = config.resolve_scenario()

    assert scenario.duration == 2.0
    assert scenario.extents[1] == 2000.0
    assert [station.name for station in scenario.stations] == ["D"]

    plain = RunConfig.from_preset("tpv3", 500.0).resolve_scenario()
    assert plain.to_dict() == tpv3(500.0).to_dict()


def test__run_config__explicit_scenario():
    scenario = tpv3(500.0, duration=1.0)
    config = RunConfig({"explicit": scenario.to_dict()})

    assert config.kind == "explicit"
    assert config.resolve_scenario().to_dict() == scenario.to_dict()

    with pytest.raises(InvalidConfigException):
        RunConfig({"explicit": scenario.to_dict()}, l2=2000.0).resolve_scenario()

    with pytest.raises(InvalidConfigException):
        RunConfig.from_preset("lvfz", 400.0, l2=2000.0).resolve_scenario()


def test__run_config__timestep():
    scenario = tpv3(500.0)

    assert RunConfig.from_preset("tpv3", 500.0).timestep(scenario) == pytest.approx(500.0 * 0.4 / 6000.0)
    assert RunConfig.from_preset("tpv3", 500.0, time_step={"policy": "cfl", "safety": 0.2}).timestep(scenario) == pytest.approx(500.0 * 0.2 / 6000.0)
    assert RunConfig.from_preset("tpv3", 500.0, time_step={"policy": "fixed", "dt": 0.01}).timestep(scenario) == 0.01


def test__run_config__validate():
    assert isinstance(RunConfig.from_preset("tpv3", 500.0).validate(), list)

    with pytest.raises(InvalidScenarioException):
        RunConfig.from_preset("tpv3", 500.0, time_step={"policy": "fixed", "dt": 1.0}).validate()


def test__run_config__environment(test_env: Path, data_to_tests: Path):
    env = configure_env(test_env, data_to_tests)
    scenario = tpv3(500.0)

    assert RunConfig.from_preset("tpv3", 500.0, threads=8).effective_threads(env) == 2
    assert RunConfig.from_preset("tpv3", 500.0).effective_threads(env) == 1

    assert RunConfig.from_preset("tpv3", 500.0).output_directory(scenario, env) == data_to_tests.join("outputs", "tpv3")
    assert RunConfig.from_preset("tpv3", 500.0, output={"directory": "elsewhere"}).output_directory(scenario, env) == Path("elsewhere")
