import pytest

from hybridrupture import Scenario, SlipWeakeningLaw, Prestress, Station
from hybridrupture.core.scenarios import (
    PRESETS,
    tpv3,
    lvfz,
    offfault_lvz,
    stepover,
    host_rock,
    build_preset,
    strength_ratio,
    cohesive_zone_estimate,
    validate_scenario
)
from hybridrupture.exceptions import InvalidScenarioException


def test__host_rock():
    host = host_rock()

    assert host.density == 2670.0
    assert host.cp == pytest.approx(6000.0)
    assert host.cs == pytest.approx(3464.0)


def test__tpv3():
    scenario = tpv3(500.0)
    fault = scenario.faults[0]

    assert scenario.mode == "symmetric"
    assert scenario.extents == (48000.0, 1000.0, 24000.0)
    assert scenario.origin == (-24000.0, 0.0, -12000.0)
    assert scenario.homogeneous
    assert fault.nucleation[0].value == 81.6e6
    assert [station.name for station in scenario.stations] == ["A", "B", "C"]
    assert scenario.fault("main").contains(7.5e3, 0.0)


def test__strength_ratio():
    assert strength_ratio(SlipWeakeningLaw(0.677, 0.525, 0.4), Prestress(70e6, 120e6)) == pytest.approx((81.24 - 70.0) / (70.0 - 63.0), rel=1e-9)

    scenario = stepover(500.0)
    primary = scenario.fault("primary")

    assert primary.prestress.shear == pytest.approx(72.53e6, rel=1e-3)
    assert strength_ratio(primary.law, primary.prestress) == pytest.approx(1.75, rel=3e-3)


def test__stepover():
    scenario = stepover(500.0)

    assert scenario.mode == "two_sided"
    assert [fault.name for fault in scenario.faults] == ["primary", "secondary"]
    assert scenario.fault("secondary").x2 - scenario.fault("primary").x2 == pytest.approx(1000.0)
    assert scenario.fault("primary").nucleation[0].mechanism == "strength_drop"
    assert scenario.fault("primary").overrides[0].mu_k == 1.0

    printed = stepover(500.0, tau0=71.2e6).fault("primary")
    assert strength_ratio(printed.law, printed.prestress) == pytest.approx(1.99, abs=0.01)

    with pytest.raises(InvalidScenarioException):
        stepover(300.0)


def test__low_velocity_zones():
    zone = lvfz(400.0)
    outside = offfault_lvz(400.0)

    for scenario in (zone, outside):
        assert scenario.mode == "symmetric"
        assert not scenario.homogeneous
        assert scenario.materials[1].cs == pytest.approx(0.8 * 3464.0)
        assert scenario.faults[0].law.dc == 0.2

    assert zone.regions[0].lower[1] == 0.0
    assert outside.regions[0].lower[1] == pytest.approx(800.0)
    assert [station.x1 for station in zone.stations] == [6e3, 12e3, 20e3]


def test__cohesive_zone_estimate():
    estimate = cohesive_zone_estimate(tpv3(500.0))

    assert estimate["main"] == pytest.approx(621.0, rel=2e-3)


def test__build_preset():
    assert set(PRESETS) == {"tpv3", "lvfz", "offfault_lvz", "stepover"}
    assert build_preset("tpv3", 500.0, duration=4.0).duration == 4.0
    assert build_preset("tpv3", 500.0).to_dict() == build_preset("tpv3", 500.0).to_dict()

    with pytest.raises(InvalidScenarioException):
        build_preset("tpv5", 500.0)

    with pytest.raises(InvalidScenarioException):
        build_preset("tpv3", 500.0, friction=0.6)


def test__scenario__dict_is_deterministic():
    scenario = stepover(500.0)
    rebuilt = Scenario.from_dict(scenario.to_dict())

    assert rebuilt.to_dict() == scenario.to_dict()


@pytest.mark.parametrize("name", ["tpv3", "lvfz", "offfault_lvz", "stepover"])
def test__validate_scenario__presets(name: str):
    dx = 400.0 if name in ("lvfz", "offfault_lvz") else 500.0

    warnings = validate_scenario(build_preset(name, dx))

    assert isinstance(warnings, list)


def test__validate_scenario__warnings():
    warnings = validate_scenario(tpv3(500.0))

    assert any("cohesive zone" in warning for warning in warnings)
    assert any("periodic images" in warning for warning in warnings)

    # 4 s de propagação cabem nas margens de 200 km
    quiet = validate_scenario(tpv3(500.0, duration=4.0, margins=(100e3, 100e3)))
    assert not any("periodic images" in warning for warning in quiet)


def test__validate_scenario__errors():
    scenario = tpv3(500.0)

    with pytest.raises(InvalidScenarioException):
        validate_scenario(scenario, dt=1.0)

    with pytest.raises(InvalidScenarioException):
        validate_scenario(scenario.with_changes(stations=[Station("far", "main", 20e3, 0.0)]))

    with pytest.raises(InvalidScenarioException):
        validate_scenario(scenario.with_changes(stations=[Station("A", "main", 0.0, 0.0), Station("A", "main", 1e3, 0.0)]))
