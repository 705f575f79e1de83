import pytest

from hybridrupture import Scenario, FaultSpec, Station, SlipWeakeningLaw, Prestress, NucleationPatch, FrictionOverride
from hybridrupture.core.scenarios import tpv3, lvfz
from hybridrupture.exceptions import InvalidFaultException, InvalidConfigException, UnexpectedValueException


def test__slip_weakening_law():
    law = SlipWeakeningLaw(0.677, 0.525, 0.4)

    assert law.coefficient(0.0) == pytest.approx(0.677)
    assert law.coefficient(0.2) == pytest.approx(0.601)
    assert law.coefficient(0.4) == pytest.approx(0.525)
    assert law.coefficient(5.0) == pytest.approx(0.525)

    with pytest.raises(InvalidFaultException):
        SlipWeakeningLaw(0.5, 0.6, 0.4)

    with pytest.raises(InvalidFaultException):
        SlipWeakeningLaw(0.677, 0.525, 0.0)


def test__prestress():
    prestress = Prestress(70e6, 120e6)

    assert prestress.tau0 == (70e6, 0.0)
    assert prestress.shear == 70e6
    assert Prestress.from_dict(prestress.to_dict()).tau0 == prestress.tau0

    with pytest.raises(InvalidFaultException):
        Prestress(70e6, -1.0)


def test__nucleation_patch():
    patch = NucleationPatch((-1.5e3, 1.5e3), (-1.5e3, 1.5e3), "stress_step", 81.6e6)

    assert NucleationPatch.from_dict(patch.to_dict()).to_dict() == patch.to_dict()

    with pytest.raises(UnexpectedValueException):
        NucleationPatch((0, 1), (0, 1), "stress_step")

    with pytest.raises(UnexpectedValueException):
        NucleationPatch((1, 0), (0, 1), "strength_drop")

    with pytest.raises(UnexpectedValueException):
        NucleationPatch((0, 1), (0, 1), "unknown")


def test__friction_override():
    override = FrictionOverride((0, 10e3), (0, 1e3), mu_k=1.0)

    assert override.mu_k == 1.0
    assert not override.locked
    assert FrictionOverride.from_dict(override.to_dict()).to_dict() == override.to_dict()


def test__fault_spec__contains():
    fault = FaultSpec("main", 0.0, (-15e3, 15e3), (-7.5e3, 7.5e3), SlipWeakeningLaw(0.677, 0.525, 0.4), Prestress(70e6, 120e6))

    assert fault.contains(0.0, 0.0)
    assert fault.contains(15e3, -7.5e3)
    assert not fault.contains(15.1e3, 0.0)


def test__scenario__to_dict():
    scenario = tpv3(500.0)
    data = scenario.to_dict()

    assert Scenario.from_dict(data).to_dict() == data
    assert data["mode"] == "symmetric"
    assert [station["name"] for station in data["stations"]] == ["A", "B", "C"]


def test__scenario__from_dict__unknown_key():
    data = tpv3(500.0).to_dict()
    data["unknown"] = 1

    with pytest.raises(InvalidConfigException):
        Scenario.from_dict(data)


def test__scenario__with_changes():
    scenario = tpv3(500.0)
    stations = [Station("D", "main", 1e3, 1e3)]

    changed = scenario.with_changes(duration=2.0, stations=stations)

    assert changed.duration == 2.0
    assert [station.name for station in changed.stations] == ["D"]
    assert scenario.duration == 12.0
    assert len(scenario.stations) == 3


def test__scenario__fault():
    scenario = tpv3(500.0)

    assert scenario.fault("main").name == "main"

    with pytest.raises(KeyError):
        scenario.fault("other")


def test__scenario__homogeneous():
    assert tpv3(500.0).homogeneous
    assert not lvfz(400.0).homogeneous


def test__scenario__invalid():
    scenario = tpv3(500.0)

    with pytest.raises(UnexpectedValueException):
        scenario.with_changes(duration=0.0)

    with pytest.raises(UnexpectedValueException):
        scenario.with_changes(mode="one_sided")

    with pytest.raises(UnexpectedValueException):
        scenario.with_changes(faults=())
