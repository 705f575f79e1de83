import pytest
import numpy as np

from hybridrupture import FaultSpec, RegionSpec, sbim_fault_solver
from hybridrupture.core.kernels import SyntheticKernels
from hybridrupture.core.scenarios import tpv3, lvfz, stepover, host_rock
from hybridrupture.core.fault import friction_coefficient
from hybridrupture.core.sbim import fault_plane, truncation_study
from hybridrupture.exceptions import UnsupportedMaterialException, InvalidScenarioException


def quiet_tpv3(duration: float=0.5):
    scenario = tpv3(500.0, duration=duration)
    spec = scenario.faults[0]
    fault = FaultSpec(spec.name, spec.x2, spec.x1_range, spec.x3_range, spec.law, spec.prestress)
    return scenario.with_changes(faults=[fault])


def test__fault_plane():
    scenario = tpv3(500.0)
    fault = fault_plane(scenario)

    assert fault.shape == (96, 48)
    assert fault.minus is None
    # região de ruptura 30 km x 15 km -> 61 x 31 nós livres
    assert int((~fault.locked).sum()) == 61 * 31
    assert np.isclose(np.linalg.norm(fault.tau0, axis=1).max(), 81.6e6)


def test__fault_plane__unsupported():
    scenario = tpv3(500.0)
    material = host_rock()
    layered = scenario.with_changes(
        materials=[material, material.scaled(0.8)],
        regions=[RegionSpec((scenario.origin[0], 0.0, scenario.origin[2]), (scenario.origin[0] + 5e3, 500.0, scenario.origin[2] + 5e3), 1)]
    )

    with pytest.raises(UnsupportedMaterialException):
        fault_plane(layered)

    with pytest.raises(UnsupportedMaterialException):
        fault_plane(lvfz(400.0))

    with pytest.raises(InvalidScenarioException):
        fault_plane(stepover(500.0))


def test__sbim_fault_solver__stuck_fault():
    scenario = quiet_tpv3()
    result = sbim_fault_solver(scenario, provider=SyntheticKernels())

    fault = result.faults["main"]
    assert result.n_steps == int(np.ceil(0.5 / result.dt - 1e-9))
    assert np.array_equal(fault.slip_rate, np.zeros_like(fault.slip_rate))
    assert np.array_equal(fault.slip, np.zeros_like(fault.slip))
    assert not result.ruptures["main"].ruptured.any()
    assert fault.stick.all()


def test__sbim_fault_solver__nucleation():
    scenario = tpv3(500.0, duration=0.2)
    steps = []
    result = sbim_fault_solver(scenario, provider=SyntheticKernels(), callback=lambda step, *_: steps.append(step))

    fault = result.faults["main"]
    patch = fault.box_mask((-1.5e3, 1.5e3), (-1.5e3, 1.5e3))
    series = result.series("C")

    assert steps == list(range(result.n_steps + 1))
    assert series.shape == (result.n_steps + 1, 8)
    centre = fault.nearest(0.0, 0.0)
    slipping = ~fault.stick

    assert slipping[centre]
    assert fault.slip_rate_magnitude()[centre] > 0
    assert result.ruptures["main"].ruptured.reshape(-1)[patch].all()
    assert result.ruptures["main"].arrival(0.0, 0.0) == 0.0
    assert np.allclose(fault.shear_magnitude()[slipping], 120e6 * friction_coefficient(scenario.faults[0].law, fault.slip_max[slipping]))


def test__truncation_study():
    changes = truncation_study(quiet_tpv3(0.2), provider=SyntheticKernels())

    assert changes == {"A": 0.0, "B": 0.0, "C": 0.0}


@pytest.mark.slow
def test__sbim_fault_solver__tpv3_ordering():
    result = sbim_fault_solver(tpv3(500.0, duration=4.0))
    rupture = result.ruptures["main"]

    b = rupture.arrival(4.5e3, 0.0)
    c = rupture.arrival(7.5e3, 0.0)

    assert np.isfinite(b)
    assert np.isnan(c) or b < c
    assert result.status == "completed"
