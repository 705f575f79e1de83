import pytest

from hybridrupture.core.scenarios import tpv3, host_rock
from hybridrupture.core.harness import sbim_comparison, strip_study, converge, bench

DX = 250.0

# velocidade de ruptura típica do TPV3, usada só na tolerância de chegada
RUPTURE_SPEED = 0.8 * 3464.0


@pytest.mark.slow
def test__tpv3__hybrid_matches_sbim():
    comparison = sbim_comparison(tpv3(DX, duration=4.0), 4.0)

    assert set(comparison) == {"A", "B", "C"}
    for station, errors in comparison.items():
        # RMS relativo ao pico da série de referência
        assert errors["slip_rate"] < 0.02, station
        assert errors["shear"] < 0.02, station
        assert errors["arrival"] <= 2.0 * DX / RUPTURE_SPEED, station


@pytest.mark.slow
def test__tpv3__strip_independence():
    widths = [4.0 * DX, 12.0 * DX, 24.0 * DX]
    study = strip_study(lambda l2: tpv3(DX, l2=l2, duration=4.0), widths, duration=4.0)

    assert set(study) == {(widths[0], widths[1]), (widths[0], widths[2]), (widths[1], widths[2])}
    for pair, changes in study.items():
        for station, change in changes.items():
            assert change < 0.01, (pair, station)


@pytest.mark.slow
def test__tpv3__convergence_slope():
    table = converge(lambda dx: tpv3(dx, duration=3.0), [800.0, 400.0, 200.0], 100.0, 3.0)

    # primeira ordem em dx
    assert 0.7 <= table.slope <= 1.3


@pytest.mark.slow
def test__bench__scaling():
    table = bench([32, 64], [4, 8, 16, 32], host_rock())

    assert table.r_squared > 0.98
    assert 0.3 <= table.ratio <= 3.0
