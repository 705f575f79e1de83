import pytest
import numpy as np

from hybridrupture import Path
from hybridrupture.core.outputs import RuptureTimeMap, STATION_COLUMNS, write_binary_snapshot
from hybridrupture.core.harness import BenchTable, ConvergenceTable
from hybridrupture.core.plotting import plot, plot_rupture
from hybridrupture.exceptions import UnknownPlotKindException, PathNotFoundException, UnexpectedTypeException


def run_directory(data_to_tests: Path) -> Path:
    """diretório com os artefatos mínimos de uma execução, sem rodar o solver."""
    directory = data_to_tests.join("run")
    directory.join("stations").mkdir(True)
    directory.join("snapshots").mkdir(True)

    x1 = 100.0 * np.arange(-5, 6)
    x3 = 100.0 * np.arange(-3, 4)
    times = np.hypot(x1[:, None], x3[None, :]) / 1000.0
    RuptureTimeMap("main", x1, x3, 1e-3, times).save(directory.join("rupture_main.npz"))

    t = np.linspace(0.0, 1.0, 21)
    series = np.zeros((t.size, len(STATION_COLUMNS)))
    series[:, 0] = t
    series[:, 3] = np.maximum(0.0, t - 0.2)
    series[:, 5] = 70e6
    np.savetxt(str(directory.join("stations", "A.csv")), series, delimiter=",", header=",".join(STATION_COLUMNS), comments="")

    for step in range(3):
        field = np.full((x1.size, x3.size), 0.5 * step)
        write_binary_snapshot(directory.join("snapshots"), f"fault_main_{step:07d}_slip_rate", field, 100.0, (x1[0], 0.0, x3[0]), 0.1 * step)

    return directory


def test__plot__run_directory(data_to_tests: Path):
    directory = run_directory(data_to_tests)

    rupture = plot(directory, "rupture")
    stations = plot(directory, "stations")
    spacetime = plot(directory, "spacetime")

    assert [path.name for path in rupture] == ["rupture_main.png"]
    assert [path.name for path in stations] == ["stations.png"]
    assert [path.name for path in spacetime] == ["spacetime_main.png"]
    assert all(path.exists for path in rupture + stations + spacetime)


def test__plot__single_artifact(data_to_tests: Path):
    directory = run_directory(data_to_tests)
    figures = data_to_tests.join("figures")

    paths = plot(directory.join("rupture_main.npz"), "rupture", figures)

    assert paths == [figures.join("rupture_main.png")]
    assert paths[0].exists


def test__plot__empty_rupture_map(data_to_tests: Path):
    data_to_tests.mkdir(True)
    rupture = RuptureTimeMap("quiet", np.arange(4) * 100.0, np.arange(3) * 100.0)

    # nenhum nó rompido: só os eixos
    assert plot_rupture(rupture, data_to_tests.join("quiet.png")).exists


def test__plot__tables(data_to_tests: Path):
    data_to_tests.mkdir(True)

    bench = BenchTable([(64, 1, 0.01), (64, 2, 0.02), (64, 4, 0.04), (256, 1, 0.04)], [(64, 0.005), (256, 0.02)], 0.01, 1.0, 0.5)
    convergence = ConvergenceTable([400.0, 200.0], [0.04, 0.02], 1.0, 100.0, 1.5, "main")

    scaling = plot(bench.save(data_to_tests.join("bench.json")), "scaling")
    table = plot(convergence.save(data_to_tests.join("convergence.json")), "convergence")

    assert scaling == [data_to_tests.join("bench.png")]
    assert table == [data_to_tests.join("convergence.png")]
    assert scaling[0].exists and table[0].exists


def test__plot__invalid(data_to_tests: Path):
    directory = run_directory(data_to_tests)

    with pytest.raises(UnknownPlotKindException):
        plot(directory, "histogram")

    with pytest.raises(PathNotFoundException):
        plot(data_to_tests.join("missing"), "rupture")

    with pytest.raises(UnexpectedTypeException):
        plot(str(directory), "rupture")
