"""
figuras dos artefatos de uma execução: contornos da frente de ruptura, séries das estações, diagrama espaço–tempo
da taxa de deslizamento e gráficos de escala e de convergência dos harnesses.
"""

import os
import re
import logging
from typing import Literal, Optional

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .outputs import RuptureTimeMap, read_station_series, read_binary_snapshot, STATION_COLUMNS
from .harness import BenchTable, ConvergenceTable
from .utils import Path, parse_message, check_type
from .messeger import UNKNOWN_PLOT, PATH_NOT_FOUND
from ..exceptions import UnknownPlotKindException, PathNotFoundException

logger = logging.getLogger(__name__)

PlotKind = Literal["rupture", "stations", "spacetime", "scaling", "convergence"]
PLOT_KINDS = ("rupture", "stations", "spacetime", "scaling", "convergence")
CONTOUR_INTERVAL = 0.5

__all__ = ["PLOT_KINDS", "CONTOUR_INTERVAL", "plot", "plot_rupture", "plot_stations", "plot_spacetime", "plot_scaling", "plot_convergence"]


def _save(figure, path: Path) -> Path:
    figure.savefig(str(path), dpi=120)
    plt.close(figure)
    logger.info("figure written to %s", path)
    return path


def _directory_of(artifact: Path) -> Path:
    return artifact if artifact.is_type("directory") else Path(os.path.dirname(str(artifact)) or ".")


def plot_rupture(rupture: RuptureTimeMap, path: Path, interval: float=CONTOUR_INTERVAL) -> Path:
    """
    contornos do tempo de ruptura a cada "interval" segundos no plano (x1, x3), em km.

    ### observação:

        - um mapa sem nós rompidos gera a figura só com os eixos
    """
    figure, ax = plt.subplots(figsize=(9, 4.5), constrained_layout=True)
    times = np.ma.masked_invalid(rupture.times.T)
    if times.count() and min(times.shape) >= 2:
        levels = np.arange(interval, float(times.max()) + interval, interval)
        levels = levels[levels >= float(times.min())]
        if levels.size:
            contours = ax.contour(rupture.x1 / 1e3, rupture.x3 / 1e3, times, levels=levels, colors="k", linewidths=0.8)
            ax.clabel(contours, fmt="%.1f s", fontsize=7)

    ax.set_xlim(rupture.x1[0] / 1e3, rupture.x1[-1] / 1e3)
    ax.set_ylim(rupture.x3[0] / 1e3, rupture.x3[-1] / 1e3)
    ax.set_aspect("equal")
    ax.set_xlabel("x1 (km)")
    ax.set_ylabel("x3 (km)")
    ax.set_title(f"rupture front of {rupture.name} every {interval:g} s")
    return _save(figure, path)


def plot_stations(series: dict[str, np.ndarray], path: Path) -> Path:
    """uma linha de painéis por estação: |δ̇| e |τ| contra o tempo."""
    names = sorted(series)
    figure, axes = plt.subplots(max(1, len(names)), 2, figsize=(10, 2.4 * max(1, len(names))), squeeze=False, constrained_layout=True)
    t, rate1, rate3, tau1, tau3 = (STATION_COLUMNS.index(c) for c in ("t", "rate1", "rate3", "tau1", "tau3"))

    for row, name in zip(axes, names):
        data = series[name]
        row[0].plot(data[:, t], np.hypot(data[:, rate1], data[:, rate3]), "b-", linewidth=1.2)
        row[0].set_ylabel(f"{name}: slip rate (m/s)")
        row[1].plot(data[:, t], np.hypot(data[:, tau1], data[:, tau3]) / 1e6, "r-", linewidth=1.2)
        row[1].set_ylabel(f"{name}: shear (MPa)")
        for ax in row:
            ax.grid(True, alpha=0.3)
    for ax in axes[-1]:
        ax.set_xlabel("time (s)")
    return _save(figure, path)


def plot_spacetime(times: np.ndarray, x1: np.ndarray, rates: np.ndarray, path: Path, title: str="slip rate along x3 = 0") -> Path:
    """
    diagrama espaço–tempo (x1, t) da taxa de deslizamento.

    ### parâmetros:

        times (np.ndarray): instantes (n_t,)
        x1 (np.ndarray): coordenadas ao longo da direção (n1,)
        rates (np.ndarray): |δ̇| de shape (n_t, n1)
    """
    figure, ax = plt.subplots(figsize=(9, 5), constrained_layout=True)
    mesh = ax.pcolormesh(x1 / 1e3, times, rates, cmap="viridis", shading="nearest")
    colorbar = figure.colorbar(mesh, ax=ax)
    colorbar.set_label("slip rate (m/s)")
    ax.set_xlabel("x1 (km)")
    ax.set_ylabel("time (s)")
    ax.set_title(title)
    return _save(figure, path)


def plot_scaling(table: BenchTable, path: Path) -> Path:
    """tempo por passo dos elementos finitos contra N2 e dos dois componentes contra N1N3."""
    figure, (left, right) = plt.subplots(1, 2, figsize=(10, 4), constrained_layout=True)
    fixed = table.fe[0][0]

    layers = [(n2, seconds) for n1n3, n2, seconds in table.fe if n1n3 == fixed]
    n2 = np.array([row[0] for row in layers], dtype=float)
    left.plot(n2, [row[1] for row in layers], "ko", label="FE")
    mean = float(np.mean([row[1] for row in layers]))
    left.plot(n2, mean + table.per_layer * (n2 - n2.mean()), "k--", linewidth=0.8, label=f"R² = {table.r_squared:.3f}")
    left.set_xlabel("N2")
    left.set_ylabel("time per step (s)")
    left.set_title(f"N1N3 = {fixed}")
    left.legend()

    reference = table.fe[0][1]
    sides = [(n1n3, seconds) for n1n3, n2, seconds in table.fe if n2 == reference]
    sides = sorted(dict(sides).items())
    right.loglog([row[0] for row in sides], [row[1] for row in sides], "ko-", label=f"FE (N2 = {reference})")
    right.loglog([row[0] for row in table.sbi], [row[1] for row in table.sbi], "bs-", label="SBI")
    right.set_xlabel("N1N3")
    right.set_ylabel("time per step (s)")
    right.set_title(f"SBI / layer = {table.ratio:.2f}")
    right.legend()
    for ax in (left, right):
        ax.grid(True, alpha=0.3)
    return _save(figure, path)


def plot_convergence(table: ConvergenceTable, path: Path) -> Path:
    figure, ax = plt.subplots(figsize=(6, 4.5), constrained_layout=True)
    pairs = [(dx, error) for dx, error in zip(table.dx, table.errors) if error > 0]
    if pairs:
        ax.loglog([p[0] for p in pairs], [p[1] for p in pairs], "ko-")
    ax.set_xlabel("dx (m)")
    ax.set_ylabel("normalized L2 error of slip")
    ax.set_title(f"{table.fault} at t = {table.time:g} s, slope {table.slope:.2f}")
    ax.grid(True, which="both", alpha=0.3)
    return _save(figure, path)


def _spacetime_series(directory: Path, fault: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    pattern = re.compile(rf"^fault_{re.escape(fault)}_(\d+)_slip_rate\.bin$")
    files = sorted((int(match.group(1)), item) for item in directory.items() if (match := pattern.match(item.name)))
    times, rows, x1 = [], [], None
    for _, item in files:
        field, header = read_binary_snapshot(item)
        x1_0, _, x3_0 = header["origin"]
        k = int(np.clip(round(-x3_0 / header["spacing"]), 0, field.shape[1] - 1))
        x1 = x1_0 + header["spacing"] * np.arange(field.shape[0])
        times.append(header["time"])
        rows.append(field[:, k])
    return np.array(times), x1, np.array(rows)


def plot(artifact: Path, kind: PlotKind, output: Optional[Path]=None) -> list[Path]:
    """
    gera as figuras de um artefato.

    ### parâmetros:

        artifact (Path): diretório da execução, ou o arquivo do artefato (rupture_*.npz, tabela JSON do bench ou do converge)
        kind (PlotKind): "rupture", "stations", "spacetime", "scaling" ou "convergence"
        output (Optional[Path]): diretório das figuras (padrão: o diretório do artefato)

    ### uso:

        plot(Path("outputs", "tpv3"), "rupture") # [Path("outputs/tpv3/rupture_main.png")]

    ### retorno:

        list[Path]: figuras PNG gravadas
    """
    check_type("plot(...)", "artifact", artifact, Path)
    if kind not in PLOT_KINDS:
        raise UnknownPlotKindException(parse_message(UNKNOWN_PLOT, KIND=kind, KINDS=", ".join(PLOT_KINDS)))
    if not artifact.exists:
        raise PathNotFoundException(parse_message(PATH_NOT_FOUND, PATH=str(artifact), TYPE="artifact"))

    directory = _directory_of(artifact)
    output = output or directory
    output.mkdir(exists_ok=True)
    is_directory = artifact.is_type("directory")

    if kind == "rupture":
        sources = [item for item in artifact.items() if re.match(r"^rupture_.+\.npz$", item.name)] if is_directory else [artifact]
        return [plot_rupture(RuptureTimeMap.load(source), output.join(source.name[:-4] + ".png")) for source in sources]

    if kind == "stations":
        stations = artifact.join("stations") if is_directory and artifact.join("stations").exists else artifact
        series = {item.name[:-4]: read_station_series(item) for item in stations.items() if item.name.endswith(".csv")}
        return [plot_stations(series, output.join("stations.png"))]

    if kind == "spacetime":
        snapshots = artifact.join("snapshots") if artifact.join("snapshots").exists else artifact
        faults = sorted({match.group(1) for item in snapshots.items() if (match := re.match(r"^fault_(.+)_\d+_slip_rate\.bin$", item.name))})
        paths = []
        for fault in faults:
            times, x1, rates = _spacetime_series(snapshots, fault)
            paths.append(plot_spacetime(times, x1, rates, output.join(f"spacetime_{fault}.png"), f"slip rate of {fault} along x3 = 0"))
        return paths

    if kind == "scaling":
        return [plot_scaling(BenchTable.load(artifact), output.join(artifact.name.rsplit(".", 1)[0] + ".png"))]

    return [plot_convergence(ConvergenceTable.load(artifact), output.join(artifact.name.rsplit(".", 1)[0] + ".png"))]
