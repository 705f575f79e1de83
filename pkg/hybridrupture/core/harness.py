"""
harness de verificação: convergência em malha, desempenho por passo, independência da largura da faixa,
comparação com o solver SBIM e limite estático da fronteira espectral.
"""

import math
import time
import logging
import statistics
from typing import Callable, Optional, Sequence

import numpy as np

from ..models.scenario import Scenario
from ..models.materials import ElasticMaterial
from ..models.grid import build_grid
from .config import RunConfig
from .fem import FiniteElementMesh, SimulationState, StiffnessOperator, assemble_lumped_mass, predict, correct, cfl_timestep
from .kernels import KernelProvider
from .sbi import SbiBoundary, wavenumbers, static_traction
from .coupler import HybridSolver
from .sbim import sbim_fault_solver
from .outputs import RunResult, relative_rms
from .utils import Path, parse_message, check_value, is_admissible_size, dump_json, load_json
from .messeger import (
    T_MAX,
    CFL_SAFETY,
    BENCH_WARMUP,
    BENCH_STEPS,
    BENCH_HISTORY,
    NON_NESTED,
    INADMISSIBLE_SIZE
)
from ..exceptions import NonNestedGridsException, InvalidGridException

logger = logging.getLogger(__name__)

Runner = Callable[[Scenario, float], RunResult]

__all__ = [
    "hybrid_runner",
    "scenario_family",
    "ConvergenceTable",
    "field_error",
    "converge",
    "error_vs_time",
    "BenchTable",
    "bench",
    "strip_study",
    "sbim_comparison",
    "static_limit_check"
]


def hybrid_runner(scenario: Scenario, duration: float, **options) -> RunResult:
    """executa a malha híbrida por "duration" segundos (dt pelo CFL padrão)."""
    with HybridSolver.from_scenario(scenario, duration=duration, **options) as solver:
        return solver.run()


def scenario_family(config: RunConfig) -> Callable[[float], Scenario]:
    """cenários da mesma configuração variando só dx (para converge)."""
    def build(dx: float) -> Scenario:
        data = config.to_dict()
        if config.kind == "explicit":
            data["scenario"]["explicit"] = {**data["scenario"]["explicit"], "dx": float(dx)}
        else:
            data["scenario"] = {**data["scenario"], "dx": float(dx)}
        return RunConfig.from_dict(data).resolve_scenario()
    return build


def _nested(dx: float, coarse: float) -> bool:
    ratio = coarse / dx
    return ratio >= 1.0 - 1e-9 and abs(ratio - round(ratio)) < 1e-9 * max(1.0, ratio)


def _restrict(values: np.ndarray, x1: np.ndarray, x3: np.ndarray, coarse_x1: np.ndarray, coarse_x3: np.ndarray) -> np.ndarray:
    """amostra um campo (n1, n3) da falha nos nós da grade grossa."""
    dx = x1[1] - x1[0]
    i = np.rint((coarse_x1 - x1[0]) / dx).astype(int)
    k = np.rint((coarse_x3 - x3[0]) / dx).astype(int)
    return values[np.ix_(i, k)]


def field_error(field: np.ndarray, reference: np.ndarray) -> float:
    """erro L2 normalizado ‖field − reference‖/‖reference‖ (0 para campos idênticos)."""
    field = np.asarray(field, dtype=float)
    reference = np.asarray(reference, dtype=float)
    difference = float(np.linalg.norm(field - reference))
    norm = float(np.linalg.norm(reference))
    if norm == 0.0:
        return 0.0 if difference == 0.0 else math.inf
    return difference / norm


class ConvergenceTable:
    """
    resultado de converge: erro L2 do deslizamento em t fixo contra a malha de referência, e a inclinação log–log.

    ### atributos:

        dx (list[float]): espaçamentos testados
        errors (list[float]): erro normalizado de cada espaçamento
        slope (float): inclinação do ajuste de mínimos quadrados de log(erro) × log(dx)
        reference (float): espaçamento de referência
        time (float): instante comparado (s)
        fault (str): falha comparada
    """

    __slots__ = ["dx", "errors", "slope", "reference", "time", "fault"]

    def __init__(self, dx: Sequence[float], errors: Sequence[float], slope: float, reference: float, time: float, fault: str):
        self.dx = [float(d) for d in dx]
        self.errors = [float(e) for e in errors]
        self.slope = float(slope)
        self.reference = float(reference)
        self.time = float(time)
        self.fault = fault


    def to_dict(self) -> dict:
        return {
            "kind": "convergence",
            "dx": self.dx,
            "errors": self.errors,
            "slope": self.slope,
            "reference": self.reference,
            "time": self.time,
            "fault": self.fault
        }


    @classmethod
    def from_dict(cls, data: dict) -> "ConvergenceTable":
        return cls(data["dx"], data["errors"], data["slope"], data["reference"], data["time"], data["fault"])


    def save(self, path: Path) -> Path:
        dump_json(self.to_dict(), path)
        return path


    @classmethod
    def load(cls, path: Path) -> "ConvergenceTable":
        return cls.from_dict(load_json(path))


    def __repr__(self) -> str:
        return f"<ConvergenceTable: dx={self.dx} slope={self.slope:.3f}>"


def converge(family: Callable[[float], Scenario], dx_list: Sequence[float], reference: float, at_time: float, fault: Optional[str]=None, runner: Runner=hybrid_runner) -> ConvergenceTable:
    """
    erro do campo de deslizamento em "at_time" para cada dx contra a execução mais fina, restrito à grade mais grossa.

    ### parâmetros:

        family (Callable[[float], Scenario]): cenário para um dx (ex.: lambda dx: tpv3(dx))
        dx_list (Sequence[float]): espaçamentos (m), pelo menos dois
        reference (float): espaçamento da referência, o mais fino
        at_time (float): instante comparado (s)
        fault (Optional[str]): falha comparada (padrão a primeira)
        runner (Runner): executor (scenario, duration) -> RunResult

    ### uso:

        table = converge(tpv3, [800.0, 400.0, 200.0], 100.0, 3.0)
        print(table.slope) # ~1

    ### observação:

        - todas as grades precisam estar aninhadas: dx é múltiplo da referência e divide o maior dx,
          caso contrário NonNestedGridsException
        - o erro é a norma L2 do deslizamento normalizada pela norma da referência
    """
    check_value("converge(...)", "dx_list", dx_list, len(dx_list) >= 2, "at least two grids are needed for a slope.")
    check_value("converge(...)", "at_time", at_time, at_time > 0)
    coarse = max(dx_list)
    for dx in dx_list:
        if not _nested(reference, dx) or not _nested(dx, coarse):
            raise NonNestedGridsException(parse_message(NON_NESTED, DX=dx, REFERENCE=reference))

    def slip(dx: float):
        result = runner(family(dx), at_time)
        name = fault or result.scenario.faults[0].name
        surface = result.faults[name]
        return name, surface.slip_magnitude().reshape(surface.shape), surface.x1, surface.x3

    name, ref_slip, ref_x1, ref_x3 = slip(reference)
    runs = {dx: slip(dx) for dx in dx_list}
    _, _, coarse_x1, coarse_x3 = runs[coarse]
    target = _restrict(ref_slip, ref_x1, ref_x3, coarse_x1, coarse_x3)

    errors = [field_error(_restrict(values, x1, x3, coarse_x1, coarse_x3), target) for _, values, x1, x3 in runs.values()]
    finite = [(dx, e) for dx, e in zip(dx_list, errors) if 0 < e < math.inf]
    slope = float(np.polyfit(np.log([d for d, _ in finite]), np.log([e for _, e in finite]), 1)[0]) if len(finite) >= 2 else math.nan

    table = ConvergenceTable(dx_list, errors, slope, reference, at_time, name)
    logger.info("convergence of %s at t=%.3g s: errors %s, slope %.3f", name, at_time, ["%.3g" % e for e in errors], slope)
    return table


def error_vs_time(result: RunResult, reference: RunResult, station: str) -> np.ndarray:
    """
    |δ̇(t) − δ̇_ref(t)| na estação, com a referência interpolada nos instantes de "result".

    ### retorno:

        np.ndarray: shape (n, 2) com colunas (t, erro absoluto em m/s)
    """
    series = result.series(station)
    target = reference.series(station)
    rate = np.hypot(series[:, 3], series[:, 4])
    expected = np.interp(series[:, 0], target[:, 0], np.hypot(target[:, 3], target[:, 4]))
    return np.column_stack((series[:, 0], np.abs(rate - expected)))


class BenchTable:
    """
    tempos por passo (s): elementos finitos por N2 com N1N3 fixo, elementos finitos e fronteira SBI por N1N3.

    ### atributos:

        fe (list[tuple[int, int, float]]): (N1N3, N2, segundos por passo)
        sbi (list[tuple[int, float]]): (N1N3, segundos por passo)
        per_layer (float): inclinação do ajuste linear do tempo de elementos finitos em N2 (uma camada)
        r_squared (float): R² desse ajuste
        ratio (float): tempo SBI / tempo de uma camada, no N1N3 do ajuste
    """

    __slots__ = ["fe", "sbi", "per_layer", "r_squared", "ratio"]

    def __init__(self, fe: Sequence[tuple[int, int, float]], sbi: Sequence[tuple[int, float]], per_layer: float, r_squared: float, ratio: float):
        self.fe = [(int(a), int(b), float(c)) for a, b, c in fe]
        self.sbi = [(int(a), float(b)) for a, b in sbi]
        self.per_layer = float(per_layer)
        self.r_squared = float(r_squared)
        self.ratio = float(ratio)


    def to_dict(self) -> dict:
        return {
            "kind": "scaling",
            "fe": [list(row) for row in self.fe],
            "sbi": [list(row) for row in self.sbi],
            "per_layer": self.per_layer,
            "r_squared": self.r_squared,
            "ratio": self.ratio
        }


    @classmethod
    def from_dict(cls, data: dict) -> "BenchTable":
        return cls([tuple(row) for row in data["fe"]], [tuple(row) for row in data["sbi"]], data["per_layer"], data["r_squared"], data["ratio"])


    def save(self, path: Path) -> Path:
        dump_json(self.to_dict(), path)
        return path


    @classmethod
    def load(cls, path: Path) -> "BenchTable":
        return cls.from_dict(load_json(path))


    def __repr__(self) -> str:
        return f"<BenchTable: per_layer={self.per_layer:.3g} s R2={self.r_squared:.4f} ratio={self.ratio:.3g}>"


def _timed(step: Callable[[int], None], warmup: int, steps: int) -> float:
    """mediana do tempo de parede por passo, descartando os "warmup" primeiros."""
    samples = []
    for index in range(warmup + steps):
        started = time.perf_counter()
        step(index)
        if index >= warmup:
            samples.append(time.perf_counter() - started)
    return statistics.median(samples)


def _pattern(shape: tuple[int, ...], scale: float=1.0e-6) -> np.ndarray:
    """campo determinístico e suave para os tempos (sem RNG)."""
    index = np.arange(int(np.prod(shape)), dtype=float).reshape(shape)
    return scale * np.sin(0.37 * index)


def _fe_step_time(side: int, layers: int, material: ElasticMaterial, dx: float, threads: int, warmup: int, steps: int) -> float:
    grid = build_grid((side * dx, layers * dx, side * dx), dx, (0.0, 0.0, 0.0), [material], min_layers=1)
    mesh = FiniteElementMesh.from_grid(grid)
    mass = assemble_lumped_mass(mesh)
    stiffness = StiffnessOperator(mesh, threads)
    state = SimulationState(mesh.n_nodes, cfl_timestep(grid), _pattern((mesh.n_nodes, 3)))
    force = np.zeros((mesh.n_nodes, 3))

    def step(_):
        predict(state)
        correct(state, force, None, mass, stiffness)

    return _timed(step, warmup, steps)


def _sbi_step_time(side: int, material: ElasticMaterial, dx: float, provider: Optional[KernelProvider], t_max: float, workers: int, warmup: int, steps: int, history: int) -> float:
    dt = CFL_SAFETY * dx / material.cp
    boundary = SbiBoundary((side, side), dx, material, dt, 1, provider, t_max, history + warmup + steps + 1, workers, name="bench")
    field = _pattern((side, side, 3))
    velocity = _pattern((side, side, 3), 1.0e-3)
    for index in range(history):
        boundary.push_history(boundary.forward(field * math.cos(0.1 * index)), index)

    def step(index):
        now = history + index
        boundary.push_history(boundary.forward(field * math.cos(0.1 * now)), now)
        boundary.traction(velocity, now * dt)

    return _timed(step, warmup, steps)


def bench(sides: Sequence[int], layers: Sequence[int], material: Optional[ElasticMaterial]=None, dx: float=100.0, provider: Optional[KernelProvider]=None, t_max: float=T_MAX, threads: int=1, warmup: int=BENCH_WARMUP, steps: int=BENCH_STEPS, history: int=BENCH_HISTORY) -> BenchTable:
    """
    mede o tempo por passo dos elementos finitos e da fronteira SBI.

    ### parâmetros:

        sides (Sequence[int]): lados N1 = N3 das malhas (N1N3 = lado²), admissíveis pela transformada
        layers (Sequence[int]): valores de N2 para o ajuste linear, no primeiro lado
        material (Optional[ElasticMaterial]): material (padrão rocha de referência)
        dx (float): espaçamento (m)
        provider (Optional[KernelProvider]): núcleos da fronteira (padrão HalfSpaceKernels)
        warmup (int): passos descartados antes de medir
        steps (int): passos medidos (mediana)
        history (int): passos de histórico acumulados antes de medir a fronteira

    ### uso:

        table = bench([32, 64], [4, 8, 16, 32])
        print(table.r_squared, table.ratio)
    """
    from .scenarios import host_rock

    check_value("bench(...)", "layers", layers, len(layers) >= 2, "the linear fit needs at least two N2 values.")
    for side in sides:
        if not is_admissible_size(int(side)):
            raise InvalidGridException(parse_message(INADMISSIBLE_SIZE, AXIS="1,3", SIZE=side))
    material = material or host_rock()

    fixed = int(sides[0])
    fe = [(fixed ** 2, n2, _fe_step_time(fixed, int(n2), material, dx, threads, warmup, steps)) for n2 in layers]
    fe += [(int(side) ** 2, int(layers[0]), _fe_step_time(int(side), int(layers[0]), material, dx, threads, warmup, steps)) for side in sides[1:]]
    sbi = [(int(side) ** 2, _sbi_step_time(int(side), material, dx, provider, t_max, threads, warmup, steps, history)) for side in sides]

    n2 = np.array([row[1] for row in fe[:len(layers)]], dtype=float)
    seconds = np.array([row[2] for row in fe[:len(layers)]])
    slope, intercept = np.polyfit(n2, seconds, 1)
    residual = float(np.sum((seconds - (slope * n2 + intercept)) ** 2))
    total = float(np.sum((seconds - seconds.mean()) ** 2))
    r_squared = 1.0 - residual / total if total > 0 else 1.0
    ratio = sbi[0][1] / slope if slope > 0 else math.inf

    table = BenchTable(fe, sbi, slope, r_squared, ratio)
    logger.info("bench: %.3g s per FE layer (R2 %.4f), SBI / layer = %.3g", slope, r_squared, ratio)
    return table


def strip_study(family: Callable[[float], Scenario], widths: Sequence[float], duration: Optional[float]=None, runner: Runner=hybrid_runner) -> dict[tuple[float, float], dict[str, float]]:
    """
    roda o mesmo cenário com larguras L2 diferentes e devolve o RMS relativo de |δ̇| entre cada par, por estação.

    ### uso:

        study = strip_study(lambda l2: tpv3(250.0, l2=l2), [1e3, 3e3, 6e3], duration=4.0)
        print(study[(1e3, 3e3)]["C"]) # < 0.01
    """
    results = {}
    for width in widths:
        scenario = family(width)
        results[width] = runner(scenario, scenario.duration if duration is None else duration)

    study = {}
    for position, first in enumerate(widths):
        for second in widths[position + 1:]:
            changes = {}
            for station in results[first].scenario.stations:
                a = results[first].series(station.name)
                b = results[second].series(station.name)
                changes[station.name] = relative_rms(np.hypot(a[:, 3], a[:, 4]), np.hypot(b[:, 3], b[:, 4]))
            study[(first, second)] = changes
            logger.info("strip study L2 %g vs %g: %s", first, second, {k: round(v, 5) for k, v in changes.items()})
    return study


def _arrival(series: np.ndarray, threshold: float) -> float:
    active = np.flatnonzero(np.hypot(series[:, 3], series[:, 4]) > threshold)
    return float(series[active[0], 0]) if active.size else math.nan


def sbim_comparison(scenario: Scenario, duration: Optional[float]=None, threshold: float=1.0e-3, hybrid: Optional[RunResult]=None, reference: Optional[RunResult]=None, **options) -> dict[str, dict[str, float]]:
    """
    compara a malha híbrida com o solver SBIM no mesmo dt: RMS relativo de |δ̇| e de |τ| e diferença de chegada da ruptura.

    ### retorno:

        dict[str, dict[str, float]]: por estação, {"slip_rate": ..., "shear": ..., "arrival": segundos}
    """
    duration = scenario.duration if duration is None else duration
    if hybrid is None:
        hybrid = hybrid_runner(scenario, duration, **options)
    if reference is None:
        reference = sbim_fault_solver(scenario, hybrid.dt, duration, threshold=threshold)

    comparison = {}
    for station in scenario.stations:
        a = hybrid.series(station.name)
        b = reference.series(station.name)
        comparison[station.name] = {
            "slip_rate": relative_rms(np.hypot(a[:, 3], a[:, 4]), np.hypot(b[:, 3], b[:, 4])),
            "shear": relative_rms(np.hypot(a[:, 5], a[:, 6]), np.hypot(b[:, 5], b[:, 6])),
            "arrival": abs(_arrival(a, threshold) - _arrival(b, threshold))
        }
    logger.info("hybrid vs SBIM for %s: %s", scenario.name, comparison)
    return comparison


def static_limit_check(material: ElasticMaterial, shape: tuple[int, int]=(16, 16), dx: float=100.0, mode: tuple[int, int]=(1, 0), component: int=0, amplitude: float=1.0e-3, provider: Optional[KernelProvider]=None, t_max: float=T_MAX, safety: float=CFL_SAFETY) -> float:
    """
    segura um deslocamento de um único modo na fronteira até o fim da janela de convolução e compara a tração
    com a rigidez estática do semiespaço (oráculo independente).

    ### retorno:

        float: ‖τ_SBI − τ_estático‖/‖τ_estático‖
    """
    check_value("static_limit_check(...)", "mode", mode, tuple(mode) != (0, 0), "mode (0, 0) has no static response.")
    check_value("static_limit_check(...)", "component", component, component in (0, 1, 2))

    x1 = dx * np.arange(shape[0])
    x3 = dx * np.arange(shape[1])
    phase = 2.0 * np.pi * (mode[0] * x1[:, None] / (shape[0] * dx) + mode[1] * x3[None, :] / (shape[1] * dx))
    field = np.zeros(tuple(shape) + (3,))
    field[..., component] = amplitude * np.sin(phase)

    dt = safety * dx / material.cp
    q = float(wavenumbers(tuple(shape), dx)[2][mode[0] % shape[0], mode[1] % shape[1]])
    steps = int(math.ceil(t_max / (material.cs * q * dt))) + 1

    boundary = SbiBoundary(tuple(shape), dx, material, dt, 1, provider, t_max, steps + 1, name="static")
    modes = boundary.forward(field)
    for step in range(steps + 1):
        boundary.push_history(modes, step)

    held = boundary.traction(np.zeros_like(field), steps * dt)
    expected = static_traction(material, field, dx)
    error = float(np.linalg.norm(held - expected) / np.linalg.norm(expected))
    logger.info("static limit of mode %s component %d after %d steps: relative error %.3g", mode, component, steps, error)
    return error
