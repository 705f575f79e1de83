"""
solver de referência SBIM: a mesma fronteira espectral escrita sobre o próprio plano da falha (meio homogêneo, modo simétrico).
"""

import time
import logging
from typing import Callable, Optional

import numpy as np

from ..models.scenario import Scenario
from ..models.grid import build_grid
from .fem import cfl_timestep
from .kernels import KernelProvider
from .sbi import SbiBoundary
from .fault import (
    TANGENTIAL,
    NORMAL,
    FaultSurface,
    configure_fault,
    apply_nucleation,
    resolve_traction,
    fault_strength
)
from .outputs import StationRecorder, RuptureTimeMap, RunResult, relative_rms
from .utils import parse_message
from .messeger import (
    T_MAX,
    CFL_SAFETY,
    RUPTURE_THRESHOLD,
    BLOWUP_VELOCITY,
    HETEROGENEOUS,
    INVALID_SCENARIO,
    FAULT_OUTSIDE,
    INSTABILITY,
    NON_FINITE
)
from ..exceptions import (
    UnsupportedMaterialException,
    InvalidScenarioException,
    InvalidFaultException,
    InstabilityException,
    NonFiniteFieldException
)

logger = logging.getLogger(__name__)

Progress = Callable[[int, float, float, tuple[float, float]], None]

__all__ = ["sbim_fault_solver", "fault_plane", "truncation_study"]


def fault_plane(scenario: Scenario) -> FaultSurface:
    """
    grade periódica (N1, N3) do plano da falha com o atrito e a tração inicial do cenário.

    ### observação:

        - nós fora da região de ruptura ficam travados, como no modo simétrico da malha de elementos finitos
    """
    if scenario.mode != "symmetric" or len(scenario.faults) != 1:
        raise InvalidScenarioException(parse_message(
            INVALID_SCENARIO,
            SCENARIO=scenario.name,
            REASON="the SBIM reference solver handles a single fault in symmetric mode"
        ))

    used = {0} | {region.material for region in scenario.regions}
    if not scenario.homogeneous:
        raise UnsupportedMaterialException(parse_message(HETEROGENEOUS, SCENARIO=scenario.name, COUNT=len(used)))

    grid = build_grid(scenario.extents, scenario.dx, scenario.origin, scenario.materials, min_layers=1)
    spec = scenario.faults[0]
    if grid.layer_of(spec.x2) != 0:
        raise InvalidFaultException(parse_message(
            FAULT_OUTSIDE,
            FAULT=spec.name,
            REASON=f"x2 = {spec.x2} m",
            COMPLEMENT="a symmetric fault must lie on the lower plane of the strip."
        ))

    n1, _, n3 = grid.shape
    x1 = grid.origin[0] + grid.dx * np.arange(n1)
    x3 = grid.origin[2] + grid.dx * np.arange(n3)
    fault = FaultSurface(spec.name, "symmetric", 0, x1, x3, np.arange(n1 * n3), None, grid.dx)
    fault.locked[:] = ~fault.box_mask(spec.x1_range, spec.x3_range)
    return configure_fault(fault, spec)


def sbim_fault_solver(scenario: Scenario, dt: Optional[float]=None, duration: Optional[float]=None, provider: Optional[KernelProvider]=None, t_max: float=T_MAX, threshold: float=RUPTURE_THRESHOLD, workers: int=1, callback: Optional[Progress]=None) -> RunResult:
    """
    marcha no tempo a tração do semiespaço sobre o próprio plano da falha, resolvendo o atrito com a impedância μ/c_s.

    ### parâmetros:

        scenario (Scenario): cenário simétrico em meio homogêneo
        dt (Optional[float]): passo de tempo (padrão CFL_SAFETY·dx/c_p, o mesmo da malha híbrida)
        duration (Optional[float]): duração (padrão scenario.duration)
        provider (Optional[KernelProvider]): núcleos (padrão HalfSpaceKernels)
        t_max (float): horizonte de truncamento adimensional
        threshold (float): limiar de |δ̇| do mapa de ruptura (m/s)
        workers (int): threads das transformadas
        callback (Optional[Progress]): chamado a cada passo com (passo, t, max|δ̇|, extensão da ruptura)

    ### uso:

        result = sbim_fault_solver(tpv3(500.0), duration=2.0)
        print(result.series("C")[:, 3]) # taxa de deslizamento ao longo de x1

    ### observação:

        - o lado + é o semiespaço x2 > 0 e o deslizamento é o dobro do seu deslocamento
        - τ = τ₀ + s − (μ/c_s)·V₊ na tangente e tração normal nula na direção normal (V₂ = s₂·c_s/(η22·μ))
    """
    fault = fault_plane(scenario)
    material = scenario.materials[0]
    duration = scenario.duration if duration is None else float(duration)
    if dt is None:
        dt = cfl_timestep(build_grid(scenario.extents, scenario.dx, scenario.origin, scenario.materials, min_layers=1), CFL_SAFETY, [material])
    n_steps = int(np.ceil(duration / dt - 1e-9))

    started = time.perf_counter()
    boundary = SbiBoundary(fault.shape, scenario.dx, material, dt, 1, provider, t_max, n_steps, workers, name=f"{fault.name}/sbim")
    setup = time.perf_counter() - started

    z = material.shear_modulus / material.cs
    eta_normal = boundary.radiation.eta[NORMAL]
    displacement = np.zeros(fault.shape + (3,))
    rate = np.zeros((fault.n_nodes, 3))

    recorder = StationRecorder(scenario.stations, {fault.name: fault})
    rupture = RuptureTimeMap.from_fault(fault, threshold)

    logger.info("SBIM %s: %dx%d nodes dt=%.4g s steps=%d", scenario.name, *fault.shape, dt, n_steps)
    started = time.perf_counter()
    for step in range(n_steps + 1):
        now = step * dt
        apply_nucleation(fault, now)

        flat = displacement.reshape(-1, 3)
        fault.slip[:] = 2.0 * flat[:, TANGENTIAL]
        np.maximum(fault.slip_max, fault.slip_magnitude(), out=fault.slip_max)

        boundary.push_history(boundary.forward(displacement), step)
        nonlocal_term = boundary.nonlocal_term().reshape(-1, 3)

        fault.trial[:] = fault.tau0 + nonlocal_term[:, TANGENTIAL]
        fault.sigma_n[:] = fault.sigma0
        traction, stick = resolve_traction(fault.trial, fault_strength(fault))
        fault.traction[:] = traction
        fault.stick[:] = stick

        rate[:, TANGENTIAL] = (fault.trial - traction) / z
        rate[:, NORMAL] = nonlocal_term[:, NORMAL] / (eta_normal * z)
        fault.slip_rate[:] = 2.0 * rate[:, TANGENTIAL]

        if not np.all(np.isfinite(rate)):
            raise NonFiniteFieldException(parse_message(NON_FINITE, FIELD="SBIM slip rate", STEP=step))
        peak = float(np.max(fault.slip_rate_magnitude()))
        if peak > BLOWUP_VELOCITY:
            raise InstabilityException(parse_message(INSTABILITY, "reduce dt.", STEP=step, TIME=f"{now:.6g}", VMAX=f"{peak:.3g}"))

        recorder.record(now)
        rupture.update(fault, now)
        if callback is not None:
            callback(step, now, peak, fault.rupture_extent(threshold))

        if step < n_steps:
            displacement += dt * rate.reshape(displacement.shape)

    elapsed = time.perf_counter() - started
    logger.info("SBIM %s finished in %.3g s (%d ruptured nodes)", scenario.name, elapsed, int(rupture.ruptured.sum()))
    return RunResult(scenario, dt, n_steps, recorder, {fault.name: rupture}, {fault.name: fault}, timings={"setup": setup, "stepping": elapsed})


def truncation_study(scenario: Scenario, dt: Optional[float]=None, t_max: float=T_MAX, **options) -> dict[str, float]:
    """
    repete a solução SBIM com o horizonte de truncamento dobrado e devolve, por estação, o RMS relativo da mudança em |δ̇|.
    """
    base = sbim_fault_solver(scenario, dt, t_max=t_max, **options)
    doubled = sbim_fault_solver(scenario, base.dt, t_max=2.0 * t_max, **options)

    changes = {}
    for station in scenario.stations:
        rate = np.hypot(base.series(station.name)[:, 3], base.series(station.name)[:, 4])
        reference = np.hypot(doubled.series(station.name)[:, 3], doubled.series(station.name)[:, 4])
        changes[station.name] = relative_rms(rate, reference)
        logger.info("truncation study %s: station %s changes by %.3g RMS", scenario.name, station.name, changes[station.name])
    return changes
