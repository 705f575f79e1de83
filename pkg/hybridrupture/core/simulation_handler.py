"""
agrupa a orquestração de uma execução: validação, laço híbrido, gravação assíncrona de snapshots e manifesto.
"""

import time
import asyncio
import logging
from typing import AsyncGenerator, Callable, Optional

import numpy as np

from ..models.scenario import Scenario
from .config import RunConfig
from .env_handler import EnvHandler
from .coupler import HybridSolver
from .fem import element_stress
from .fault import FaultSurface
from .outputs import (
    Snapshot,
    SnapshotWriter,
    StationRecorder,
    RuptureTimeMap,
    RunResult,
    save_fault_fields,
    build_manifest,
    write_manifest,
    grid_summary
)
from .utils import Path, parse_message, check_type
from .messeger import CFL_SAFETY, SNAPSHOT_BUDGET, WRITE_FAILED
from ..exceptions import InstabilityException, NonFiniteFieldException, OutputWriteException

logger = logging.getLogger(__name__)

Progress = Callable[[int, float, float, tuple[float, float]], None]

__all__ = ["SimulationHandler", "RunArtifacts", "run"]


class RunArtifacts:
    """
    o que uma execução deixou em disco.

    ### atributos:

        directory (Path): diretório da execução
        manifest (dict): manifesto gravado em manifest.json
        result (RunResult): resultado em memória (séries, mapas de ruptura, falhas finais)
        warnings (list[str]): avisos da validação
    """

    __slots__ = ["directory", "manifest", "result", "warnings"]

    def __init__(self, directory: Path, manifest: dict, result: RunResult, warnings: list[str]):
        self.directory = directory
        self.manifest = manifest
        self.result = result
        self.warnings = warnings


    @property
    def status(self) -> str:
        return self.manifest["status"]


    @property
    def artifacts(self) -> list[str]:
        return self.manifest["artifacts"]


    def __repr__(self) -> str:
        return f"<RunArtifacts: {self.directory} status={self.status} files={len(self.artifacts)}>"


def _fault_origin(solver: HybridSolver, fault: FaultSurface) -> tuple[float, float, float]:
    grid = solver.mesh.grid
    return float(fault.x1[0]), grid.origin[1] + fault.plane * grid.dx, float(fault.x3[0])


class SimulationHandler:
    """
    executa uma configuração e grava os artefatos.

    ### métodos:

        def run(self, callback=None) -> RunArtifacts: executa de forma síncrona (asyncio.run)

        async def run_async(self, callback=None) -> RunArtifacts: executa no laço de eventos atual

        async def stepper(self, solver) -> AsyncGenerator[SimulationState]: avança o solver cedendo o laço entre passos

    ### uso básico:

        handler = SimulationHandler(RunConfig.from_preset("tpv3", 500.0, duration=2.0))
        artifacts = handler.run()

        print(artifacts.status) # "completed"
        print(artifacts.artifacts) # ["manifest.json", "rupture_main.npz", "stations/A.csv", ...]

    ### observação:

        - a configuração é validada no construtor, antes de qualquer alocação de campos
        - uma instabilidade não lança erro: os artefatos até o passo da falha são gravados e o manifesto recebe
          status "unstable" e a mensagem em "diagnostic"
    """

    __slots__ = ["config", "env", "scenario", "dt", "directory", "warnings"]

    def __init__(self, config: RunConfig, env: Optional[EnvHandler]=None, directory: Optional[Path]=None):
        check_type("SimulationHandler(...)", "config", config, RunConfig)
        check_type("SimulationHandler(...)", "directory", directory, Path, optional=True)

        self.config = config
        self.env = env or EnvHandler.unique()
        self.warnings = config.validate()
        self.scenario: Scenario = config.resolve_scenario()
        self.dt = config.timestep(self.scenario)
        self.directory = directory or config.output_directory(self.scenario, self.env)


    def _snapshot_every(self, n_steps: int) -> int:
        every = self.config.output.get("snapshot_every")
        if every:
            return int(every)
        return max(1, n_steps // SNAPSHOT_BUDGET)


    def _snapshots(self, solver: HybridSolver) -> list[Snapshot]:
        state = solver.state
        snapshots = [
            Snapshot(state.step, state.time, fault.snapshot(), solver.mesh.grid.dx, _fault_origin(solver, fault), f"fault_{fault.name}")
            for fault in solver.faults
        ]
        if self.config.output.get("strip_snapshots"):
            grid = solver.mesh.grid
            speed = np.linalg.norm(state.v[:grid.n_nodes], axis=1).reshape(grid.node_shape)
            stress = element_stress(solver.mesh, state.u)
            half = 0.5 * grid.dx
            snapshots.append(Snapshot(state.step, state.time, {"speed": speed}, grid.dx, grid.origin, "strip_nodes"))
            snapshots.append(Snapshot(
                state.step,
                state.time,
                {"sigma12": stress[:, 3].reshape(grid.shape), "sigma22": stress[:, 1].reshape(grid.shape)},
                grid.dx,
                tuple(o + half for o in grid.origin),
                "strip_cells"
            ))
        return snapshots


    async def stepper(self, solver: HybridSolver, n_steps: Optional[int]=None) -> AsyncGenerator:
        """
        avança o solver passo a passo, cedendo o laço de eventos para o gravador de snapshots entre os passos.

        ### uso:

            async def function_example():
                async for state in handler.stepper(solver):
                    print(state.step, state.time)
        """
        for state in solver.steps(n_steps, threshold=self.config.rupture_threshold):
            yield state
            await asyncio.sleep(0)


    async def run_async(self, callback: Optional[Progress]=None) -> RunArtifacts:
        config = self.config
        threshold = config.rupture_threshold
        try:
            self.directory.mkdir(exists_ok=True)
        except OSError as error:
            raise OutputWriteException(parse_message(WRITE_FAILED, PATH=str(self.directory), REASON=str(error))) from error

        for warning in self.warnings:
            logger.warning("%s", warning)

        threads = config.effective_threads(self.env)
        started = time.perf_counter()
        solver = HybridSolver.from_scenario(
            self.scenario,
            self.dt,
            provider=config.kernel_provider(),
            t_max=config.kernels["t_max"],
            threads=threads,
            safety=config.time_step.get("safety", CFL_SAFETY)
        )
        timings = {"setup": time.perf_counter() - started}
        logger.info("run %s -> %s (threads=%d, deterministic=%s)", self.scenario.name, self.directory, threads, config.deterministic)

        faults = {fault.name: fault for fault in solver.faults}
        recorder = StationRecorder(self.scenario.stations, faults)
        ruptures = {name: RuptureTimeMap.from_fault(fault, threshold) for name, fault in faults.items()}
        every = self._snapshot_every(solver.n_steps)
        status, diagnostic = "completed", None
        artifacts: list[Path] = []

        with solver:
            recorder.record(solver.state.time)
            started = time.perf_counter()
            async with SnapshotWriter(self.directory.join("snapshots"), vtk=config.output.get("vtk", False)) as writer:
                for snapshot in self._snapshots(solver):
                    await writer.submit(snapshot)
                try:
                    async for state in self.stepper(solver):
                        recorder.record(state.time)
                        for name, rupture in ruptures.items():
                            rupture.update(faults[name], state.time)
                        if callback is not None:
                            callback(*solver.progress(threshold))
                        if state.step % every == 0:
                            for snapshot in self._snapshots(solver):
                                await writer.submit(snapshot)
                except (InstabilityException, NonFiniteFieldException) as error:
                    status, diagnostic = "unstable", str(error)
                    logger.error("run %s stopped at step %d: %s", self.scenario.name, solver.state.step, error)
                timings["stepping"] = time.perf_counter() - started
                started = time.perf_counter()
            artifacts += writer.written

        artifacts += recorder.save(self.directory.join("stations"))
        for name, rupture in ruptures.items():
            artifacts.append(rupture.save(self.directory.join(f"rupture_{name}.npz")))
            artifacts.append(save_fault_fields(self.directory.join(f"fault_{name}_final.npz"), faults[name]))
        timings["writing"] = time.perf_counter() - started

        result = RunResult(self.scenario, self.dt, solver.state.step, recorder, ruptures, faults, status, diagnostic, timings)
        root = str(self.directory)
        relative = [str(path)[len(root):].lstrip("/\\") for path in artifacts] + ["manifest.json"]
        manifest = build_manifest(
            config.to_dict(), self.scenario, self.dt, solver.state.step, grid_summary(solver.mesh.grid), threshold,
            timings, relative, status, diagnostic
        )
        write_manifest(self.directory, manifest)
        logger.info("run %s %s after %d steps; %d artifacts in %s", self.scenario.name, status, solver.state.step, len(relative), self.directory)
        return RunArtifacts(self.directory, manifest, result, self.warnings)


    def run(self, callback: Optional[Progress]=None) -> RunArtifacts:
        return asyncio.run(self.run_async(callback))


    def __repr__(self) -> str:
        return f"<SimulationHandler: {self.scenario.name} dt={self.dt:.4g} -> {self.directory}>"


def run(config: RunConfig, directory: Optional[Path]=None, env: Optional[EnvHandler]=None, callback: Optional[Progress]=None) -> RunArtifacts:
    """atalho para SimulationHandler(config, env, directory).run(callback)."""
    return SimulationHandler(config, env, directory).run(callback)
