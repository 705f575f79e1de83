"""
acoplamento do passo de tempo híbrido: elementos finitos na faixa virtual e fronteiras espectrais (SBI) em S⁺ e S⁻.
"""

import time
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, Literal, Mapping, Optional, Sequence

import numpy as np

from ..models.scenario import Scenario
from ..models.materials import ElasticMaterial
from ..models.grid import build_grid, assign_regions
from .fem import (
    FiniteElementMesh,
    SimulationState,
    LumpedMass,
    StiffnessOperator,
    BoundaryConditions,
    assemble_lumped_mass,
    cfl_timestep,
    predict,
    correct,
    check_stability,
    kinetic_energy,
    strain_energy
)
from .fault import FaultSurface, build_fault, resolve_fault, update_fault_state
from .kernels import KernelProvider
from .sbi import SbiBoundary, FarField
from .outputs import StationRecorder, RuptureTimeMap, RunResult
from .utils import parse_message, check_value
from .messeger import (
    T_MAX,
    CFL_SAFETY,
    RUPTURE_THRESHOLD,
    DT_MISMATCH,
    UNMAPPED_NODE,
    NON_FINITE,
    DIRICHLET_ON_FAULT,
    CFL_VIOLATED,
    INVALID_SCENARIO
)
from ..exceptions import (
    TimeStepMismatchException,
    UnmappedBoundaryNodeException,
    NonFiniteFieldException,
    InvalidFaultException,
    InvalidScenarioException,
    InstabilityException
)

logger = logging.getLogger(__name__)

Progress = Callable[[int, float, float, tuple[float, float]], None]

# sequência canônica de um passo híbrido
STEP_SEQUENCE = ("predict", "exchange", "sbi_traction", "neumann_force", "fault_traction", "acceleration", "velocity")

__all__ = [
    "STEP_SEQUENCE",
    "BoundaryMap",
    "CouplerBinding",
    "HybridSolver",
    "hybrid_step",
    "exchange",
    "plane_wave_absorption_test",
    "oblique_wave_absorption_test",
]


class BoundaryMap:
    """
    nós de elementos finitos de um plano virtual ordenados pela grade (N1+1, N3+1) da fronteira, com áreas tributárias.

    ### observação:

        - a fronteira espectral usa só os N1·N3 nós periódicos [:N1, :N3]; as últimas linha e coluna repetem a primeira
    """

    __slots__ = ["name", "side", "nodes", "area"]

    def __init__(self, name: str, side: int, nodes: np.ndarray, dx: float):
        self.name = name
        self.side = side
        self.nodes = np.asarray(nodes, dtype=np.int64)

        n1, n3 = self.nodes.shape
        w1 = np.ones(n1)
        w3 = np.ones(n3)
        if n1 > 1:
            w1[[0, -1]] *= 0.5
        if n3 > 1:
            w3[[0, -1]] *= 0.5
        self.area = dx * dx * np.outer(w1, w3)


    @property
    def shape(self) -> tuple[int, int]:
        """grade periódica (N1, N3)."""
        return max(1, self.nodes.shape[0] - 1), max(1, self.nodes.shape[1] - 1)


    def gather(self, field: np.ndarray) -> np.ndarray:
        n1, n3 = self.shape
        return field[self.nodes[:n1, :n3]]


    def scatter(self, traction: np.ndarray, out: np.ndarray) -> np.ndarray:
        """soma área·τ nos nós do plano; a última linha/coluna recebe a tração do nó periódico 0."""
        n1, n3 = self.shape
        i = np.arange(self.nodes.shape[0]) % n1
        k = np.arange(self.nodes.shape[1]) % n3
        full = traction[np.ix_(i, k)]
        np.add.at(out, self.nodes, self.area[..., None] * full)
        return out


    def __repr__(self) -> str:
        return f"<BoundaryMap {self.name}: {self.nodes.shape[0]}x{self.nodes.shape[1]} nodes>"


class CouplerBinding:
    """
    ligação entre os nós de elementos finitos de S⁺/S⁻ e as grades das fronteiras espectrais.

    ### uso:

        binding = CouplerBinding.from_mesh(mesh, sides=(1, -1))

        print(binding.maps[0].name) # "S+"
        print(binding.total_area("S+")) # L1·L3
    """

    __slots__ = ["maps"]

    def __init__(self, maps: Sequence[BoundaryMap]):
        self.maps = tuple(maps)


    @staticmethod
    def map_nodes(name: str, nodes: np.ndarray, coordinates: np.ndarray, shape: tuple[int, int], dx: float, origin: Sequence[float]) -> np.ndarray:
        """
        ordena "nodes" na grade (n1 + 1, n3 + 1) pelas coordenadas (x1, x3), sem depender da numeração.

        ### observação:

            - UnmappedBoundaryNodeException se sobrar posição da grade sem nó ou nó fora da grade
        """
        nodes = np.asarray(nodes, dtype=np.int64).ravel()
        n1, n3 = shape
        i = np.rint((coordinates[:, 0] - origin[0]) / dx).astype(np.int64)
        k = np.rint((coordinates[:, 2] - origin[2]) / dx).astype(np.int64)
        inside = (i >= 0) & (i <= n1) & (k >= 0) & (k <= n3)

        mapped = np.full((n1 + 1, n3 + 1), -1, dtype=np.int64)
        mapped[i[inside], k[inside]] = nodes[inside]
        missing = int(np.count_nonzero(mapped < 0)) + int(np.count_nonzero(~inside))
        if missing:
            raise UnmappedBoundaryNodeException(parse_message(UNMAPPED_NODE, BOUNDARY=name, COUNT=missing))
        return mapped


    @classmethod
    def from_mesh(cls, mesh: FiniteElementMesh, sides: Sequence[int]=(1,)) -> "CouplerBinding":
        grid = mesh.grid
        maps = []
        for side in sides:
            name = "S+" if side > 0 else "S-"
            plane = grid.boundary_nodes(side).ravel()
            nodes = cls.map_nodes(name, plane, mesh.node_coordinates(plane), (grid.shape[0], grid.shape[2]), grid.dx, grid.origin)
            maps.append(BoundaryMap(name, side, nodes, grid.dx))
        return cls(maps)


    def get(self, name: str) -> BoundaryMap:
        for boundary in self.maps:
            if boundary.name == name:
                return boundary
        raise KeyError(name)


    def total_area(self, name: str) -> float:
        return float(self.get(name).area.sum())


    def __repr__(self) -> str:
        return f"<CouplerBinding: {', '.join(m.name for m in self.maps)}>"


def exchange(boundary: BoundaryMap, state: SimulationState) -> tuple[np.ndarray, np.ndarray]:
    """
    copia u_{t+1} e v_pred_{t+1} dos nós de elementos finitos para a grade da fronteira (mesma grade, sem interpolação).

    ### retorno:

        tuple[np.ndarray, np.ndarray]: (u, v_pred), cada um com shape (N1, N3, 3)
    """
    displacement = boundary.gather(state.u)
    velocity = boundary.gather(state.v_pred)
    for field, value in (("displacement", displacement), ("predicted velocity", velocity)):
        if not np.all(np.isfinite(value)):
            raise NonFiniteFieldException(parse_message(NON_FINITE, "the FE state diverged before the exchange.", FIELD=f"{boundary.name} {field}", STEP=state.step))
    return displacement, velocity


def _boundary_material(grid, side: int) -> ElasticMaterial:
    layer = grid.shape[1] - 1 if side > 0 else 0
    _, element_j, _ = grid.element_ijk()
    indices = np.unique(grid.material_index[element_j == layer])
    if indices.size != 1:
        raise InvalidScenarioException(parse_message(
            INVALID_SCENARIO,
            SCENARIO="strip",
            REASON=f"the elements along {'S+' if side > 0 else 'S-'} mix {indices.size} materials"
        ))
    return grid.materials[int(indices[0])]


class HybridSolver:
    """
    laço explícito híbrido: faixa de elementos finitos, falhas com nós divididos e fronteiras espectrais.

    ### parâmetros:

        mesh (FiniteElementMesh): malha (com as falhas já divididas)
        state (SimulationState): estado inicial
        mass (LumpedMass): massa concentrada
        stiffness (StiffnessOperator): rigidez
        faults (Sequence[FaultSurface]): falhas
        boundaries (Sequence[SbiBoundary]): fronteiras, na mesma ordem de binding.maps
        binding (CouplerBinding): ligação nós ↔ fronteiras
        bc (Optional[BoundaryConditions]): Dirichlet/Neumann adicionais
        threads (int): com duas fronteiras e threads > 1, as duas trações SBI são calculadas em paralelo
        trace (bool): registra os sub-passos executados em self.trace

    ### métodos:

        @classmethod
        def from_scenario(cls, scenario, dt=None, ...) -> HybridSolver: monta tudo a partir de um cenário

        def step(self) -> SimulationState: um passo híbrido

        def steps(self, n_steps, callback=None) -> Iterator[SimulationState]: avança n_steps passos

        def run(self, n_steps=None, callback=None, threshold=...) -> RunResult: executa e registra estações e mapas de ruptura

    ### uso:

        with HybridSolver.from_scenario(tpv3(500.0)) as solver:
            result = solver.run()

        print(result.series("A")[-1]) # última amostra da estação A
    """

    __slots__ = [
        "mesh", "state", "mass", "stiffness", "faults", "boundaries", "binding", "bc",
        "scenario", "n_steps", "threads", "trace", "_executor", "_neumann", "_fault_force"
    ]

    def __init__(self, mesh: FiniteElementMesh, state: SimulationState, mass: LumpedMass, stiffness: StiffnessOperator, faults: Sequence[FaultSurface], boundaries: Sequence[SbiBoundary], binding: CouplerBinding, bc: Optional[BoundaryConditions]=None, threads: int=1, trace: bool=False, scenario: Optional[Scenario]=None, n_steps: Optional[int]=None):
        check_value("HybridSolver(...)", "boundaries", boundaries, len(boundaries) == len(binding.maps), "one SBI boundary per bound plane is required.")

        self.mesh = mesh
        self.state = state
        self.mass = mass
        self.stiffness = stiffness
        self.faults = list(faults)
        self.boundaries = list(boundaries)
        self.binding = binding
        self.bc = bc or BoundaryConditions(mesh.n_nodes)
        self.scenario = scenario
        self.n_steps = n_steps
        self.threads = max(1, int(threads))
        self.trace: Optional[list[str]] = [] if trace else None
        self._executor = ThreadPoolExecutor(max_workers=len(self.boundaries)) if self.threads > 1 and len(self.boundaries) > 1 else None
        self._neumann = np.zeros((mesh.n_nodes, 3))
        self._fault_force = np.zeros((mesh.n_nodes, 3))

        self._check_time_steps()
        self._check_dirichlet()

        for boundary, mapping in zip(self.boundaries, self.binding.maps):
            if boundary.steps == 0:
                boundary.push_history(boundary.forward(mapping.gather(self.state.u)), 0)


    def _check_time_steps(self):
        for boundary in self.boundaries:
            if not np.isclose(boundary.dt, self.state.dt, rtol=1e-12, atol=0.0):
                raise TimeStepMismatchException(parse_message(DT_MISMATCH, COMPONENT=f"SBI boundary {boundary.name}", DT=boundary.dt, FE_DT=self.state.dt))


    def _check_dirichlet(self):
        if not self.bc.has_dirichlet:
            return
        for fault in self.faults:
            split = fault.plus if fault.minus is None else np.concatenate([fault.plus, fault.minus])
            shared = np.intersect1d(self.bc.nodes, split)
            if shared.size:
                raise InvalidFaultException(parse_message(DIRICHLET_ON_FAULT, COUNT=shared.size))


    @classmethod
    def from_scenario(cls, scenario: Scenario, dt: Optional[float]=None, duration: Optional[float]=None, provider: Optional[KernelProvider]=None, t_max: float=T_MAX, threads: int=1, safety: float=CFL_SAFETY, far_field: Optional[Mapping[str, FarField]]=None, trace: bool=False) -> "HybridSolver":
        """
        monta malha, falhas, massa, rigidez e fronteiras de "scenario".

        ### parâmetros:

            dt (Optional[float]): passo de tempo (padrão: regra CFL com "safety")
            duration (Optional[float]): duração (padrão scenario.duration), usada para limitar as janelas dos núcleos
            far_field (Optional[Mapping[str, FarField]]): τ^∞(t) por fronteira ("S+" ou "S-")

        ### observação:

            - modo "symmetric": a falha ocupa S⁻ e só S⁺ recebe fronteira espectral
            - modo "two_sided": S⁺ e S⁻ recebem fronteiras espectrais
        """
        started = time.perf_counter()
        grid = build_grid(scenario.extents, scenario.dx, scenario.origin, scenario.materials)
        grid = assign_regions(grid, scenario.regions, scenario.materials)
        mesh = FiniteElementMesh.from_grid(grid)
        faults = [build_fault(mesh, spec, scenario.mode) for spec in scenario.faults]

        mass = assemble_lumped_mass(mesh)
        stiffness = StiffnessOperator(mesh, threads)
        bound = cfl_timestep(grid, safety)
        if dt is None:
            dt = bound
        elif dt > bound * (1.0 + 1e-12):
            raise InvalidScenarioException(parse_message(CFL_VIOLATED, "lower dt or the safety factor.", DT=dt, BOUND=f"{bound:.6g}"))
        duration = scenario.duration if duration is None else float(duration)
        n_steps = int(np.ceil(duration / dt - 1e-9))

        sides = (1,) if scenario.mode == "symmetric" else (1, -1)
        binding = CouplerBinding.from_mesh(mesh, sides)
        workers = max(1, threads // len(sides))
        boundaries = [
            SbiBoundary(
                mapping.shape, grid.dx, _boundary_material(grid, mapping.side), dt, mapping.side, provider, t_max, n_steps,
                workers, (far_field or {}).get(mapping.name), mapping.name
            )
            for mapping in binding.maps
        ]

        state = SimulationState(mesh.n_nodes, dt)
        solver = cls(mesh, state, mass, stiffness, faults, boundaries, binding, threads=threads, trace=trace, scenario=scenario, n_steps=n_steps)
        logger.info(
            "hybrid %s: grid %s nodes=%d faults=%d boundaries=%s dt=%.4g s steps=%d (setup %.3g s)",
            scenario.name, "x".join(str(n) for n in grid.shape), mesh.n_nodes, len(faults),
            [b.name for b in boundaries], dt, n_steps, time.perf_counter() - started
        )
        return solver


    def _record(self, name: str):
        if self.trace is not None:
            self.trace.append(name)


    def _sbi_traction(self, boundary: SbiBoundary, mapping: BoundaryMap, displacement: np.ndarray, velocity: np.ndarray, step: int, now: float) -> np.ndarray:
        boundary.push_history(boundary.forward(displacement), step)
        return boundary.traction(velocity, now)


    def step(self) -> SimulationState:
        """
        um passo híbrido, na ordem:

            1. predição de elementos finitos (u_{t+1}, v_pred)
            2. cópia de u_{t+1} e v_pred para as fronteiras
            3. tração SBI τ = τ^∞ − η(μ/c_s)·v_pred + s
            4. força de Neumann f = B·τ
            5. tração das falhas
            6. incremento de aceleração
            7. correção da velocidade
        """
        state = self.state
        self._check_time_steps()

        predict(state, self.bc)
        self._record("predict")

        following = state.step + 1
        now = following * state.dt
        exchanged = [exchange(mapping, state) for mapping in self.binding.maps]
        self._record("exchange")

        tasks = [
            (boundary, mapping, displacement, velocity, following, now)
            for boundary, mapping, (displacement, velocity) in zip(self.boundaries, self.binding.maps, exchanged)
        ]
        if self._executor is not None:
            tractions = list(self._executor.map(lambda task: self._sbi_traction(*task), tasks))
        else:
            tractions = [self._sbi_traction(*task) for task in tasks]
        self._record("sbi_traction")

        force = self._neumann
        np.copyto(force, self.bc.neumann)
        for mapping, traction in zip(self.binding.maps, tractions):
            mapping.scatter(traction, force)
        self._record("neumann_force")

        internal = self.stiffness.apply(state.u)
        fault_force = self._fault_force
        fault_force[:] = 0.0
        residual = force - internal
        for fault in self.faults:
            resolve_fault(fault, state, self.mass, residual, out=fault_force)
        self._record("fault_traction")

        correct(state, force, fault_force, self.mass, bc=self.bc, internal=internal)
        self._record("acceleration")
        self._record("velocity")

        for fault in self.faults:
            update_fault_state(fault, state)
        check_stability(state)
        return state


    def progress(self, threshold: float=RUPTURE_THRESHOLD) -> tuple[int, float, float, tuple[float, float]]:
        """(passo, t, max|δ̇|, maior extensão da ruptura em x1 e x3)."""
        peak = max((float(fault.slip_rate_magnitude().max()) for fault in self.faults), default=0.0)
        extents = [fault.rupture_extent(threshold) for fault in self.faults] or [(0.0, 0.0)]
        extent = (max(e[0] for e in extents), max(e[1] for e in extents))
        return self.state.step, self.state.time, peak, extent


    def steps(self, n_steps: Optional[int]=None, callback: Optional[Progress]=None, threshold: float=RUPTURE_THRESHOLD) -> Iterator[SimulationState]:
        n_steps = self.n_steps if n_steps is None else int(n_steps)
        for _ in range(n_steps):
            state = self.step()
            if callback is not None:
                callback(*self.progress(threshold))
            if state.step % 100 == 0:
                logger.debug("step %d t=%.4g s max slip rate=%.4g m/s", *self.progress(threshold)[:3])
            yield state


    def run(self, n_steps: Optional[int]=None, callback: Optional[Progress]=None, threshold: float=RUPTURE_THRESHOLD) -> RunResult:
        """
        executa "n_steps" passos registrando as estações e os mapas de ruptura a cada passo.

        ### observação:

            - uma instabilidade encerra a execução com status "unstable" e a mensagem em diagnostic
        """
        faults = {fault.name: fault for fault in self.faults}
        recorder = StationRecorder(self.scenario.stations if self.scenario else (), faults)
        ruptures = {name: RuptureTimeMap.from_fault(fault, threshold) for name, fault in faults.items()}
        recorder.record(self.state.time)

        status, diagnostic = "completed", None
        started = time.perf_counter()
        try:
            for state in self.steps(n_steps, callback, threshold):
                recorder.record(state.time)
                for name, rupture in ruptures.items():
                    rupture.update(faults[name], state.time)
        except (InstabilityException, NonFiniteFieldException) as error:
            status, diagnostic = "unstable", str(error)
            logger.error("run stopped: %s", error)

        return RunResult(
            self.scenario, self.state.dt, self.state.step, recorder, ruptures, faults, status, diagnostic,
            {"stepping": time.perf_counter() - started}
        )


    def close(self):
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None


    def __enter__(self) -> "HybridSolver":
        return self


    def __exit__(self, exc_type, exc, traceback):
        self.close()


    def __repr__(self) -> str:
        return f"<HybridSolver: step={self.state.step} faults={len(self.faults)} boundaries={[b.name for b in self.boundaries]}>"


def hybrid_step(solver: HybridSolver) -> SimulationState:
    """avança "solver" um passo (ver HybridSolver.step)."""
    return solver.step()


def plane_wave_absorption_test(material: ElasticMaterial, dx: float=100.0, kind: Literal["S", "P"]="S", amplitude: float=1.0, layers: int=4, width_steps: float=20.0, safety: float=CFL_SAFETY) -> float:
    """
    lança um pulso plano gaussiano de incidência normal por S⁻ numa coluna de elementos e mede a energia refletida.

    ### parâmetros:

        material (ElasticMaterial): material da coluna e dos semiespaços
        dx (float): espaçamento (m)
        kind (Literal["S", "P"]): "S" polariza em x1, "P" em x2
        amplitude (float): pico de velocidade do pulso (m/s); 0 devolve 0
        layers (int): elementos ao longo de x2
        width_steps (float): desvio padrão do pulso em passos de tempo

    ### retorno:

        float: Σ(v_S⁻ − v_inc)² / Σv_inc² sobre toda a execução

    ### observação:

        - a onda entra por τ^∞ = 2·η·(μ/c_s)·v_inc(t) em S⁻; as componentes fora da polarização ficam presas (Dirichlet)
    """
    check_value("plane_wave_absorption_test(...)", "kind", kind, kind in ("S", "P"))
    component = 0 if kind == "S" else 1
    speed = material.cs if kind == "S" else material.cp

    grid = build_grid((dx, layers * dx, dx), dx, (0.0, 0.0, 0.0), [material], min_layers=1)
    mesh = FiniteElementMesh.from_grid(grid)
    dt = cfl_timestep(grid, safety)
    sigma = width_steps * dt
    delay = 5.0 * sigma
    n_steps = int(np.ceil((2.0 * delay + 4.0 * layers * dx / speed) / dt))

    def incident(t: float) -> float:
        return amplitude * np.exp(-0.5 * ((t - delay) / sigma) ** 2)

    binding = CouplerBinding.from_mesh(mesh, (1, -1))
    impedance = material.shear_modulus / material.cs * (material.cp / material.cs if kind == "P" else 1.0)

    def far_field(t: float) -> np.ndarray:
        traction = np.zeros(3)
        traction[component] = 2.0 * impedance * incident(t)
        return traction

    boundaries = [
        SbiBoundary(mapping.shape, dx, material, dt, mapping.side, max_steps=n_steps, far_field=far_field if mapping.side < 0 else None, name=mapping.name)
        for mapping in binding.maps
    ]

    bc = BoundaryConditions(mesh.n_nodes)
    every = np.arange(mesh.n_nodes)
    for other in {0, 1, 2} - {component}:
        bc.add_dirichlet(every, other, 0.0)

    solver = HybridSolver(
        mesh, SimulationState(mesh.n_nodes, dt), assemble_lumped_mass(mesh), StiffnessOperator(mesh), [], boundaries, binding, bc
    )

    bottom = binding.get("S-").nodes.ravel()
    reflected = 0.0
    energy = 0.0
    for state in solver.steps(n_steps):
        expected = incident(state.time)
        observed = float(state.v[bottom, component].mean())
        reflected += (observed - expected) ** 2
        energy += expected ** 2

    coefficient = reflected / energy if energy > 0 else 0.0
    logger.info("plane %s wave: reflection coefficient %.3g over %d steps", kind, coefficient, n_steps)
    return coefficient


def oblique_wave_absorption_test(material: ElasticMaterial, dx: float=100.0, kind: Literal["S", "P"]="S", amplitude: float=1e-3, period: int=32, layers: int=64, provider: Optional[KernelProvider]=None, safety: float=CFL_SAFETY) -> float:
    """
    solta um pacote de ondas oblíquo no meio de uma faixa periódica em x1 e mede a energia que sobra nela.

    ### parâmetros:

        material (ElasticMaterial): material da faixa e dos semiespaços
        dx (float): espaçamento (m)
        kind (Literal["S", "P"]): "S" desloca em x3 (núcleo antiplano), "P" em x2 (núcleos no plano)
        amplitude (float): pico do deslocamento inicial (m); 0 devolve 0
        period (int): elementos ao longo de x1, um comprimento de onda horizontal
        layers (int): elementos ao longo de x2
        provider (Optional[KernelProvider]): núcleos das fronteiras (padrão HalfSpaceKernels)

    ### retorno:

        float: energia (cinética + deformação) final / energia inicial

    ### observação:

        - u0 = A·cos(k1·x1)·sin(2·k1·(x2 − xc))·exp(−½((x2 − xc)/s)²), com s = 6·dx e k1 = 2π/(period·dx)
        - o modo excitado é q = (k1, 0), então a fronteira usa a convolução e não só o amortecimento
        - as faces x1 = 0 e x1 = period·dx são planos de simetria: no caso "P", u1 = 0 nelas
    """
    check_value("oblique_wave_absorption_test(...)", "kind", kind, kind in ("S", "P"))
    component = 2 if kind == "S" else 1

    grid = build_grid((period * dx, layers * dx, dx), dx, (0.0, 0.0, 0.0), [material], min_layers=1)
    mesh = FiniteElementMesh.from_grid(grid)
    dt = cfl_timestep(grid, safety)
    n_steps = int(np.ceil(3.0 * layers * dx / material.cs / dt))

    x = mesh.node_coordinates()
    wavenumber = 2.0 * np.pi / (period * dx)
    centre, width = 0.5 * layers * dx, 6.0 * dx
    offset = x[:, 1] - centre
    u0 = np.zeros((mesh.n_nodes, 3))
    u0[:, component] = amplitude * np.cos(wavenumber * x[:, 0]) * np.sin(2.0 * wavenumber * offset) * np.exp(-0.5 * (offset / width) ** 2)

    bc = BoundaryConditions(mesh.n_nodes)
    every = np.arange(mesh.n_nodes)
    if kind == "S":
        bc.add_dirichlet(every, 0, 0.0)
        bc.add_dirichlet(every, 1, 0.0)
    else:
        bc.add_dirichlet(every, 2, 0.0)
        i, _, _ = grid.node_ijk(every)
        bc.add_dirichlet(every[(i == 0) | (i == period)], 0, 0.0)

    mass = assemble_lumped_mass(mesh)
    stiffness = StiffnessOperator(mesh)
    state = SimulationState(mesh.n_nodes, dt, u0)
    state.a = -stiffness.apply(state.u) * mass.inverse[:, None]
    bc.apply(state)

    initial = kinetic_energy(state, mass) + strain_energy(state, stiffness)
    if initial == 0:
        return 0.0

    binding = CouplerBinding.from_mesh(mesh, (1, -1))
    boundaries = [
        SbiBoundary(mapping.shape, dx, material, dt, mapping.side, provider, max_steps=n_steps, name=mapping.name)
        for mapping in binding.maps
    ]
    solver = HybridSolver(mesh, state, mass, stiffness, [], boundaries, binding, bc)
    for _ in solver.steps(n_steps):
        pass

    remaining = (kinetic_energy(solver.state, mass) + strain_energy(solver.state, stiffness)) / initial
    logger.info("oblique %s wave: remaining energy %.3g over %d steps", kind, remaining, n_steps)
    return remaining
