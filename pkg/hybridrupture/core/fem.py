import logging
import itertools
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from ..models.grid import StructuredGrid, HEX_CORNERS
from ..models.materials import ElasticMaterial
from .utils import parse_message, check_type, check_value
from .messeger import (
    CFL_SAFETY,
    BLOWUP_VELOCITY,
    INSTABILITY,
    NON_FINITE,
    FAULT_OUTSIDE
)
from ..exceptions import (
    InvalidGridException,
    InvalidFaultException,
    InstabilityException,
    NonFiniteFieldException
)

logger = logging.getLogger(__name__)

_GAUSS = 1.0 / np.sqrt(3.0)
_CHUNK = 16384

__all__ = [
    "FiniteElementMesh",
    "SimulationState",
    "LumpedMass",
    "StiffnessOperator",
    "BoundaryConditions",
    "elasticity_matrix",
    "strain_displacement",
    "element_stiffness",
    "assemble_lumped_mass",
    "internal_force",
    "cfl_timestep",
    "predict",
    "correct",
    "kinetic_energy",
    "strain_energy",
    "modified_energy",
    "check_stability",
    "element_stress",
    "static_solution",
]


class FiniteElementMesh:
    """
    malha de elementos finitos: StructuredGrid + conectividade com os nós duplicados das falhas.

    ### métodos:

        @classmethod
        def from_grid(cls, grid) -> FiniteElementMesh: malha sem falhas

        def split_plane(self, j, i_range, k_range) -> tuple[np.ndarray, np.ndarray]: duplica os nós de um retângulo do plano j

        def node_coordinates(self, index=None) -> np.ndarray: coordenadas, duplicatas herdam as do nó original

    ### observação:

        - os elementos abaixo do plano (lado -) passam a usar as duplicatas, os de cima (lado +) mantêm os nós originais
    """

    __slots__ = ["grid", "connectivity", "n_nodes", "origin_node"]

    def __init__(self, grid: StructuredGrid, connectivity: np.ndarray, origin_node: np.ndarray):
        self.grid = grid
        self.connectivity = connectivity
        self.origin_node = origin_node
        self.n_nodes = int(origin_node.size)


    @classmethod
    def from_grid(cls, grid: StructuredGrid) -> "FiniteElementMesh":
        check_type("FiniteElementMesh.from_grid(...)", "grid", grid, StructuredGrid)
        return cls(grid, grid.element_nodes(), np.arange(grid.n_nodes))


    def split_plane(self, j: int, i_range: tuple[int, int], k_range: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
        """
        duplica os nós (i, j, k) com i em [i0, i1] e k em [k0, k1] (intervalos fechados).

        ### retorno:

            (plus, minus): ids (i1-i0+1, k1-k0+1) dos lados + (originais) e - (duplicatas)
        """
        n1, n2, n3 = self.grid.shape
        (i0, i1), (k0, k1) = i_range, k_range
        if not (0 < j < n2 and 0 <= i0 <= i1 <= n1 and 0 <= k0 <= k1 <= n3):
            raise InvalidFaultException(parse_message(
                FAULT_OUTSIDE,
                FAULT=f"plane j={j}",
                REASON=f"i in [{i0}, {i1}], k in [{k0}, {k1}]",
                COMPLEMENT=f"split planes must be interior (0 < j < {n2})."
            ))

        i, k = np.meshgrid(np.arange(i0, i1 + 1), np.arange(k0, k1 + 1), indexing="ij")
        plus = self.grid.node_index(i, j, k)
        if np.any(self.origin_node[plus.ravel()] != plus.ravel()) or np.isin(plus, self.origin_node[self.grid.n_nodes:]).any():
            raise InvalidFaultException(parse_message(FAULT_OUTSIDE, FAULT=f"plane j={j}", REASON="nodes already split"))

        minus = self.n_nodes + np.arange(plus.size).reshape(plus.shape)

        remap = np.full(self.n_nodes, -1, dtype=np.int64)
        remap[plus.ravel()] = minus.ravel()

        _, element_j, _ = self.grid.element_ijk()
        below = np.flatnonzero(element_j == j - 1)
        block = self.connectivity[below]
        replaced = remap[block]
        self.connectivity[below] = np.where(replaced >= 0, replaced, block)

        self.origin_node = np.concatenate([self.origin_node, plus.ravel()])
        self.n_nodes = int(self.origin_node.size)

        return plus, minus


    def node_coordinates(self, index=None) -> np.ndarray:
        if index is None:
            index = np.arange(self.n_nodes)
        return self.grid.node_coordinates(self.origin_node[np.asarray(index)])


    def __repr__(self) -> str:
        return f"<FiniteElementMesh: {self.grid!r} nodes={self.n_nodes}>"


class SimulationState:
    """
    estado global do laço explícito: deslocamento u, velocidade v, aceleração a e velocidade prevista v_pred.

    ### observação:

        - todos os vetores têm shape (n_nodes, 3), incluindo duplicatas das falhas
        - o estado inicial é u = u0, v = 0, a = 0
    """

    __slots__ = ["u", "v", "a", "v_pred", "step", "time", "dt"]

    def __init__(self, n_nodes: int, dt: float, u0: Optional[np.ndarray]=None):
        check_value("SimulationState(...)", "dt", dt, dt > 0)
        self.u = np.zeros((n_nodes, 3)) if u0 is None else np.array(u0, dtype=float).reshape(n_nodes, 3)
        self.v = np.zeros((n_nodes, 3))
        self.a = np.zeros((n_nodes, 3))
        self.v_pred = np.zeros((n_nodes, 3))
        self.step = 0
        self.time = 0.0
        self.dt = float(dt)


    def copy(self) -> "SimulationState":
        other = SimulationState(self.u.shape[0], self.dt, self.u)
        other.v = self.v.copy()
        other.a = self.a.copy()
        other.v_pred = self.v_pred.copy()
        other.step = self.step
        other.time = self.time
        return other


    def __repr__(self) -> str:
        return f"<SimulationState: step={self.step} t={self.time:.6g} dt={self.dt:.6g}>"


class LumpedMass:
    """massa diagonal por nó (a mesma nas três direções) e seu inverso."""

    __slots__ = ["mass", "inverse"]

    def __init__(self, mass: np.ndarray):
        self.mass = np.asarray(mass, dtype=float)
        with np.errstate(divide="ignore"):
            self.inverse = np.where(self.mass > 0, 1.0 / np.where(self.mass > 0, self.mass, 1.0), 0.0)


    @property
    def total(self) -> float:
        return float(self.mass.sum())


class BoundaryConditions:
    """
    condições de contorno da faixa: conjunto de Dirichlet (nó, componente, ū) e forças de Neumann f.

    ### uso:

        bc = BoundaryConditions(mesh.n_nodes)
        bc.add_dirichlet(nodes, component=1, value=0.0)
    """

    __slots__ = ["nodes", "components", "values", "neumann"]

    def __init__(self, n_nodes: int):
        self.nodes = np.zeros(0, dtype=np.int64)
        self.components = np.zeros(0, dtype=np.int64)
        self.values = np.zeros(0)
        self.neumann = np.zeros((n_nodes, 3))


    def add_dirichlet(self, nodes, component: int, value: float=0.0):
        nodes = np.asarray(nodes, dtype=np.int64).ravel()
        self.nodes = np.concatenate([self.nodes, nodes])
        self.components = np.concatenate([self.components, np.full(nodes.size, component, dtype=np.int64)])
        self.values = np.concatenate([self.values, np.full(nodes.size, float(value))])


    @property
    def has_dirichlet(self) -> bool:
        return self.nodes.size > 0


    def apply(self, state: SimulationState):
        """sobrescreve u com ū e zera v, v_pred e a nos graus de liberdade prescritos."""
        if not self.has_dirichlet:
            return
        index = (self.nodes, self.components)
        state.u[index] = self.values
        state.v[index] = 0.0
        state.v_pred[index] = 0.0
        state.a[index] = 0.0


def elasticity_matrix(material: ElasticMaterial) -> np.ndarray:
    """matriz constitutiva isotrópica 6x6 (Voigt: 11, 22, 33, 12, 23, 13 com deformações de engenharia)."""
    lam, mu = material.lame_lambda, material.shear_modulus
    c = np.zeros((6, 6))
    c[:3, :3] = lam
    c[np.arange(3), np.arange(3)] = lam + 2.0 * mu
    c[np.arange(3, 6), np.arange(3, 6)] = mu
    return c


def _shape_gradients(point: Sequence[float], dx: float) -> np.ndarray:
    signs = 2.0 * HEX_CORNERS - 1.0
    xi = np.asarray(point, dtype=float)
    factors = 1.0 + signs * xi
    gradients = np.empty((8, 3))
    gradients[:, 0] = signs[:, 0] * factors[:, 1] * factors[:, 2]
    gradients[:, 1] = factors[:, 0] * signs[:, 1] * factors[:, 2]
    gradients[:, 2] = factors[:, 0] * factors[:, 1] * signs[:, 2]
    # dN/dx = (2/dx) dN/dξ
    return gradients / 8.0 * (2.0 / dx)


def strain_displacement(dx: float, point: Sequence[float]=(0.0, 0.0, 0.0)) -> np.ndarray:
    """matriz B (6x24) no ponto natural informado; graus de liberdade ordenados como 3·a + c."""
    g = _shape_gradients(point, dx)
    b = np.zeros((6, 24))
    columns = 3 * np.arange(8)
    b[0, columns] = g[:, 0]
    b[1, columns + 1] = g[:, 1]
    b[2, columns + 2] = g[:, 2]
    b[3, columns] = g[:, 1]
    b[3, columns + 1] = g[:, 0]
    b[4, columns + 1] = g[:, 2]
    b[4, columns + 2] = g[:, 1]
    b[5, columns] = g[:, 2]
    b[5, columns + 2] = g[:, 0]
    return b


def element_stiffness(material: ElasticMaterial, dx: float) -> np.ndarray:
    """
    matriz de rigidez 24x24 do hexaedro cúbico de 8 nós, integração completa 2x2x2 de Gauss.

    ### uso:

        ke = element_stiffness(host, 50.0)
        ke @ np.tile([1.0, 0.0, 0.0], 8) # ~0 (translação rígida)
    """
    check_type("element_stiffness(...)", "material", material, ElasticMaterial)
    c = elasticity_matrix(material)
    jacobian = (0.5 * dx) ** 3
    ke = np.zeros((24, 24))
    for point in itertools.product((-_GAUSS, _GAUSS), repeat=3):
        b = strain_displacement(dx, point)
        ke += b.T @ c @ b * jacobian
    return 0.5 * (ke + ke.T)


def assemble_lumped_mass(mesh: FiniteElementMesh|StructuredGrid) -> LumpedMass:
    """
    massa concentrada: cada um dos 8 nós do elemento recebe ρ_e·dx³/8; duplicatas só recebem massa dos elementos do seu lado.
    """
    if isinstance(mesh, StructuredGrid):
        mesh = FiniteElementMesh.from_grid(mesh)
    check_type("assemble_lumped_mass(...)", "mesh", mesh, FiniteElementMesh)
    grid = mesh.grid
    if not grid.materials:
        raise InvalidGridException("the grid has no materials; use assign_regions(...) first!")

    density = np.array([m.density for m in grid.materials])[grid.material_index]
    share = np.repeat(density * grid.dx ** 3 / 8.0, 8)
    mass = np.bincount(mesh.connectivity.ravel(), weights=share, minlength=mesh.n_nodes)
    return LumpedMass(mass)


class StiffnessOperator:
    """
    operador de rigidez livre de matriz: um gabarito 24x24 por material + conectividade.

    ### métodos:

        def apply(self, u) -> np.ndarray: força interna K·u, shape (n_nodes, 3)

        def to_dense(self) -> np.ndarray: matriz K densa (oráculo para malhas pequenas)

    ### observação:

        - a soma é feita por blocos fixos de elementos, reduzidos sempre na mesma ordem,
          então o resultado é idêntico bit a bit para qualquer número de threads
    """

    __slots__ = ["mesh", "templates", "groups", "_dofs", "threads"]

    def __init__(self, mesh: FiniteElementMesh, threads: int=1):
        check_type("StiffnessOperator(...)", "mesh", mesh, FiniteElementMesh)
        grid = mesh.grid
        if not grid.materials:
            raise InvalidGridException("the grid has no materials; use assign_regions(...) first!")

        self.mesh = mesh
        self.threads = max(1, int(threads))
        self.templates = {
            int(m): element_stiffness(grid.materials[int(m)], grid.dx)
            for m in np.unique(grid.material_index)
        }
        self._dofs = (3 * mesh.connectivity[:, :, None] + np.arange(3)).reshape(-1, 24)

        self.groups: list[tuple[int, np.ndarray]] = []
        for m in sorted(self.templates):
            elements = np.flatnonzero(grid.material_index == m)
            for start in range(0, elements.size, _CHUNK):
                self.groups.append((m, elements[start:start + _CHUNK]))


    def _chunk_force(self, u_flat: np.ndarray, task: tuple[int, np.ndarray]) -> np.ndarray:
        material, elements = task
        dofs = self._dofs[elements]
        fe = u_flat[dofs] @ self.templates[material]
        return np.bincount(dofs.ravel(), weights=fe.ravel(), minlength=u_flat.size)


    def apply(self, u: np.ndarray) -> np.ndarray:
        u_flat = np.ascontiguousarray(u, dtype=float).reshape(-1)
        force = np.zeros_like(u_flat)

        if self.threads == 1 or len(self.groups) == 1:
            for task in self.groups:
                force += self._chunk_force(u_flat, task)
        else:
            with ThreadPoolExecutor(max_workers=self.threads) as executor:
                for start in range(0, len(self.groups), self.threads):
                    batch = self.groups[start:start + self.threads]
                    for partial in executor.map(lambda task: self._chunk_force(u_flat, task), batch):
                        force += partial

        return force.reshape(-1, 3)


    def to_dense(self) -> np.ndarray:
        n = 3 * self.mesh.n_nodes
        k = np.zeros((n, n))
        for material, elements in self.groups:
            ke = self.templates[material]
            for dofs in self._dofs[elements]:
                k[np.ix_(dofs, dofs)] += ke
        return k


def internal_force(state: SimulationState|np.ndarray, stiffness: StiffnessOperator) -> np.ndarray:
    """força interna K·u (N), shape (n_nodes, 3)."""
    u = state.u if isinstance(state, SimulationState) else state
    return stiffness.apply(u)


def cfl_timestep(grid: StructuredGrid, safety: float=CFL_SAFETY, materials: Optional[Sequence[ElasticMaterial]]=None) -> float:
    """
    dt = safety · dx / max(c_p) sobre os materiais presentes na malha.

    ### uso:

        cfl_timestep(grid, 0.4) # dx = 50 m, c_p = 6000 m/s -> 3.333e-3 s
    """
    check_value("cfl_timestep(...)", "safety", safety, 0 < safety <= 1)
    if materials is None:
        materials = grid.element_materials() if grid.materials else ()
    if not materials:
        raise InvalidGridException("cfl_timestep(...) needs at least one material!")
    return safety * grid.dx / max(m.cp for m in materials)


def predict(state: SimulationState, bc: Optional[BoundaryConditions]=None) -> SimulationState:
    """
    preditor explícito:

        v_pred = v_t + dt·a_t
        u_{t+1} = u_t + dt·v_t + ½dt²·a_t  (= u_t + ½dt·(v_t + v_pred))
    """
    dt = state.dt
    np.multiply(state.a, dt, out=state.v_pred)
    state.v_pred += state.v
    state.u += 0.5 * dt * (state.v + state.v_pred)
    if bc is not None:
        bc.apply(state)
    return state


def correct(state: SimulationState, f: Optional[np.ndarray], fault_force: Optional[np.ndarray], mass: LumpedMass, stiffness: Optional[StiffnessOperator]=None, bc: Optional[BoundaryConditions]=None, internal: Optional[np.ndarray]=None) -> SimulationState:
    """
    corretor:

        Δa = M⁻¹(−K·u_{t+1} + f + Bτ) − a_t
        v_{t+1} = v_pred + ½dt·Δa
        t ← t + dt

    ### parâmetros:

        internal (Optional[np.ndarray]): K·u_{t+1} já calculado no passo (evita recalcular)
    """
    if internal is None:
        internal = stiffness.apply(state.u)
    total = -internal
    if f is not None:
        total = total + f
    if fault_force is not None:
        total = total + fault_force

    acceleration = total * mass.inverse[:, None]
    delta = acceleration - state.a
    state.v = state.v_pred + 0.5 * state.dt * delta
    state.a = acceleration
    if bc is not None:
        bc.apply(state)

    state.step += 1
    state.time = state.step * state.dt
    return state


def kinetic_energy(state: SimulationState, mass: LumpedMass) -> float:
    return 0.5 * float(np.sum(mass.mass[:, None] * state.v ** 2))


def strain_energy(state: SimulationState, stiffness: StiffnessOperator) -> float:
    return 0.5 * float(np.sum(state.u * stiffness.apply(state.u)))


def modified_energy(state: SimulationState, mass: LumpedMass, stiffness: StiffnessOperator) -> float:
    """
    energia conservada exatamente pelo esquema explícito em vibração livre:

        ½vᵀMv + ½uᵀKu − (dt²/8)·uᵀKM⁻¹Ku
    """
    ku = stiffness.apply(state.u)
    correction = float(np.sum(ku ** 2 * mass.inverse[:, None]))
    return kinetic_energy(state, mass) + 0.5 * float(np.sum(state.u * ku)) - state.dt ** 2 / 8.0 * correction


def check_stability(state: SimulationState, limit: float=BLOWUP_VELOCITY):
    """gera InstabilityException se max|v| > limit e NonFiniteFieldException com NaN/Inf."""
    if not np.all(np.isfinite(state.v)):
        raise NonFiniteFieldException(parse_message(NON_FINITE, FIELD="velocity", STEP=state.step))
    vmax = float(np.max(np.abs(state.v))) if state.v.size else 0.0
    if vmax > limit:
        raise InstabilityException(parse_message(
            INSTABILITY,
            "check dt against the CFL bound.",
            STEP=state.step,
            TIME=f"{state.time:.6g}",
            VMAX=f"{vmax:.3g}"
        ))


def element_stress(mesh: FiniteElementMesh, u: np.ndarray) -> np.ndarray:
    """tensão (Pa) no centróide de cada elemento, Voigt (11, 22, 33, 12, 23, 13), shape (n_elements, 6)."""
    grid = mesh.grid
    b = strain_displacement(grid.dx)
    ue = u[mesh.connectivity].reshape(-1, 24)
    strain = ue @ b.T
    stress = np.empty_like(strain)
    for m in np.unique(grid.material_index):
        selected = grid.material_index == m
        stress[selected] = strain[selected] @ elasticity_matrix(grid.materials[int(m)]).T
    return stress


def static_solution(stiffness: StiffnessOperator, loads: np.ndarray, fixed_nodes: np.ndarray) -> np.ndarray:
    """
    solução estática densa K·u = f com os nós "fixed_nodes" engastados (oráculo para malhas pequenas).
    """
    k = stiffness.to_dense()
    n = k.shape[0]
    fixed = (3 * np.asarray(fixed_nodes, dtype=np.int64)[:, None] + np.arange(3)).ravel()
    free = np.setdiff1d(np.arange(n), fixed)
    u = np.zeros(n)
    u[free] = scipy.linalg.solve(k[np.ix_(free, free)], np.asarray(loads, dtype=float).reshape(-1)[free], assume_a="sym")
    return u.reshape(-1, 3)
