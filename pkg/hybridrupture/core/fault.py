import logging
from typing import Optional, Literal

import numpy as np

from ..models.friction import SlipWeakeningLaw, NucleationPatch
from ..models.scenario import FaultSpec
from .fem import FiniteElementMesh, SimulationState, LumpedMass
from .utils import parse_message, check_type, check_value
from .messeger import (
    FAULT_OUTSIDE,
    NUCLEATION_OUTSIDE,
    ZERO_MASS,
    STATION_OUTSIDE,
    RUPTURE_THRESHOLD
)
from ..exceptions import (
    InvalidFaultException,
    NucleationOutsideFaultException,
    ZeroNodalMassException,
    InvalidScenarioException
)

logger = logging.getLogger(__name__)

# componentes tangenciais (x1, x3) e normal (x2) no referencial da falha
TANGENTIAL = np.array([0, 2])
NORMAL = 1

_TOLERANCE = 1e-6

__all__ = [
    "TANGENTIAL",
    "NORMAL",
    "FaultSurface",
    "friction_coefficient",
    "build_fault",
    "configure_fault",
    "free_slip_predictor",
    "impedance",
    "stick_traction",
    "resolve_traction",
    "fault_strength",
    "fault_forces",
    "resolve_fault",
    "update_fault_state",
    "apply_nucleation",
]


def _weakening(mu_s, mu_k, dc, slip):
    return mu_s - (mu_s - mu_k) * np.minimum(np.asarray(slip, dtype=float) / dc, 1.0)


def friction_coefficient(law: SlipWeakeningLaw, slip: float|np.ndarray) -> float|np.ndarray:
    """
    coeficiente de atrito da lei linear: μ_s − (μ_s − μ_k)·δ/δ_c para δ < δ_c e μ_k a partir de δ_c.

    ### uso:

        law = SlipWeakeningLaw(0.677, 0.525, 0.4)

        friction_coefficient(law, 0.0) # 0.677
        friction_coefficient(law, 1.0) # 0.525
    """
    check_type("friction_coefficient(...)", "law", law, SlipWeakeningLaw)
    mu = _weakening(law.mu_s, law.mu_k, law.dc, slip)
    return float(mu) if np.ndim(mu) == 0 else mu


class FaultSurface:
    """
    falha plana com nós divididos (two_sided) ou de um só lado sobre o plano de simetria (symmetric).

    ### atributos principais (arrays por nó, ordem C sobre a grade (n1, n3) da falha):

        plus, minus: ids dos nós dos lados + e − (minus é None no modo simétrico)
        area: área tributária (m²)
        tau0 (n, 2), sigma0 (n,): tração de fundo (Pa), já com nucleação por degrau de tensão
        mu_s, mu_k, dc, locked: parâmetros de atrito por nó (locked: τ^s = ∞)
        slip (n, 2), slip_rate (n, 2), slip_max (n,): estado cinemático
        traction (n, 2), sigma_n (n,), stick (n,): estado de tração do último passo

    ### observação:

        - no modo simétrico o deslocamento do lado − é o espelho do lado +, então slip = 2·u₊
        - a soma das áreas tributárias é a área da grade de nós da falha
    """

    __slots__ = [
        "name", "mode", "plane", "x1", "x3", "shape", "plus", "minus", "area",
        "tau0", "sigma0", "mu_s", "mu_k", "dc", "locked",
        "slip", "slip_rate", "slip_max", "traction", "trial", "sigma_n", "normal_traction", "stick",
        "nucleation", "_applied", "_impedance"
    ]

    def __init__(self, name: str, mode: Literal["symmetric", "two_sided"], plane: int, x1: np.ndarray, x3: np.ndarray, plus: np.ndarray, minus: Optional[np.ndarray], dx: float):
        self.name = name
        self.mode = mode
        self.plane = plane
        self.x1 = np.asarray(x1, dtype=float)
        self.x3 = np.asarray(x3, dtype=float)
        self.shape = (self.x1.size, self.x3.size)
        self.plus = np.asarray(plus, dtype=np.int64).ravel()
        self.minus = None if minus is None else np.asarray(minus, dtype=np.int64).ravel()

        w1 = np.ones(self.shape[0])
        w3 = np.ones(self.shape[1])
        w1[[0, -1]] *= 0.5
        w3[[0, -1]] *= 0.5
        self.area = (dx * dx * np.outer(w1, w3)).ravel()

        n = self.plus.size
        self.tau0 = np.zeros((n, 2))
        self.sigma0 = np.zeros(n)
        self.mu_s = np.zeros(n)
        self.mu_k = np.zeros(n)
        self.dc = np.ones(n)
        self.locked = np.zeros(n, dtype=bool)

        self.slip = np.zeros((n, 2))
        self.slip_rate = np.zeros((n, 2))
        self.slip_max = np.zeros(n)
        self.traction = np.zeros((n, 2))
        self.trial = np.zeros((n, 2))
        self.sigma_n = np.zeros(n)
        self.normal_traction = np.zeros(n)
        self.stick = np.ones(n, dtype=bool)

        self.nucleation: list[tuple[NucleationPatch, np.ndarray]] = []
        self._applied: list[bool] = []
        self._impedance: Optional[tuple[float, np.ndarray]] = None


    @property
    def n_nodes(self) -> int:
        return int(self.plus.size)


    @property
    def symmetric(self) -> bool:
        return self.mode == "symmetric"


    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """malhas (x1, x3) com shape (n1, n3)."""
        return np.meshgrid(self.x1, self.x3, indexing="ij")


    def box_mask(self, x1_range: tuple[float, float], x3_range: tuple[float, float]) -> np.ndarray:
        x1, x3 = self.coordinates()
        tolerance = _TOLERANCE * max(1.0, float(np.ptp(self.x1)) if self.x1.size > 1 else 1.0)
        inside = ((x1 >= x1_range[0] - tolerance) & (x1 <= x1_range[1] + tolerance)
                  & (x3 >= x3_range[0] - tolerance) & (x3 <= x3_range[1] + tolerance))
        return inside.ravel()


    def nearest(self, x1: float, x3: float, station: str="station") -> int:
        """índice (plano) do nó da falha mais próximo de (x1, x3); InvalidScenarioException fora da grade da falha."""
        dx = self.x1[1] - self.x1[0] if self.x1.size > 1 else 1.0
        if not (self.x1[0] - 0.5 * dx <= x1 <= self.x1[-1] + 0.5 * dx and self.x3[0] - 0.5 * dx <= x3 <= self.x3[-1] + 0.5 * dx):
            raise InvalidScenarioException(parse_message(STATION_OUTSIDE, STATION=station, X1=x1, X3=x3, FAULT=self.name))
        i = int(np.argmin(np.abs(self.x1 - x1)))
        k = int(np.argmin(np.abs(self.x3 - x3)))
        return i * self.shape[1] + k


    def slip_magnitude(self) -> np.ndarray:
        return np.linalg.norm(self.slip, axis=1)


    def slip_rate_magnitude(self) -> np.ndarray:
        return np.linalg.norm(self.slip_rate, axis=1)


    def shear_magnitude(self) -> np.ndarray:
        return np.linalg.norm(self.traction, axis=1)


    def rupture_extent(self, threshold: float=RUPTURE_THRESHOLD) -> tuple[float, float]:
        """extensão (m) em x1 e x3 da região com |δ̇| > threshold."""
        active = (self.slip_rate_magnitude() > threshold).reshape(self.shape)
        if not active.any():
            return 0.0, 0.0
        rows = np.flatnonzero(active.any(axis=1))
        columns = np.flatnonzero(active.any(axis=0))
        return float(self.x1[rows[-1]] - self.x1[rows[0]]), float(self.x3[columns[-1]] - self.x3[columns[0]])


    def snapshot(self) -> dict[str, np.ndarray]:
        """campos da falha com shape (n1, n3): deslizamento, taxa de deslizamento e cisalhamento (magnitudes)."""
        return {
            "slip": self.slip_magnitude().reshape(self.shape),
            "slip_rate": self.slip_rate_magnitude().reshape(self.shape),
            "shear": self.shear_magnitude().reshape(self.shape)
        }


    def __repr__(self) -> str:
        return f"<FaultSurface {self.name}: {self.mode} plane={self.plane} nodes={self.n_nodes}>"


def _node_index_on_axis(mesh: FiniteElementMesh, axis: int, x: float, fault: str) -> int:
    grid = mesh.grid
    position = (x - grid.origin[axis]) / grid.dx
    index = int(round(position))
    if abs(position - index) > 1e-6 or not 0 <= index <= grid.shape[axis]:
        raise InvalidFaultException(parse_message(
            FAULT_OUTSIDE,
            FAULT=fault,
            REASON=f"x{axis + 1} = {x} m",
            COMPLEMENT="fault edges must lie on grid nodes inside the strip."
        ))
    return index


def build_fault(mesh: FiniteElementMesh, spec: FaultSpec, mode: Literal["symmetric", "two_sided"]="two_sided") -> FaultSurface:
    """
    cria a superfície de falha sobre a malha.

    ### parâmetros:

        mesh (FiniteElementMesh): malha (modificada no modo "two_sided": os nós da falha são divididos)
        spec (FaultSpec): geometria, atrito e tração inicial
        mode (Literal["symmetric", "two_sided"]): "symmetric" usa o plano S⁻ inteiro da faixa como plano de simetria,
            travando os nós fora da região de ruptura

    ### uso:

        mesh = FiniteElementMesh.from_grid(grid)
        fault = build_fault(mesh, scenario.faults[0], "two_sided")
    """
    check_type("build_fault(...)", "mesh", mesh, FiniteElementMesh)
    check_type("build_fault(...)", "spec", spec, FaultSpec)
    check_value("build_fault(...)", "mode", mode, mode in ("symmetric", "two_sided"))

    grid = mesh.grid
    j = grid.layer_of(spec.x2)

    if mode == "symmetric":
        if j != 0:
            raise InvalidFaultException(parse_message(
                FAULT_OUTSIDE,
                FAULT=spec.name,
                REASON=f"x2 = {spec.x2} m",
                COMPLEMENT="a symmetric fault must lie on the lower plane of the strip."
            ))
        plus = grid.plane_nodes(0)
        fault = FaultSurface(spec.name, mode, 0, grid.axis_coordinates(0), grid.axis_coordinates(2), plus, None, grid.dx)
        fault.locked[:] = ~fault.box_mask(spec.x1_range, spec.x3_range)
    else:
        i0, i1 = (_node_index_on_axis(mesh, 0, x, spec.name) for x in spec.x1_range)
        k0, k1 = (_node_index_on_axis(mesh, 2, x, spec.name) for x in spec.x3_range)
        if i1 <= i0 or k1 <= k0:
            raise InvalidFaultException(parse_message(FAULT_OUTSIDE, FAULT=spec.name, REASON="degenerate node range"))
        plus, minus = mesh.split_plane(j, (i0, i1), (k0, k1))
        x1 = grid.origin[0] + grid.dx * np.arange(i0, i1 + 1)
        x3 = grid.origin[2] + grid.dx * np.arange(k0, k1 + 1)
        fault = FaultSurface(spec.name, mode, j, x1, x3, plus, minus, grid.dx)

    configure_fault(fault, spec)
    logger.debug("fault %s: %s nodes=%d locked=%d", fault.name, fault.mode, fault.n_nodes, int(fault.locked.sum()))
    return fault


def configure_fault(fault: FaultSurface, spec: FaultSpec) -> FaultSurface:
    """
    preenche atrito, tração inicial, sobrescritas e nucleação da superfície a partir de "spec".

    ### observação:

        - usado tanto pela malha de elementos finitos quanto pelo solver SBIM de referência
        - NucleationOutsideFaultException se um retângulo de nucleação sair da região da falha
    """
    law = spec.law
    fault.tau0[:] = spec.prestress.tau0
    fault.sigma0[:] = spec.prestress.sigma0
    fault.mu_s[:] = law.mu_s
    fault.mu_k[:] = law.mu_k
    fault.dc[:] = law.dc

    for override in spec.overrides:
        mask = fault.box_mask(override.x1_range, override.x3_range)
        if override.mu_k is not None:
            fault.mu_k[mask] = override.mu_k
        if override.locked:
            fault.locked[mask] = True

    for patch in spec.nucleation:
        region = (spec.x1_range, spec.x3_range)
        if not (spec.contains(patch.x1_range[0], patch.x3_range[0]) and spec.contains(patch.x1_range[1], patch.x3_range[1])):
            raise NucleationOutsideFaultException(parse_message(
                NUCLEATION_OUTSIDE,
                PATCH=f"x1={patch.x1_range} x3={patch.x3_range}",
                FAULT=spec.name,
                REGION=f"x1={region[0]} x3={region[1]}"
            ))
        fault.nucleation.append((patch, fault.box_mask(patch.x1_range, patch.x3_range)))
        fault._applied.append(False)

    fault.traction[:] = fault.tau0
    fault.trial[:] = fault.tau0
    fault.sigma_n[:] = fault.sigma0
    apply_nucleation(fault, 0.0)
    return fault


def apply_nucleation(fault: FaultSurface, time: float) -> FaultSurface:
    """
    ativa os retângulos de nucleação com onset <= time (cada um só uma vez).

    ### observação:

        - "stress_step": τ₀ passa a valer "value" na direção do cisalhamento de fundo (x1 se o fundo for nulo)
        - "strength_drop": μ_s = μ_k dentro do retângulo
    """
    for position, (patch, mask) in enumerate(fault.nucleation):
        if fault._applied[position] or patch.onset > time + 1e-12:
            continue

        if patch.mechanism == "stress_step":
            magnitude = np.linalg.norm(fault.tau0[mask], axis=1, keepdims=True)
            direction = np.where(magnitude > 0, fault.tau0[mask] / np.where(magnitude > 0, magnitude, 1.0), np.array([1.0, 0.0]))
            fault.tau0[mask] = patch.value * direction
        else:
            fault.mu_s[mask] = fault.mu_k[mask]

        fault._applied[position] = True
        logger.info("nucleation of %s (%s) active at t = %.4g s on %d nodes", fault.name, patch.mechanism, time, int(mask.sum()))

    return fault


def _side_values(array: np.ndarray, fault: FaultSurface) -> np.ndarray:
    if fault.minus is None:
        return 2.0 * array[fault.plus]
    return array[fault.plus] - array[fault.minus]


def free_slip_predictor(fault: FaultSurface, state: SimulationState, mass: LumpedMass, residual: np.ndarray) -> np.ndarray:
    """
    descontinuidade de velocidade prevista para o meio passo seguinte sem tração adicional na falha:

        [| v_pred − ½dt·a_t + dt·M⁻¹(f − K·u_{t+1}) |]

    ### parâmetros:

        residual (np.ndarray): f − K·u_{t+1} (n_nodes, 3)

    ### retorno:

        np.ndarray: (n, 3) nas componentes globais; no modo simétrico é o dobro do valor do lado +
    """
    dt = state.dt

    def side(nodes: np.ndarray) -> np.ndarray:
        return state.v_pred[nodes] - 0.5 * dt * state.a[nodes] + dt * residual[nodes] * mass.inverse[nodes, None]

    if fault.minus is None:
        return 2.0 * side(fault.plus)
    return side(fault.plus) - side(fault.minus)


def impedance(fault: FaultSurface, mass: LumpedMass, dt: float) -> np.ndarray:
    """
    impedância Z por nó: Z⁻¹ = dt·A·(1/m₊ + 1/m₋)/2 (two_sided) ou Z = m₊/(dt·A) (symmetric).

    ### observação:

        - gera ZeroNodalMassException se algum lado de um nó da falha não tiver massa
    """
    if fault._impedance is not None and fault._impedance[0] == dt:
        return fault._impedance[1]

    sides = [("+", fault.plus)] + ([] if fault.minus is None else [("-", fault.minus)])
    for side, nodes in sides:
        empty = np.flatnonzero(mass.mass[nodes] <= 0)
        if empty.size:
            raise ZeroNodalMassException(parse_message(ZERO_MASS, NODE=int(nodes[empty[0]]), FAULT=fault.name, SIDE=side))

    if fault.minus is None:
        z = mass.mass[fault.plus] / (dt * fault.area)
    else:
        z = 2.0 / (dt * fault.area * (mass.inverse[fault.plus] + mass.inverse[fault.minus]))

    fault._impedance = (dt, z)
    return z


def stick_traction(z: np.ndarray|float, predicted: np.ndarray|float, background: np.ndarray|float=0.0) -> np.ndarray|float:
    """
    tração que mantém a falha travada: τ̃ = background + ½·Z·[|v|].

    ### uso:

        stick_traction(2.0, 1.0) # 1.0
    """
    z = np.asarray(z, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if predicted.ndim == z.ndim + 1:
        z = z[..., None]
    trial = background + 0.5 * z * predicted
    return float(trial) if np.ndim(trial) == 0 else trial


def resolve_traction(trial: np.ndarray, strength: np.ndarray|float) -> tuple[np.ndarray, np.ndarray]:
    """
    limita a tração pela resistência: τ = τ̃ se |τ̃| <= τ^s (stick), senão τ^s na direção de τ̃ (slip).

    ### parâmetros:

        trial (np.ndarray): tração de teste τ̃ com shape (n, 2)
        strength (np.ndarray|float): resistência τ^s (n,) (np.inf para nós travados)

    ### retorno:

        tuple[np.ndarray, np.ndarray]: (τ (n, 2), stick (n,) bool)
    """
    trial = np.atleast_2d(np.asarray(trial, dtype=float))
    strength = np.broadcast_to(np.asarray(strength, dtype=float), trial.shape[:-1])
    magnitude = np.linalg.norm(trial, axis=-1)
    stick = magnitude <= strength
    scale = np.where(stick, 1.0, strength / np.where(magnitude > 0, magnitude, 1.0))
    return trial * scale[..., None], stick


def fault_strength(fault: FaultSurface) -> np.ndarray:
    """τ^s = max(σⁿ, 0)·μ(δ_max), infinita nos nós travados."""
    mu = _weakening(fault.mu_s, fault.mu_k, fault.dc, fault.slip_max)
    strength = np.maximum(fault.sigma_n, 0.0) * mu
    return np.where(fault.locked, np.inf, strength)


def fault_forces(fault: FaultSurface, perturbation: np.ndarray, normal: Optional[np.ndarray], n_nodes: int, out: Optional[np.ndarray]=None) -> np.ndarray:
    """
    forças nodais da falha: lado + recebe −A·Δτ e lado − recebe +A·Δτ.

    ### parâmetros:

        perturbation (np.ndarray): τ − τ₀ tangencial (n, 2)
        normal (Optional[np.ndarray]): perturbação da tração normal (n,) (faltas two_sided)
        out (Optional[np.ndarray]): acumulador (n_nodes, 3)
    """
    force = np.zeros((n_nodes, 3)) if out is None else out
    tangential = fault.area[:, None] * perturbation

    force[fault.plus[:, None], TANGENTIAL] -= tangential
    if fault.minus is not None:
        force[fault.minus[:, None], TANGENTIAL] += tangential
        if normal is not None:
            normal_force = fault.area * normal
            force[fault.plus, NORMAL] -= normal_force
            force[fault.minus, NORMAL] += normal_force

    return force


def resolve_fault(fault: FaultSurface, state: SimulationState, mass: LumpedMass, residual: np.ndarray, out: Optional[np.ndarray]=None) -> np.ndarray:
    """
    resolve a tração da falha para o passo t+1 (chamado entre predict(...) e correct(...)).

    ### parâmetros:

        residual (np.ndarray): f − K·u_{t+1}, sem a contribuição da falha
        out (Optional[np.ndarray]): acumulador das forças da falha

    ### retorno:

        np.ndarray: forças nodais da falha (n_nodes, 3)

    ### observação:

        - a resistência τ^s_{t+1} usa o deslizamento de u_{t+1}, já conhecido depois de predict(...)
    """
    apply_nucleation(fault, state.time + state.dt)

    fault.slip[:] = _side_values(state.u, fault)[:, TANGENTIAL]
    np.maximum(fault.slip_max, fault.slip_magnitude(), out=fault.slip_max)

    predicted = free_slip_predictor(fault, state, mass, residual)
    z = impedance(fault, mass, state.dt)

    if fault.minus is None:
        fault.normal_traction[:] = 0.0
        normal = None
    else:
        normal = stick_traction(z, predicted[:, NORMAL])
        fault.normal_traction[:] = normal
    fault.sigma_n[:] = fault.sigma0 - fault.normal_traction

    fault.trial[:] = stick_traction(z, predicted[:, TANGENTIAL], fault.tau0)
    traction, stick = resolve_traction(fault.trial, fault_strength(fault))
    fault.traction[:] = traction
    fault.stick[:] = stick

    return fault_forces(fault, traction - fault.tau0, normal, state.u.shape[0], out)


def update_fault_state(fault: FaultSurface, state: SimulationState) -> FaultSurface:
    """atualiza deslizamento, taxa de deslizamento e o máximo de |δ| a partir do estado corrigido."""
    fault.slip[:] = _side_values(state.u, fault)[:, TANGENTIAL]
    fault.slip_rate[:] = _side_values(state.v, fault)[:, TANGENTIAL]
    np.maximum(fault.slip_max, fault.slip_magnitude(), out=fault.slip_max)
    return fault
