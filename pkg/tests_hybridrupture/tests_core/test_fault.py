import pytest
import numpy as np

from hybridrupture import ElasticMaterial, FaultSpec, SlipWeakeningLaw, Prestress, NucleationPatch, FrictionOverride, build_grid
from hybridrupture.core.fem import FiniteElementMesh, SimulationState, StiffnessOperator, assemble_lumped_mass, predict
from hybridrupture.core.fault import (
    TANGENTIAL,
    NORMAL,
    friction_coefficient,
    build_fault,
    free_slip_predictor,
    impedance,
    stick_traction,
    resolve_traction,
    fault_strength,
    fault_forces,
    resolve_fault,
    update_fault_state,
    apply_nucleation
)
from hybridrupture.exceptions import InvalidFaultException, NucleationOutsideFaultException

LAW = SlipWeakeningLaw(0.677, 0.525, 0.4)


def small_fault(host: ElasticMaterial, mode: str="two_sided", nucleation=(), overrides=(), prestress=Prestress(70e6, 120e6)):
    origin = (0.0, -100.0, 0.0) if mode == "two_sided" else (0.0, 0.0, 0.0)
    grid = build_grid((400.0, 200.0, 400.0), 100.0, origin, [host])
    mesh = FiniteElementMesh.from_grid(grid)
    spec = FaultSpec("main", 0.0, (0.0, 400.0), (0.0, 400.0), LAW, prestress, nucleation, overrides)
    fault = build_fault(mesh, spec, mode)
    return mesh, fault


def test__friction_coefficient():
    assert friction_coefficient(LAW, 0.0) == pytest.approx(0.677)
    assert friction_coefficient(LAW, 0.4) == pytest.approx(0.525)
    assert friction_coefficient(LAW, 2.0) == pytest.approx(0.525)
    assert friction_coefficient(LAW, 0.2) == pytest.approx(0.601)

    assert np.allclose(friction_coefficient(LAW, np.array([0.0, 0.2, 1.0])), [0.677, 0.601, 0.525])


def test__stick_traction():
    assert stick_traction(2.0, 0.0) == 0.0
    assert stick_traction(2.0, 1.0) == pytest.approx(1.0)
    assert stick_traction(2.0, 1.0, 5.0) == pytest.approx(6.0)

    z = np.array([2.0, 4.0])
    assert np.allclose(stick_traction(z, np.array([[1.0, 0.0], [0.5, 1.0]])), [[1.0, 0.0], [1.0, 2.0]])


def test__resolve_traction():
    traction, stick = resolve_traction(np.array([[0.9, 0.0]]), np.array([1.0]))
    assert stick.all()
    assert np.allclose(traction, [[0.9, 0.0]])

    traction, stick = resolve_traction(np.array([[1.2, 1.6]]), np.array([1.0]))
    assert not stick.any()
    assert np.linalg.norm(traction) == pytest.approx(1.0)
    assert np.allclose(traction, [[0.6, 0.8]])

    traction, stick = resolve_traction(np.array([[5.0, 0.0], [0.0, 0.0]]), np.array([np.inf, 0.0]))
    assert stick.all()
    assert np.allclose(traction, [[5.0, 0.0], [0.0, 0.0]])


def test__build_fault__two_sided(host: ElasticMaterial):
    mesh, fault = small_fault(host)

    assert fault.shape == (5, 5)
    assert fault.plane == 1
    assert fault.n_nodes == 25
    assert mesh.n_nodes == mesh.grid.n_nodes + 25
    assert fault.area.sum() == pytest.approx(400.0 * 400.0)
    assert np.allclose(fault.tau0, [70e6, 0.0])
    assert np.allclose(fault.sigma_n, 120e6)
    assert not fault.locked.any()


def test__build_fault__symmetric(host: ElasticMaterial):
    grid = build_grid((400.0, 200.0, 400.0), 100.0, (0.0, 0.0, 0.0), [host])
    spec = FaultSpec("main", 0.0, (100.0, 300.0), (0.0, 200.0), LAW, Prestress(70e6, 120e6))
    fault = build_fault(FiniteElementMesh.from_grid(grid), spec, "symmetric")

    assert fault.minus is None
    assert fault.n_nodes == 25
    assert int((~fault.locked).sum()) == 3 * 3
    assert np.isinf(fault_strength(fault)[fault.locked]).all()

    with pytest.raises(InvalidFaultException):
        build_fault(FiniteElementMesh.from_grid(grid), FaultSpec("main", 100.0, (0.0, 400.0), (0.0, 400.0), LAW, Prestress(70e6, 120e6)), "symmetric")


def test__build_fault__invalid(host: ElasticMaterial):
    grid = build_grid((400.0, 200.0, 400.0), 100.0, materials=[host])

    with pytest.raises(InvalidFaultException):
        build_fault(FiniteElementMesh.from_grid(grid), FaultSpec("main", 0.0, (50.0, 400.0), (0.0, 400.0), LAW, Prestress(70e6, 120e6)))

    with pytest.raises(InvalidFaultException):
        build_fault(FiniteElementMesh.from_grid(grid), FaultSpec("main", 100.0, (0.0, 400.0), (0.0, 400.0), LAW, Prestress(70e6, 120e6)))


def test__impedance(host: ElasticMaterial):
    mesh, fault = small_fault(host)
    mass = assemble_lumped_mass(mesh)
    dt = 0.01

    z = impedance(fault, mass, dt)

    # interior: m₊ = m₋ = ρ·dx³/2 e A = dx²
    interior = 2 * 5 + 2
    assert z[interior] == pytest.approx(host.density * 100.0 ** 3 / 2.0 / (dt * 100.0 ** 2))
    # borda: massa e área caem pela metade
    assert np.allclose(z, z[interior])

    assert np.allclose(impedance(fault, mass, 2.0 * dt), 0.5 * z)


def test__impedance__symmetric(host: ElasticMaterial):
    mesh, fault = small_fault(host, "symmetric")
    mass = assemble_lumped_mass(mesh)

    z = impedance(fault, mass, 0.01)

    assert np.allclose(z, host.density * 100.0 / (2.0 * 0.01))


@pytest.mark.parametrize("mode", ["two_sided", "symmetric"])
def test__stick_traction__cancels_predictor(host: ElasticMaterial, mode: str):
    mesh, fault = small_fault(host, mode)
    mass = assemble_lumped_mass(mesh)
    stiffness = StiffnessOperator(mesh)

    rng = np.random.default_rng(17)
    state = SimulationState(mesh.n_nodes, 0.005, rng.normal(scale=1e-3, size=(mesh.n_nodes, 3)))
    state.v[:] = rng.normal(scale=0.1, size=state.v.shape)
    state.a[:] = rng.normal(scale=10.0, size=state.a.shape)
    predict(state)

    residual = -stiffness.apply(state.u)
    predicted = free_slip_predictor(fault, state, mass, residual)
    z = impedance(fault, mass, state.dt)

    tangential = stick_traction(z, predicted[:, TANGENTIAL])
    normal = stick_traction(z, predicted[:, NORMAL]) if mode == "two_sided" else None
    forces = fault_forces(fault, tangential, normal, mesh.n_nodes)

    recomputed = free_slip_predictor(fault, state, mass, residual + forces)
    components = [0, 1, 2] if mode == "two_sided" else TANGENTIAL

    assert np.allclose(recomputed[:, components], 0.0, atol=1e-12 * np.abs(predicted).max())


def test__free_slip_predictor__equal_sides(host: ElasticMaterial):
    mesh, fault = small_fault(host)
    mass = assemble_lumped_mass(mesh)

    state = SimulationState(mesh.n_nodes, 0.005)
    state.v[:] = [0.3, -0.1, 0.2]
    predict(state)

    assert np.allclose(free_slip_predictor(fault, state, mass, np.zeros((mesh.n_nodes, 3))), 0.0)


def test__resolve_fault__stuck_equilibrium(host: ElasticMaterial):
    mesh, fault = small_fault(host)
    mass = assemble_lumped_mass(mesh)

    state = SimulationState(mesh.n_nodes, 0.005)
    predict(state)
    forces = resolve_fault(fault, state, mass, np.zeros((mesh.n_nodes, 3)))

    assert fault.stick.all()
    assert np.allclose(forces, 0.0)
    assert np.allclose(fault.traction, fault.tau0)


def test__resolve_fault__nucleation_slips(host: ElasticMaterial):
    patch = NucleationPatch((100.0, 300.0), (100.0, 300.0), "stress_step", 81.6e6)
    mesh, fault = small_fault(host, nucleation=[patch])
    mass = assemble_lumped_mass(mesh)
    inside = fault.box_mask(patch.x1_range, patch.x3_range)

    state = SimulationState(mesh.n_nodes, 0.005)
    predict(state)
    resolve_fault(fault, state, mass, np.zeros((mesh.n_nodes, 3)))

    assert not fault.stick[inside].any()
    assert fault.stick[~inside].all()
    assert np.allclose(fault.shear_magnitude()[inside], 0.677 * 120e6)


@pytest.mark.parametrize("mode", ["two_sided", "symmetric"])
def test__resolve_fault__strength_follows_predicted_slip(host: ElasticMaterial, mode: str):
    mesh, fault = small_fault(host, mode)
    mass = assemble_lumped_mass(mesh)

    # deslizamento de Dc já em u_{t+1}, sem passar por update_fault_state
    u0 = np.zeros((mesh.n_nodes, 3))
    u0[fault.plus, 0] = 0.4 if mode == "two_sided" else 0.2
    state = SimulationState(mesh.n_nodes, 0.005, u0)
    predict(state)

    assert np.allclose(fault.slip_max, 0.0)

    resolve_fault(fault, state, mass, np.zeros((mesh.n_nodes, 3)))
    free = ~fault.locked

    assert np.allclose(fault.slip_max[free], 0.4)
    # 70 MPa supera μ_k·σ = 63 MPa: desliza no mesmo passo
    assert not fault.stick[free].any()
    assert np.allclose(fault.shear_magnitude()[free], 0.525 * 120e6)


def test__apply_nucleation(host: ElasticMaterial):
    drop = NucleationPatch((0.0, 200.0), (0.0, 400.0), "strength_drop", onset=0.5)
    step = NucleationPatch((200.0, 400.0), (0.0, 400.0), "stress_step", 90e6)
    mesh, fault = small_fault(host, nucleation=[drop, step])

    stepped = fault.box_mask(step.x1_range, step.x3_range)
    dropped = fault.box_mask(drop.x1_range, drop.x3_range)

    assert np.allclose(fault.tau0[stepped], [90e6, 0.0])
    assert np.allclose(fault.mu_s, 0.677)

    apply_nucleation(fault, 0.4)
    assert np.allclose(fault.mu_s, 0.677)

    apply_nucleation(fault, 0.5)
    assert np.allclose(fault.mu_s[dropped], 0.525)
    assert np.allclose(fault.mu_s[~dropped], 0.677)

    fault.mu_s[:] = 0.677
    apply_nucleation(fault, 1.0)
    assert np.allclose(fault.mu_s, 0.677)


def test__configure_fault__overrides_and_patch_outside(host: ElasticMaterial):
    _, fault = small_fault(host, overrides=[FrictionOverride((0.0, 100.0), (0.0, 400.0), mu_k=1.0), FrictionOverride((400.0, 400.0), (0.0, 400.0), locked=True)])

    assert np.allclose(fault.mu_k.reshape(fault.shape)[:2], 1.0)
    assert np.allclose(fault.mu_k.reshape(fault.shape)[2:], 0.525)
    assert fault.locked.reshape(fault.shape)[-1].all()
    assert not fault.locked.reshape(fault.shape)[:-1].any()

    with pytest.raises(NucleationOutsideFaultException):
        small_fault(host, nucleation=[NucleationPatch((300.0, 500.0), (0.0, 100.0), "strength_drop")])


def test__update_fault_state(host: ElasticMaterial):
    mesh, fault = small_fault(host)
    state = SimulationState(mesh.n_nodes, 0.005)

    update_fault_state(fault, state)
    assert np.allclose(fault.slip, 0.0)

    state.u[fault.plus, 0] = 0.3
    update_fault_state(fault, state)
    assert np.allclose(fault.slip, [0.3, 0.0])
    assert np.allclose(fault.slip_max, 0.3)

    history = []
    for offset in (0.1, 0.5, -0.2, 0.05):
        state.u[fault.plus, 0] = offset
        update_fault_state(fault, state)
        history.append(fault.slip_max.copy())

    assert all(np.all(later >= earlier) for earlier, later in zip(history, history[1:]))
    assert np.allclose(fault.slip_max, 0.5)


def test__update_fault_state__symmetric(host: ElasticMaterial):
    mesh, fault = small_fault(host, "symmetric")
    state = SimulationState(mesh.n_nodes, 0.005)
    state.u[fault.plus, 2] = 0.1
    state.v[fault.plus, 2] = 0.4

    update_fault_state(fault, state)

    assert np.allclose(fault.slip, [0.0, 0.2])
    assert np.allclose(fault.slip_rate, [0.0, 0.8])
