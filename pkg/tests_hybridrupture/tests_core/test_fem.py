import pytest
import numpy as np

from hybridrupture import ElasticMaterial, build_grid
from hybridrupture.models.grid import HEX_CORNERS
from hybridrupture.core.fem import (
    FiniteElementMesh,
    SimulationState,
    BoundaryConditions,
    StiffnessOperator,
    element_stiffness,
    assemble_lumped_mass,
    internal_force,
    cfl_timestep,
    predict,
    correct,
    modified_energy,
    check_stability,
    element_stress,
    static_solution
)
from hybridrupture.exceptions import InstabilityException, NonFiniteFieldException, UnexpectedValueException


def block(material: ElasticMaterial, elements=(1, 1, 1), dx: float=1.0) -> FiniteElementMesh:
    extents = tuple(n * dx for n in elements)
    grid = build_grid(extents, dx, origin=(0.0, 0.0, 0.0), materials=[material], min_layers=1)
    return FiniteElementMesh.from_grid(grid)


def test__element_stiffness__rigid_modes(host: ElasticMaterial):
    ke = element_stiffness(host, 50.0)
    # ordem local dos cantos do elemento, a mesma da conectividade
    corners = HEX_CORNERS * 50.0

    assert np.allclose(ke, ke.T)
    assert np.linalg.eigvalsh(ke).min() > -1e-6 * np.abs(ke).max()

    for direction in np.eye(3):
        assert np.allclose(ke @ np.tile(direction, 8), 0.0, atol=1e-6 * np.abs(ke).max())

    # rotação infinitesimal em torno de x3: u = (-x2, x1, 0)
    rotation = np.column_stack([-corners[:, 1], corners[:, 0], np.zeros(8)]).ravel()
    assert np.allclose(ke @ rotation, 0.0, atol=1e-6 * np.abs(ke).max() * 50.0)


def test__element_stress__patch_tests(host: ElasticMaterial):
    mesh = block(host, (2, 2, 2), 10.0)
    x = mesh.node_coordinates()

    strain = 1e-4
    uniaxial = np.column_stack([strain * x[:, 0], np.zeros(len(x)), np.zeros(len(x))])
    stress = element_stress(mesh, uniaxial)

    assert np.allclose(stress[:, 0], (host.lame_lambda + 2.0 * host.shear_modulus) * strain)
    assert np.allclose(stress[:, 1], host.lame_lambda * strain)
    assert np.allclose(stress[:, 3:], 0.0, atol=1e-6)

    shear = np.column_stack([strain * x[:, 1], np.zeros(len(x)), np.zeros(len(x))])
    stress = element_stress(mesh, shear)

    assert np.allclose(stress[:, 3], host.shear_modulus * strain)
    assert np.allclose(stress[:, :3], 0.0, atol=1e-6)


def test__internal_force__uniaxial_patch(host: ElasticMaterial):
    mesh = block(host, dx=10.0)
    stiffness = StiffnessOperator(mesh)
    x = mesh.node_coordinates()

    strain = 1e-4
    force = internal_force(np.column_stack([strain * x[:, 0], np.zeros(8), np.zeros(8)]), stiffness)
    face = np.isclose(x[:, 0], 10.0)

    # resultante na face x1 = dx é σ11·dx²
    assert force[face, 0].sum() == pytest.approx((host.lame_lambda + 2.0 * host.shear_modulus) * strain * 100.0)
    assert force[:, 0].sum() == pytest.approx(0.0, abs=1e-6 * np.abs(force).max())


def test__internal_force__zero_and_dense(host: ElasticMaterial):
    mesh = block(host, (2, 1, 1), 100.0)
    stiffness = StiffnessOperator(mesh)

    assert np.array_equal(internal_force(np.zeros((mesh.n_nodes, 3)), stiffness), np.zeros((mesh.n_nodes, 3)))

    u = np.random.default_rng(7).normal(size=(mesh.n_nodes, 3))
    dense = stiffness.to_dense() @ u.ravel()

    assert np.allclose(stiffness.apply(u).ravel(), dense, rtol=1e-12, atol=1e-12 * np.abs(dense).max())


def test__stiffness_operator__threads_are_bitwise_identical(host: ElasticMaterial):
    lvz = host.scaled(0.8)
    grid = build_grid((400.0, 200.0, 400.0), 100.0, materials=[host, lvz])
    grid = grid.with_materials(np.arange(grid.n_elements) % 2, [host, lvz])
    mesh = FiniteElementMesh.from_grid(grid)

    u = np.random.default_rng(3).normal(size=(mesh.n_nodes, 3))

    assert np.array_equal(StiffnessOperator(mesh, threads=1).apply(u), StiffnessOperator(mesh, threads=2).apply(u))


def test__assemble_lumped_mass():
    unit = ElasticMaterial(1.0, 1.0, 1.0)

    single = assemble_lumped_mass(block(unit))
    assert np.allclose(single.mass, 1.0 / 8.0)

    pair = assemble_lumped_mass(block(unit, (2, 1, 1)))
    grid = build_grid((2.0, 1.0, 1.0), 1.0, origin=(0.0, 0.0, 0.0), min_layers=1)
    i, _, _ = grid.node_ijk(np.arange(grid.n_nodes))

    assert pair.total == pytest.approx(2.0)
    assert np.allclose(pair.mass[i == 1], 0.25)
    assert np.allclose(pair.mass[i != 1], 0.125)


def test__assemble_lumped_mass__total(host: ElasticMaterial):
    grid = build_grid((3e3, 0.2e3, 1.5e3), 50.0, materials=[host])

    assert assemble_lumped_mass(grid).total == pytest.approx(2670.0 * 3e3 * 0.2e3 * 1.5e3)


def test__assemble_lumped_mass__split_nodes(host: ElasticMaterial):
    grid = build_grid((200.0, 200.0, 200.0), 100.0, materials=[host])
    mesh = FiniteElementMesh.from_grid(grid)
    plus, minus = mesh.split_plane(1, (0, 2), (0, 2))
    mass = assemble_lumped_mass(mesh)

    assert mesh.n_nodes == grid.n_nodes + 9
    assert np.allclose(mass.mass[plus], mass.mass[minus])
    assert mass.total == pytest.approx(2670.0 * 200.0 ** 3)


def test__cfl_timestep(host: ElasticMaterial):
    grid = build_grid((1e3, 0.2e3, 1e3), 50.0, materials=[host])

    assert cfl_timestep(grid, 0.4) == pytest.approx(50.0 * 0.4 / 6000.0)
    assert cfl_timestep(grid, 0.4) == pytest.approx(3.333e-3, rel=1e-3)

    # ρ = μ = λ = 1 -> c_p = √3; dx = c_p e safety 1 -> dt = 1
    unit = ElasticMaterial(1.0, 1.0, 1.0)
    side = 3.0 ** 0.5
    assert cfl_timestep(build_grid((side, side, side), side, materials=[unit], min_layers=1), 1.0) == pytest.approx(1.0)

    lvz = host.scaled(0.8)
    assert cfl_timestep(grid, 0.4, [lvz, host]) == pytest.approx(50.0 * 0.4 / 6000.0)

    with pytest.raises(UnexpectedValueException):
        cfl_timestep(grid, 1.5)


def test__predict():
    state = SimulationState(1, 1.0)
    state.v[:] = 1.0
    state.a[:] = 2.0

    predict(state)

    assert np.allclose(state.v_pred, 3.0)
    assert np.allclose(state.u, 2.0)

    state = SimulationState(2, 0.5)
    state.v[:] = [4.0, 0.0, -2.0]
    predict(state)

    assert np.allclose(state.u, [[2.0, 0.0, -1.0]] * 2)


def test__predict__dirichlet():
    state = SimulationState(3, 0.1)
    state.v[:] = 1.0

    bc = BoundaryConditions(3)
    bc.add_dirichlet([0, 2], component=1, value=0.5)
    predict(state, bc)

    assert np.allclose(state.u[[0, 2], 1], 0.5)
    assert np.allclose(state.v_pred[[0, 2], 1], 0.0)
    assert np.allclose(state.u[1], 0.1)


def test__predict__constant_acceleration():
    mass = assemble_lumped_mass(block(ElasticMaterial(1.0, 1.0, 1.0)))
    force = np.tile([0.0, 0.0, 0.25], (8, 1))
    state = SimulationState(8, 0.01)
    state.a[:, 2] = 2.0

    for n in range(1, 6):
        predict(state)
        assert np.allclose(state.v_pred[:, 2], n * 2.0 * 0.01)
        correct(state, force, None, mass, internal=np.zeros((8, 3)))

    assert state.step == 5
    assert state.time == pytest.approx(0.05)


def test__correct__equilibrium(host: ElasticMaterial):
    mesh = block(host, (2, 1, 1), 100.0)
    stiffness = StiffnessOperator(mesh)
    mass = assemble_lumped_mass(mesh)

    state = SimulationState(mesh.n_nodes, 1e-3, np.random.default_rng(1).normal(scale=1e-3, size=(mesh.n_nodes, 3)))
    state.v[:] = 0.3
    predict(state)
    correct(state, stiffness.apply(state.u), None, mass, stiffness)

    assert np.allclose(state.a, 0.0)
    assert np.allclose(state.v, 0.3)


def test__correct__dense_reference(host: ElasticMaterial):
    mesh = block(host, dx=100.0)
    stiffness = StiffnessOperator(mesh)
    mass = assemble_lumped_mass(mesh)
    k = stiffness.to_dense()
    m_inverse = np.repeat(mass.inverse, 3)

    dt = cfl_timestep(mesh.grid, 0.4)
    u0 = np.random.default_rng(5).normal(scale=1e-3, size=(8, 3))
    state = SimulationState(8, dt, u0)

    u, v, a = u0.ravel().copy(), np.zeros(24), np.zeros(24)
    for _ in range(50):
        predict(state)
        correct(state, None, None, mass, stiffness)

        v_pred = v + dt * a
        u = u + 0.5 * dt * (v + v_pred)
        a_next = -(k @ u) * m_inverse
        v = v_pred + 0.5 * dt * (a_next - a)
        a = a_next

    assert np.allclose(state.u.ravel(), u, rtol=1e-10, atol=1e-10 * np.abs(u).max())
    assert np.allclose(state.v.ravel(), v, rtol=1e-10, atol=1e-12 * np.abs(v).max())


def test__modified_energy__free_vibration(host: ElasticMaterial):
    mesh = block(host, (2, 1, 1), 100.0)
    stiffness = StiffnessOperator(mesh)
    mass = assemble_lumped_mass(mesh)

    state = SimulationState(mesh.n_nodes, cfl_timestep(mesh.grid, 0.4), np.random.default_rng(11).normal(scale=1e-3, size=(mesh.n_nodes, 3)))
    predict(state)
    correct(state, None, None, mass, stiffness)

    energy = modified_energy(state, mass, stiffness)
    assert energy > 0

    for _ in range(500):
        predict(state)
        correct(state, None, None, mass, stiffness)

    assert modified_energy(state, mass, stiffness) == pytest.approx(energy, rel=1e-9)


def test__check_stability():
    state = SimulationState(2, 1.0)
    check_stability(state)

    state.v[0, 0] = 1e9
    with pytest.raises(InstabilityException):
        check_stability(state)

    state.v[0, 0] = np.nan
    with pytest.raises(NonFiniteFieldException):
        check_stability(state)


def test__static_solution(host: ElasticMaterial):
    mesh = block(host, (2, 2, 2), 100.0)
    stiffness = StiffnessOperator(mesh)
    x = mesh.node_coordinates()

    fixed = np.flatnonzero(np.isclose(x[:, 1], 0.0))
    loads = np.zeros((mesh.n_nodes, 3))
    loads[np.isclose(x[:, 1], 200.0), 0] = 1e6

    u = static_solution(stiffness, loads, fixed)
    residual = stiffness.apply(u) - loads
    free = np.setdiff1d(np.arange(mesh.n_nodes), fixed)

    assert np.allclose(u[fixed], 0.0)
    assert np.allclose(residual[free], 0.0, atol=1e-6 * 1e6)
    assert u[np.isclose(x[:, 1], 200.0), 0].min() > 0
