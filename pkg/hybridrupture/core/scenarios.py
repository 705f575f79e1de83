"""
cenários prontos (TPV3, zona de falha de baixa velocidade, zona de baixa velocidade fora da falha e falhas em degrau)
e as verificações feitas antes de qualquer alocação.
"""

import math
import inspect
import logging
from typing import Callable, Optional

from ..models.materials import ElasticMaterial, RegionSpec
from ..models.friction import SlipWeakeningLaw, Prestress, NucleationPatch, FrictionOverride
from ..models.scenario import Scenario, FaultSpec, Station
from ..models.grid import build_grid, assign_regions
from .fem import cfl_timestep
from .utils import parse_message, check_type, check_value, is_admissible_size
from .messeger import (
    CFL_SAFETY,
    COHESIVE_ZONE_MIN_ELEMENTS,
    UNKNOWN_PRESET,
    INVALID_SCENARIO,
    STATION_OUTSIDE,
    STEPOVER_NOT_MULTIPLE,
    WRAP_AROUND,
    UNDER_RESOLVED,
    CFL_VIOLATED,
    NOT_NODE_PLANE
)
from ..exceptions import InvalidScenarioException, InvalidFaultException, InvalidGridException

logger = logging.getLogger(__name__)

__all__ = [
    "host_rock",
    "tpv3",
    "lvfz",
    "offfault_lvz",
    "stepover",
    "PRESETS",
    "build_preset",
    "strength_ratio",
    "cohesive_zone_estimate",
    "validate_scenario"
]

KM = 1.0e3


def host_rock() -> ElasticMaterial:
    """rocha de referência de todos os cenários: ρ = 2670 kg/m³, c_p = 6000 m/s, c_s = 3464 m/s."""
    return ElasticMaterial.from_wavespeeds(2670.0, 6000.0, 3464.0, "host")


def _multiple(length: float, dx: float) -> float:
    """menor múltiplo de dx que cobre "length"."""
    return math.ceil(length / dx - 1e-9) * dx


def _admissible_count(n: int) -> int:
    while not is_admissible_size(n):
        n += 1
    return n


def _periodic_axis(lower: float, upper: float, margin: float, dx: float) -> tuple[float, float]:
    """
    (origem, comprimento) de um eixo periódico que envolve [lower, upper] com "margin" de cada lado.

    ### observação:

        - a margem é arredondada para múltiplo de dx e o número de elementos sobe até o próximo tamanho admissível
        - a sobra fica do lado superior
    """
    margin = _multiple(margin, dx)
    count = _admissible_count(int(round((upper - lower + 2.0 * margin) / dx)))
    return lower - margin, count * dx


def _check_dx(name: str, dx: float):
    check_type(f"{name}(...)", "dx", dx, (int, float))
    check_value(f"{name}(...)", "dx", dx, dx > 0)


def tpv3(dx: float=500.0, l2: Optional[float]=None, duration: float=12.0, tau0: float=70.0e6, margins: Optional[tuple[float, float]]=None) -> Scenario:
    """
    problema de referência TPV3: ruptura de 30 km x 15 km em meio homogêneo, nucleação por degrau de tensão num quadrado de 3 km.

    ### parâmetros:

        dx (float): espaçamento (m); 50 m é a resolução de referência e 500 m roda em minutos
        l2 (Optional[float]): largura total da faixa virtual (padrão 4·dx); o modo simétrico malha a metade
        duration (float): duração (s)
        tau0 (float): cisalhamento de fundo (Pa)
        margins (Optional[tuple[float, float]]): margens quiescentes em x1 e x3 (padrão 9 km e 4.5 km, domínio 48 km x 24 km)

    ### uso:

        scenario = tpv3(500.0)
        print(scenario.extents) # (48000.0, 1000.0, 24000.0)
    """
    _check_dx("tpv3", dx)
    l2 = 4.0 * dx if l2 is None else float(l2)
    margins = (9.0 * KM, 4.5 * KM) if margins is None else margins

    origin1, length1 = _periodic_axis(-15.0 * KM, 15.0 * KM, margins[0], dx)
    origin3, length3 = _periodic_axis(-7.5 * KM, 7.5 * KM, margins[1], dx)

    nucleation = NucleationPatch((-1.5 * KM, 1.5 * KM), (-1.5 * KM, 1.5 * KM), "stress_step", 81.6e6)
    fault = FaultSpec(
        "main",
        0.0,
        (-15.0 * KM, 15.0 * KM),
        (-7.5 * KM, 7.5 * KM),
        SlipWeakeningLaw(0.677, 0.525, 0.4),
        Prestress(tau0, 120.0e6),
        [nucleation]
    )
    stations = [
        Station("A", "main", 0.0, 4.5 * KM, "anti-plane direction, 4.5 km from the hypocenter"),
        Station("B", "main", 4.5 * KM, 0.0, "in-plane direction, 4.5 km from the hypocenter"),
        Station("C", "main", 7.5 * KM, 0.0, "in-plane direction, 7.5 km from the hypocenter")
    ]

    return Scenario(
        "tpv3",
        dx,
        (length1, 0.5 * l2, length3),
        (origin1, 0.0, origin3),
        "symmetric",
        [host_rock()],
        [],
        [fault],
        stations,
        duration,
        "station positions follow the SCEC TPV3 layout (A along dip, B and C along strike); tune them in the config."
    )


def _fault_zone(name: str, dx: float, half_width: float, regions_for: Callable[[tuple[float, float, float], tuple[float, float, float]], list[RegionSpec]], stations_x1: tuple[float, float, float], duration: float, tau0: float, margins: Optional[tuple[float, float]], notes: str) -> Scenario:
    """parte comum dos cenários com zona de baixa velocidade (mesmo atrito, tração e nucleação)."""
    margins = (18.0 * KM, 9.0 * KM) if margins is None else margins
    origin1, length1 = _periodic_axis(-30.0 * KM, 30.0 * KM, margins[0], dx)
    origin3, length3 = _periodic_axis(-15.0 * KM, 15.0 * KM, margins[1], dx)

    host = host_rock()
    slow = host.scaled(0.8, "lvz")
    lower = (origin1, 0.0, origin3)
    upper = (origin1 + length1, half_width, origin3 + length3)

    nucleation = NucleationPatch((-1.6 * KM, 1.6 * KM), (-1.6 * KM, 1.6 * KM), "stress_step", 31.0e6)
    fault = FaultSpec(
        "main",
        0.0,
        (-30.0 * KM, 30.0 * KM),
        (-15.0 * KM, 15.0 * KM),
        SlipWeakeningLaw(0.677, 0.564, 0.2),
        Prestress(tau0, 44.0e6),
        [nucleation]
    )
    stations = [Station(label, "main", x1, 0.0) for label, x1 in zip("ABC", stations_x1)]

    return Scenario(name, dx, (length1, half_width, length3), lower, "symmetric", [host, slow], regions_for(lower, upper), [fault], stations, duration, notes)


def lvfz(dx: float=400.0, duration: float=10.0, tau0: float=27.5e6, margins: Optional[tuple[float, float]]=None) -> Scenario:
    """
    falha dentro de uma zona de 1.6 km de espessura com velocidades 20% menores (ruptura se divide em pulso e trinca).

    ### observação:

        - a meia faixa tem 1 km arredondado para cima e pelo menos uma camada de rocha de referência acima da zona,
          assim S⁺ sempre encosta na rocha de referência
        - δ_c = 0.2 é lido em metros
    """
    _check_dx("lvfz", dx)
    zone = 0.8 * KM
    half_width = max(_multiple(1.0 * KM, dx), _multiple(zone, dx) + dx)

    def regions(lower, upper):
        return [RegionSpec(lower, (upper[0], zone, upper[2]), 1)]

    return _fault_zone(
        "lvfz", dx, half_width, regions, (6.0 * KM, 12.0 * KM, 20.0 * KM), duration, tau0, margins,
        "stations along strike at x1 = 6, 12 and 20 km; delta_c read as meters."
    )


def offfault_lvz(dx: float=400.0, duration: float=10.0, tau0: float=27.5e6, margins: Optional[tuple[float, float]]=None) -> Scenario:
    """
    falha na rocha de referência com material 20% mais lento além de 0.8 km do plano (transição para supershear).

    ### observação:

        - S⁺ fica 2·dx além do limite da inclusão, dentro do material lento
    """
    _check_dx("offfault_lvz", dx)
    zone = 0.8 * KM
    half_width = _multiple(zone, dx) + 2.0 * dx

    def regions(lower, upper):
        return [RegionSpec((lower[0], zone, lower[2]), upper, 1)]

    return _fault_zone(
        "offfault_lvz", dx, half_width, regions, (6.0 * KM, 16.0 * KM, 26.0 * KM), duration, tau0, margins,
        "stations along strike at x1 = 6, 16 and 26 km; delta_c read as meters."
    )


def stepover(dx: float=500.0, duration: float=25.0, tau0: Optional[float]=None, distance: float=1.0 * KM, strength: float=1.75, margins: Optional[tuple[float, float]]=None) -> Scenario:
    """
    duas falhas paralelas de 40 km x 10 km com sobreposição de 20 km; a ruptura nucleada na principal pode saltar para a secundária.

    ### parâmetros:

        dx (float): espaçamento (m)
        duration (float): duração (s)
        tau0 (Optional[float]): cisalhamento de fundo (Pa); por padrão derivado da razão "strength"
        distance (float): distância entre as falhas (m), múltiplo de dx
        strength (float): razão de resistência S usada para derivar τ₀
        margins (Optional[tuple[float, float]]): margens quiescentes em x1 e x3 (padrão 15 km e 5 km)

    ### uso:

        scenario = stepover(500.0)
        strength_ratio(scenario.faults[0].law, scenario.faults[0].prestress) # 1.75

    ### observação:

        - τ₀ = σ₀(μ_s + Sμ_k)/(1 + S) ≈ 72.53 MPa; tau0=71.2e6 reproduz o valor impresso (S ≈ 1.99)
        - 1 km superior com fortalecimento (μ_k = 1.0) e travado abaixo de 10 km
        - nucleação por queda de resistência em 20 km da falha principal, por toda a profundidade
    """
    _check_dx("stepover", dx)
    steps = distance / dx
    if distance <= 0 or abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
        raise InvalidScenarioException(parse_message(STEPOVER_NOT_MULTIPLE, DISTANCE=distance, DX=dx))

    mu_s, mu_k, sigma0 = 0.677, 0.373, 150.0e6
    if tau0 is None:
        tau0 = sigma0 * (mu_s + strength * mu_k) / (1.0 + strength)

    margins = (15.0 * KM, 5.0 * KM) if margins is None else margins
    primary_x1 = (-40.0 * KM, 0.0)
    secondary_x1 = (-20.0 * KM, 20.0 * KM)
    depth = (0.0, 10.0 * KM)
    origin1, length1 = _periodic_axis(primary_x1[0], secondary_x1[1], margins[0], dx)
    origin3, length3 = _periodic_axis(depth[0], depth[1], margins[1], dx)

    # faixa de 0.2 km além de cada falha, ao menos uma camada
    outside = max(dx, _multiple(0.2 * KM, dx))
    half_width = 0.5 * distance + outside
    law = SlipWeakeningLaw(mu_s, mu_k, 0.5)
    prestress = Prestress(tau0, sigma0)

    def strengthened(x1_range):
        return [FrictionOverride(x1_range, (depth[0], 1.0 * KM), mu_k=1.0)]

    primary = FaultSpec(
        "primary",
        -0.5 * distance,
        primary_x1,
        depth,
        law,
        prestress,
        [NucleationPatch((-30.0 * KM, -10.0 * KM), depth, "strength_drop")],
        strengthened(primary_x1)
    )
    secondary = FaultSpec("secondary", 0.5 * distance, secondary_x1, depth, law, prestress, (), strengthened(secondary_x1))

    stations = [
        Station("P1", "primary", -5.0 * KM, 5.0 * KM, "primary fault, ahead of the nucleation patch"),
        Station("S1", "secondary", -10.0 * KM, 5.0 * KM, "secondary fault, inside the overlap"),
        Station("S2", "secondary", 0.0, 5.0 * KM, "secondary fault, end of the overlap"),
        Station("S3", "secondary", 10.0 * KM, 5.0 * KM, "secondary fault, beyond the primary tip")
    ]

    return Scenario(
        "stepover",
        dx,
        (length1, 2.0 * half_width, length3),
        (origin1, -half_width, origin3),
        "two_sided",
        [host_rock()],
        [],
        [primary, secondary],
        stations,
        duration,
        "dilational step-over: primary to the left of the overlap at x2 = -distance/2, secondary at +distance/2; x3 is depth."
    )


PRESETS: dict[str, Callable[..., Scenario]] = {
    "tpv3": tpv3,
    "lvfz": lvfz,
    "offfault_lvz": offfault_lvz,
    "stepover": stepover
}


def build_preset(name: str, dx: float, **overrides) -> Scenario:
    """
    constrói um cenário pelo nome com os parâmetros em "overrides" (os mesmos nomes dos argumentos do cenário).

    ### uso:

        build_preset("tpv3", 500.0, duration=4.0)
        build_preset("stepover", 500.0, tau0=71.2e6)

    ### observação:

        - nome desconhecido ou parâmetro que o cenário não aceita: InvalidScenarioException
    """
    check_type("build_preset(...)", "name", name, str)
    if name not in PRESETS:
        raise InvalidScenarioException(parse_message(UNKNOWN_PRESET, NAME=name, PRESETS=", ".join(PRESETS)))

    preset = PRESETS[name]
    accepted = set(inspect.signature(preset).parameters) - {"dx"}
    for key in overrides:
        if key not in accepted:
            raise InvalidScenarioException(parse_message(
                INVALID_SCENARIO,
                SCENARIO=name,
                REASON=f"unknown override {key!r} (accepted: {', '.join(sorted(accepted))})"
            ))

    arguments = {key: tuple(value) if isinstance(value, list) else value for key, value in overrides.items() if value is not None}
    return preset(dx, **arguments)


def strength_ratio(law: SlipWeakeningLaw, prestress: Prestress) -> float:
    """
    S = (μ_s σ₀ − τ₀)/(τ₀ − μ_k σ₀).

    ### uso:

        strength_ratio(SlipWeakeningLaw(0.677, 0.525, 0.4), Prestress(70e6, 120e6)) # 1.6057...
    """
    tau0 = prestress.shear
    return (law.mu_s * prestress.sigma0 - tau0) / (tau0 - law.mu_k * prestress.sigma0)


def cohesive_zone_estimate(scenario: Scenario) -> dict[str, float]:
    """
    estimativa estática da zona coesiva Λ₀ = (9π/32)·μ·δ_c/(τ_s − τ_k) por falha, com μ do material padrão (m).
    """
    mu = scenario.materials[0].shear_modulus
    estimates = {}
    for fault in scenario.faults:
        drop = (fault.law.mu_s - fault.law.mu_k) * fault.prestress.sigma0
        estimates[fault.name] = math.inf if drop <= 0 else 9.0 * math.pi / 32.0 * mu * fault.law.dc / drop
    return estimates


def _fail(scenario: Scenario, reason: str):
    raise InvalidScenarioException(parse_message(INVALID_SCENARIO, SCENARIO=scenario.name, REASON=reason))


def validate_scenario(scenario: Scenario, dt: Optional[float]=None, safety: float=CFL_SAFETY) -> list[str]:
    """
    verifica o cenário sem alocar a malha de elementos finitos e devolve a lista de avisos.

    ### erros:

        - malha não comensurável ou não admissível (InvalidGridException)
        - falha fora de um plano de nós ou da faixa (InvalidFaultException)
        - estação fora da sua falha, estação repetida ou dt acima do limite CFL (InvalidScenarioException)
        - nucleação fora da região da falha (InvalidScenarioException)

    ### avisos:

        - duração·c_p maior que a margem quiescente periódica em x1 ou x3
        - zona coesiva com menos de COHESIVE_ZONE_MIN_ELEMENTS elementos
        - degrau de nucleação que não supera a resistência estática
    """
    check_type("validate_scenario(...)", "scenario", scenario, Scenario)
    grid = build_grid(scenario.extents, scenario.dx, scenario.origin, scenario.materials)
    grid = assign_regions(grid, scenario.regions, scenario.materials)
    warnings = []

    names = [fault.name for fault in scenario.faults]
    if len(set(names)) != len(names):
        _fail(scenario, f"fault names must be unique: {names}")

    for fault in scenario.faults:
        try:
            layer = grid.layer_of(fault.x2)
        except InvalidGridException as error:
            raise InvalidFaultException(parse_message(NOT_NODE_PLANE, X2=fault.x2, COMPLEMENT=f"fault {fault.name}.")) from error
        if scenario.mode == "symmetric" and layer != 0:
            _fail(scenario, f"the symmetric fault {fault.name} must lie on the lower plane x2 = {grid.origin[1]} m")
        if scenario.mode == "two_sided" and not 0 < layer < grid.shape[1]:
            _fail(scenario, f"the fault {fault.name} must lie strictly inside the strip")

        for axis, bounds in ((0, fault.x1_range), (2, fault.x3_range)):
            if bounds[0] < grid.origin[axis] - 1e-6 or bounds[1] > grid.upper[axis] + 1e-6:
                _fail(scenario, f"the rupture region of {fault.name} leaves the strip along x{axis + 1}")

        for patch in fault.nucleation:
            if not (fault.contains(patch.x1_range[0], patch.x3_range[0]) and fault.contains(patch.x1_range[1], patch.x3_range[1])):
                _fail(scenario, f"a nucleation patch of {fault.name} lies outside its rupture region")
            if patch.mechanism == "stress_step" and not patch.value > fault.law.mu_s * fault.prestress.sigma0:
                warnings.append(f"nucleation stress {patch.value:.4g} Pa on {fault.name} does not exceed the static strength {fault.law.mu_s * fault.prestress.sigma0:.4g} Pa.")

    station_names = [station.name for station in scenario.stations]
    if len(set(station_names)) != len(station_names):
        _fail(scenario, f"station names must be unique: {station_names}")
    for station in scenario.stations:
        if station.fault not in names or not scenario.fault(station.fault).contains(station.x1, station.x3):
            raise InvalidScenarioException(parse_message(STATION_OUTSIDE, STATION=station.name, X1=station.x1, X3=station.x3, FAULT=station.fault))

    bound = cfl_timestep(grid, safety)
    if dt is not None and dt > bound * (1.0 + 1e-12):
        raise InvalidScenarioException(parse_message(CFL_VIOLATED, "lower dt or the safety factor.", DT=dt, BOUND=f"{bound:.6g}"))

    # distância entre a região de ruptura e a sua imagem periódica
    cp = max(material.cp for material in grid.element_materials())
    reach = scenario.duration * cp
    for axis, key in ((0, "x1_range"), (2, "x3_range")):
        lower = min(getattr(fault, key)[0] for fault in scenario.faults)
        upper = max(getattr(fault, key)[1] for fault in scenario.faults)
        margin = scenario.extents[axis] - (upper - lower)
        if reach > margin:
            warnings.append(parse_message(WRAP_AROUND, DISTANCE=f"{reach:.4g}", MARGIN=f"{margin:.4g}", AXIS=axis + 1))

    for fault, zone in cohesive_zone_estimate(scenario).items():
        count = zone / scenario.dx
        if count < COHESIVE_ZONE_MIN_ELEMENTS:
            warnings.append(parse_message(UNDER_RESOLVED, FAULT=fault, ZONE=f"{zone:.4g}", COUNT=f"{count:.2f}"))

    for warning in warnings:
        logger.warning("%s: %s", scenario.name, warning)
    logger.debug("scenario %s validated: grid %s, dt bound %.4g s", scenario.name, grid.shape, bound)
    return warnings
