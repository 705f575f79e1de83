from typing import Optional, Sequence, Literal

from .materials import ElasticMaterial, RegionSpec
from .friction import SlipWeakeningLaw, Prestress, NucleationPatch, FrictionOverride
from ..core.utils import check_type, check_value, validate_json
from ..core.messeger import _SCENARIO_SCHEME_JSON

_MODES = ("symmetric", "two_sided")


class FaultSpec:
    """
    descrição de uma falha plana no plano x2 = constante.

    ### parâmetros:

        name (str): identificador usado pelas estações e saídas
        x2 (float): posição do plano da falha (m), precisa cair sobre um plano de nós
        x1_range, x3_range (tuple[float, float]): região onde a ruptura é permitida (m)
        law (SlipWeakeningLaw): lei de atrito
        prestress (Prestress): tração inicial
        nucleation (Sequence[NucleationPatch]): retângulos de nucleação
        overrides (Sequence[FrictionOverride]): retângulos com atrito modificado (aplicados em ordem)
    """

    __slots__ = ["name", "x2", "x1_range", "x3_range", "law", "prestress", "nucleation", "overrides"]

    def __init__(self, name: str, x2: float, x1_range: tuple[float, float], x3_range: tuple[float, float], law: SlipWeakeningLaw, prestress: Prestress, nucleation: Sequence[NucleationPatch]=(), overrides: Sequence[FrictionOverride]=()):
        check_type("FaultSpec(...)", "name", name, str)
        check_type("FaultSpec(...)", "x2", x2, (int, float))
        check_type("FaultSpec(...)", "law", law, SlipWeakeningLaw)
        check_type("FaultSpec(...)", "prestress", prestress, Prestress)
        for parameter, value in (("x1_range", x1_range), ("x3_range", x3_range)):
            check_type("FaultSpec(...)", parameter, value, (tuple, list))
            check_value("FaultSpec(...)", parameter, value, len(value) == 2 and value[0] < value[1])

        self.name = name
        self.x2 = float(x2)
        self.x1_range = (float(x1_range[0]), float(x1_range[1]))
        self.x3_range = (float(x3_range[0]), float(x3_range[1]))
        self.law = law
        self.prestress = prestress
        self.nucleation = tuple(nucleation)
        self.overrides = tuple(overrides)


    def contains(self, x1: float, x3: float, tolerance: float=1e-6) -> bool:
        return (self.x1_range[0] - tolerance <= x1 <= self.x1_range[1] + tolerance
                and self.x3_range[0] - tolerance <= x3 <= self.x3_range[1] + tolerance)


    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "x2": self.x2,
            "x1_range": list(self.x1_range),
            "x3_range": list(self.x3_range),
            "law": self.law.to_dict(),
            "prestress": self.prestress.to_dict(),
            "nucleation": [patch.to_dict() for patch in self.nucleation],
            "overrides": [override.to_dict() for override in self.overrides]
        }


    @classmethod
    def from_dict(cls, data: dict) -> "FaultSpec":
        return cls(
            data["name"],
            data["x2"],
            tuple(data["x1_range"]),
            tuple(data["x3_range"]),
            SlipWeakeningLaw.from_dict(data["law"]),
            Prestress.from_dict(data["prestress"]),
            [NucleationPatch.from_dict(patch) for patch in data.get("nucleation", [])],
            [FrictionOverride.from_dict(override) for override in data.get("overrides", [])]
        )


    def __repr__(self) -> str:
        return f"<FaultSpec {self.name}: x2={self.x2} x1={self.x1_range} x3={self.x3_range}>"


class Station:
    """estação de registro sobre uma falha, nas coordenadas (x1, x3) (m)."""

    __slots__ = ["name", "fault", "x1", "x3", "note"]

    def __init__(self, name: str, fault: str, x1: float, x3: float, note: Optional[str]=None):
        check_type("Station(...)", "name", name, str)
        check_type("Station(...)", "fault", fault, str)
        check_type("Station(...)", "x1", x1, (int, float))
        check_type("Station(...)", "x3", x3, (int, float))
        check_type("Station(...)", "note", note, str, optional=True)

        self.name = name
        self.fault = fault
        self.x1 = float(x1)
        self.x3 = float(x3)
        self.note = note


    def to_dict(self) -> dict:
        data = {"name": self.name, "fault": self.fault, "x1": self.x1, "x3": self.x3}
        if self.note:
            data["note"] = self.note
        return data


    @classmethod
    def from_dict(cls, data: dict) -> "Station":
        return cls(data["name"], data["fault"], data["x1"], data["x3"], data.get("note"))


    def __repr__(self) -> str:
        return f"<Station {self.name}: {self.fault} ({self.x1}, {self.x3})>"


class Scenario:
    """
    configuração completa de um experimento: faixa de elementos finitos, materiais, falhas, estações e duração.

    ### parâmetros:

        name (str): nome do cenário
        dx (float): espaçamento da malha (m)
        extents (tuple[float, float, float]): dimensões da faixa (m)
        origin (tuple[float, float, float]): canto inferior da faixa (m)
        mode (Literal["symmetric", "two_sided"]): "symmetric" modela só o lado + (falha em S⁻, uma fronteira SBI);
            "two_sided" modela a faixa inteira com duas fronteiras SBI
        materials (Sequence[ElasticMaterial]): materiais (índice 0 é o padrão)
        regions (Sequence[RegionSpec]): caixas de material
        faults (Sequence[FaultSpec]): falhas
        stations (Sequence[Station]): estações de registro
        duration (float): duração simulada (s)
        notes (Optional[str]): procedência de valores escolhidos (ex.: posição das estações)

    ### uso:

        scenario = tpv3(500.0)
        data = scenario.to_dict()

        Scenario.from_dict(data).to_dict() == data # True
    """

    __slots__ = ["name", "dx", "extents", "origin", "mode", "materials", "regions", "faults", "stations", "duration", "notes"]

    def __init__(self, name: str, dx: float, extents: tuple[float, float, float], origin: tuple[float, float, float], mode: Literal["symmetric", "two_sided"], materials: Sequence[ElasticMaterial], regions: Sequence[RegionSpec], faults: Sequence[FaultSpec], stations: Sequence[Station], duration: float, notes: Optional[str]=None):
        check_type("Scenario(...)", "name", name, str)
        check_type("Scenario(...)", "dx", dx, (int, float))
        check_value("Scenario(...)", "mode", mode, mode in _MODES, f"use: {', '.join(_MODES)}.")
        check_value("Scenario(...)", "duration", duration, duration > 0)
        check_value("Scenario(...)", "materials", materials, len(materials) >= 1)
        check_value("Scenario(...)", "faults", faults, len(faults) >= 1)

        self.name = name
        self.dx = float(dx)
        self.extents = tuple(float(e) for e in extents)
        self.origin = tuple(float(o) for o in origin)
        self.mode = mode
        self.materials = tuple(materials)
        self.regions = tuple(regions)
        self.faults = tuple(faults)
        self.stations = tuple(stations)
        self.duration = float(duration)
        self.notes = notes


    @property
    def homogeneous(self) -> bool:
        used = {0} | {region.material for region in self.regions}
        return len({(self.materials[m].density, self.materials[m].shear_modulus, self.materials[m].lame_lambda) for m in used}) == 1


    def fault(self, name: str) -> FaultSpec:
        for fault in self.faults:
            if fault.name == name:
                return fault
        raise KeyError(name)


    def to_dict(self) -> dict:
        data = {
            "name": self.name,
            "dx": self.dx,
            "extents": list(self.extents),
            "origin": list(self.origin),
            "mode": self.mode,
            "materials": [material.to_dict() for material in self.materials],
            "regions": [region.to_dict() for region in self.regions],
            "faults": [fault.to_dict() for fault in self.faults],
            "stations": [station.to_dict() for station in self.stations],
            "duration": self.duration
        }
        if self.notes:
            data["notes"] = self.notes
        return data


    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        validate_json(data, _SCENARIO_SCHEME_JSON, "scenario")
        return cls(
            data["name"],
            data["dx"],
            tuple(data["extents"]),
            tuple(data["origin"]),
            data["mode"],
            [ElasticMaterial.from_dict(material) for material in data["materials"]],
            [RegionSpec.from_dict(region) for region in data["regions"]],
            [FaultSpec.from_dict(fault) for fault in data["faults"]],
            [Station.from_dict(station) for station in data["stations"]],
            data["duration"],
            data.get("notes")
        )


    def with_changes(self, **changes) -> "Scenario":
        """cópia com alguns campos trocados (cenários são tratados como imutáveis)."""
        fields = {name: getattr(self, name) for name in self.__slots__}
        fields.update(changes)
        return Scenario(**fields)


    def __repr__(self) -> str:
        return f"<Scenario {self.name}: dx={self.dx:g} mode={self.mode} faults={len(self.faults)}>"
