import math
from typing import Optional

from ..core.utils import parse_message, check_type
from ..core.messeger import INVALID_MATERIAL
from ..exceptions import InvalidMaterialException


class ElasticMaterial:
    """
    material elástico linear isotrópico.

    ### parâmetros:

        density (float): densidade ρ (kg/m³)
        shear_modulus (float): módulo de cisalhamento μ (Pa)
        lame_lambda (float): primeiro parâmetro de Lamé λ (Pa)
        name (Optional[str]): rótulo usado em logs e configurações

    ### uso:

        host = ElasticMaterial.from_wavespeeds(2670.0, 6000.0, 3464.0)

        print(host.shear_modulus) # ~3.204e10
        print(host.cs, host.cp) # 3464.0 6000.0

    ### observação:

        - ρ > 0, μ > 0, λ + 2μ/3 > 0 e c_p > c_s, caso contrário InvalidMaterialException
    """

    __slots__ = ["density", "shear_modulus", "lame_lambda", "name", "_speeds"]

    def __init__(self, density: float, shear_modulus: float, lame_lambda: float, name: Optional[str]=None):
        for parameter, value in (("density", density), ("shear_modulus", shear_modulus), ("lame_lambda", lame_lambda)):
            check_type("ElasticMaterial(...)", parameter, value, (int, float))
        check_type("ElasticMaterial(...)", "name", name, str, optional=True)

        self.density = float(density)
        self.shear_modulus = float(shear_modulus)
        self.lame_lambda = float(lame_lambda)
        self.name = name
        self._speeds = None

        self._validate()


    @classmethod
    def from_wavespeeds(cls, density: float, cp: float, cs: float, name: Optional[str]=None) -> "ElasticMaterial":
        """cria o material a partir de (ρ, c_p, c_s): μ = ρc_s², λ = ρc_p² − 2μ."""
        check_type("ElasticMaterial.from_wavespeeds(...)", "cp", cp, (int, float))
        check_type("ElasticMaterial.from_wavespeeds(...)", "cs", cs, (int, float))
        mu = density * cs ** 2
        material = cls(density, mu, density * cp ** 2 - 2.0 * mu, name)
        # velocidades informadas são mantidas exatas para a serialização
        material._speeds = (float(cp), float(cs))
        return material


    def _validate(self):
        if not self.density > 0:
            reason = "density must be positive"
        elif not self.shear_modulus > 0:
            reason = "shear modulus must be positive"
        elif not self.bulk_modulus > 0:
            reason = "bulk modulus lambda + 2 mu / 3 must be positive"
        elif not self.cp > self.cs:
            reason = "c_p must exceed c_s"
        else:
            return
        raise InvalidMaterialException(parse_message(INVALID_MATERIAL, REASON=reason, MATERIAL=repr(self)))


    @property
    def cs(self) -> float:
        if self._speeds is not None:
            return self._speeds[1]
        return math.sqrt(self.shear_modulus / self.density)


    @property
    def cp(self) -> float:
        if self._speeds is not None:
            return self._speeds[0]
        return math.sqrt((self.lame_lambda + 2.0 * self.shear_modulus) / self.density)


    @property
    def bulk_modulus(self) -> float:
        return self.lame_lambda + 2.0 * self.shear_modulus / 3.0


    @property
    def poisson_ratio(self) -> float:
        return self.lame_lambda / (2.0 * (self.lame_lambda + self.shear_modulus))


    def scaled(self, factor: float, name: Optional[str]=None) -> "ElasticMaterial":
        """mesma densidade, velocidades multiplicadas por "factor" (módulos por factor²)."""
        return ElasticMaterial.from_wavespeeds(self.density, self.cp * factor, self.cs * factor, name)


    def to_dict(self) -> dict:
        data = {"density": self.density, "cp": self.cp, "cs": self.cs}
        if self.name:
            data["name"] = self.name
        return data


    @classmethod
    def from_dict(cls, data: dict) -> "ElasticMaterial":
        return cls.from_wavespeeds(data["density"], data["cp"], data["cs"], data.get("name"))


    def __eq__(self, other: object) -> bool:
        return isinstance(other, ElasticMaterial) and (self.density, self.shear_modulus, self.lame_lambda) == (other.density, other.shear_modulus, other.lame_lambda)


    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"<ElasticMaterial{label}: rho={self.density:g} mu={self.shear_modulus:.6g} lambda={self.lame_lambda:.6g}>"


def derive_wavespeeds(material: ElasticMaterial) -> tuple[float, float]:
    """retorna (c_p, c_s) do material."""
    check_type("derive_wavespeeds(...)", "material", material, ElasticMaterial)
    return material.cp, material.cs


class RegionSpec:
    """
    caixa alinhada aos eixos que atribui um material aos elementos cujo centróide está dentro dela.

    ### parâmetros:

        lower (tuple[float, float, float]): canto inferior (m)
        upper (tuple[float, float, float]): canto superior (m)
        material (int): índice do material

    ### observação:

        - a lista de regiões é ordenada: regiões posteriores sobrescrevem as anteriores
    """

    __slots__ = ["lower", "upper", "material"]

    def __init__(self, lower: tuple[float, float, float], upper: tuple[float, float, float], material: int):
        check_type("RegionSpec(...)", "lower", lower, (tuple, list))
        check_type("RegionSpec(...)", "upper", upper, (tuple, list))
        check_type("RegionSpec(...)", "material", material, int)

        self.lower = tuple(float(v) for v in lower)
        self.upper = tuple(float(v) for v in upper)
        self.material = material


    def to_dict(self) -> dict:
        return {"lower": list(self.lower), "upper": list(self.upper), "material": self.material}


    @classmethod
    def from_dict(cls, data: dict) -> "RegionSpec":
        return cls(tuple(data["lower"]), tuple(data["upper"]), int(data["material"]))


    def __repr__(self) -> str:
        return f"<RegionSpec: {self.lower} - {self.upper} -> {self.material}>"
