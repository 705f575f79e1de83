from typing import Optional, Literal

from ..core.utils import parse_message, check_type, check_value
from ..core.messeger import INVALID_SCENARIO
from ..exceptions import InvalidFaultException

_MECHANISMS = ("stress_step", "strength_drop")


def _range(method: str, parameter: str, value) -> tuple[float, float]:
    check_type(method, parameter, value, (tuple, list))
    check_value(method, parameter, value, len(value) == 2 and value[0] <= value[1], "expected (lower, upper) with lower <= upper.")
    return float(value[0]), float(value[1])


class SlipWeakeningLaw:
    """
    lei de atrito com enfraquecimento linear por deslizamento.

    ### parâmetros:

        mu_s (float): coeficiente estático
        mu_k (float): coeficiente dinâmico
        dc (float): distância crítica (m)

    ### uso:

        law = SlipWeakeningLaw(0.677, 0.525, 0.4)
        print(law.coefficient(0.2)) # 0.601

    ### observação:

        - μ_s >= μ_k > 0 e dc > 0, caso contrário InvalidFaultException
    """

    __slots__ = ["mu_s", "mu_k", "dc"]

    def __init__(self, mu_s: float, mu_k: float, dc: float):
        for parameter, value in (("mu_s", mu_s), ("mu_k", mu_k), ("dc", dc)):
            check_type("SlipWeakeningLaw(...)", parameter, value, (int, float))

        if not (mu_s >= mu_k > 0 and dc > 0):
            raise InvalidFaultException(parse_message(
                INVALID_SCENARIO,
                SCENARIO="friction law",
                REASON=f"expected mu_s >= mu_k > 0 and dc > 0, got mu_s={mu_s}, mu_k={mu_k}, dc={dc}"
            ))

        self.mu_s = float(mu_s)
        self.mu_k = float(mu_k)
        self.dc = float(dc)


    def coefficient(self, slip):
        from ..core.fault import friction_coefficient
        return friction_coefficient(self, slip)


    def to_dict(self) -> dict:
        return {"mu_s": self.mu_s, "mu_k": self.mu_k, "dc": self.dc}


    @classmethod
    def from_dict(cls, data: dict) -> "SlipWeakeningLaw":
        return cls(data["mu_s"], data["mu_k"], data["dc"])


    def __eq__(self, other: object) -> bool:
        return isinstance(other, SlipWeakeningLaw) and self.to_dict() == other.to_dict()


    def __repr__(self) -> str:
        return f"<SlipWeakeningLaw: mu_s={self.mu_s} mu_k={self.mu_k} dc={self.dc}>"


class NucleationPatch:
    """
    retângulo (x1, x3) onde a ruptura é forçada a partir de "onset".

    ### parâmetros:

        x1_range, x3_range (tuple[float, float]): limites do retângulo (m)
        mechanism (Literal["stress_step", "strength_drop"]): eleva a tensão de cisalhamento para "value" ou reduz μ_s para μ_k
        value (Optional[float]): tensão de cisalhamento imposta (Pa), só para "stress_step"
        onset (float): instante de ativação (s)
    """

    __slots__ = ["x1_range", "x3_range", "mechanism", "value", "onset"]

    def __init__(self, x1_range: tuple[float, float], x3_range: tuple[float, float], mechanism: Literal["stress_step", "strength_drop"], value: Optional[float]=None, onset: float=0.0):
        self.x1_range = _range("NucleationPatch(...)", "x1_range", x1_range)
        self.x3_range = _range("NucleationPatch(...)", "x3_range", x3_range)
        check_value("NucleationPatch(...)", "mechanism", mechanism, mechanism in _MECHANISMS, f"use: {', '.join(_MECHANISMS)}.")
        check_value("NucleationPatch(...)", "value", value, mechanism != "stress_step" or value is not None, "stress_step needs a value.")
        check_value("NucleationPatch(...)", "onset", onset, onset >= 0)

        self.mechanism = mechanism
        self.value = None if value is None else float(value)
        self.onset = float(onset)


    def to_dict(self) -> dict:
        return {
            "x1_range": list(self.x1_range),
            "x3_range": list(self.x3_range),
            "mechanism": self.mechanism,
            "value": self.value,
            "onset": self.onset
        }


    @classmethod
    def from_dict(cls, data: dict) -> "NucleationPatch":
        return cls(tuple(data["x1_range"]), tuple(data["x3_range"]), data["mechanism"], data.get("value"), data.get("onset", 0.0))


    def __repr__(self) -> str:
        return f"<NucleationPatch: {self.mechanism} x1={self.x1_range} x3={self.x3_range} onset={self.onset}>"


class FrictionOverride:
    """
    retângulo (x1, x3) com atrito modificado: μ_k próprio (ex.: fortalecimento, μ_k > μ_s) e/ou travado (τ^s = ∞).
    """

    __slots__ = ["x1_range", "x3_range", "mu_k", "locked"]

    def __init__(self, x1_range: tuple[float, float], x3_range: tuple[float, float], mu_k: Optional[float]=None, locked: bool=False):
        self.x1_range = _range("FrictionOverride(...)", "x1_range", x1_range)
        self.x3_range = _range("FrictionOverride(...)", "x3_range", x3_range)
        check_type("FrictionOverride(...)", "mu_k", mu_k, (int, float), optional=True)
        check_type("FrictionOverride(...)", "locked", locked, bool)

        self.mu_k = None if mu_k is None else float(mu_k)
        self.locked = locked


    def to_dict(self) -> dict:
        return {"x1_range": list(self.x1_range), "x3_range": list(self.x3_range), "mu_k": self.mu_k, "locked": self.locked}


    @classmethod
    def from_dict(cls, data: dict) -> "FrictionOverride":
        return cls(tuple(data["x1_range"]), tuple(data["x3_range"]), data.get("mu_k"), data.get("locked", False))


    def __repr__(self) -> str:
        return f"<FrictionOverride: x1={self.x1_range} x3={self.x3_range} mu_k={self.mu_k} locked={self.locked}>"


class Prestress:
    """
    tração inicial da falha: cisalhamento de fundo τ₀ = (τ₀₁, τ₀₃) (Pa) e tensão normal compressiva σ₀ > 0 (Pa).
    """

    __slots__ = ["tau0", "sigma0"]

    def __init__(self, tau0: tuple[float, float]|float, sigma0: float):
        if isinstance(tau0, (int, float)) and not isinstance(tau0, bool):
            tau0 = (tau0, 0.0)
        check_type("Prestress(...)", "tau0", tau0, (tuple, list))
        check_type("Prestress(...)", "sigma0", sigma0, (int, float))
        check_value("Prestress(...)", "tau0", tau0, len(tau0) == 2)
        if not sigma0 > 0:
            raise InvalidFaultException(parse_message(INVALID_SCENARIO, SCENARIO="prestress", REASON=f"sigma0 must be positive, got {sigma0}"))

        self.tau0 = (float(tau0[0]), float(tau0[1]))
        self.sigma0 = float(sigma0)


    @property
    def shear(self) -> float:
        return float((self.tau0[0] ** 2 + self.tau0[1] ** 2) ** 0.5)


    def to_dict(self) -> dict:
        return {"tau0": list(self.tau0), "sigma0": self.sigma0}


    @classmethod
    def from_dict(cls, data: dict) -> "Prestress":
        return cls(tuple(data["tau0"]), data["sigma0"])


    def __repr__(self) -> str:
        return f"<Prestress: tau0={self.tau0} sigma0={self.sigma0}>"
