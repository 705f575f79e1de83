import inspect
import logging
from typing import Literal, Optional

from ..models.scenario import Scenario, Station
from ..models.grid import build_grid, assign_regions
from .fem import cfl_timestep
from .kernels import KernelProvider, HalfSpaceKernels, SyntheticKernels
from .scenarios import PRESETS, build_preset, validate_scenario
from .env_handler import EnvHandler
from .utils import Path, parse_message, check_type, validate_json, load_json, dump_json
from .messeger import (
    CFL_SAFETY,
    T_MAX,
    RUPTURE_THRESHOLD,
    INVALID_CONFIG,
    _CONFIG_SCHEME_JSON
)
from ..exceptions import InvalidConfigException

logger = logging.getLogger(__name__)

__all__ = ["RunConfig"]


class RunConfig:
    """
    configuração de uma execução: cenário (preset + sobrescritas ou explícito), política de dt, saídas, núcleos e threads.

    ### parâmetros:

        scenario (dict): {"preset": nome, "dx": dx, "overrides": {...}} ou {"explicit": cenário serializado}
        time_step (Optional[dict]): {"policy": "cfl", "safety": 0.4} ou {"policy": "fixed", "dt": ...}
        duration (Optional[float]): sobrescreve a duração do cenário (s)
        l2 (Optional[float]): largura total da faixa virtual (m), para presets que a aceitam
        output (Optional[dict]): {"directory", "snapshot_every", "strip_snapshots", "vtk"}
        stations (Sequence[dict]): estações que substituem as do cenário quando não vazio
        kernels (Optional[dict]): {"provider": "halfspace"|"synthetic", "t_max": ...}
        threads (int): threads pedidas (limitadas por HYBRIDRUPTURE_THREADS)
        deterministic (bool): ordem fixa de redução (execuções repetidas idênticas bit a bit)
        rupture_threshold (float): limiar de |δ̇| do mapa de ruptura (m/s)

    ### métodos:

        @classmethod
        def from_dict(cls, data: dict) -> RunConfig: valida com jsonschema e cria a configuração

        @classmethod
        def load(cls, path: Path) -> RunConfig: lê um arquivo JSON

        def to_dict(self) -> dict: forma canônica (todos os campos preenchidos)

        def save(self, path: Path) -> Path: grava a forma canônica

        def resolve_scenario(self) -> Scenario: cenário final, com duração, L2 e estações aplicadas

        def timestep(self, scenario: Scenario) -> float: dt pela política configurada

        def validate(self) -> list[str]: todas as verificações antes de alocar qualquer campo, devolvendo os avisos

    ### uso:

        config = RunConfig({"preset": "tpv3", "dx": 500.0}, duration=2.0)
        config.save(Path("tpv3.json"))

        RunConfig.load(Path("tpv3.json")).to_dict() == config.to_dict() # True
    """

    __slots__ = ["scenario", "time_step", "duration", "l2", "output", "stations", "kernels", "threads", "deterministic", "rupture_threshold"]

    def __init__(self, scenario: dict, time_step: Optional[dict]=None, duration: Optional[float]=None, l2: Optional[float]=None, output: Optional[dict]=None, stations: list[dict]=(), kernels: Optional[dict]=None, threads: int=1, deterministic: bool=True, rupture_threshold: float=RUPTURE_THRESHOLD):
        check_type("RunConfig(...)", "scenario", scenario, dict)
        check_type("RunConfig(...)", "threads", threads, int)
        check_type("RunConfig(...)", "deterministic", deterministic, bool)

        self.scenario = dict(scenario)
        self.time_step = {"policy": "cfl", "safety": CFL_SAFETY, **(time_step or {})}
        self.duration = None if duration is None else float(duration)
        self.l2 = None if l2 is None else float(l2)
        self.output = {"directory": None, "snapshot_every": None, "strip_snapshots": False, "vtk": False, **(output or {})}
        self.stations = [dict(station) for station in stations]
        self.kernels = {"provider": "halfspace", "t_max": T_MAX, **(kernels or {})}
        self.threads = threads
        self.deterministic = deterministic
        self.rupture_threshold = float(rupture_threshold)

        validate_json(self.to_dict(), _CONFIG_SCHEME_JSON, "RunConfig")
        if self.time_step["policy"] == "fixed" and self.time_step.get("dt") is None:
            raise InvalidConfigException(parse_message(INVALID_CONFIG, PATH="RunConfig", REASON='time_step "fixed" needs a dt'))


    @classmethod
    def from_dict(cls, data: dict, source: str="<memory>") -> "RunConfig":
        validate_json(data, _CONFIG_SCHEME_JSON, source)
        return cls(**data)


    @classmethod
    def load(cls, path: Path) -> "RunConfig":
        """lê e valida uma configuração JSON (InvalidConfigException para JSON ou campos inválidos)."""
        config = cls.from_dict(load_json(path, _CONFIG_SCHEME_JSON), str(path))
        logger.info("config loaded from %s", path)
        return config


    @classmethod
    def from_preset(cls, name: str, dx: float, **options) -> "RunConfig":
        return cls({"preset": name, "dx": float(dx)}, **options)


    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "time_step": dict(self.time_step),
            "duration": self.duration,
            "l2": self.l2,
            "output": dict(self.output),
            "stations": [dict(station) for station in self.stations],
            "kernels": dict(self.kernels),
            "threads": self.threads,
            "deterministic": self.deterministic,
            "rupture_threshold": self.rupture_threshold
        }


    def save(self, path: Path) -> Path:
        dump_json(self.to_dict(), path, _CONFIG_SCHEME_JSON)
        logger.info("config written to %s", path)
        return path


    @property
    def kind(self) -> Literal["preset", "explicit"]:
        return "explicit" if "explicit" in self.scenario else "preset"


    def resolve_scenario(self) -> Scenario:
        """
        monta o cenário: preset com sobrescritas (e L2) ou cenário explícito, depois duração e estações da configuração.

        ### observação:

            - l2 num cenário explícito ou num preset que não o aceita gera InvalidConfigException
        """
        if self.kind == "explicit":
            if self.l2 is not None:
                raise InvalidConfigException(parse_message(INVALID_CONFIG, PATH="RunConfig", REASON="l2 applies to presets only"))
            scenario = Scenario.from_dict(self.scenario["explicit"])
        else:
            overrides = dict(self.scenario.get("overrides", {}))
            if self.l2 is not None:
                if "l2" not in inspect.signature(PRESETS[self.scenario["preset"]]).parameters:
                    raise InvalidConfigException(parse_message(INVALID_CONFIG, PATH="RunConfig", REASON=f"the preset {self.scenario['preset']} has a fixed strip width"))
                overrides["l2"] = self.l2
            scenario = build_preset(self.scenario["preset"], self.scenario["dx"], **overrides)

        changes = {}
        if self.duration is not None:
            changes["duration"] = self.duration
        if self.stations:
            changes["stations"] = [Station.from_dict(station) for station in self.stations]
        return scenario.with_changes(**changes) if changes else scenario


    def timestep(self, scenario: Scenario) -> float:
        """dt = safety·dx/max(c_p) na política "cfl", ou o dt fixo."""
        if self.time_step["policy"] == "fixed":
            return float(self.time_step["dt"])
        grid = assign_regions(build_grid(scenario.extents, scenario.dx, scenario.origin, scenario.materials), scenario.regions, scenario.materials)
        return cfl_timestep(grid, self.time_step.get("safety", CFL_SAFETY))


    def effective_threads(self, env: Optional[EnvHandler]=None) -> int:
        """min(threads, HYBRIDRUPTURE_THREADS)."""
        env = env or EnvHandler.unique()
        return max(1, min(self.threads, env.threads))


    def output_directory(self, scenario: Scenario, env: Optional[EnvHandler]=None) -> Path:
        """diretório configurado ou HYBRIDRUPTURE_OUTPUT/<cenário>."""
        if self.output.get("directory"):
            return Path(self.output["directory"])
        env = env or EnvHandler.unique()
        return env.output_root.join(scenario.name)


    def kernel_provider(self) -> KernelProvider:
        if self.kernels["provider"] == "synthetic":
            return SyntheticKernels()
        return HalfSpaceKernels(self.kernels["t_max"])


    def validate(self) -> list[str]:
        """resolve o cenário e roda validate_scenario com o dt da política."""
        scenario = self.resolve_scenario()
        dt = self.time_step.get("dt") if self.time_step["policy"] == "fixed" else None
        return validate_scenario(scenario, dt, self.time_step.get("safety", CFL_SAFETY))


    def __eq__(self, other: object) -> bool:
        return isinstance(other, RunConfig) and self.to_dict() == other.to_dict()


    def __repr__(self) -> str:
        label = self.scenario.get("preset") or self.scenario.get("explicit", {}).get("name")
        return f"<RunConfig: {label} threads={self.threads} dt={self.time_step['policy']}>"
