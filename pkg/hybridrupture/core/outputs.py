"""
agrupa os registros e gravadores de resultados: séries das estações, mapas de tempo de ruptura, snapshots e manifesto.
"""

import asyncio
import logging
import importlib.metadata
from typing import Optional, Mapping, Sequence

import numpy as np

from ..models.scenario import Station, Scenario
from ..models.grid import StructuredGrid
from .fault import FaultSurface
from .utils import Path, parse_message, dump_json, load_json
from .messeger import (
    RUPTURE_THRESHOLD,
    SNAPSHOT_QUEUE_SIZE,
    STATION_OUTSIDE,
    WRITE_FAILED,
    BACK_PRESSURE,
    _MANIFEST_SCHEME_JSON
)
from ..exceptions import InvalidScenarioException, OutputWriteException

try:
    import vtk
    from vtk.util import numpy_support
    HAS_VTK = True
except ImportError:
    HAS_VTK = False

logger = logging.getLogger(__name__)

STATION_COLUMNS = ("t", "slip1", "slip3", "rate1", "rate3", "tau1", "tau3", "sigma_n")

__all__ = [
    "HAS_VTK",
    "STATION_COLUMNS",
    "StationRecorder",
    "RunResult",
    "RuptureTimeMap",
    "Snapshot",
    "SnapshotWriter",
    "rupture_speed",
    "supershear_fraction",
    "read_station_series",
    "relative_rms",
    "write_binary_snapshot",
    "read_binary_snapshot",
    "write_vti",
    "save_fault_fields",
    "grid_summary",
    "package_versions",
    "build_manifest",
    "write_manifest",
    "read_manifest",
]


def _write_guard(path: Path, action):
    try:
        return action()
    except OSError as error:
        raise OutputWriteException(parse_message(WRITE_FAILED, PATH=str(path), REASON=str(error))) from error


class StationRecorder:
    """
    registra, a cada passo, o estado do nó de falha mais próximo de cada estação.

    ### parâmetros:

        stations (Sequence[Station]): estações do cenário
        faults (Mapping[str, FaultSurface]): superfícies de falha por nome

    ### uso:

        recorder = StationRecorder(scenario.stations, {fault.name: fault for fault in faults})

        recorder.record(state.time)
        recorder.save(Path("outputs", "tpv3", "stations")) # um CSV por estação

    ### observação:

        - colunas: t, slip1, slip3, rate1, rate3, tau1, tau3, sigma_n (SI); tau é a tração total τ₀ + Δτ
    """

    __slots__ = ["stations", "_targets", "_rows"]

    def __init__(self, stations: Sequence[Station], faults: Mapping[str, FaultSurface]):
        self.stations = tuple(stations)
        self._targets: list[tuple[FaultSurface, int]] = []
        for station in self.stations:
            fault = faults.get(station.fault)
            if fault is None:
                raise InvalidScenarioException(parse_message(STATION_OUTSIDE, STATION=station.name, X1=station.x1, X3=station.x3, FAULT=station.fault))
            self._targets.append((fault, fault.nearest(station.x1, station.x3, station.name)))
        self._rows: list[list[np.ndarray]] = [[] for _ in self.stations]


    def record(self, time: float):
        for rows, (fault, node) in zip(self._rows, self._targets):
            rows.append(np.concatenate((
                [time],
                fault.slip[node],
                fault.slip_rate[node],
                fault.traction[node],
                [fault.sigma_n[node]]
            )))


    def series(self, name: str) -> np.ndarray:
        """série (n_amostras, 8) da estação "name"."""
        for station, rows in zip(self.stations, self._rows):
            if station.name == name:
                return np.array(rows).reshape(-1, len(STATION_COLUMNS))
        raise KeyError(name)


    def save(self, directory: Path) -> list[Path]:
        directory.mkdir(exists_ok=True)
        paths = []
        for station in self.stations:
            path = directory.join(f"{station.name}.csv")
            data = self.series(station.name)
            _write_guard(path, lambda: np.savetxt(str(path), data, delimiter=",", header=",".join(STATION_COLUMNS), comments=""))
            paths.append(path)
        return paths


    def __repr__(self) -> str:
        return f"<StationRecorder: {len(self.stations)} stations>"


def read_station_series(path: Path) -> np.ndarray:
    return np.loadtxt(str(path), delimiter=",", skiprows=1, ndmin=2)


class RuptureTimeMap:
    """
    primeiro instante em que |δ̇| passa do limiar em cada nó da falha (NaN onde a ruptura não chegou).

    ### uso:

        rupture = RuptureTimeMap.from_fault(fault, threshold=1e-3)

        rupture.update(fault, state.time)
        rupture.save(Path("outputs", "tpv3", "rupture_main.npz"))

    ### observação:

        - cada nó é marcado uma única vez; limiares maiores nunca produzem tempos menores
    """

    __slots__ = ["name", "x1", "x3", "threshold", "times"]

    def __init__(self, name: str, x1: np.ndarray, x3: np.ndarray, threshold: float=RUPTURE_THRESHOLD, times: Optional[np.ndarray]=None):
        self.name = name
        self.x1 = np.asarray(x1, dtype=float)
        self.x3 = np.asarray(x3, dtype=float)
        self.threshold = float(threshold)
        self.times = np.full((self.x1.size, self.x3.size), np.nan) if times is None else np.asarray(times, dtype=float)


    @classmethod
    def from_fault(cls, fault: FaultSurface, threshold: float=RUPTURE_THRESHOLD) -> "RuptureTimeMap":
        return cls(fault.name, fault.x1, fault.x3, threshold)


    def update(self, fault: FaultSurface, time: float):
        rate = fault.slip_rate_magnitude().reshape(self.times.shape)
        new = np.isnan(self.times) & (rate > self.threshold)
        self.times[new] = time


    @property
    def ruptured(self) -> np.ndarray:
        return ~np.isnan(self.times)


    def arrival(self, x1: float, x3: float) -> float:
        i = int(np.argmin(np.abs(self.x1 - x1)))
        k = int(np.argmin(np.abs(self.x3 - x3)))
        return float(self.times[i, k])


    def save(self, path: Path) -> Path:
        _write_guard(path, lambda: np.savez(str(path), times=self.times, x1=self.x1, x3=self.x3, threshold=self.threshold, name=self.name))
        return path


    @classmethod
    def load(cls, path: Path) -> "RuptureTimeMap":
        with np.load(str(path)) as data:
            return cls(str(data["name"]), data["x1"], data["x3"], float(data["threshold"]), data["times"].copy())


    def __repr__(self) -> str:
        return f"<RuptureTimeMap {self.name}: ruptured={int(self.ruptured.sum())}/{self.times.size}>"


def rupture_speed(times: np.ndarray, dx: float) -> np.ndarray:
    """
    velocidade de ruptura 1/|∇t_r| (m/s) por nó; NaN fora da região rompida e onde o gradiente é nulo (nucleação).
    """
    times = np.asarray(times, dtype=float)
    if min(times.shape) < 2:
        return np.full(times.shape, np.nan)
    g1, g3 = np.gradient(times, dx, dx)
    slowness = np.hypot(g1, g3)
    with np.errstate(divide="ignore", invalid="ignore"):
        speed = np.where(np.isfinite(slowness) & (slowness > 0), 1.0 / slowness, np.nan)
    return speed


def supershear_fraction(times: np.ndarray, dx: float, cs: float) -> float:
    """fração dos nós com velocidade de ruptura definida que supera c_s."""
    speed = rupture_speed(times, dx)
    defined = np.isfinite(speed)
    if not defined.any():
        return 0.0
    return float(np.mean(speed[defined] > cs))


def save_fault_fields(path: Path, fault: FaultSurface) -> Path:
    """grava o deslizamento final (componentes e magnitude), a taxa e o cisalhamento da falha em um .npz."""
    fields = fault.snapshot()
    _write_guard(path, lambda: np.savez(
        str(path),
        x1=fault.x1,
        x3=fault.x3,
        slip1=fault.slip[:, 0].reshape(fault.shape),
        slip3=fault.slip[:, 1].reshape(fault.shape),
        **fields
    ))
    return path


def write_binary_snapshot(directory: Path, name: str, field: np.ndarray, spacing: float, origin: Sequence[float], time: float) -> list[Path]:
    """
    grava um campo como float64 little-endian em ordem C (<name>.bin) e um cabeçalho de texto (<name>.hdr).
    """
    field = np.ascontiguousarray(field, dtype="<f8")
    data_path = directory.join(f"{name}.bin")
    header_path = directory.join(f"{name}.hdr")
    header = "\n".join((
        f"shape = {' '.join(str(n) for n in field.shape)}",
        f"spacing = {spacing!r}",
        f"origin = {' '.join(repr(float(o)) for o in origin)}",
        f"time = {time!r}",
        "dtype = float64-le",
        "order = C"
    ))

    def write():
        field.tofile(str(data_path))
        with header_path.file("w", non_existent_ok=True) as file:
            file.write(header + "\n")

    _write_guard(data_path, write)
    return [data_path, header_path]


def read_binary_snapshot(path: Path) -> tuple[np.ndarray, dict]:
    """lê um snapshot binário a partir do caminho do .bin (o .hdr é procurado ao lado)."""
    header_path = Path(str(path)[:-4] + ".hdr")
    header = {}
    with header_path.file("r") as file:
        for line in file:
            key, _, value = line.partition("=")
            header[key.strip()] = value.strip()

    shape = tuple(int(n) for n in header["shape"].split())
    header = {
        "shape": shape,
        "spacing": float(header["spacing"]),
        "origin": tuple(float(o) for o in header["origin"].split()),
        "time": float(header["time"])
    }
    return np.fromfile(str(path), dtype="<f8").reshape(shape), header


def write_vti(path: Path, fields: Mapping[str, np.ndarray], spacing: float, origin: Sequence[float]) -> Path:
    """
    exporta campos nodais de uma grade regular como VTK ImageData (.vti).

    ### observação:

        - campos 2D (n1, n3) de falha são gravados como uma fatia (n1, 1, n3)
        - precisa do extra "vtk"; sem ele gera OutputWriteException
    """
    if not HAS_VTK:
        raise OutputWriteException(parse_message(WRITE_FAILED, PATH=str(path), REASON="vtk is not installed (install the 'vtk' extra)"))

    arrays = {name: np.asarray(value, dtype=float) for name, value in fields.items()}
    shape = next(iter(arrays.values())).shape
    dims = (shape[0], 1, shape[1]) if len(shape) == 2 else shape[:3]

    image = vtk.vtkImageData()
    image.SetDimensions(*dims)
    image.SetSpacing(spacing, spacing, spacing)
    image.SetOrigin(*(float(o) for o in origin))
    for name, array in arrays.items():
        array = array.reshape(dims + array.shape[len(shape):])
        components = 1 if array.ndim == 3 else array.shape[-1]
        flat = np.ascontiguousarray(array.reshape(dims + (components,)).transpose(2, 1, 0, 3).reshape(-1, components))
        data = numpy_support.numpy_to_vtk(flat, deep=True)
        data.SetName(name)
        image.GetPointData().AddArray(data)

    writer = vtk.vtkXMLImageDataWriter()
    writer.SetFileName(str(path))
    writer.SetInputData(image)
    if not writer.Write():
        raise OutputWriteException(parse_message(WRITE_FAILED, PATH=str(path), REASON="vtkXMLImageDataWriter failed"))
    return path


class Snapshot:
    """
    campos imutáveis de um instante, prontos para o gravador assíncrono.

    ### parâmetros:

        step (int): passo da integração
        time (float): instante (s)
        fields (Mapping[str, np.ndarray]): campos nomeados (copiados e travados para escrita)
        spacing (float): espaçamento da grade (m)
        origin (Sequence[float]): origem da grade (m)
        prefix (str): prefixo dos arquivos, ex.: "fault_main" ou "strip"
    """

    __slots__ = ["step", "time", "fields", "spacing", "origin", "prefix"]

    def __init__(self, step: int, time: float, fields: Mapping[str, np.ndarray], spacing: float, origin: Sequence[float], prefix: str):
        self.step = int(step)
        self.time = float(time)
        self.fields = {}
        for name, value in fields.items():
            array = np.array(value, dtype=float)
            array.setflags(write=False)
            self.fields[name] = array
        self.spacing = float(spacing)
        self.origin = tuple(float(o) for o in origin)
        self.prefix = prefix


    def __repr__(self) -> str:
        return f"<Snapshot {self.prefix}: step={self.step} fields={list(self.fields)}>"


class SnapshotWriter:
    """
    grava snapshots em segundo plano a partir de uma fila limitada; fila cheia bloqueia quem envia (nada é descartado).

    ### uso:

        async def function_example():
            async with SnapshotWriter(Path("outputs", "run", "snapshots"), vtk=False) as writer:
                await writer.submit(Snapshot(step, time, fault.snapshot(), dx, origin, "fault_main"))

            print(writer.written) # arquivos gravados

    ### observação:

        - a escrita roda em uma thread (asyncio.to_thread), então o próximo passo pode ser calculado enquanto grava
        - erros de escrita são guardados e relançados em close()
    """

    __slots__ = ["directory", "vtk", "maxsize", "written", "_queue", "_task", "_error"]

    def __init__(self, directory: Path, vtk: bool=False, maxsize: int=SNAPSHOT_QUEUE_SIZE):
        self.directory = directory
        self.vtk = vtk
        self.maxsize = max(1, int(maxsize))
        self.written: list[Path] = []
        self._queue: Optional[asyncio.Queue] = None
        self._task: Optional[asyncio.Task] = None
        self._error: Optional[BaseException] = None


    async def start(self):
        self.directory.mkdir(exists_ok=True)
        self._queue = asyncio.Queue(maxsize=self.maxsize)
        self._task = asyncio.create_task(self._consume())


    async def submit(self, snapshot: Snapshot):
        if self._queue is None:
            await self.start()
        if self._queue.full():
            logger.warning(parse_message(BACK_PRESSURE, STEP=snapshot.step))
        await self._queue.put(snapshot)


    def _write(self, snapshot: Snapshot) -> list[Path]:
        paths = []
        stem = f"{snapshot.prefix}_{snapshot.step:07d}"
        for name, field in snapshot.fields.items():
            paths += write_binary_snapshot(self.directory, f"{stem}_{name}", field, snapshot.spacing, snapshot.origin, snapshot.time)
        if self.vtk:
            paths.append(write_vti(self.directory.join(f"{stem}.vti"), snapshot.fields, snapshot.spacing, snapshot.origin))
        return paths


    async def _consume(self):
        while True:
            snapshot = await self._queue.get()
            try:
                if snapshot is None:
                    return
                if self._error is None:
                    self.written += await asyncio.to_thread(self._write, snapshot)
            except Exception as error:
                self._error = error
            finally:
                self._queue.task_done()


    async def close(self):
        if self._queue is not None:
            await self._queue.put(None)
            await self._task
            self._queue = None
            self._task = None
        if self._error is not None:
            error, self._error = self._error, None
            raise error


    async def __aenter__(self) -> "SnapshotWriter":
        await self.start()
        return self


    async def __aexit__(self, exc_type, exc, traceback):
        await self.close()


    def __repr__(self) -> str:
        return f"<SnapshotWriter: {self.directory} written={len(self.written)}>"


def grid_summary(grid: StructuredGrid) -> dict:
    return {"shape": list(grid.shape), "dx": grid.dx, "origin": list(grid.origin), "n_nodes": grid.n_nodes}


def package_versions() -> dict[str, str]:
    versions = {}
    for package in ("hybridrupture", "numpy", "scipy", "matplotlib", "jsonschema"):
        try:
            versions[package] = importlib.metadata.version(package)
        except importlib.metadata.PackageNotFoundError:
            versions[package] = "unknown"
    versions["vtk"] = importlib.metadata.version("vtk") if HAS_VTK else "absent"
    return versions


def build_manifest(config: dict, scenario: Scenario, dt: float, n_steps: int, grid: dict, threshold: float, timings: Mapping[str, float], artifacts: Sequence[Path|str], status: str="completed", diagnostic: Optional[str]=None) -> dict:
    """
    manifesto da execução: tudo o que é preciso para repeti-la (configuração, cenário resolvido, dt, grade, versões).
    """
    manifest = {
        "config": config,
        "scenario": scenario.to_dict(),
        "dt": float(dt),
        "n_steps": int(n_steps),
        "grid": grid,
        "rupture_threshold": float(threshold),
        "timings": {name: float(value) for name, value in timings.items()},
        "artifacts": sorted(str(artifact) for artifact in artifacts),
        "versions": package_versions(),
        "status": status
    }
    if diagnostic:
        manifest["diagnostic"] = diagnostic
    return manifest


def write_manifest(directory: Path, manifest: dict) -> Path:
    path = directory.join("manifest.json")
    dump_json(manifest, path, _MANIFEST_SCHEME_JSON)
    return path


def read_manifest(path: Path) -> dict:
    return load_json(path, _MANIFEST_SCHEME_JSON)


class RunResult:
    """
    resultado em memória de uma execução (híbrida ou SBIM): séries das estações, mapas de ruptura e falhas finais.

    ### atributos:

        scenario (Scenario): cenário resolvido
        dt (float): passo de tempo (s)
        n_steps (int): passos executados
        recorder (StationRecorder): séries das estações
        ruptures (dict[str, RuptureTimeMap]): mapas por falha
        faults (dict[str, FaultSurface]): estado final das falhas
        status (str): "completed" ou "unstable"
        diagnostic (Optional[str]): mensagem da instabilidade, se houver
        timings (dict[str, float]): tempos de parede (s)
    """

    __slots__ = ["scenario", "dt", "n_steps", "recorder", "ruptures", "faults", "status", "diagnostic", "timings"]

    def __init__(self, scenario: Scenario, dt: float, n_steps: int, recorder: StationRecorder, ruptures: dict[str, RuptureTimeMap], faults: dict[str, FaultSurface], status: str="completed", diagnostic: Optional[str]=None, timings: Optional[dict[str, float]]=None):
        self.scenario = scenario
        self.dt = float(dt)
        self.n_steps = int(n_steps)
        self.recorder = recorder
        self.ruptures = ruptures
        self.faults = faults
        self.status = status
        self.diagnostic = diagnostic
        self.timings = dict(timings or {})


    def series(self, station: str) -> np.ndarray:
        return self.recorder.series(station)


    def __repr__(self) -> str:
        return f"<RunResult {self.scenario.name}: steps={self.n_steps} dt={self.dt:.4g} status={self.status}>"


def relative_rms(series: np.ndarray, reference: np.ndarray) -> float:
    """RMS da diferença normalizado pelo pico de |reference| (0 quando as duas séries são nulas)."""
    series = np.asarray(series, dtype=float)
    reference = np.asarray(reference, dtype=float)
    n = min(series.shape[0], reference.shape[0])
    difference = float(np.sqrt(np.mean((series[:n] - reference[:n]) ** 2))) if n else 0.0
    peak = float(np.max(np.abs(reference[:n]))) if n else 0.0
    if peak == 0.0:
        return 0.0 if difference == 0.0 else np.inf
    return difference / peak
