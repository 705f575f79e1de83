import logging
from typing import Callable, Optional

import numpy as np
import scipy.fft

from ..models.materials import ElasticMaterial
from .kernels import KernelProvider, KernelTable, HalfSpaceKernels
from .utils import parse_message, check_type, check_value
from .messeger import T_MAX, SIZE_MISMATCH, DOUBLE_PUSH, MISSING_KERNEL
from ..exceptions import SizeMismatchException, HistoryPushException, MissingKernelException

logger = logging.getLogger(__name__)

FarField = Callable[[float], np.ndarray]

__all__ = [
    "RadiationMatrix",
    "SbiBoundary",
    "spectral_forward",
    "spectral_inverse",
    "wavenumbers",
    "static_halfspace_stiffness",
    "static_traction",
]


class RadiationMatrix:
    """
    amortecimento de radiação η (diagonal): η11 = η33 = 1 e η22 = c_p/c_s.

    ### uso:

        radiation = RadiationMatrix(host)

        print(radiation.eta) # [1.0, 1.732..., 1.0]
        print(radiation.impedance) # μ/c_s·η (Pa·s/m)
    """

    __slots__ = ["eta", "impedance"]

    def __init__(self, material: ElasticMaterial):
        check_type("RadiationMatrix(...)", "material", material, ElasticMaterial)
        self.eta = np.array([1.0, material.cp / material.cs, 1.0])
        self.impedance = material.shear_modulus / material.cs * self.eta


    def damping(self, velocity: np.ndarray) -> np.ndarray:
        return -velocity * self.impedance


def wavenumbers(shape: tuple[int, int], dx: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(k1 (n1, 1), k3 (1, n3//2 + 1), q) da transformada real bidimensional (rad/m)."""
    n1, n3 = shape
    k1 = 2.0 * np.pi * scipy.fft.fftfreq(n1, dx)[:, None]
    k3 = 2.0 * np.pi * scipy.fft.rfftfreq(n3, dx)[None, :]
    return k1, k3, np.hypot(k1, k3)


def spectral_forward(field: np.ndarray, shape: Optional[tuple[int, int]]=None, workers: int=1) -> np.ndarray:
    """
    transformada de Fourier 2D (x1, x3) por componente: (n1, n3, c) -> (n1, n3//2 + 1, c).
    """
    field = np.asarray(field, dtype=float)
    if field.ndim < 2 or (shape is not None and tuple(field.shape[:2]) != tuple(shape)):
        raise SizeMismatchException(parse_message(SIZE_MISMATCH, METHOD="spectral_forward(...)", EXPECTED=shape, RECEIVED=field.shape))
    return scipy.fft.rfft2(field, axes=(0, 1), workers=workers)


def spectral_inverse(modes: np.ndarray, shape: tuple[int, int], workers: int=1) -> np.ndarray:
    """inversa de spectral_forward(...) para uma malha (n1, n3)."""
    n1, n3 = shape
    if modes.shape[0] != n1 or modes.shape[1] != n3 // 2 + 1:
        raise SizeMismatchException(parse_message(SIZE_MISMATCH, METHOD="spectral_inverse(...)", EXPECTED=(n1, n3 // 2 + 1), RECEIVED=modes.shape))
    return scipy.fft.irfft2(modes, s=(n1, n3), axes=(0, 1), workers=workers)


def _to_local(modes: np.ndarray, cos: np.ndarray, sin: np.ndarray) -> np.ndarray:
    d1, d2, d3 = modes[..., 0], modes[..., 1], modes[..., 2]
    return np.stack([cos * d1 + sin * d3, d2, -sin * d1 + cos * d3], axis=-1)


def _to_global(local: np.ndarray, cos: np.ndarray, sin: np.ndarray) -> np.ndarray:
    parallel, normal, perpendicular = local[..., 0], local[..., 1], local[..., 2]
    return np.stack([cos * parallel - sin * perpendicular, normal, sin * parallel + cos * perpendicular], axis=-1)


def _direction(k1: np.ndarray, k3: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    safe = np.where(q > 0, q, 1.0)
    return np.where(q > 0, k1 / safe, 1.0), np.where(q > 0, k3 / safe, 0.0)


def static_halfspace_stiffness(material: ElasticMaterial, k1: np.ndarray, k3: np.ndarray, orientation: int=1) -> np.ndarray:
    """
    rigidez estática da superfície do semiespaço (solução de Boussinesq–Cerruti em μ e ν), shape (..., 3, 3).

    ### observação:

        - tração sobre a faixa = K·D para D = exp(i·k·x) na fronteira
        - no referencial (∥, 2, ⊥): −μq/(3 − 4ν)·[[4(1−ν), −σ·2i(1−2ν), 0], [σ·2i(1−2ν), 4(1−ν), 0], [0, 0, 3 − 4ν]]
    """
    nu = material.poisson_ratio
    mu = material.shear_modulus
    k1, k3 = np.broadcast_arrays(np.asarray(k1, dtype=float), np.asarray(k3, dtype=float))
    q = np.hypot(k1, k3)
    cos, sin = _direction(k1, k3, q)

    scale = -mu * q / (3.0 - 4.0 * nu)
    local = np.zeros(q.shape + (3, 3), dtype=complex)
    local[..., 0, 0] = scale * 4.0 * (1.0 - nu)
    local[..., 1, 1] = scale * 4.0 * (1.0 - nu)
    local[..., 2, 2] = scale * (3.0 - 4.0 * nu)
    local[..., 0, 1] = -orientation * 2j * (1.0 - 2.0 * nu) * scale
    local[..., 1, 0] = orientation * 2j * (1.0 - 2.0 * nu) * scale

    rotation = np.zeros(q.shape + (3, 3))
    rotation[..., 0, 0], rotation[..., 0, 2] = cos, sin
    rotation[..., 1, 1] = 1.0
    rotation[..., 2, 0], rotation[..., 2, 2] = -sin, cos
    return np.swapaxes(rotation, -1, -2) @ local @ rotation


def static_traction(material: ElasticMaterial, field: np.ndarray, dx: float, orientation: int=1, workers: int=1) -> np.ndarray:
    """tração estática (Pa) do semiespaço para um deslocamento periódico da fronteira (n1, n3, 3)."""
    shape = field.shape[:2]
    k1, k3, _ = wavenumbers(shape, dx)
    stiffness = static_halfspace_stiffness(material, k1, k3, orientation)
    modes = spectral_forward(field, shape, workers)
    return spectral_inverse(np.einsum("...ij,...j->...i", stiffness, modes), shape, workers)


class _Bucket:
    """modos cuja janela cabe em W = 2^b amostras; histórico em anel duplicado (cada amostra gravada em p e p + W)."""

    __slots__ = ["modes", "width", "windows", "kernels", "history", "first"]

    def __init__(self, modes: np.ndarray, width: int, windows: np.ndarray, kernels: dict[str, np.ndarray]):
        self.modes = modes
        self.width = width
        self.windows = windows
        self.kernels = kernels
        self.history = np.zeros((3, modes.size, 2 * width), dtype=complex)
        self.first = np.zeros((3, modes.size), dtype=complex)


class SbiBoundary:
    """
    fronteira espectral (SBI) sobre um plano virtual: histórico de deslocamentos por modo e tração do semiespaço.

    ### parâmetros:

        shape (tuple[int, int]): malha periódica (n1, n3)
        dx (float): espaçamento (m), o mesmo da malha de elementos finitos
        material (ElasticMaterial): material do semiespaço
        dt (float): passo de tempo (s)
        orientation (int): +1 para o semiespaço acima (S⁺), -1 para o semiespaço abaixo (S⁻)
        provider (Optional[KernelProvider]): núcleos (padrão HalfSpaceKernels)
        t_max (float): horizonte de truncamento adimensional
        max_steps (Optional[int]): número de passos da execução (limita as janelas)
        workers (int): threads das transformadas
        far_field (Optional[FarField]): tração τ^∞(t) (padrão nula)
        name (str): rótulo em logs e erros
        table (Optional[KernelTable]): núcleos já amostrados (precisa cobrir todos os modos)

    ### métodos:

        def push_history(self, modes, step) -> None: guarda u_step (coeficientes de spectral_forward)

        def nonlocal_term(self) -> np.ndarray: termo s_i no espaço físico, shape (n1, n3, 3)

        def traction(self, velocity, time) -> np.ndarray: τ^∞ − η·(μ/c_s)·v + s

    ### observação:

        - o modo (0, 0) recebe só o amortecimento de radiação
        - a convolução usa a regra do trapézio sobre min(t, janela) com os núcleos amostrados em j·q·c_s·dt
    """

    __slots__ = [
        "name", "shape", "dx", "material", "dt", "orientation", "provider", "t_max", "workers", "far_field",
        "radiation", "table", "_q", "_cos", "_sin", "_buckets", "_coupling", "_current", "_pushed"
    ]

    def __init__(self, shape: tuple[int, int], dx: float, material: ElasticMaterial, dt: float, orientation: int=1, provider: Optional[KernelProvider]=None, t_max: float=T_MAX, max_steps: Optional[int]=None, workers: int=1, far_field: Optional[FarField]=None, name: str="S+", table: Optional[KernelTable]=None):
        check_type("SbiBoundary(...)", "material", material, ElasticMaterial)
        check_value("SbiBoundary(...)", "orientation", orientation, orientation in (1, -1))
        check_value("SbiBoundary(...)", "dt", dt, dt > 0)

        self.name = name
        self.shape = (int(shape[0]), int(shape[1]))
        self.dx = float(dx)
        self.material = material
        self.dt = float(dt)
        self.orientation = orientation
        self.provider = provider or HalfSpaceKernels(t_max)
        self.t_max = float(t_max)
        self.workers = max(1, int(workers))
        self.far_field = far_field
        self.radiation = RadiationMatrix(material)

        k1, k3, q = wavenumbers(self.shape, self.dx)
        cos, sin = _direction(k1, k3, q)
        self._q = q.ravel()
        self._cos = np.broadcast_to(cos, q.shape).ravel()
        self._sin = np.broadcast_to(sin, q.shape).ravel()
        self._coupling = self.provider.coupling(material)

        active = np.flatnonzero(self._q > 0)
        if table is None:
            table = KernelTable(self.provider, self._q[active], material, self.dt, self.t_max, max_steps)
        else:
            self.check_table(table)
        self.table = table
        self._buckets = self._build_buckets(active)
        self._current = np.zeros((self._q.size, 3), dtype=complex)
        self._pushed = 0

        logger.info(
            "SBI boundary %s: %dx%d modes=%d buckets=%s",
            self.name, *self.shape, active.size, [bucket.width for bucket in self._buckets]
        )


    def _build_buckets(self, active: np.ndarray) -> list[_Bucket]:
        windows = self.table.windows
        widths = 2 ** np.ceil(np.log2(windows)).astype(np.int64)
        buckets = []
        for width in np.unique(widths):
            members = np.flatnonzero(widths == width)
            kernels = {
                name: np.ascontiguousarray(self.table.weighted(name, members, int(width))[:, ::-1])
                for name in ("h11", "h22", "h12", "h33")
            }
            buckets.append(_Bucket(active[members], int(width), windows[members], kernels))
        return buckets


    @property
    def steps(self) -> int:
        """quantidade de amostras já guardadas no histórico."""
        return self._pushed


    def check_table(self, table: KernelTable):
        """gera MissingKernelException se "table" não cobre exatamente os números de onda desta fronteira."""
        active = self._q[self._q > 0]
        if table.q.shape != active.shape or not np.allclose(table.q, active):
            missing = np.setdiff1d(np.round(active, 12), np.round(table.q, 12))
            raise MissingKernelException(parse_message(MISSING_KERNEL, Q=f"{missing[0]:.6g}" if missing.size else "?", PROVIDER=table.provider.name))


    def forward(self, field: np.ndarray) -> np.ndarray:
        return spectral_forward(field, self.shape, self.workers)


    def push_history(self, modes: np.ndarray, step: int):
        """
        guarda os coeficientes do deslocamento do passo "step" (0 para o estado inicial).

        ### observação:

            - os passos precisam ser consecutivos, caso contrário HistoryPushException
        """
        if step != self._pushed:
            raise HistoryPushException(parse_message(DOUBLE_PUSH, BOUNDARY=self.name, STEP=step, EXPECTED=self._pushed))

        flat = np.asarray(modes, dtype=complex).reshape(-1, 3)
        self._current = flat
        local = _to_local(flat, self._cos, self._sin)

        for bucket in self._buckets:
            sample = local[bucket.modes].T
            position = step % bucket.width
            bucket.history[:, :, position] = sample
            bucket.history[:, :, position + bucket.width] = sample
            if step == 0:
                bucket.first[:] = sample

        self._pushed += 1


    def nonlocal_modes(self) -> np.ndarray:
        """termo s_i em coeficientes de Fourier (n1·(n3//2 + 1), 3)."""
        local = np.zeros((self._q.size, 3), dtype=complex)
        n = self._pushed - 1
        if n < 0:
            return local

        current = _to_local(self._current, self._cos, self._sin)
        sign = 1j * self.orientation
        mu = self.material.shear_modulus

        for bucket in self._buckets:
            width = bucket.width
            position = n % width
            window = bucket.history[:, :, position + 1:position + width + 1]
            kernels = bucket.kernels

            c11 = np.einsum("mw,mw->m", kernels["h11"], window[0])
            c22 = np.einsum("mw,mw->m", kernels["h22"], window[1])
            c33 = np.einsum("mw,mw->m", kernels["h33"], window[2])
            c12_normal = np.einsum("mw,mw->m", kernels["h12"], window[1])
            c12_parallel = np.einsum("mw,mw->m", kernels["h12"], window[0])

            if n < width:
                # o trapézio termina em j = n enquanto a janela não foi preenchida
                partial = n < bucket.windows - 1
                if partial.any():
                    factor = np.where(partial, 0.5 if n > 0 else 1.0, 0.0)
                    column = width - 1 - n
                    c11 -= factor * kernels["h11"][:, column] * bucket.first[0]
                    c22 -= factor * kernels["h22"][:, column] * bucket.first[1]
                    c33 -= factor * kernels["h33"][:, column] * bucket.first[2]
                    c12_normal -= factor * kernels["h12"][:, column] * bucket.first[1]
                    c12_parallel -= factor * kernels["h12"][:, column] * bucket.first[0]

            modes = bucket.modes
            stiffness = mu * self._q[modes]
            now = current[modes]
            local[modes, 0] = -stiffness * c11 + sign * stiffness * (self._coupling * now[:, 1] + c12_normal)
            local[modes, 1] = -stiffness * c22 - sign * stiffness * (self._coupling * now[:, 0] + c12_parallel)
            local[modes, 2] = -stiffness * c33

        return _to_global(local, self._cos, self._sin)


    def nonlocal_term(self) -> np.ndarray:
        """termo s_i (Pa) no espaço físico, shape (n1, n3, 3)."""
        n1, n3 = self.shape
        modes = self.nonlocal_modes().reshape(n1, n3 // 2 + 1, 3)
        return spectral_inverse(modes, self.shape, self.workers)


    def far_field_traction(self, time: float) -> np.ndarray|float:
        if self.far_field is None:
            return 0.0
        return np.asarray(self.far_field(time), dtype=float)


    def traction(self, velocity: np.ndarray, time: float, nonlocal_term: Optional[np.ndarray]=None) -> np.ndarray:
        """
        tração do semiespaço sobre a faixa (Pa), shape (n1, n3, 3):

            τ = τ^∞(t) − η·(μ/c_s)·v + s
        """
        velocity = np.asarray(velocity, dtype=float)
        if velocity.shape != self.shape + (3,):
            raise SizeMismatchException(parse_message(SIZE_MISMATCH, METHOD="SbiBoundary.traction(...)", EXPECTED=self.shape + (3,), RECEIVED=velocity.shape))
        if nonlocal_term is None:
            nonlocal_term = self.nonlocal_term()
        return self.far_field_traction(time) + self.radiation.damping(velocity) + nonlocal_term


    def __repr__(self) -> str:
        return f"<SbiBoundary {self.name}: {self.shape[0]}x{self.shape[1]} dx={self.dx:g} orientation={self.orientation:+d}>"
