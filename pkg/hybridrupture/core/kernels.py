import math
import logging
import functools
from typing import Callable, Optional, Protocol, runtime_checkable

import numpy as np
import scipy.fft
import scipy.special

from ..models.materials import ElasticMaterial
from .utils import parse_message, check_type, check_value
from .messeger import KERNEL_SAMPLES, T_MAX, MISSING_KERNEL, UNKNOWN_KERNEL
from ..exceptions import MissingKernelException

logger = logging.getLogger(__name__)

KERNEL_NAMES = ("h11", "h22", "h12", "h33")

__all__ = [
    "KERNEL_NAMES",
    "KernelProvider",
    "HalfSpaceKernels",
    "SyntheticKernels",
    "KernelTable",
    "halfspace_symbols",
    "inverse_laplace_table",
    "antiplane_kernel",
]


def halfspace_symbols(s: np.ndarray, eta: float) -> dict[str, np.ndarray]:
    """
    símbolos de Laplace (em T = q·c_s·t) da rigidez dinâmica do semiespaço, sem a parte instantânea.

    ### parâmetros:

        s (np.ndarray): variável de Laplace adimensional p/(q·c_s)
        eta (float): c_p/c_s

    ### retorno:

        dict[str, np.ndarray]: "h11" (∥), "h22" (normal), "h12" (acoplamento) e "h33" (⊥)

    ### observação:

        - rigidez completa (normalizada por μq): s + h11, η·s + h22, (2 − η) + h12 e s + h33
        - em s -> 0: h11 = h22 = 2η²/(η² + 1), h12 = 2/(η² + 1) − (2 − η) e h33 = 1
    """
    s = np.asarray(s, dtype=complex)
    s2 = s * s
    alpha_s = np.sqrt(1.0 + s2 + 0j)
    alpha_p = np.sqrt(1.0 + s2 / eta ** 2 + 0j)
    product = alpha_s * alpha_p
    return {
        "h11": alpha_p * s2 / (product - 1.0) - s,
        "h22": alpha_s * s2 / (product - 1.0) - eta * s,
        "h12": (1.0 + alpha_s ** 2 - 2.0 * product) / (1.0 - product) - (2.0 - eta),
        "h33": alpha_s - s
    }


def antiplane_kernel(t: np.ndarray) -> np.ndarray:
    """núcleo antiplano em forma fechada H33(T) = J1(T)/T (H33(0) = 1/2)."""
    t = np.asarray(t, dtype=float)
    safe = np.where(t == 0.0, 1.0, t)
    return np.where(t == 0.0, 0.5, scipy.special.j1(safe) / safe)


def inverse_laplace_table(symbol: Callable[[np.ndarray], np.ndarray], t_max: float=T_MAX, samples: int=KERNEL_SAMPLES, workers: int=1) -> tuple[float, np.ndarray]:
    """
    inverte numericamente um símbolo de Laplace de núcleo causal:

        H(T) = (2/π) ∫ Re h(iω) cos(ωT) dω

    avaliado com a regra do ponto médio (ω_k = (k + ½)dω, dω = π/(4·t_max)) e uma DCT-II.

    ### retorno:

        tuple[float, np.ndarray]: (passo em T, amostras H(j·passo) para j < samples), cobrindo T até 4·t_max
    """
    domega = math.pi / (4.0 * t_max)
    omega = (np.arange(samples) + 0.5) * domega
    values = np.real(symbol(1j * omega))
    table = domega / math.pi * scipy.fft.dct(values, type=2, workers=workers)
    return math.pi / (samples * domega), table


@functools.lru_cache(maxsize=8)
def _halfspace_table(eta: float, t_max: float, samples: int) -> tuple[float, dict[str, np.ndarray]]:
    logger.info("inverting half-space kernels (c_p/c_s = %.6g, %d samples)", eta, samples)
    tables = {}
    step = None
    for name in ("h11", "h22", "h12"):
        step, tables[name] = inverse_laplace_table(lambda s, name=name: halfspace_symbols(s, eta)[name], t_max, samples)
    for table in tables.values():
        table.setflags(write=False)
    return step, tables


@runtime_checkable
class KernelProvider(Protocol):
    """
    interface dos provedores de núcleos de convolução.

    ### métodos:

        def kernel(self, name: str, t: np.ndarray, material: ElasticMaterial) -> np.ndarray: H_name(T) amostrado em "t"

        def coupling(self, material: ElasticMaterial) -> float: coeficiente instantâneo do acoplamento ∥-normal
    """

    name: str

    def kernel(self, name: str, t: np.ndarray, material: ElasticMaterial) -> np.ndarray: ...

    def coupling(self, material: ElasticMaterial) -> float: ...


class HalfSpaceKernels:
    """
    núcleos do semiespaço elástico isotrópico (formulação independente, deslocamentos convoluídos).

    ### observação:

        - h11, h22 e h12 vêm da inversão numérica (tabela única por razão c_p/c_s, em cache)
        - h33 usa a forma fechada J1(T)/T
    """

    name = "halfspace"

    def __init__(self, t_max: float=T_MAX, samples: int=KERNEL_SAMPLES):
        check_value("HalfSpaceKernels(...)", "t_max", t_max, t_max > 0)
        self.t_max = float(t_max)
        self.samples = int(samples)


    def kernel(self, name: str, t: np.ndarray, material: ElasticMaterial) -> np.ndarray:
        if name == "h33":
            return antiplane_kernel(t)
        if name not in KERNEL_NAMES:
            raise MissingKernelException(parse_message(UNKNOWN_KERNEL, NAME=name, PROVIDER=self.name))

        eta = round(material.cp / material.cs, 12)
        step, tables = _halfspace_table(eta, self.t_max, self.samples)
        grid = step * np.arange(self.samples)
        return np.interp(np.asarray(t, dtype=float), grid, tables[name], right=0.0)


    def coupling(self, material: ElasticMaterial) -> float:
        return 2.0 - material.cp / material.cs


    def __repr__(self) -> str:
        return f"<HalfSpaceKernels: t_max={self.t_max:g}>"


class SyntheticKernels:
    """
    núcleos sintéticos para testar a convolução isoladamente (padrão: H(T) = e^(−T) em todos os núcleos, acoplamento 0).

    ### uso:

        provider = SyntheticKernels(lambda t: np.exp(-t))
    """

    name = "synthetic"

    def __init__(self, function: Optional[Callable[[np.ndarray], np.ndarray]]=None, coupling: float=0.0):
        self.function = function or (lambda t: np.exp(-np.asarray(t, dtype=float)))
        self._coupling = float(coupling)


    def kernel(self, name: str, t: np.ndarray, material: ElasticMaterial) -> np.ndarray:
        if name not in KERNEL_NAMES:
            raise MissingKernelException(parse_message(UNKNOWN_KERNEL, NAME=name, PROVIDER=self.name))
        return np.asarray(self.function(np.asarray(t, dtype=float)), dtype=float)


    def coupling(self, material: ElasticMaterial) -> float:
        return self._coupling


    def __repr__(self) -> str:
        return "<SyntheticKernels>"


class KernelTable:
    """
    núcleos amostrados no passo de tempo da simulação para um conjunto de números de onda.

    ### parâmetros:

        provider (KernelProvider): origem dos núcleos
        q (np.ndarray): números de onda |k| > 0 (1/m)
        material (ElasticMaterial): material do semiespaço
        dt (float): passo de tempo (s)
        t_max (float): horizonte de truncamento adimensional
        max_steps (Optional[int]): número de passos da execução (limita as janelas)

    ### atributos:

        dT (np.ndarray): passo adimensional q·c_s·dt por modo
        windows (np.ndarray): janela de cada modo, ceil(t_max/dT) (limitada a max_steps + 1)
    """

    __slots__ = ["provider", "q", "material", "dt", "t_max", "dT", "windows"]

    def __init__(self, provider: KernelProvider, q: np.ndarray, material: ElasticMaterial, dt: float, t_max: float=T_MAX, max_steps: Optional[int]=None):
        check_type("KernelTable(...)", "provider", provider, KernelProvider)
        check_type("KernelTable(...)", "material", material, ElasticMaterial)
        q = np.asarray(q, dtype=float)
        if np.any(q <= 0):
            raise MissingKernelException(parse_message(MISSING_KERNEL, Q=float(q.min()), PROVIDER=provider.name))

        self.provider = provider
        self.q = q
        self.material = material
        self.dt = float(dt)
        self.t_max = float(t_max)
        self.dT = q * material.cs * self.dt

        windows = np.ceil(self.t_max / self.dT).astype(np.int64)
        if max_steps is not None:
            windows = np.minimum(windows, int(max_steps) + 1)
        self.windows = np.maximum(windows, 1)


    def weighted(self, name: str, index: np.ndarray, length: int) -> np.ndarray:
        """
        amostras H(j·dT)·dT·w_j (w_j do trapézio sobre a janela do modo) com shape (len(index), length), nulas além da janela.
        """
        index = np.asarray(index, dtype=np.int64)
        j = np.arange(length)
        samples = self.provider.kernel(name, self.dT[index, None] * j[None, :], self.material)
        samples = np.broadcast_to(samples, (index.size, length)).astype(float)
        if not np.all(np.isfinite(samples)):
            raise MissingKernelException(parse_message(MISSING_KERNEL, Q=f"{self.q[index].min():.6g}", PROVIDER=self.provider.name))

        windows = self.windows[index, None]
        weights = np.where(j[None, :] < windows, 1.0, 0.0)
        weights = np.where(j[None, :] == windows - 1, 0.5, weights)
        weights[:, 0] = np.where(self.windows[index] > 1, 0.5, 0.0)
        return samples * weights * self.dT[index, None]


    def __repr__(self) -> str:
        return f"<KernelTable: {self.provider.name} modes={self.q.size} max window={int(self.windows.max()) if self.q.size else 0}>"
