from typing import Optional, Sequence

import numpy as np

from .materials import ElasticMaterial, RegionSpec
from ..core.utils import parse_message, check_type, check_value, is_admissible_size
from ..core.messeger import (
    NON_COMMENSURATE,
    INADMISSIBLE_SIZE,
    THIN_STRIP,
    NOT_NODE_PLANE,
    REGION_OUTSIDE,
    UNKNOWN_MATERIAL
)
from ..exceptions import InvalidGridException, RegionOutsideStripException, UnexpectedValueException

_TOLERANCE = 1.0e-9

# ordem dos nós do hexaedro (mesma convenção do VTK_HEXAHEDRON)
HEX_CORNERS = np.array([
    [0, 0, 0],
    [1, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [1, 1, 1],
    [0, 1, 1],
], dtype=np.int64)


class StructuredGrid:
    """
    malha regular de hexaedros cúbicos da faixa virtual.

    ### parâmetros:

        shape (tuple[int, int, int]): número de elementos (N1, N2, N3)
        dx (float): espaçamento (m), igual nos três eixos
        origin (tuple[float, float, float]): coordenada do nó (0, 0, 0) (m)
        material_index (Optional[np.ndarray]): índice do material de cada elemento (padrão 0)
        materials (Sequence[ElasticMaterial]): materiais referenciados por material_index

    ### observação:

        - nós numerados em ordem C sobre (i, j, k): n = (i·(N2+1) + j)·(N3+1) + k
        - elementos numerados da mesma forma sobre (N1, N2, N3)
        - instâncias são imutáveis, assign_regions(...) retorna uma nova malha
    """

    __slots__ = ["shape", "dx", "origin", "material_index", "materials"]

    def __init__(self, shape: tuple[int, int, int], dx: float, origin: tuple[float, float, float], material_index: Optional[np.ndarray]=None, materials: Sequence[ElasticMaterial]=()):
        self.shape = tuple(int(n) for n in shape)
        self.dx = float(dx)
        self.origin = tuple(float(o) for o in origin)

        n_elements = self.shape[0] * self.shape[1] * self.shape[2]
        if material_index is None:
            material_index = np.zeros(n_elements, dtype=np.int64)
        material_index = np.asarray(material_index, dtype=np.int64).reshape(-1)
        if material_index.size != n_elements:
            raise InvalidGridException(f"material_index has {material_index.size} entries for {n_elements} elements!")
        material_index.setflags(write=False)

        self.material_index = material_index
        self.materials = tuple(materials)


    @property
    def n_nodes(self) -> int:
        n1, n2, n3 = self.shape
        return (n1 + 1) * (n2 + 1) * (n3 + 1)


    @property
    def n_elements(self) -> int:
        n1, n2, n3 = self.shape
        return n1 * n2 * n3


    @property
    def node_shape(self) -> tuple[int, int, int]:
        return tuple(n + 1 for n in self.shape)


    @property
    def extents(self) -> tuple[float, float, float]:
        return tuple(n * self.dx for n in self.shape)


    @property
    def upper(self) -> tuple[float, float, float]:
        return tuple(o + e for o, e in zip(self.origin, self.extents))


    def node_index(self, i, j, k):
        _, n2, n3 = self.shape
        return (np.asarray(i) * (n2 + 1) + np.asarray(j)) * (n3 + 1) + np.asarray(k)


    def node_ijk(self, index):
        _, n2, n3 = self.shape
        index = np.asarray(index)
        k = index % (n3 + 1)
        rest = index // (n3 + 1)
        return rest // (n2 + 1), rest % (n2 + 1), k


    def node_coordinates(self, index=None) -> np.ndarray:
        """coordenadas (m) dos nós informados (ou de todos) com shape (n, 3)."""
        if index is None:
            index = np.arange(self.n_nodes)
        i, j, k = self.node_ijk(index)
        ijk = np.stack([i, j, k], axis=-1).astype(float)
        return np.asarray(self.origin) + self.dx * ijk


    def element_index(self, i, j, k):
        _, n2, n3 = self.shape
        return (np.asarray(i) * n2 + np.asarray(j)) * n3 + np.asarray(k)


    def element_ijk(self, index=None):
        _, n2, n3 = self.shape
        if index is None:
            index = np.arange(self.n_elements)
        index = np.asarray(index)
        k = index % n3
        rest = index // n3
        return rest // n2, rest % n2, k


    def element_nodes(self) -> np.ndarray:
        """conectividade elemento → 8 nós (n_elements, 8), sem nós duplicados de falhas."""
        i, j, k = self.element_ijk()
        corners = HEX_CORNERS
        return self.node_index(
            i[:, None] + corners[None, :, 0],
            j[:, None] + corners[None, :, 1],
            k[:, None] + corners[None, :, 2]
        )


    def element_centroids(self) -> np.ndarray:
        i, j, k = self.element_ijk()
        ijk = np.stack([i, j, k], axis=-1).astype(float) + 0.5
        return np.asarray(self.origin) + self.dx * ijk


    def plane_nodes(self, j: int) -> np.ndarray:
        """ids dos nós do plano x2 constante de índice j, shape (N1+1, N3+1)."""
        n1, n2, n3 = self.shape
        if not 0 <= j <= n2:
            raise InvalidGridException(parse_message(NOT_NODE_PLANE, X2=f"index {j}"))
        i, k = np.meshgrid(np.arange(n1 + 1), np.arange(n3 + 1), indexing="ij")
        return self.node_index(i, j, k)


    def boundary_nodes(self, side: int) -> np.ndarray:
        """nós do plano S⁺ (side=+1, topo) ou S⁻ (side=-1, base)."""
        return self.plane_nodes(self.shape[1] if side > 0 else 0)


    def layer_of(self, x2: float) -> int:
        """índice j do plano de nós em x2, InvalidGridException se x2 não cai sobre um plano."""
        position = (x2 - self.origin[1]) / self.dx
        j = int(round(position))
        if abs(position - j) > 1e-6 or not 0 <= j <= self.shape[1]:
            raise InvalidGridException(parse_message(NOT_NODE_PLANE, X2=x2))
        return j


    def axis_index(self, axis: int, x: float) -> int:
        """índice do nó mais próximo de x ao longo do eixo (0 ou 2)."""
        return int(round((x - self.origin[axis]) / self.dx))


    def axis_coordinates(self, axis: int) -> np.ndarray:
        return self.origin[axis] + self.dx * np.arange(self.shape[axis] + 1)


    def element_materials(self) -> list[ElasticMaterial]:
        return [self.materials[m] for m in np.unique(self.material_index)]


    def with_materials(self, material_index: np.ndarray, materials: Sequence[ElasticMaterial]) -> "StructuredGrid":
        return StructuredGrid(self.shape, self.dx, self.origin, material_index, materials)


    def __repr__(self) -> str:
        n1, n2, n3 = self.shape
        return f"<StructuredGrid: {n1}x{n2}x{n3} dx={self.dx:g} origin={self.origin}>"


def _element_count(extent: float, dx: float, axis: int) -> int:
    n = int(round(extent / dx))
    if extent <= 0 or n < 1 or abs(n * dx - extent) > _TOLERANCE * max(extent, dx):
        raise InvalidGridException(parse_message(NON_COMMENSURATE, EXTENT=extent, AXIS=axis + 1, DX=dx))
    return n


def build_grid(extents: Sequence[float], dx: float, origin: Optional[Sequence[float]]=None, materials: Sequence[ElasticMaterial]=(), min_layers: int=2) -> StructuredGrid:
    """
    constrói a malha estruturada da faixa virtual.

    ### parâmetros:

        extents (Sequence[float]): comprimentos (L1, L2, L3) (m)
        dx (float): espaçamento (m)
        origin (Optional[Sequence[float]]): origem (m), padrão (0, -L2/2, 0) (falha no plano médio)
        materials (Sequence[ElasticMaterial]): materiais (o índice 0 é o material padrão)
        min_layers (int): mínimo de camadas de elementos em x2 (1 para blocos de teste)

    ### uso:

        grid = build_grid((30e3, 0.2e3, 15e3), 50.0)
        print(grid.shape) # (600, 4, 300)

    ### observação:

        - N1 e N3 precisam ser admissíveis pela transformada (fatores 2, 3 e 5), e N2 >= min_layers
    """
    check_type("build_grid(...)", "extents", extents, (tuple, list))
    check_type("build_grid(...)", "dx", dx, (int, float))
    check_value("build_grid(...)", "dx", dx, dx > 0)
    check_value("build_grid(...)", "extents", extents, len(extents) == 3)

    shape = tuple(_element_count(float(extent), float(dx), axis) for axis, extent in enumerate(extents))

    for axis in (0, 2):
        if not is_admissible_size(shape[axis]):
            raise InvalidGridException(parse_message(INADMISSIBLE_SIZE, AXIS=axis + 1, SIZE=shape[axis]))
    if shape[1] < min_layers:
        raise InvalidGridException(parse_message(THIN_STRIP, SIZE=shape[1]))

    if origin is None:
        origin = (0.0, -0.5 * shape[1] * dx, 0.0)

    return StructuredGrid(shape, dx, tuple(origin), None, materials)


def assign_regions(grid: StructuredGrid, regions: Sequence[RegionSpec], materials: Sequence[ElasticMaterial]) -> StructuredGrid:
    """
    atribui materiais aos elementos pelas caixas em "regions" (a última caixa que contém o centróide vence).

    ### uso:

        host = ElasticMaterial.from_wavespeeds(2670.0, 6000.0, 3464.0)
        lvfz = host.scaled(0.8)

        box = RegionSpec((0.0, -800.0, 0.0), (60e3, 800.0, 30e3), 1)
        grid = assign_regions(grid, [box], [host, lvfz])
    """
    check_type("assign_regions(...)", "grid", grid, StructuredGrid)
    check_value("assign_regions(...)", "materials", materials, len(materials) >= 1, "at least the default material is required.")

    lower_strip = np.asarray(grid.origin)
    upper_strip = np.asarray(grid.upper)
    tolerance = _TOLERANCE * max(grid.extents)

    centroids = grid.element_centroids()
    index = np.zeros(grid.n_elements, dtype=np.int64)

    for position, region in enumerate(regions):
        check_type("assign_regions(...)", f"regions[{position}]", region, RegionSpec)
        if not 0 <= region.material < len(materials):
            raise UnexpectedValueException(parse_message(UNKNOWN_MATERIAL, INDEX=position, MATERIAL=region.material, COUNT=len(materials)))

        lower = np.asarray(region.lower)
        upper = np.asarray(region.upper)
        if np.any(lower < lower_strip - tolerance) or np.any(upper > upper_strip + tolerance) or np.any(lower > upper):
            raise RegionOutsideStripException(parse_message(
                REGION_OUTSIDE,
                LOWER=region.lower,
                UPPER=region.upper,
                STRIP_LOWER=grid.origin,
                STRIP_UPPER=grid.upper
            ))

        inside = np.all((centroids >= lower) & (centroids <= upper), axis=1)
        index[inside] = region.material

    return grid.with_materials(index, materials)
