"""Per-tessellation Hamiltonians and local unitaries.

For a tessellation with tiles ``T`` the Hamiltonian is block diagonal,
``H = e^{ia} A_T + e^{-ia} A_T^T``, and so is ``U = exp(i theta H)``. Blocks are
exponentiated through a Hermitian eigendecomposition, grouped by tile size so
the whole tessellation is handled with a few batched ``eigh`` calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .graph import (
    MAX_TILE_SIZE,
    InputError,
    OrientedGraph,
    Tessellation,
    TessellationCover,
    Tile,
)

UNITARY_TOL = 1e-12

__all__ = [
    "WalkParams",
    "HamiltonianBlock",
    "LocalUnitary",
    "hamiltonian_block",
    "local_unitary",
    "involutory_hamiltonian",
    "evolution_step_plan",
    "inverse_step_plan",
    "plan_matrix",
]


@dataclass(frozen=True)
class WalkParams:
    """Orientation phase ``alpha`` and hopping angle ``theta`` (radians, unreduced)."""

    alpha: float
    theta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and math.isfinite(self.theta)):
            raise InputError(f"walk parameters must be finite: {self}")

    @property
    def z(self) -> complex:
        """The complex weight ``theta * e^{i alpha}``."""
        return self.theta * complex(math.cos(self.alpha), math.sin(self.alpha))


@dataclass(frozen=True)
class HamiltonianBlock:
    tile: Tile
    matrix: np.ndarray


def _check_tile(graph: OrientedGraph, tile: Tile) -> None:
    if len(tile) > MAX_TILE_SIZE:
        raise InputError(f"tile of size {len(tile)} exceeds the cap of {MAX_TILE_SIZE}")
    for i, u in enumerate(tile.vertices):
        for v in tile.vertices[i + 1 :]:
            if not graph.adjacent(u, v):
                raise InputError(f"tile {tile.vertices} is not a clique: no edge {u}-{v}")


def _block_matrix(graph: OrientedGraph, verts: tuple[int, ...], alpha: float) -> np.ndarray:
    d = len(verts)
    fwd = complex(math.cos(alpha), math.sin(alpha))
    bwd = fwd.conjugate()
    H = np.zeros((d, d), dtype=np.complex128)
    for i in range(d):
        for j in range(i + 1, d):
            if graph.has_arc(verts[i], verts[j]):
                H[i, j], H[j, i] = fwd, bwd
            elif graph.has_arc(verts[j], verts[i]):
                H[i, j], H[j, i] = bwd, fwd
    return H


def hamiltonian_block(graph: OrientedGraph, tile: Tile, alpha: float) -> HamiltonianBlock:
    """Hamiltonian restricted to ``tile``, rows ordered by ascending vertex.

    Entry ``(i, j)`` is ``e^{i alpha}`` for an arc ``tile[i] -> tile[j]`` and
    ``e^{-i alpha}`` for the reverse arc.
    """
    if not isinstance(tile, Tile):
        tile = Tile(tuple(tile))
    _check_tile(graph, tile)
    return HamiltonianBlock(tile, _block_matrix(graph, tile.vertices, alpha))


def _expm_hermitian(H: np.ndarray, theta: float) -> np.ndarray:
    """``exp(i theta H)`` for a stack of Hermitian matrices (shape ``(..., d, d)``)."""
    if theta == 0:
        return np.broadcast_to(np.eye(H.shape[-1], dtype=np.complex128), H.shape).copy()
    w, V = np.linalg.eigh(H)
    phases = np.exp(1j * theta * w)
    return (V * phases[..., None, :]) @ np.conj(np.swapaxes(V, -1, -2))


class LocalUnitary:
    """``exp(i theta H_k)`` for one tessellation, stored as per-tile blocks.

    Tiles of equal size are grouped: ``groups`` holds ``(index, blocks)``
    pairs with ``index`` of shape ``(T, d)`` and ``blocks`` of shape
    ``(T, d, d)``. Singleton tiles act as the identity and are not stored.
    """

    def __init__(self, tessellation: Tessellation, dimension: int,
                 groups: list[tuple[np.ndarray, np.ndarray]]):
        self.tessellation = tessellation
        self.dimension = dimension
        self.groups = groups

    @property
    def blocks(self) -> list[np.ndarray]:
        """One block per tile, in tessellation order (singletons give ``[[1]]``)."""
        lookup = {}
        for index, blocks in self.groups:
            for row, block in zip(index, blocks):
                lookup[int(row[0])] = block
        one = np.ones((1, 1), dtype=np.complex128)
        return [lookup.get(t.vertices[0], one) if len(t) > 1 else one
                for t in self.tessellation.tiles]

    def apply(self, psi: np.ndarray) -> np.ndarray:
        if psi.shape != (self.dimension,):
            raise InputError(
                f"state has shape {psi.shape}, operator acts on {self.dimension} vertices"
            )
        out = psi.copy()
        for index, blocks in self.groups:
            out[index] = np.einsum("tij,tj->ti", blocks, psi[index])
        return out

    def to_dense(self) -> np.ndarray:
        U = np.eye(self.dimension, dtype=np.complex128)
        for index, blocks in self.groups:
            for rows, block in zip(index, blocks):
                U[np.ix_(rows, rows)] = block
        return U

    @cached_property
    def unitarity_error(self) -> float:
        err = 0.0
        for _, blocks in self.groups:
            d = blocks.shape[-1]
            gram = np.conj(np.swapaxes(blocks, -1, -2)) @ blocks
            err = max(err, float(np.abs(gram - np.eye(d)).max()))
        return err


def local_unitary(graph: OrientedGraph, tess: Tessellation, params: WalkParams) -> LocalUnitary:
    by_size: dict[int, list[Tile]] = {}
    for tile in tess.tiles:
        if len(tile) > 1:
            by_size.setdefault(len(tile), []).append(tile)
    groups = []
    for d in sorted(by_size):
        tiles = by_size[d]
        for tile in tiles:
            _check_tile(graph, tile)
        index = np.array([t.vertices for t in tiles], dtype=np.intp)
        H = np.stack([_block_matrix(graph, t.vertices, params.alpha) for t in tiles])
        groups.append((index, _expm_hermitian(H, params.theta)))
    op = LocalUnitary(tess, graph.vertex_count, groups)
    if op.unitarity_error > UNITARY_TOL:
        raise RuntimeError(
            f"local unitary for {tess.name or 'tessellation'} failed the unitarity "
            f"check: {op.unitarity_error:.3e} > {UNITARY_TOL}"
        )
    return op


def involutory_hamiltonian(tile: Tile | int) -> np.ndarray:
    """``a I + b A`` over a ``d``-clique with ``a = 2/d - 1`` and ``b = 2/d``, squaring to I."""
    d = len(tile) if isinstance(tile, Tile) else int(tile)
    if d < 1:
        raise InputError("tile size must be at least 1")
    A = np.ones((d, d)) - np.eye(d)
    return (2.0 / d - 1.0) * np.eye(d) + (2.0 / d) * A


def evolution_step_plan(cover: TessellationCover, params: WalkParams) -> list[LocalUnitary]:
    """Local unitaries in application order (first listed = first applied)."""
    return [local_unitary(cover.host, tess, params) for tess in cover.tessellations]


def inverse_step_plan(cover: TessellationCover, params: WalkParams) -> list[LocalUnitary]:
    """Plan that undoes one step: reversed order and negated ``theta``."""
    back = WalkParams(params.alpha, -params.theta)
    return evolution_step_plan(cover.reversed(), back)


def plan_matrix(plan: list[LocalUnitary], dimension: int) -> np.ndarray:
    U = np.eye(dimension, dtype=np.complex128)
    for op in plan:
        U = op.to_dense() @ U
    return U
