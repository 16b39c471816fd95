"""Brute-force dense reference for the block-structured operators.

Nothing here shares code with ``operators``: Hamiltonians are assembled over
the full vertex set and exponentiated with a scaled Taylor series, so the
two routes can be checked against each other.
"""

from __future__ import annotations

import math

import numpy as np

from .graph import InputError, OrientedGraph, Tessellation, TessellationCover, Tile
from .operators import WalkParams

ORACLE_MAX_N = 64
TAYLOR_ORDER = 20

__all__ = [
    "dense_hamiltonian",
    "series_expm",
    "dense_step",
    "random_oriented_graph",
    "greedy_matching_cover",
]


def dense_hamiltonian(graph: OrientedGraph, tess: Tessellation, alpha: float) -> np.ndarray:
    N = graph.vertex_count
    owner = np.full(N, -1)
    for i, tile in enumerate(tess.tiles):
        for v in tile:
            if owner[v] >= 0:
                raise InputError(f"vertex {v} lies in two tiles")
            owner[v] = i
    if (owner < 0).any():
        raise InputError("tessellation does not cover every vertex")
    H = np.zeros((N, N), dtype=np.complex128)
    for u, v in graph.arcs:
        if owner[u] == owner[v]:
            H[u, v] += np.exp(1j * alpha)
            H[v, u] += np.exp(-1j * alpha)
    return H


def series_expm(X: np.ndarray) -> np.ndarray:
    """``exp(X)`` for anti-Hermitian ``X = i theta H`` by scaling and squaring.

    ``X`` is halved until its induced 1-norm is at most 1/4 (which also bounds
    every entry), summed to order 20, then squared back.
    """
    X = np.asarray(X, dtype=np.complex128)
    N = X.shape[0]
    if X.shape != (N, N) or N > ORACLE_MAX_N:
        raise InputError(f"series_expm takes a square matrix with N <= {ORACLE_MAX_N}")
    if np.abs(X + X.conj().T).max() > 1e-12:
        raise InputError("series_expm expects i * (Hermitian matrix)")
    norm = np.abs(X).sum(axis=0).max()
    s = 0
    while norm / 2**s > 0.25:
        s += 1
    Y = X / 2**s
    term = np.eye(N, dtype=np.complex128)
    total = term.copy()
    for m in range(1, TAYLOR_ORDER + 1):
        term = term @ Y / m
        total = total + term
    for _ in range(s):
        total = total @ total
    return total


def dense_step(cover: TessellationCover, params: WalkParams) -> np.ndarray:
    N = cover.host.vertex_count
    if N > ORACLE_MAX_N:
        raise InputError(f"dense oracle limited to N <= {ORACLE_MAX_N}, got {N}")
    U = np.eye(N, dtype=np.complex128)
    for tess in cover.tessellations:
        H = dense_hamiltonian(cover.host, tess, params.alpha)
        U = series_expm(1j * params.theta * H) @ U
    return U


def random_oriented_graph(rng: np.random.Generator, n: int, p: float = 0.4) -> OrientedGraph:
    """Erdos-Renyi edges kept with probability ``p``, each oriented by a fair coin."""
    arcs = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                arcs.append((u, v) if rng.random() < 0.5 else (v, u))
    return OrientedGraph(n, tuple(arcs))


def greedy_matching_cover(graph: OrientedGraph, rng: np.random.Generator | None = None
                          ) -> TessellationCover:
    """Cover built from greedy maximal matchings over still-uncovered edges.

    Every edge ends up in some pair tile; unmatched vertices become singletons.
    """
    remaining = graph.edges()
    if rng is not None:
        remaining = [remaining[i] for i in rng.permutation(len(remaining))]
    tessellations = []
    while remaining or not tessellations:
        used: set[int] = set()
        tiles, rest = [], []
        for u, v in remaining:
            if u in used or v in used:
                rest.append((u, v))
            else:
                used.update((u, v))
                tiles.append(Tile((u, v)))
        tiles += [Tile((v,)) for v in range(graph.vertex_count) if v not in used]
        tessellations.append(Tessellation(tuple(tiles), name=f"matching-{len(tessellations)}"))
        remaining = rest
    return TessellationCover(graph, tuple(tessellations))


def unitarity_error(U: np.ndarray) -> float:
    return float(np.abs(U.conj().T @ U - np.eye(U.shape[0])).max())


def block_vs_dense_gap(cover: TessellationCover, params: WalkParams) -> float:
    """Max-norm gap between the production step matrix and ``dense_step``."""
    from .operators import evolution_step_plan, plan_matrix

    prod = plan_matrix(evolution_step_plan(cover, params), cover.host.vertex_count)
    return float(np.abs(prod - dense_step(cover, params)).max())


def compare_trials(seed: int, trials: int) -> list[tuple[str, float]]:
    """Oracle agreement on seeded random graphs plus the built-in families.

    Each random trial draws a graph with 2..12 vertices; every case is
    evaluated at 5 random ``(alpha, theta)`` and reports its worst gap.
    """
    from .graph import build_oriented_lattice, build_oriented_line

    if trials < 1:
        raise InputError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    cases: list[tuple[str, TessellationCover]] = []
    for i in range(trials):
        N = int(rng.integers(2, 13))
        graph = random_oriented_graph(rng, N)
        cases.append((f"random-{i} (N={N})", greedy_matching_cover(graph, rng)))
    cases.append(("line-uniform M=4", build_oriented_line("uniform", 4)[1]))
    cases.append(("line-alternating M=4", build_oriented_line("alternating", 4)[1]))
    cases.append(("lattice n=2", build_oriented_lattice(2)[1]))
    out = []
    for label, cover in cases:
        worst = 0.0
        for _ in range(5):
            params = WalkParams(float(rng.uniform(0, 2 * math.pi)), float(rng.uniform(0, math.pi)))
            worst = max(worst, block_vs_dense_gap(cover, params))
        out.append((label, worst))
    return out
