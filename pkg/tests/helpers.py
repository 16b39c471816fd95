"""Shared builders for the test modules."""

import math

import numpy as np

from oqw.graph import OrientedGraph, Tessellation, TessellationCover, Tile
from oqw.operators import WalkParams
from oqw.oracle import greedy_matching_cover, random_oriented_graph

GOLDEN = (math.sqrt(5) - 1) / 2


def random_params(rng, n=1):
    out = [WalkParams(float(rng.uniform(0, 2 * math.pi)), float(rng.uniform(0, math.pi)))
           for _ in range(n)]
    return out if n > 1 else out[0]


def random_covers(seed, count, max_n=12):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(2, max_n + 1))
        yield greedy_matching_cover(random_oriented_graph(rng, n), rng)


def tournament_cover(d, seed=0):
    """A random tournament on ``d`` vertices: one tile holding everything."""
    rng = np.random.default_rng(seed)
    arcs = [(u, v) if rng.random() < 0.5 else (v, u) for u in range(d) for v in range(u + 1, d)]
    g = OrientedGraph(d, tuple(arcs))
    return TessellationCover(g, (Tessellation((Tile(tuple(range(d))),)),))


def clique_mix_cover(seed=0):
    """Two tessellations on 7 vertices with tiles of sizes 3, 4, 2, 1."""
    rng = np.random.default_rng(seed)
    tiles_a = [(0, 1, 2), (3, 4, 5, 6)]
    tiles_b = [(2, 3), (0, 4, 6), (1,), (5,)]
    edges = set()
    for t in tiles_a + tiles_b:
        for i, u in enumerate(t):
            for v in t[i + 1:]:
                edges.add((min(u, v), max(u, v)))
    arcs = tuple((u, v) if rng.random() < 0.5 else (v, u) for u, v in sorted(edges))
    g = OrientedGraph(7, arcs)
    return TessellationCover(g, (Tessellation(tuple(Tile(t) for t in tiles_a)),
                                 Tessellation(tuple(Tile(t) for t in tiles_b))))
