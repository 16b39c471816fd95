"""Oriented graphs, tessellations and tessellation covers.

Convention used throughout the package: an arc ``(u, v)`` means the adjacency
matrix has ``A[u, v] = 1``, i.e. the outer-product term ``|u><v|``.

Built-in families
-----------------
- ``build_oriented_line``: an even cycle of ``2M`` vertices emulating the
  integer window ``[-M, M)``; vertex index of position ``x`` is ``x mod 2M``.
- ``build_oriented_lattice``: a ``2n x 2n`` torus; vertex ``(x, y)`` has
  index ``2n * y + x``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

MAX_TILE_SIZE = 64

__all__ = [
    "InputError",
    "ValidationReport",
    "OrientedGraph",
    "Tile",
    "Tessellation",
    "TessellationCover",
    "LatticeSpec",
    "Family",
    "validate_oriented",
    "validate_tessellation",
    "validate_cover",
    "transpose",
    "build_oriented_line",
    "build_oriented_lattice",
    "line_family",
    "lattice_family",
    "file_family",
    "load_graph_json",
    "dump_graph_json",
]


class InputError(ValueError):
    """Raised when caller-supplied data violates a documented precondition."""


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(self.violations)


@dataclass(frozen=True)
class OrientedGraph:
    vertex_count: int
    arcs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "arcs", tuple((int(u), int(v)) for u, v in self.arcs)
        )
        if self.vertex_count < 0:
            raise InputError("vertex_count must be non-negative")
        for u, v in self.arcs:
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise InputError(
                    f"arc ({u},{v}) out of range for {self.vertex_count} vertices"
                )

    @cached_property
    def arc_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.arcs)

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self.arc_set

    def adjacent(self, u: int, v: int) -> bool:
        """True if ``u`` and ``v`` are joined by an arc in either direction."""
        return (u, v) in self.arc_set or (v, u) in self.arc_set

    def edges(self) -> list[tuple[int, int]]:
        """Underlying undirected edges as sorted pairs, in first-seen order."""
        seen: dict[tuple[int, int], None] = {}
        for u, v in self.arcs:
            if u != v:
                seen.setdefault((min(u, v), max(u, v)), None)
        return list(seen)

    def adjacency_matrix(self) -> np.ndarray:
        A = np.zeros((self.vertex_count, self.vertex_count))
        for u, v in self.arcs:
            A[u, v] = 1.0
        return A


@dataclass(frozen=True)
class Tile:
    vertices: tuple[int, ...]

    def __post_init__(self) -> None:
        verts = tuple(sorted(int(v) for v in self.vertices))
        if not verts:
            raise InputError("a tile must contain at least one vertex")
        if len(set(verts)) != len(verts):
            raise InputError(f"tile {verts} repeats a vertex")
        object.__setattr__(self, "vertices", verts)

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)


@dataclass(frozen=True)
class Tessellation:
    tiles: tuple[Tile, ...]
    name: str = ""

    def __post_init__(self) -> None:
        tiles = tuple(t if isinstance(t, Tile) else Tile(tuple(t)) for t in self.tiles)
        object.__setattr__(self, "tiles", tiles)

    def tile_of(self) -> dict[int, Tile]:
        return {v: tile for tile in self.tiles for v in tile}


@dataclass(frozen=True)
class TessellationCover:
    """Ordered tessellations; the first one listed is applied first.

    ``max_steps`` is the number of steps the host can carry without the
    walk wrapping around (``None`` when no such horizon applies).
    """

    host: OrientedGraph
    tessellations: tuple[Tessellation, ...]
    max_steps: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "tessellations", tuple(self.tessellations))
        for i, tess in enumerate(self.tessellations):
            report = validate_tessellation(self.host, tess)
            if not report.ok:
                label = tess.name or f"#{i}"
                raise InputError(f"tessellation {label} is invalid: {report}")

    def reversed(self) -> TessellationCover:
        return TessellationCover(
            self.host, tuple(reversed(self.tessellations)), self.max_steps
        )

    def on(self, host: OrientedGraph) -> TessellationCover:
        """The same tessellations over another host with the same vertices."""
        return TessellationCover(host, self.tessellations, self.max_steps)


@dataclass(frozen=True)
class LatticeSpec:
    n: int

    def __post_init__(self) -> None:
        if int(self.n) <= 1:
            raise InputError(f"lattice requires n > 1, got n={self.n}")

    @property
    def side(self) -> int:
        return 2 * self.n

    @property
    def vertex_count(self) -> int:
        return self.side**2

    def index(self, x: int, y: int) -> int:
        L = self.side
        return L * (y % L) + (x % L)

    def coords(self, index: int) -> tuple[int, int]:
        return index % self.side, index // self.side


# -- validation ---------------------------------------------------------------


def validate_oriented(graph: OrientedGraph) -> ValidationReport:
    violations: list[str] = []
    seen: set[tuple[int, int]] = set()
    for u, v in graph.arcs:
        if u == v:
            violations.append(f"self-loop at {u}")
            continue
        if (u, v) in seen:
            violations.append(f"duplicate arc ({u},{v})")
            continue
        if (v, u) in seen:
            a, b = min(u, v), max(u, v)
            violations.append(f"bidirected pair ({a},{b})")
        seen.add((u, v))
    return ValidationReport(tuple(violations))


def validate_tessellation(graph: OrientedGraph, tess: Tessellation) -> ValidationReport:
    """Check that ``tess`` partitions the vertex set into cliques of ``graph``."""
    N = graph.vertex_count
    violations: list[str] = []
    owner: dict[int, int] = {}
    for i, tile in enumerate(tess.tiles):
        for v in tile:
            if not 0 <= v < N:
                raise InputError(f"tile {i} has vertex {v} outside [0, {N})")
            if v in owner:
                violations.append(f"overlap at vertex {v} (tiles {owner[v]} and {i})")
            else:
                owner[v] = i
        for u, v in combinations(tile.vertices, 2):
            if not graph.adjacent(u, v):
                violations.append(f"tile {i} not a clique: no edge {u}-{v}")
    missing = [v for v in range(N) if v not in owner]
    if missing:
        shown = ", ".join(map(str, missing[:10]))
        more = "" if len(missing) <= 10 else f" (+{len(missing) - 10} more)"
        violations.append(f"vertices not in any tile: {shown}{more}")
    return ValidationReport(tuple(violations))


def uncovered_edges(cover: TessellationCover) -> list[tuple[int, int]]:
    maps = [tess.tile_of() for tess in cover.tessellations]
    out = []
    for u, v in cover.host.edges():
        if not any(m[u] is m[v] for m in maps):
            out.append((u, v))
    return out


def validate_cover(cover: TessellationCover) -> ValidationReport:
    missing = uncovered_edges(cover)
    return ValidationReport(tuple(f"uncovered edge {u}-{v}" for u, v in missing))


def transpose(graph: OrientedGraph) -> OrientedGraph:
    return OrientedGraph(graph.vertex_count, tuple((v, u) for u, v in graph.arcs))


# -- built-in families ----------------------------------------------------------


def _pair_tessellation(pairs: Iterable[tuple[int, int]], name: str) -> Tessellation:
    return Tessellation(tuple(Tile(p) for p in pairs), name=name)


def build_oriented_line(
    variant: str, half_window: int
) -> tuple[OrientedGraph, TessellationCover]:
    """Oriented line on the window ``[-M, M)`` closed into a ``2M``-cycle.

    ``uniform``: arcs ``2x -> 2x+1`` (blue) and ``2x-1 -> 2x`` (red).
    ``alternating``: arcs ``2x -> 2x+1`` (blue) and ``2x -> 2x-1`` (red).
    Cover order is ``[blue, red]``.
    """
    M = int(half_window)
    if M < 2:
        raise InputError(f"half_window must be >= 2, got {half_window}")
    if variant not in ("uniform", "alternating"):
        raise InputError(f"unknown line variant {variant!r}")
    N = 2 * M
    evens = range(0, N, 2)  # index parity equals position parity since N is even
    blue = [(x % N, (x + 1) % N) for x in evens]
    if variant == "uniform":
        red = [((x - 1) % N, x % N) for x in evens]
    else:
        red = [(x % N, (x - 1) % N) for x in evens]
    graph = OrientedGraph(N, tuple(blue + red))
    tessellations = (
        _pair_tessellation(blue, "blue"),
        _pair_tessellation(red, "red"),
    )
    # support grows by at most 2 sites per step on each side
    return graph, TessellationCover(graph, tessellations, max_steps=(M - 2) // 2)


def build_oriented_lattice(spec: LatticeSpec | int) -> tuple[OrientedGraph, TessellationCover]:
    """Oriented torus with tessellations ordered ``[x+, y+, x-, y-]``."""
    if not isinstance(spec, LatticeSpec):
        spec = LatticeSpec(int(spec))
    L = spec.side
    groups: dict[str, list[tuple[int, int]]] = {"x+": [], "y+": [], "x-": [], "y-": []}
    for y in range(L):
        for x in range(L):
            u = spec.index(x, y)
            if (x + y) % 2 == 0:
                groups["x+"].append((u, spec.index(x + 1, y)))
                groups["x-"].append((u, spec.index(x - 1, y)))
            else:
                groups["y+"].append((u, spec.index(x, y + 1)))
                groups["y-"].append((u, spec.index(x, y - 1)))
    arcs = tuple(a for key in ("x+", "y+", "x-", "y-") for a in groups[key])
    graph = OrientedGraph(spec.vertex_count, arcs)
    names = {"x+": "blue", "y+": "green", "x-": "red", "y-": "gray"}
    tessellations = tuple(
        _pair_tessellation(groups[key], f"{key} ({names[key]})")
        for key in ("x+", "y+", "x-", "y-")
    )
    return graph, TessellationCover(graph, tessellations)


@dataclass(frozen=True)
class Family:
    """A host graph with its cover plus the coordinate map used for moments.

    ``kind`` is one of ``line``, ``lattice`` or ``custom``. For lines ``size``
    is the half window ``M``, for lattices it is ``n``.
    """

    kind: str
    name: str
    graph: OrientedGraph
    cover: TessellationCover
    size: int = 0
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def vertex_count(self) -> int:
        return self.graph.vertex_count

    def coordinates(self) -> np.ndarray:
        """Signed coordinates: shape ``(N,)`` for lines, ``(N, 2)`` raw torus
        coordinates for lattices, vertex indices otherwise."""
        N = self.vertex_count
        idx = np.arange(N)
        if self.kind == "line":
            M = self.size
            return np.where(idx < M, idx, idx - N)
        if self.kind == "lattice":
            L = 2 * self.size
            return np.stack([idx % L, idx // L], axis=1)
        return idx

    def vertex(self, coord: int | Sequence[int]) -> int:
        if self.kind == "line":
            return int(coord) % self.vertex_count
        if self.kind == "lattice":
            x, y = coord  # type: ignore[misc]
            return LatticeSpec(self.size).index(int(x), int(y))
        v = int(coord)
        if not 0 <= v < self.vertex_count:
            raise InputError(f"vertex {v} out of range")
        return v


def line_family(variant: str, half_window: int) -> Family:
    graph, cover = build_oriented_line(variant, half_window)
    return Family("line", f"line-{variant}", graph, cover, int(half_window))


def lattice_family(n: int) -> Family:
    graph, cover = build_oriented_lattice(LatticeSpec(int(n)))
    return Family("lattice", "lattice", graph, cover, int(n))


# -- JSON interchange -----------------------------------------------------------


def graph_from_dict(data: dict) -> tuple[OrientedGraph, list[Tessellation]]:
    try:
        N = int(data["vertex_count"])
        arcs = tuple((int(u), int(v)) for u, v in data.get("arcs", []))
        tess_raw = data.get("tessellations", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed graph document: {exc}") from exc
    graph = OrientedGraph(N, arcs)
    tessellations = [
        Tessellation(tuple(Tile(tuple(tile)) for tile in tiles), name=f"#{i}")
        for i, tiles in enumerate(tess_raw)
    ]
    return graph, tessellations


def load_graph_json(path: str | Path) -> tuple[OrientedGraph, list[Tessellation]]:
    """Read ``{"vertex_count", "arcs", "tessellations"}`` from ``path``.

    Tessellations are returned unvalidated so callers can report on them.
    """
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    return graph_from_dict(data)


def graph_to_dict(graph: OrientedGraph, tessellations: Iterable[Tessellation] = ()) -> dict:
    return {
        "vertex_count": graph.vertex_count,
        "arcs": [list(a) for a in graph.arcs],
        "tessellations": [[list(t.vertices) for t in tess.tiles] for tess in tessellations],
    }


def dump_graph_json(
    path: str | Path, graph: OrientedGraph, tessellations: Iterable[Tessellation] = ()
) -> None:
    Path(path).write_text(json.dumps(graph_to_dict(graph, tessellations), indent=1) + "\n")


def file_family(path: str | Path) -> Family:
    graph, tessellations = load_graph_json(path)
    report = validate_oriented(graph)
    if not report.ok:
        raise InputError(f"{path}: {report}")
    if not tessellations:
        raise InputError(f"{path}: no tessellations given")
    return Family("custom", f"file:{path}", graph, TessellationCover(graph, tessellations))
