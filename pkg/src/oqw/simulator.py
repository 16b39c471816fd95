"""State-vector evolution, probability distributions and parameter sweeps."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .graph import Family, InputError, TessellationCover
from .operators import LocalUnitary, WalkParams, evolution_step_plan

NORM_TOL = 1e-10

__all__ = [
    "RunResult",
    "normalized",
    "basis_state",
    "line_initial_state",
    "plus_state",
    "corner4_state",
    "apply_local",
    "step",
    "evolve",
    "distribution",
    "sweep",
    "thread_count",
]


def _check_norm(psi: np.ndarray, what: str = "state") -> None:
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > NORM_TOL:
        raise InputError(f"{what} is not normalized (norm {norm!r})")


def normalized(amplitudes) -> np.ndarray:
    psi = np.asarray(amplitudes, dtype=np.complex128)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise InputError("state has zero norm")
    return psi / norm


def basis_state(N: int, v: int) -> np.ndarray:
    if not 0 <= v < N:
        raise InputError(f"vertex {v} out of range [0, {N})")
    psi = np.zeros(N, dtype=np.complex128)
    psi[v] = 1.0
    return psi


def line_initial_state(family: Family, a: complex, b: complex) -> np.ndarray:
    """``a|0> + b|1>`` on a line family, normalized. Vertex 0 is even."""
    psi = np.zeros(family.vertex_count, dtype=np.complex128)
    psi[family.vertex(0)] = a
    psi[family.vertex(1)] = b
    return normalized(psi)


def plus_state(family: Family) -> np.ndarray:
    return line_initial_state(family, 1.0, 1.0)


def corner4_state(family: Family) -> np.ndarray:
    """Uniform superposition over ``(0,0), (1,0), (0,1), (1,1)``."""
    psi = np.zeros(family.vertex_count, dtype=np.complex128)
    for xy in ((0, 0), (1, 0), (0, 1), (1, 1)):
        psi[family.vertex(xy)] = 0.5
    return psi


def apply_local(u: LocalUnitary, psi: np.ndarray) -> np.ndarray:
    return u.apply(np.asarray(psi, dtype=np.complex128))


def step(plan: Sequence[LocalUnitary], psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128)
    for op in plan:
        psi = op.apply(psi)
    return psi


def distribution(psi: np.ndarray) -> np.ndarray:
    probs = np.abs(psi) ** 2
    total = probs.sum()
    if abs(total - 1.0) > NORM_TOL:
        raise InputError(f"distribution sums to {total!r}, state is not normalized")
    return probs


@dataclass
class RunResult:
    steps: int
    final_state: np.ndarray
    params: WalkParams
    distributions: np.ndarray | None = None

    @property
    def final_distribution(self) -> np.ndarray:
        return distribution(self.final_state)


def evolve(
    cover: TessellationCover,
    params: WalkParams,
    psi0: np.ndarray,
    steps: int,
    *,
    record: bool = False,
    plan: Sequence[LocalUnitary] | None = None,
) -> RunResult:
    """Apply the step operator ``steps`` times to ``psi0``.

    With ``record`` the distributions for ``t = 0..steps`` are kept as an
    array of shape ``(steps + 1, N)``.
    """
    if steps < 0:
        raise InputError(f"steps must be non-negative, got {steps}")
    if cover.max_steps is not None and steps > cover.max_steps:
        raise InputError(
            f"{steps} steps would wrap around the line window "
            f"(max {cover.max_steps}); use a half window of at least {2 * steps + 2}"
        )
    psi = np.asarray(psi0, dtype=np.complex128)
    if psi.shape != (cover.host.vertex_count,):
        raise InputError(
            f"initial state has shape {psi.shape}, graph has {cover.host.vertex_count} vertices"
        )
    _check_norm(psi, "initial state")
    if plan is None:
        plan = evolution_step_plan(cover, params)
    history = np.empty((steps + 1, psi.size)) if record else None
    if history is not None:
        history[0] = np.abs(psi) ** 2
    for t in range(1, steps + 1):
        psi = step(plan, psi)
        if history is not None:
            history[t] = np.abs(psi) ** 2
    _check_norm(psi, f"state after {steps} steps")
    return RunResult(steps, psi, params, history)


def thread_count() -> int:
    """Worker count from ``OQW_THREADS`` (0 or unset means one per CPU)."""
    raw = os.environ.get("OQW_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError as exc:
        raise InputError(f"OQW_THREADS must be an integer, got {raw!r}") from exc
    if n < 0:
        raise InputError("OQW_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def sweep(
    family: Family,
    grid: Sequence[WalkParams],
    psi0: np.ndarray,
    steps: int,
    stats: Callable[[Family, np.ndarray, int], object],
    *,
    workers: int | None = None,
) -> list[tuple[WalkParams, object]]:
    """Run ``evolve`` at each grid point and reduce the final distribution.

    Rows come back in grid order whatever the completion order.
    """
    if not grid:
        raise InputError("parameter grid is empty")

    def run(params: WalkParams):
        result = evolve(family.cover, params, psi0, steps)
        return params, stats(family, result.final_distribution, steps)

    workers = workers or thread_count()
    if workers == 1 or len(grid) == 1:
        return [run(p) for p in grid]
    with ThreadPoolExecutor(max_workers=min(workers, len(grid))) as pool:
        return list(pool.map(run, grid))
