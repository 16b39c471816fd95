"""Moments of walk distributions and their convergence to the asymptotic rates."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .graph import Family, InputError, line_family
from .operators import WalkParams, evolution_step_plan
from .simulator import NORM_TOL, line_initial_state, step

__all__ = [
    "LineStats",
    "LatticeStats",
    "moments_1d",
    "moments_2d",
    "family_stats",
    "ConvergenceRow",
    "convergence_report",
]


@dataclass(frozen=True)
class LineStats:
    mean_x: float
    mean_x2: float
    sigma: float

    def as_row(self) -> dict:
        return {"mean_x": self.mean_x, "x2": self.mean_x2, "sigma": self.sigma}


@dataclass(frozen=True)
class LatticeStats:
    mean_x: float
    mean_y: float
    mu: float
    mean_x2: float
    mean_y2: float
    sigma_x: float
    sigma_y: float
    sigma: float

    def as_row(self) -> dict:
        return {
            "mean_x": self.mean_x,
            "mean_y": self.mean_y,
            "mu": self.mu,
            "x2": self.mean_x2 + self.mean_y2,
            "sigma": self.sigma,
            "sigma_x": self.sigma_x,
            "sigma_y": self.sigma_y,
        }


def _check_dist(dist: np.ndarray) -> np.ndarray:
    dist = np.asarray(dist, dtype=float)
    total = dist.sum()
    if abs(total - 1.0) > NORM_TOL:
        raise InputError(f"distribution sums to {total!r}, expected 1")
    return dist


def _spread(mean: float, second: float) -> float:
    # rounding can push the variance of a point mass slightly below zero
    return math.sqrt(max(second - mean * mean, 0.0))


def moments_1d(dist: np.ndarray, coords: np.ndarray) -> LineStats:
    dist = _check_dist(dist)
    x = np.asarray(coords, dtype=float)
    if x.shape != dist.shape:
        raise InputError("coordinate map does not match the distribution")
    mean = float(x @ dist)
    second = float((x * x) @ dist)
    return LineStats(mean, second, _spread(mean, second))


def moments_2d(
    dist: np.ndarray,
    n: int,
    origin: tuple[int, int] = (0, 0),
    *,
    steps: int | None = None,
    allow_wrap: bool = False,
) -> LatticeStats:
    """Moments on the ``2n x 2n`` torus, displacements unwrapped into ``(-n, n]``.

    The unwrap is only unambiguous while ``steps < n / 2``; beyond that an
    ``InputError`` is raised unless ``allow_wrap`` is set.
    """
    dist = _check_dist(dist)
    L = 2 * n
    if dist.shape != (L * L,):
        raise InputError(f"distribution has shape {dist.shape}, lattice has {L * L} vertices")
    if steps is not None and 2 * steps >= n and not allow_wrap:
        raise InputError(
            f"{steps} steps on n={n} make the torus unwrap ambiguous (need steps < n/2, "
            f"i.e. n >= {2 * steps + 1})"
        )
    grid = dist.reshape(L, L)  # grid[y, x]
    d = (np.arange(L)[:, None] - np.array(origin)[None, :]) % L
    d = np.where(d > n, d - L, d).astype(float)
    dx, dy = d[:, 0], d[:, 1]
    px, py = grid.sum(axis=0), grid.sum(axis=1)
    mx, my = float(dx @ px), float(dy @ py)
    x2, y2 = float((dx * dx) @ px), float((dy * dy) @ py)
    sx, sy = _spread(mx, x2), _spread(my, y2)
    return LatticeStats(mx, my, math.hypot(mx, my), x2, y2, sx, sy, math.hypot(sx, sy))


def family_stats(family: Family, dist: np.ndarray, steps: int | None = None, *,
                 allow_wrap: bool = False) -> LineStats | LatticeStats:
    if family.kind == "lattice":
        return moments_2d(dist, family.size, steps=steps, allow_wrap=allow_wrap)
    return moments_1d(dist, family.coordinates())


@dataclass(frozen=True)
class ConvergenceRow:
    t: int
    mean_rate: float
    asymptotic_mean_rate: float
    second_moment_rate: float
    asymptotic_second_moment_rate: float

    @property
    def gap(self) -> float:
        return abs(self.mean_rate - self.asymptotic_mean_rate)

    @property
    def second_moment_gap(self) -> float:
        return abs(self.second_moment_rate - self.asymptotic_second_moment_rate)

    def as_row(self) -> dict:
        row = asdict(self)
        row["gap"] = self.gap
        row["second_moment_gap"] = self.second_moment_gap
        return row


def convergence_report(
    params: WalkParams,
    initial: tuple[complex, complex],
    t_list: Sequence[int],
    model: str = "line1",
) -> list[ConvergenceRow]:
    """Simulated ``<x>/t`` and ``<x^2>/t^2`` against their large-``t`` limits.

    One walk is run up to ``max(t_list)`` on a window wide enough to avoid
    wraparound, and sampled at each requested ``t``.
    """
    from .analytics import asymptotic_mean_line1, asymptotic_second_moment

    if model != "line1":
        raise InputError(f"asymptotic rates are only available for line1, not {model!r}")
    ts = [int(t) for t in t_list]
    if not ts or any(t <= 0 for t in ts) or any(b <= a for a, b in zip(ts, ts[1:])):
        raise InputError("t-list must be a non-empty increasing list of positive integers")
    a, b = initial
    norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
    a, b = a / norm, b / norm
    family = line_family("uniform", 2 * ts[-1] + 2)
    psi = line_initial_state(family, a, b)
    plan = evolution_step_plan(family.cover, params)
    x = family.coordinates().astype(float)
    mean_limit = asymptotic_mean_line1(a, b, params)
    second_limit = asymptotic_second_moment(params)
    rows = []
    wanted = set(ts)
    for t in range(1, ts[-1] + 1):
        psi = step(plan, psi)
        if t in wanted:
            stats = moments_1d(np.abs(psi) ** 2, x)
            rows.append(ConvergenceRow(t, stats.mean_x / t, mean_limit,
                                       stats.mean_x2 / t**2, second_limit))
    return rows
