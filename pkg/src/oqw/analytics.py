r"""Momentum-space description of the oriented line and lattice walks.

On the line the pair of Fourier vectors

    |psi_k^0> = sum_x e^{-2xki} |2x>,    |psi_k^1> = sum_x e^{-(2x+1)ki} |2x+1>

spans a plane invariant under the step operator; the restriction is the
2x2 reduced operator ``u(k)`` with eigenvalues ``e^{+-i lambda}``. On a
finite ``2M``-cycle the momenta are quantized, ``k = pi j / M``, and the
vectors carry a ``1/sqrt(M)`` normalization.

For the ``2n x 2n`` torus the pair lives on the two sublattices with
phases ``e^{-i(x k~ + y l~)}``, ``k~ = pi k / n``. Component 0 is the
sublattice with ``x + y`` odd (the sites the ``x`` tessellations hop
*from* under the transpose), which makes the reduced blocks

    a_x^{+-} = [[0, 0], [e^{-+ik~}, 0]],   a_y^{+-} = [[0, e^{-+il~}], [0, 0]]

and the reduced step ``u = -u_y^- u_x^- u_y^+ u_x^+`` up to the global sign.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, schur
from scipy.optimize import minimize_scalar

from .graph import InputError
from .operators import WalkParams

DEGENERATE_TOL = 1e-10
GOLDEN_RATIO_CONJ = (math.sqrt(5.0) - 1.0) / 2.0

__all__ = [
    "DegenerateSpectrumError",
    "Eigenpair",
    "reduced_adjacency_line1",
    "reduced_adjacency_line2",
    "reduced_u_line1",
    "reduced_u_line2",
    "reduced_u_line_product",
    "reduced_u_lattice",
    "dispersion",
    "eigenpair",
    "line_fourier_pair",
    "lattice_fourier_pair",
    "full_eigenvector",
    "asymptotic_mean_line1",
    "asymptotic_second_moment",
    "optimize_line_transport",
    "phase_aligned_distance",
]


class DegenerateSpectrumError(InputError):
    """The reduced operator has a repeated eigenvalue at this point."""


# -- reduced operators ----------------------------------------------------------


def reduced_adjacency_line1(k: float, sign: int) -> np.ndarray:
    """``a^+`` has ``e^{-ik}`` at (0, 1); ``a^-`` has it at (1, 0)."""
    a = np.zeros((2, 2), dtype=np.complex128)
    if sign > 0:
        a[0, 1] = cmath.exp(-1j * k)
    else:
        a[1, 0] = cmath.exp(-1j * k)
    return a


def reduced_adjacency_line2(k: float, sign: int) -> np.ndarray:
    """``a^{+-}`` has ``e^{-+ik}`` at (0, 1)."""
    a = np.zeros((2, 2), dtype=np.complex128)
    a[0, 1] = cmath.exp(-1j * k if sign > 0 else 1j * k)
    return a


def _reduced_local(a: np.ndarray, params: WalkParams) -> np.ndarray:
    h = cmath.exp(1j * params.alpha) * a + cmath.exp(-1j * params.alpha) * a.conj().T
    return expm(1j * params.theta * h)


def reduced_u_line_product(model: str, k: float, params: WalkParams) -> np.ndarray:
    """``u^- u^+`` built by exponentiating the reduced blocks."""
    adj = {"line1": reduced_adjacency_line1, "line2": reduced_adjacency_line2}[model]
    return _reduced_local(adj(k, -1), params) @ _reduced_local(adj(k, +1), params)


def reduced_u_line1(k: float, params: WalkParams) -> np.ndarray:
    c, s = math.cos(params.theta), math.sin(params.theta)
    q = k - params.alpha
    off = 1j * math.sin(2 * params.theta) * math.cos(q)
    return np.array(
        [
            [c * c - s * s * cmath.exp(2j * q), off],
            [off, c * c - s * s * cmath.exp(-2j * q)],
        ]
    )


def reduced_u_line2(k: float, params: WalkParams) -> np.ndarray:
    c, s = math.cos(params.theta), math.sin(params.theta)
    off = 1j * math.sin(2 * params.theta) * math.cos(k)
    phase = cmath.exp(1j * params.alpha)
    return np.array(
        [
            [c * c - s * s * cmath.exp(2j * k), off * phase],
            [off / phase, c * c - s * s * cmath.exp(-2j * k)],
        ]
    )


def reduced_u_lattice(k: int, l: int, n: int, params: WalkParams) -> np.ndarray:
    """``-u_y^- u_x^- u_y^+ u_x^+`` at the quantized momentum ``(k, l)``."""
    if not (0 <= k < 2 * n and 0 <= l < 2 * n):
        raise InputError(f"momentum ({k}, {l}) outside 0..{2 * n - 1}")
    kt, lt = math.pi * k / n, math.pi * l / n

    def ax(sign):
        a = np.zeros((2, 2), dtype=np.complex128)
        a[1, 0] = cmath.exp(-1j * sign * kt)
        return a

    def ay(sign):
        a = np.zeros((2, 2), dtype=np.complex128)
        a[0, 1] = cmath.exp(-1j * sign * lt)
        return a

    u = _reduced_local(ax(+1), params)
    u = _reduced_local(ay(+1), params) @ u
    u = _reduced_local(ax(-1), params) @ u
    u = _reduced_local(ay(-1), params) @ u
    return -u


def _reduced(model: str, k: float, params: WalkParams) -> np.ndarray:
    if model == "line1":
        return reduced_u_line1(k, params)
    if model == "line2":
        return reduced_u_line2(k, params)
    raise InputError(f"unknown model {model!r}; expected line1 or line2")


def _cos_lambda(model: str, k: float, params: WalkParams) -> float:
    q = k - params.alpha if model == "line1" else k
    c, s = math.cos(params.theta), math.sin(params.theta)
    return c * c - s * s * math.cos(2 * q)


def dispersion(model: str, k: float, params: WalkParams) -> float:
    """Principal ``lambda`` in ``[0, pi]``."""
    if model not in ("line1", "line2"):
        raise InputError(f"unknown model {model!r}; expected line1 or line2")
    rhs = _cos_lambda(model, k, params)
    assert abs(rhs) <= 1.0 + 1e-12, rhs
    return math.acos(min(1.0, max(-1.0, rhs)))


# -- eigenvectors ---------------------------------------------------------------


@dataclass(frozen=True)
class Eigenpair:
    lam: float
    plus_vector: np.ndarray
    minus_vector: np.ndarray
    c_plus: float
    c_minus: float
    degenerate: bool = False


def _numeric_eigenbasis(u: np.ndarray, lam: float) -> tuple[np.ndarray, np.ndarray]:
    # complex Schur form of a normal matrix is diagonal, so Z is orthonormal
    T, Z = schur(u, output="complex")
    target = cmath.exp(1j * lam)
    i = int(np.argmin(np.abs(np.diag(T) - target)))
    return Z[:, i], Z[:, 1 - i]


def eigenpair(model: str, k: float, params: WalkParams) -> Eigenpair:
    """Closed-form eigenvectors ``v^{+-}`` with ``u v^{+-} = e^{+-i lambda} v^{+-}``.

    Where a normalizer ``C^{+-}`` vanishes (e.g. ``theta = 0``) the result is
    flagged ``degenerate`` and carries a numerical orthonormal eigenbasis.
    """
    lam = dispersion(model, k, params)
    s = math.sin(params.theta)
    q = k - params.alpha if model == "line1" else k
    top: complex = math.sin(2 * params.theta) * math.cos(q)
    if model == "line2":
        top *= cmath.exp(1j * params.alpha)
    skew = s * s * math.sin(2 * q)
    sl = math.sin(lam)
    c_plus = 2 * sl * (sl + skew)
    c_minus = 2 * sl * (sl - skew)
    if min(c_plus, c_minus) <= DEGENERATE_TOL:
        plus, minus = _numeric_eigenbasis(_reduced(model, k, params), lam)
        return Eigenpair(lam, plus, minus, c_plus, c_minus, degenerate=True)
    plus = np.array([top, skew + sl], dtype=np.complex128)
    minus = np.array([top, skew - sl], dtype=np.complex128)
    # |v|^2 equals C analytically; the direct norm avoids cancellation near sin(lambda) = 0
    plus /= np.linalg.norm(plus)
    minus /= np.linalg.norm(minus)
    return Eigenpair(lam, plus, minus, c_plus, c_minus)


def line_fourier_pair(half_window: int, k: float) -> np.ndarray:
    """``(2M, 2)`` matrix whose columns are the normalized ``psi_k^0, psi_k^1``."""
    M = int(half_window)
    idx = np.arange(2 * M)
    x = np.where(idx < M, idx, idx - 2 * M)
    phase = np.exp(-1j * k * x) / math.sqrt(M)
    even = (x % 2) == 0
    return np.stack([np.where(even, phase, 0), np.where(even, 0, phase)], axis=1)


def lattice_fourier_pair(n: int, k: int, l: int) -> np.ndarray:
    """``((2n)^2, 2)`` orthonormal pair; column 0 on the ``x + y`` odd sublattice."""
    L = 2 * n
    idx = np.arange(L * L)
    x, y = idx % L, idx // L
    phase = np.exp(-1j * math.pi * (k * x + l * y) / n) / (math.sqrt(2) * n)
    odd = ((x + y) % 2) == 1
    return np.stack([np.where(odd, phase, 0), np.where(odd, 0, phase)], axis=1)


def full_eigenvector(half_window: int, k: float, sign: int, params: WalkParams) -> np.ndarray:
    """Eigenvector of the full line1 step operator on the ``2M``-cycle.

    ``k`` must be a multiple of ``pi / M``.
    """
    M = int(half_window)
    j = k * M / math.pi
    if abs(j - round(j)) > 1e-9:
        raise InputError(f"k={k!r} is not quantized on the {2 * M}-cycle (k = pi j / {M})")
    pair = eigenpair("line1", k, params)
    if pair.degenerate:
        raise DegenerateSpectrumError(
            f"reduced operator is degenerate at k={k!r}, {params}; any basis of the plane works"
        )
    v = pair.plus_vector if sign > 0 else pair.minus_vector
    return line_fourier_pair(M, k) @ v


# -- asymptotic transport ---------------------------------------------------------


def _check_amplitudes(a: complex, b: complex) -> None:
    total = abs(a) ** 2 + abs(b) ** 2
    if abs(total - 1.0) > 1e-10:
        raise InputError(f"|a|^2 + |b|^2 = {total!r}, expected 1")


def asymptotic_mean_line1(a: complex, b: complex, params: WalkParams) -> float:
    """Large-``t`` limit of ``<x>/t`` on the uniform line from ``a|0> + b|1>``.

    ``2(|a|^2 - |b|^2)(1 - |cos theta|) - i sin(2 theta)(conj(a) b e^{ia}
    - a conj(b) e^{-ia}) / (1 + |cos theta|)``, signed for arcs pointing
    towards increasing ``x``.
    """
    _check_amplitudes(a, b)
    a, b = complex(a), complex(b)
    c = abs(math.cos(params.theta))
    z = a.conjugate() * b * cmath.exp(1j * params.alpha)
    cross = 1j * math.sin(2 * params.theta) * (z - z.conjugate()) / (1 + c)
    assert abs(cross.imag) <= 1e-14, cross
    return 2 * (abs(a) ** 2 - abs(b) ** 2) * (1 - c) - cross.real


def asymptotic_second_moment(params: WalkParams) -> float:
    """Large-``t`` limit of ``<x^2>/t^2``; independent of ``alpha``."""
    return 4 * (1 - abs(math.cos(params.theta)))


def optimize_line_transport(
    a: complex, b: complex, grid: int = 720, tol: float = 1e-10
) -> tuple[float, float, float]:
    """Maximize ``|asymptotic_mean_line1|`` over ``alpha in [0, 2pi)``, ``theta in [0, pi]``.

    Dense grid search followed by alternating golden-section refinement.
    Returns ``(alpha*, theta*, signed rate)``.
    """
    _check_amplitudes(a, b)

    def objective(alpha: float, theta: float) -> float:
        return -abs(asymptotic_mean_line1(a, b, WalkParams(alpha, theta)))

    alphas = np.arange(grid) * (2 * math.pi / grid)
    thetas = np.linspace(0.0, math.pi, grid)
    # grid stage vectorized; same expression as asymptotic_mean_line1
    A, T = np.meshgrid(alphas, thetas, indexing="ij")
    c = np.abs(np.cos(T))
    z = np.conj(complex(a)) * complex(b) * np.exp(1j * A)
    cross = (1j * np.sin(2 * T) * (z - np.conj(z)) / (1 + c)).real
    values = -np.abs(2 * (abs(a) ** 2 - abs(b) ** 2) * (1 - c) - cross)
    # symmetric optima tie up to rounding; take the smallest alpha, then theta
    near_best = values <= values.min() + 1e-12
    i, j = np.unravel_index(np.argmax(near_best), values.shape)
    alpha, theta = float(alphas[i]), float(thetas[j])
    d_alpha, d_theta = alphas[1] - alphas[0], thetas[1] - thetas[0]

    def refine(f, centre, half_width, lo, hi):
        left, right = max(lo, centre - half_width), min(hi, centre + half_width)
        res = minimize_scalar(f, bounds=(left, right), method="bounded",
                              options={"xatol": tol})
        best = res.x if res.fun <= f(centre) else centre
        return float(best)

    for _ in range(50):
        new_theta = refine(lambda th: objective(alpha, th), theta, d_theta, 0.0, math.pi)
        new_alpha = refine(lambda al: objective(al, new_theta), alpha, d_alpha,
                           alpha - d_alpha, alpha + d_alpha)
        done = abs(new_theta - theta) < tol and abs(new_alpha - alpha) < tol
        alpha, theta = new_alpha, new_theta
        if done:
            break
    return alpha, theta, asymptotic_mean_line1(a, b, WalkParams(alpha, theta))


def phase_aligned_distance(A: np.ndarray, B: np.ndarray) -> float:
    """Max-norm of ``A - e^{i phi} B`` with ``phi`` aligning the largest entry of ``B``."""
    i = np.unravel_index(np.argmax(np.abs(B)), B.shape)
    ratio = A[i] / B[i]
    phase = ratio / abs(ratio) if abs(ratio) > 0 else 1.0
    return float(np.abs(A - phase * B).max())
