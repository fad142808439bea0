"""Brute-force validators independent of the closed-form paths.

* finite-difference diagonalization of the Morse Hamiltonian in zpf units,
  H / hbar = omega_b (-d^2/dx^2) + (omega_b / 4 a^2) (1 - e^{-a x})^2,
  which reduces to omega_b (-d^2/dx^2 + x^2/4) for a -> 0;
* overlap-integral position matrix elements from the grid eigenvectors;
* explicit time stepping of the population rate equations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid
from scipy.linalg import eigh_tridiagonal

from .morse import MorseParams
from .rates import RateLadder

__all__ = [
    "GridTooSmall",
    "StabilityError",
    "GridSpec",
    "GridEigen",
    "default_grid",
    "grid_diagonalize",
    "numeric_position_elements",
    "overlap_matrix",
    "evolve_rate_ladder",
]

DECAY_TOL = 1e-8


class GridTooSmall(ValueError):
    pass


class StabilityError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    n_points: int = 10000

    def __post_init__(self):
        if not self.x_min < 0 < self.x_max:
            raise ValueError("need x_min < 0 < x_max")
        if self.n_points < 2:
            raise ValueError("need at least two grid points")

    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    def refined(self) -> "GridSpec":
        """Same interval, half the spacing (coarse nodes are kept)."""
        return GridSpec(self.x_min, self.x_max, 2 * self.n_points - 1)


@dataclass
class GridEigen:
    """Eigenpairs on a grid; ``levels`` holds (x, vectors) per refinement level.

    ``eigenvalues`` are Richardson-extrapolated when two levels were solved.
    """

    eigenvalues: np.ndarray
    levels: list
    grid: GridSpec

    @property
    def x(self) -> np.ndarray:
        return self.levels[-1][0]

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.levels[-1][1]


def _turning_points(m: MorseParams, k: int):
    """Classical turning points of level k in zpf units."""
    E = m.omega_b * (k + 0.5) - m.delta_omega_b * (k + 0.5) ** 2
    if m.harmonic:
        r = 2 * math.sqrt(k + 0.5)
        return -r, r
    a = m.a_tilde
    De = m.omega_b / (4 * a * a)
    s = math.sqrt(E / De)
    return -math.log1p(s) / a, -math.log1p(-s) / a


def default_grid(m: MorseParams, n_states: int, n_points: int = 10000) -> GridSpec:
    """Interval covering the classically allowed region of the top requested state plus decay tails."""
    k = n_states - 1
    left, right = _turning_points(m, k)
    if m.harmonic:
        return GridSpec(left - 12.0, right + 12.0, n_points)
    a = m.a_tilde
    De = m.omega_b / (4 * a * a)
    E = m.omega_b * (k + 0.5) - m.delta_omega_b * (k + 0.5) ** 2
    # decay length on the flat right side is 1 / sqrt((De - E) / omega_b)
    q = math.sqrt(max(De - E, 1e-300) / m.omega_b)
    return GridSpec(left - 10.0, right + 30.0 / q, n_points)


def _solve(m: MorseParams, grid: GridSpec, n_states: int):
    x = grid.points()
    h = x[1] - x[0]
    if m.harmonic:
        V = m.omega_b * x * x / 4
    else:
        a = m.a_tilde
        V = m.omega_b / (4 * a * a) * np.expm1(-a * x) ** 2
    diag = 2 * m.omega_b / h**2 + V
    off = np.full(len(x) - 1, -m.omega_b / h**2)
    w, v = eigh_tridiagonal(diag, off, select="i", select_range=(0, n_states - 1))
    v = v / math.sqrt(h)
    # sign: positive at the outer turning point of each state
    for k in range(n_states):
        xr = _turning_points(m, k)[1]
        i = min(int(np.searchsorted(x, xr)), len(x) - 1)
        if v[i, k] < 0:
            v[:, k] *= -1
    return x, w, v


def _check_decay(v: np.ndarray) -> None:
    peak = np.max(np.abs(v), axis=0)
    edge = np.maximum(np.abs(v[0]), np.abs(v[-1]))
    bad = np.nonzero(edge > DECAY_TOL * peak)[0]
    if len(bad):
        raise GridTooSmall(f"grid too small: state {int(bad[0])} does not decay at the boundary")


def grid_diagonalize(
    m: MorseParams,
    grid: Optional[GridSpec] = None,
    n_states: int = 10,
    richardson: bool = True,
) -> GridEigen:
    """Lowest ``n_states`` eigenpairs (frequencies in THz, L2-normalized vectors).

    With ``richardson`` the problem is also solved on the refined grid and the
    O(h^2) stencil error is extrapolated out of the eigenvalues.
    """
    if n_states < 1:
        raise ValueError("n_states must be >= 1")
    if not m.harmonic and n_states > math.floor(m.lam) + 1:
        raise ValueError("more states requested than the potential binds")
    if grid is None:
        grid = default_grid(m, n_states)
        for _ in range(8):
            x, w, v = _solve(m, grid, n_states)
            try:
                _check_decay(v)
                break
            except GridTooSmall:
                span = grid.x_max - grid.x_min
                grid = GridSpec(grid.x_min - 0.1 * span, grid.x_max + 0.3 * span, grid.n_points)
    x, w, v = _solve(m, grid, n_states)
    _check_decay(v)
    levels = [(x, v)]
    if richardson:
        x2, w2, v2 = _solve(m, grid.refined(), n_states)
        levels.append((x2, v2))
        w = (4 * w2 - w) / 3
    return GridEigen(w, levels, grid)


def _overlaps(x, v):
    f = v.T[:, None, :] * (x * v.T)[None, :, :]
    return trapezoid(f, x, axis=-1)


def numeric_position_elements(eig: GridEigen) -> np.ndarray:
    """Trapezoidal <phi_n| x |phi_m>, Richardson-combined when two grids exist."""
    Xs = [_overlaps(x, v) for x, v in eig.levels]
    if len(Xs) == 1:
        return Xs[0]
    return (4 * Xs[1] - Xs[0]) / 3


def overlap_matrix(eig: GridEigen) -> np.ndarray:
    x, v = eig.levels[-1]
    return trapezoid(v.T[:, None, :] * v.T[None, :, :], x, axis=-1)


def evolve_rate_ladder(
    ladder: RateLadder,
    X: np.ndarray,
    p0,
    t_max: float,
    dt: Optional[float] = None,
    n_samples: int = 101,
):
    """RK4 time stepping of dp_k/dt from its explicit in/out flows.

    Returns (t, P) with P[i] the populations at t[i]. ``dt`` defaults to
    0.05 / (largest total out-rate); larger than 0.1 / rate is refused.
    """
    K = ladder.K
    X = np.asarray(X)[:K, :K]
    up = np.zeros(K)
    down = np.zeros(K)
    bp, bm = ladder.bar_plus, ladder.bar_minus
    for k in range(K):
        if k + 1 < K:
            up[k] = X[k + 1, k] ** 2 * bp[k]
        if k >= 1:
            down[k] = X[k - 1, k] ** 2 * bm[k]
    rmax = float(np.max(up + down))
    if rmax == 0:
        raise StabilityError("all rates vanish")
    if dt is None:
        dt = 0.05 / rmax
    if dt > 0.1 / rmax:
        raise StabilityError(f"dt={dt:.3g} exceeds 0.1 / max rate = {0.1 / rmax:.3g}")

    def rhs(p):
        fu = up * p  # k -> k+1
        fd = down * p  # k -> k-1
        dp = -fu - fd
        dp[1:] += fu[:-1]
        dp[:-1] += fd[1:]
        return dp

    nsteps = int(math.ceil(t_max / dt))
    dt = t_max / nsteps
    marks = np.unique(np.round(np.linspace(0, nsteps, n_samples)).astype(int))
    p = np.array(p0, dtype=float)
    out = [p.copy()]
    j = 1
    for n in range(1, nsteps + 1):
        k1 = rhs(p)
        k2 = rhs(p + 0.5 * dt * k1)
        k3 = rhs(p + 0.5 * dt * k2)
        k4 = rhs(p + dt * k3)
        p = p + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if j < len(marks) and n == marks[j]:
            out.append(p.copy())
            j += 1
    return marks * dt, np.array(out)
