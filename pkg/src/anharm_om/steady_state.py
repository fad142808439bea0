"""Stationary populations of the rate ladder and the position-based readouts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .morse import MorseParams, position_matrix
from .rates import BathConfig, DriveConfig, RateLadder, raman_rates, total_rates

__all__ = [
    "NoStationaryState",
    "UndefinedCorrelation",
    "SteadyStateResult",
    "ThreeLevel",
    "rate_matrix",
    "solve_populations",
    "mechanical_population",
    "intensity_correlation",
    "three_level_analytic",
    "g2_closed_form",
    "steady_state",
]

RESIDUAL_TOL = 1e-10
NEG_FLOOR = -1e-12


class NoStationaryState(ArithmeticError):
    pass


class UndefinedCorrelation(ArithmeticError):
    pass


@dataclass(frozen=True)
class SteadyStateResult:
    populations: np.ndarray
    n_x: float
    g2_0: float
    residual: float


def rate_matrix(ladder: RateLadder, X: np.ndarray) -> np.ndarray:
    """Generator M with dp/dt = M p, neighbour jumps weighted by |x_{k+-1,k}|^2."""
    K = ladder.K
    up = X[np.arange(1, K), np.arange(K - 1)] ** 2 * ladder.bar_plus[:-1]
    down = X[np.arange(K - 1), np.arange(1, K)] ** 2 * ladder.bar_minus[1:]
    M = np.diag(up, -1) + np.diag(down, 1)
    M -= np.diag(np.r_[up, 0.0] + np.r_[0.0, down])
    return M


def solve_populations(ladder: RateLadder, X: np.ndarray) -> np.ndarray:
    """Stationary p with the last balance row replaced by sum(p) = 1."""
    K = ladder.K
    if K < 2:
        raise ValueError("need at least two levels")
    X = np.asarray(X)[:K, :K]
    M = rate_matrix(ladder, X)
    if not np.any(M):
        raise NoStationaryState("no stationary distribution: all rates vanish")
    M[-1, :] = 1.0
    b = np.zeros(K)
    b[-1] = -1.0
    try:
        p = np.linalg.solve(M, -b)
    except np.linalg.LinAlgError as exc:
        raise NoStationaryState(f"no stationary distribution: {exc}") from None
    residual = float(np.max(np.abs(M @ p + b)))
    if not residual < RESIDUAL_TOL:
        raise NoStationaryState(f"linear solve residual {residual:.3g}")
    if p.min() < -1e-9:
        raise NoStationaryState(f"negative population {p.min():.3g}")
    return np.clip(p, 0.0, None)


def mechanical_population(p: np.ndarray, X: np.ndarray) -> float:
    """n_x = sum_i p_i sum_{k<i} x_ik x_ki (all lower levels, not only neighbours)."""
    p = np.asarray(p)
    K = len(p)
    lower = np.tril(np.asarray(X)[:K, :K], -1)
    return float(p @ (lower**2).sum(axis=1))


def _g2_numerator(p, X, ordering):
    K = len(p)
    X = np.asarray(X)[:K, :K]
    if ordering == "normal":
        # <x- x- x+ x+>: two lowering steps i -> k -> l, then back up.
        U = np.triu(X, 1)
        LL = U @ U  # LL[l, i] = sum_{l<k<i} x_lk x_ki
        return float(p @ (LL**2).sum(axis=0))
    if ordering == "as-printed":
        total = 0.0
        for i in range(K):
            for k in range(i):
                for l in range(k):
                    for m in range(l + 1, K):
                        total += p[i] * X[i, k] * X[k, l] * X[l, m] * X[m, i]
        return total
    raise ValueError(f"unknown ordering {ordering!r}")


def intensity_correlation(p: np.ndarray, X: np.ndarray, ordering: str = "normal") -> float:
    """g2_x(0) = G2 / n_x^2.

    ``ordering="normal"`` evaluates <x- x- x+ x+>, a sum of squares and hence
    non-negative. ``"as-printed"`` keeps the four-fold sum with m > l only,
    which also admits non-normally-ordered paths once non-neighbour Morse
    elements are present; both agree for harmonic elements.
    """
    p = np.asarray(p, dtype=float)
    n = mechanical_population(p, X)
    if n <= 0.0:
        raise UndefinedCorrelation("g2 undefined for n_x = 0")
    return _g2_numerator(p, X, ordering) / (n * n)


class ThreeLevel(NamedTuple):
    p0: float
    p1: float
    p2: float
    n_x: float
    g2: float


def three_level_analytic(gp0: float, gp1: float, gm1: float, gm2: float) -> ThreeLevel:
    """Closed-form stationary state of the three lowest levels.

    Populations do not depend on the matrix-element weights; n_x and g2 use
    harmonic elements (n_x = p1 + 2 p2, G2 = 2 p2).
    """
    rates = (gp0, gp1, gm1, gm2)
    if min(rates) < 0:
        raise ValueError("rates must be non-negative")
    Z = gm1 * gm2 + gm2 * gp0 + gp0 * gp1
    if Z == 0:
        raise NoStationaryState("all rates vanish")
    p0, p1, p2 = gm1 * gm2 / Z, gm2 * gp0 / Z, gp0 * gp1 / Z
    n_x = gp0 * (gm2 + 2 * gp1) / Z
    g2 = 2 * p2 / (n_x * n_x) if n_x > 0 else float("nan")
    return ThreeLevel(p0, p1, p2, n_x, g2)


def g2_closed_form(gp0: float, gp1: float, gm1: float, gm2: Optional[float] = None):
    """(three-level g2, crude estimate).

    The first value is 2 p2 / (p1 + 2 p2)^2 of the three-level solution; the
    second, 2 gp1/gp0 (1 + gp0/gm), only holds when anti-Stokes rates barely
    depend on k and dominate gp1. ``gm2`` defaults to the flat rate ``gm1``.
    """
    if gm2 is None:
        gm2 = gm1
    if gp0 <= 0 or gm1 <= 0 or (gm2 + 2 * gp1) <= 0:
        raise ZeroDivisionError("closed-form g2 needs positive rates")
    first = 2 * gp1 * (gm1 * gm2 + gp0 * (gm2 + gp1)) / (gp0 * (gm2 + 2 * gp1) ** 2)
    crude = 2 * gp1 / gp0 * (1 + gp0 / gm1)
    return first, crude


def steady_state(
    m: MorseParams,
    spec,
    d: DriveConfig,
    b: BathConfig,
    K: int,
    dressing: str = "exact",
    X: Optional[np.ndarray] = None,
) -> SteadyStateResult:
    """Rates -> stationary populations -> (n_x, g2_0) for one operating point."""
    if X is None:
        X = position_matrix(m, K)
    ladder = total_rates(raman_rates(m, spec, d, K, dressing), b)
    p = solve_populations(ladder, X)
    M = rate_matrix(ladder, X)
    n_x = mechanical_population(p, X)
    try:
        g2 = intensity_correlation(p, X)
    except UndefinedCorrelation:
        g2 = float("nan")
    return SteadyStateResult(p, n_x, g2, float(np.max(np.abs(M @ p))))
