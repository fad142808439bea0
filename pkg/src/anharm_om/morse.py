"""Morse-oscillator spectrum and position matrix elements.

Frequencies are nu = omega / 2pi in THz; positions are in units of the
harmonic zero-point fluctuation x_zpf, so mass, hbar and D_e never appear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .special import digamma, log_gamma, log_gamma_ratio

__all__ = [
    "HarmonicLadderError",
    "LevelOutOfRange",
    "MorseParams",
    "bound_state_count",
    "eigenfrequency",
    "eigenfrequencies",
    "position_element",
    "position_matrix",
    "diagonal_element_approx",
    "dressing_step_approx",
]


class HarmonicLadderError(ValueError):
    """Harmonic oscillator has an unbounded ladder; a truncation is required."""


class LevelOutOfRange(IndexError):
    pass


@dataclass(frozen=True)
class MorseParams:
    """Mechanical oscillator: base frequency and anharmonicity (THz).

    ``max_levels`` caps the ladder; it is mandatory when ``delta_omega_b == 0``.
    """

    omega_b: float
    delta_omega_b: float
    max_levels: Optional[int] = None

    def __post_init__(self):
        if not self.omega_b > 0:
            raise ValueError("omega_b must be positive")
        if not 0 <= self.delta_omega_b < self.omega_b:
            raise ValueError("need 0 <= delta_omega_b < omega_b")
        if self.max_levels is not None and self.max_levels < 1:
            raise ValueError("max_levels must be >= 1")

    @property
    def harmonic(self) -> bool:
        return self.delta_omega_b == 0

    @property
    def lam(self) -> float:
        """Real-valued N = (omega_b / delta_omega_b - 1) / 2 (inf if harmonic)."""
        if self.harmonic:
            return math.inf
        return (self.omega_b / self.delta_omega_b - 1.0) / 2.0

    @property
    def a_tilde(self) -> float:
        """Morse range parameter in zpf units, sqrt(delta_omega_b / omega_b)."""
        return math.sqrt(self.delta_omega_b / self.omega_b)

    @property
    def n_bound(self) -> int:
        if self.harmonic:
            if self.max_levels is None:
                raise HarmonicLadderError("harmonic: unbounded ladder")
            return self.max_levels
        n = bound_state_count(self)
        return n if self.max_levels is None else min(n, self.max_levels)


def bound_state_count(params: MorseParams) -> int:
    """Number of bound states, floor(N) + 1."""
    if params.harmonic:
        raise HarmonicLadderError("harmonic: unbounded ladder")
    lam = params.lam
    n = math.floor(lam) + 1
    if lam == math.floor(lam):
        # level k = N sits exactly at the dissociation limit, x elements vanish there
        n -= 1
    return n


def _check_level(params: MorseParams, k: int) -> None:
    if k < 0:
        raise LevelOutOfRange(f"level {k} < 0")
    if not params.harmonic and k >= bound_state_count(params):
        raise LevelOutOfRange(
            f"level {k} above last bound state {bound_state_count(params) - 1}"
        )


def eigenfrequency(params: MorseParams, k: int) -> float:
    """omega_k = omega_b (k + 1/2) - delta_omega_b (k + 1/2)^2."""
    _check_level(params, k)
    h = k + 0.5
    return params.omega_b * h - params.delta_omega_b * h * h


def eigenfrequencies(params: MorseParams, K: int) -> np.ndarray:
    if K > 0:
        _check_level(params, K - 1)
    h = np.arange(K) + 0.5
    return params.omega_b * h - params.delta_omega_b * h * h


def position_element(params: MorseParams, n: int, m: int) -> float:
    """<phi_n| x / x_zpf |phi_m> for the Morse eigenstates.

    Off-diagonal elements follow the Gamma-function closed form (symmetric
    in n, m); the diagonal uses digamma functions. All Gamma ratios go
    through log differences. Harmonic params give sqrt(max(n, m)) for
    neighbours and zero otherwise.
    """
    _check_level(params, n)
    _check_level(params, m)
    if params.harmonic:
        return math.sqrt(max(n, m)) if abs(n - m) == 1 else 0.0
    N = params.lam
    pref = math.sqrt(params.omega_b / params.delta_omega_b)
    if n == m:
        return pref * (
            math.log(2 * N + 1)
            + digamma(2 * N - n + 1)
            - digamma(2 * N - 2 * n + 1)
            - digamma(2 * N - 2 * n)
        )
    if n < m:
        n, m = m, n
    log_ratio = (
        log_gamma_ratio(2 * N - n + 1, 2 * N - m + 1)
        + log_gamma(n + 1)
        - log_gamma(m + 1)
    )
    sign = -1.0 if (m - n + 1) % 2 else 1.0
    mag = (
        2.0
        / ((n - m) * (2 * N - n - m))
        * math.sqrt((N - n) * (N - m) * math.exp(log_ratio))
    )
    return pref * sign * mag


def position_matrix(params: MorseParams, K: int) -> np.ndarray:
    """K x K matrix of position elements over the lowest K levels."""
    if K > 0:
        _check_level(params, K - 1)
    X = np.zeros((K, K))
    for n in range(K):
        for m in range(n + 1):
            X[n, m] = X[m, n] = position_element(params, n, m)
    return X


def diagonal_element_approx(params: MorseParams, n: int) -> float:
    """Large-N expansion of x_{n,n}, valid for N >> n.

    sqrt(w_b/dw_b) [2 ln((N + 1/2)/N) + (3 + 2/N) n / (2N + 1)]
    """
    _check_level(params, n)
    if params.harmonic:
        return 0.0
    N = params.lam
    pref = math.sqrt(params.omega_b / params.delta_omega_b)
    return pref * (2 * math.log((N + 0.5) / N) + (3 + 2 / N) * n / (2 * N + 1))


def dressing_step_approx(params: MorseParams, alpha2: float, g0: float) -> float:
    """Per-level dressing shift alpha^2 g0 sqrt(w_b/dw_b) (3 + 2/N) / (2N + 1).

    Zero in the harmonic case.
    """
    if params.harmonic:
        return 0.0
    N = params.lam
    pref = math.sqrt(params.omega_b / params.delta_omega_b)
    return alpha2 * g0 * pref * (3 + 2 / N) / (2 * N + 1)
