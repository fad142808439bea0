"""Raman rate ladder: dressed level frequencies and Stokes/anti-Stokes rates.

The driven cavity acts as a structured reservoir. Transition k -> k+1
(Stokes) emits a photon at w_l - (w~_{k+1} - w~_k), transition k -> k-1
(anti-Stokes) at w_l + (w~_k - w~_{k-1}); each rate is (alpha g0)^2 times
the optical spectral density at that frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .morse import (
    MorseParams,
    LevelOutOfRange,
    dressing_step_approx,
    eigenfrequencies,
    position_element,
    position_matrix,
)
from .optics import spectrum_slope

__all__ = [
    "DriveConfig",
    "BathConfig",
    "RateLadder",
    "LinearizedRates",
    "RateUsageError",
    "diagonal_elements",
    "dressed_frequencies",
    "raman_rates",
    "total_rates",
    "all_pairs_rates",
    "linearized_params",
]

Spectrum = Callable[[float], float]


class RateUsageError(RuntimeError):
    pass


@dataclass(frozen=True)
class DriveConfig:
    """Laser frequency (THz), real coherent amplitude alpha, coupling g0 (THz)."""

    omega_l: float
    alpha: float
    g0: float

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0 (take it real and non-negative)")

    @classmethod
    def from_population(cls, omega_l: float, alpha2: float, g0: float) -> "DriveConfig":
        if alpha2 < 0:
            raise ValueError("cavity population must be >= 0")
        return cls(omega_l, math.sqrt(alpha2), g0)

    @property
    def alpha2(self) -> float:
        """Cavity population |alpha|^2."""
        return self.alpha * self.alpha

    @property
    def g(self) -> float:
        """Effective coupling alpha * g0."""
        return self.alpha * self.g0


@dataclass(frozen=True)
class BathConfig:
    gamma: float = 0.05
    n_th: float = 0.05

    def __post_init__(self):
        if self.gamma < 0 or self.n_th < 0:
            raise ValueError("gamma and n_th must be >= 0")


@dataclass(frozen=True)
class RateLadder:
    """Per-level rates over K levels.

    gamma_plus[k] is the Stokes rate k -> k+1 (zero for k = K-1) and
    gamma_minus[k] the anti-Stokes rate k -> k-1 (zero for k = 0).
    Neither carries the |x_{k+-1,k}|^2 matrix-element weight.
    """

    omega_tilde: np.ndarray
    gamma_plus: np.ndarray
    gamma_minus: np.ndarray
    bath: Optional[BathConfig] = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def K(self) -> int:
        return len(self.omega_tilde)

    @property
    def with_thermal(self) -> bool:
        return self.bath is not None

    def _require_bath(self) -> BathConfig:
        if self.bath is None:
            raise RateUsageError("thermal rates not attached; call total_rates first")
        return self.bath

    @property
    def bar_plus(self) -> np.ndarray:
        b = self._require_bath()
        out = self.gamma_plus + b.n_th * b.gamma
        out[-1] = 0.0
        return out

    @property
    def bar_minus(self) -> np.ndarray:
        b = self._require_bath()
        out = self.gamma_minus + (b.n_th + 1.0) * b.gamma
        out[0] = 0.0
        return out


def diagonal_elements(m: MorseParams, K: int) -> np.ndarray:
    return np.array([position_element(m, k, k) for k in range(K)])


def dressed_frequencies(
    m: MorseParams, d: DriveConfig, K: int, dressing: str = "exact"
) -> np.ndarray:
    """w~_k = w_k - alpha^2 g0 x_{k,k}.

    ``dressing="linear"`` swaps the exact digamma diagonal for its large-N
    expansion with the constant term dropped (shift affine in k).
    """
    if not (m.harmonic and m.max_levels is None) and K > m.n_bound:
        raise LevelOutOfRange(f"K={K} exceeds ladder of {m.n_bound} levels")
    w = eigenfrequencies(m, K)
    if dressing == "exact":
        diag = diagonal_elements(m, K)
        return w - d.alpha2 * d.g0 * diag
    if dressing == "linear":
        return w - np.arange(K) * dressing_step_approx(m, d.alpha2, d.g0)
    raise ValueError(f"unknown dressing {dressing!r}")


def raman_rates(
    m: MorseParams, spec: Spectrum, d: DriveConfig, K: int, dressing: str = "exact"
) -> RateLadder:
    """Optomechanical neighbour rates Gamma_+-^(k) (no thermal part)."""
    wt = dressed_frequencies(m, d, K, dressing)
    steps = np.diff(wt)  # w~_{k+1} - w~_k
    g2 = d.alpha2 * d.g0 * d.g0
    gp = np.zeros(K)
    gm = np.zeros(K)
    if K > 1 and g2 > 0:
        gp[:-1] = g2 * np.asarray(spec(d.omega_l - steps), dtype=float)
        gm[1:] = g2 * np.asarray(spec(d.omega_l + steps), dtype=float)
    if np.any(~np.isfinite(gp)) or np.any(~np.isfinite(gm)):
        raise FloatingPointError("non-finite Raman rate")
    return RateLadder(wt, gp, gm, meta={"dressing": dressing})


def total_rates(ladder: RateLadder, b: BathConfig) -> RateLadder:
    """Attach the thermal bath: bar rates Gamma_+ + n_th gamma, Gamma_- + (n_th + 1) gamma."""
    if ladder.with_thermal:
        raise RateUsageError("thermal bath already attached")
    return RateLadder(
        ladder.omega_tilde.copy(),
        ladder.gamma_plus.copy(),
        ladder.gamma_minus.copy(),
        bath=b,
        meta=dict(ladder.meta),
    )


def all_pairs_rates(
    m: MorseParams, spec: Spectrum, d: DriveConfig, K: int, dressing: str = "exact"
) -> np.ndarray:
    """Weighted optomechanical rate matrix W[j, k] for every jump k -> j.

    W[j, k] = (alpha g0)^2 |x_{j,k}|^2 S(w_l - (w~_j - w~_k)). Validation
    only: production ladders keep neighbour jumps alone.
    """
    wt = dressed_frequencies(m, d, K, dressing)
    X = position_matrix(m, K)
    g2 = d.alpha2 * d.g0 * d.g0
    emitted = d.omega_l - (wt[:, None] - wt[None, :])
    W = g2 * X * X * np.asarray(spec(emitted), dtype=float)
    np.fill_diagonal(W, 0.0)
    return W


@dataclass(frozen=True)
class LinearizedRates:
    Gamma_plus: float
    Gamma_minus: float
    eta_plus: float
    eta_minus: float
    omega_plus: float
    omega_minus: float
    g2: float
    delta_omega_b: float

    def stokes(self, k) -> np.ndarray:
        """Gamma_+^(k) ~ Gamma_+ + eta_+ (k+1) g^2 2 dw_b."""
        k = np.asarray(k, dtype=float)
        return self.Gamma_plus + self.eta_plus * (k + 1) * self.g2 * 2 * self.delta_omega_b

    def anti_stokes(self, k) -> np.ndarray:
        """Gamma_-^(k) ~ Gamma_- - eta_- k g^2 2 dw_b."""
        k = np.asarray(k, dtype=float)
        return self.Gamma_minus - self.eta_minus * k * self.g2 * 2 * self.delta_omega_b


def linearized_params(m: MorseParams, spec: Spectrum, d: DriveConfig) -> LinearizedRates:
    """Reference rates and spectral slopes for the expanded rate ladder.

    The spectrum is expanded around w_l -+ (w_b - c) with c the approximate
    per-level dressing shift; the slopes are plain dS/dw there.
    """
    g2 = d.alpha2 * d.g0 * d.g0
    c = dressing_step_approx(m, d.alpha2, d.g0)
    wp = d.omega_l - m.omega_b + c
    wm = d.omega_l + m.omega_b - c
    if m.harmonic:
        eta_p = eta_m = 0.0
    else:
        eta_p = spectrum_slope(spec, wp)
        eta_m = spectrum_slope(spec, wm)
    return LinearizedRates(
        Gamma_plus=g2 * float(spec(wp)),
        Gamma_minus=g2 * float(spec(wm)),
        eta_plus=eta_p,
        eta_minus=eta_m,
        omega_plus=wp,
        omega_minus=wm,
        g2=g2,
        delta_omega_b=m.delta_omega_b,
    )
