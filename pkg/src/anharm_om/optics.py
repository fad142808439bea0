"""Optical spectral densities seen by the vibrational ladder.

All spectra are dimensionful (1/THz) and peak at the cavity frequency; they
are evaluated at the emitted-photon frequency of each Raman transition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "SingleModeParams",
    "HybridParams",
    "spectrum_single",
    "spectrum_hybrid",
    "spectrum_slope",
    "make_spectrum",
    "fano_extrema",
    "SLOPE_STEP",
]

Spectrum = Callable[[float], float]

SLOPE_STEP = 1e-4  # THz


@dataclass(frozen=True)
class SingleModeParams:
    omega_1: float
    kappa_1: float

    def __post_init__(self):
        if not self.kappa_1 > 0:
            raise ValueError("kappa_1 must be positive")


@dataclass(frozen=True)
class HybridParams:
    """Two coupled resonators: broad plasmon (1) and narrow dielectric mode (2).

    ``response`` picks which mode's Green's function is returned:

    * ``"plasmon"`` (default) - the driven plasmon mode dressed by the narrow
      mode. Numerator (w - w2 - i k2/2); shows the Fano peak/trough pair near
      omega_2 and reduces to the plasmon Lorentzian at f = 0.
    * ``"as-printed"`` - numerator (w - w1 - i k1/2). This is the narrow
      mode's response, a single shifted Lorentzian without a trough, and
      reduces to the (omega_2, kappa_2) Lorentzian at f = 0.
    """

    omega_1: float = 550.0
    omega_2: float = 486.0
    kappa_1: float = 60.0
    kappa_2: float = 0.15
    f: float = 15.0
    response: str = "plasmon"

    def __post_init__(self):
        if not (self.kappa_1 > 0 and self.kappa_2 > 0):
            raise ValueError("linewidths must be positive")
        if self.f < 0:
            raise ValueError("coupling f must be >= 0")
        if self.response not in ("plasmon", "as-printed"):
            raise ValueError(f"unknown hybrid response {self.response!r}")


def spectrum_single(p: SingleModeParams, omega):
    """Lorentzian (k/2) / ((w - w1)^2 + (k/2)^2); peak value 2/k."""
    hk = 0.5 * p.kappa_1
    d = np.asarray(omega, dtype=float) - p.omega_1
    out = hk / (d * d + hk * hk)
    return float(out) if np.ndim(out) == 0 else out


def spectrum_hybrid(p: HybridParams, omega):
    w = np.asarray(omega, dtype=float)
    a = w - p.omega_1 - 0.5j * p.kappa_1
    b = w - p.omega_2 - 0.5j * p.kappa_2
    num = b if p.response == "plasmon" else a
    out = np.imag(num / (a * b - p.f * p.f))
    return float(out) if np.ndim(out) == 0 else out


def make_spectrum(p) -> Spectrum:
    """Bind a parameter set to its spectral density function."""
    if isinstance(p, SingleModeParams):
        return lambda w: spectrum_single(p, w)
    if isinstance(p, HybridParams):
        return lambda w: spectrum_hybrid(p, w)
    raise TypeError(f"not a spectrum parameter set: {type(p).__name__}")


def spectrum_slope(spec: Spectrum, omega: float, h: float = SLOPE_STEP) -> float:
    """Central difference dS/dw at omega."""
    return (spec(omega + h) - spec(omega - h)) / (2.0 * h)


def fano_extrema(spec: Spectrum, lo: float = 470.0, hi: float = 500.0, step: float = 1e-3):
    """Dense-scan (peak, trough) frequencies of a spectrum over [lo, hi]."""
    w = lo + step * np.arange(int(round((hi - lo) / step)) + 1)
    s = spec(w)
    return float(w[np.argmax(s)]), float(w[np.argmin(s)])
