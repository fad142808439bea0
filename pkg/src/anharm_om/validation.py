"""Oracle cross-checks behind ``anharm-om validate``.

Each check returns (value, tolerance); it passes when value <= tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .morse import MorseParams, eigenfrequencies, position_matrix
from .optics import HybridParams, SingleModeParams, spectrum_hybrid, spectrum_single
from .oracle import evolve_rate_ladder, grid_diagonalize, numeric_position_elements, overlap_matrix
from .rates import BathConfig, DriveConfig, RateLadder, raman_rates, total_rates
from .optics import make_spectrum
from .special import digamma, log_gamma
from .steady_state import intensity_correlation, mechanical_population, solve_populations, three_level_analytic

__all__ = ["Check", "CHECKS", "run_checks"]

OMEGA_B = 20.0


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.tolerance)


def _log_gamma():
    zs = np.r_[np.linspace(0.5, 30, 60), np.geomspace(30, 1e6, 40)]
    return max(abs(log_gamma(z) - math.lgamma(z)) / max(1.0, abs(math.lgamma(z))) for z in zs), 1e-12


def _digamma_recurrence():
    zs = np.r_[np.linspace(0.5, 50, 100), np.geomspace(50, 1e6, 20)]
    return max(abs(digamma(z + 1) - digamma(z) - 1 / z) for z in zs), 1e-12


def _spectrum(dw):
    m = MorseParams(OMEGA_B, dw)
    ns = min(m.n_bound, int(math.floor(m.lam / 2)) + 1)
    eig = grid_diagonalize(m, n_states=ns)
    ex = eigenfrequencies(m, ns)
    k = np.arange(ns) <= m.lam / 2
    return float(np.max(np.abs(eig.eigenvalues[k] - ex[k]) / ex[k])), 1e-6


def _elements(dw):
    m = MorseParams(OMEGA_B, dw)
    n = min(9, m.n_bound)
    eig = grid_diagonalize(m, n_states=n)
    X = numeric_position_elements(eig)
    return float(np.max(np.abs(np.abs(X) - np.abs(position_matrix(m, n))))), 1e-6


def _orthonormality():
    eig = grid_diagonalize(MorseParams(OMEGA_B, 0.2), n_states=9)
    return float(np.max(np.abs(overlap_matrix(eig) - np.eye(9)))), 1e-8


def _harmonic_grid():
    eig = grid_diagonalize(MorseParams(OMEGA_B, 0.0, max_levels=11), n_states=11)
    ex = OMEGA_B * (np.arange(11) + 0.5)
    return float(np.max(np.abs(eig.eigenvalues - ex) / ex)), 1e-6


def _harmonic_recovery():
    m = MorseParams(OMEGA_B, OMEGA_B * 1e-8)
    X = position_matrix(m, 11)
    err = 0.0
    for i in range(11):
        for j in range(11):
            ref = math.sqrt(max(i, j)) if abs(i - j) == 1 else (0.0 if i != j else X[i, j])
            err = max(err, abs(X[i, j] - ref))
    return err, 1e-3


def _three_level():
    rng = np.random.default_rng(12345)
    err = 0.0
    X = position_matrix(MorseParams(OMEGA_B, 0.0, max_levels=3), 3)
    for _ in range(100):
        gp0, gp1, gm1, gm2 = rng.uniform(0.01, 10.0, 4)
        lad = RateLadder(np.zeros(3), np.array([gp0, gp1, 0.0]), np.array([0.0, gm1, gm2]), BathConfig(0.0, 0.0))
        p = solve_populations(lad, X)
        t = three_level_analytic(gp0, gp1, gm1, gm2)
        err = max(err, float(np.max(np.abs(p - [t.p0, t.p1, t.p2]))), abs(intensity_correlation(p, X) - t.g2))
    return err, 1e-12


def _thermal_baseline_n():
    return abs(_thermal()[0] - 0.05), 1e-4


def _thermal_baseline_g2():
    return abs(_thermal()[1] - 2.0), 0.02


def _thermal():
    m = MorseParams(OMEGA_B, 0.0, max_levels=24)
    X = position_matrix(m, 24)
    lad = total_rates(raman_rates(m, make_spectrum(SingleModeParams(550, 60)), DriveConfig(570, 0.0, 2.0), 24), BathConfig(0.05, 0.05))
    p = solve_populations(lad, X)
    return mechanical_population(p, X), intensity_correlation(p, X)


def _evolution():
    m = MorseParams(OMEGA_B, 2.0)
    K = m.n_bound
    X = position_matrix(m, K)
    b = BathConfig()
    lad = total_rates(raman_rates(m, make_spectrum(HybridParams()), DriveConfig.from_population(484.29, 4.0, 2.0), K), b)
    p = solve_populations(lad, X)
    _, P = evolve_rate_ladder(lad, X, np.eye(K)[0], 50 / b.gamma)
    return float(np.max(np.abs(P[-1] - p))), 1e-8


def _hybrid_limit(response):
    w = np.linspace(400, 700, 3001)
    p = HybridParams(f=0.0, response=response)
    h = spectrum_hybrid(p, w)
    ref = SingleModeParams(p.omega_1, p.kappa_1) if response == "plasmon" else SingleModeParams(p.omega_2, p.kappa_2)
    s = spectrum_single(ref, w)
    return float(np.max(np.abs(h - s) / s)), 1e-12


CHECKS = {
    "log_gamma_vs_stdlib": _log_gamma,
    "digamma_recurrence": _digamma_recurrence,
    "spectrum_grid_dw0.1": lambda: _spectrum(0.1),
    "spectrum_grid_dw0.2": lambda: _spectrum(0.2),
    "spectrum_grid_dw2.0": lambda: _spectrum(2.0),
    "elements_grid_dw0.1": lambda: _elements(0.1),
    "elements_grid_dw0.2": lambda: _elements(0.2),
    "elements_grid_dw2.0": lambda: _elements(2.0),
    "grid_orthonormality": _orthonormality,
    "harmonic_grid_spectrum": _harmonic_grid,
    "harmonic_element_recovery": _harmonic_recovery,
    "three_level_closed_form": _three_level,
    "thermal_baseline_n_x": _thermal_baseline_n,
    "thermal_baseline_g2": _thermal_baseline_g2,
    "rate_ladder_evolution": _evolution,
    "hybrid_f0_limit_plasmon": lambda: _hybrid_limit("plasmon"),
    "hybrid_f0_limit_as_printed": lambda: _hybrid_limit("as-printed"),
}


def _run(name):
    v, tol = CHECKS[name]()
    return Check(name, float(v), float(tol))


def run_checks(workers: int = 1) -> list:
    from .scenarios import map_points

    return map_points(_run, list(CHECKS), workers)
