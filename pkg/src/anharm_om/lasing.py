"""Strong driving: corrected mean-field population and classical trajectories.

Trajectories use normalized time tau = omega_b t, positions in x_zpf and
momenta in hbar / x_zpf. The system is

    da/dtau = -i (D/wb) a - i (g0/wb) x a - i (Om/wb) - (kappa/2wb) a
    dx/dtau = 2 p - (gamma/2wb) x
    dp/dtau = -(g0/wb) |a|^2 - F(x) - (gamma/2wb) p

with F(x) = x/2 (harmonic) or (1 - e^{-a x}) e^{-a x} / (2a) (Morse).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numba
import numpy as np
from scipy.optimize import brentq

from .rates import BathConfig, LinearizedRates

__all__ = [
    "NoMeanFieldSolution",
    "TrajectoryEscaped",
    "WindowTooShort",
    "MeanFieldParams",
    "MeanFieldResult",
    "meanfield_coefficients",
    "meanfield_steady",
    "TrajectorySystem",
    "TrajectoryResult",
    "integrate_trajectory",
    "run_to_steady",
    "oscillation_stats",
    "fixed_point",
    "stability_margin",
    "instability_threshold",
    "DEFAULT_DTAU",
]

DEFAULT_DTAU = 2 * math.pi / 1000
STEPS_PER_PERIOD = 1000
SAMPLE_EVERY = 10  # samples per period = 100
DISSOCIATION_FACTOR = 5.0


class NoMeanFieldSolution(ArithmeticError):
    pass


class TrajectoryEscaped(ArithmeticError):
    def __init__(self, msg: str, tau: float):
        super().__init__(msg)
        self.tau = tau


class WindowTooShort(ValueError):
    pass


# ---------------------------------------------------------------- mean field


@dataclass(frozen=True)
class MeanFieldParams:
    Gamma_plus: float
    Gamma_minus: float
    eta_plus: float
    eta_minus: float
    g: float
    delta_omega_b: float
    gamma: float
    n_th: float

    def __post_init__(self):
        if self.g < 0 or self.delta_omega_b < 0:
            raise ValueError("g and delta_omega_b must be >= 0")

    @classmethod
    def from_linearized(cls, lin: LinearizedRates, bath: BathConfig) -> "MeanFieldParams":
        return cls(
            lin.Gamma_plus,
            lin.Gamma_minus,
            lin.eta_plus,
            lin.eta_minus,
            math.sqrt(lin.g2),
            lin.delta_omega_b,
            bath.gamma,
            bath.n_th,
        )


@dataclass(frozen=True)
class MeanFieldResult:
    n_x: float
    linear_damping: float
    quadratic: float
    constant: float
    roots: tuple = ()

    @property
    def linearly_unstable(self) -> bool:
        """Net linear damping is negative: the harmonic ladder would diverge."""
        return self.linear_damping < 0


def meanfield_coefficients(p: MeanFieldParams):
    """(L, Q, C) with dn/dt = -L n + Q n^2 + C under the thermal closure <n^2> = n + 2n^2."""
    s = p.g * p.g * 2 * p.delta_omega_b
    L = (p.gamma + p.Gamma_minus - p.Gamma_plus) - s * (p.eta_minus + 5 * p.eta_plus)
    Q = 2 * s * (p.eta_minus + 2 * p.eta_plus)
    C = p.Gamma_plus + p.gamma * p.n_th + p.eta_plus * s
    return L, Q, C


def meanfield_steady(p: MeanFieldParams) -> MeanFieldResult:
    """Stationary n_x of the corrected rate equation.

    Starting from n = 0 the population grows (C > 0) until it meets the
    smallest non-negative root; that root is also the branch that tends to
    C / L as the anharmonicity vanishes.
    """
    L, Q, C = meanfield_coefficients(p)
    if Q == 0.0:
        if L <= 0.0:
            raise NoMeanFieldSolution("linear damping <= 0: population diverges")
        n = C / L
        return MeanFieldResult(n, L, Q, C, (n,))
    disc = L * L - 4 * Q * C
    if disc < 0:
        raise NoMeanFieldSolution("no real stationary mean-field solution")
    # numerically stable pair for Q n^2 - L n + C = 0
    q = 0.5 * (L + math.copysign(math.sqrt(disc), L))
    roots = []
    if Q != 0:
        roots.append(q / Q)
    if q != 0:
        roots.append(C / q)
    roots = sorted(r for r in roots if math.isfinite(r))
    good = [r for r in roots if r >= 0]
    if not good:
        raise NoMeanFieldSolution("no non-negative stationary mean-field solution")
    return MeanFieldResult(good[0], L, Q, C, tuple(roots))


# --------------------------------------------------------------- trajectories


@dataclass(frozen=True)
class TrajectorySystem:
    """Physical parameters of the driven cavity + oscillator (THz).

    ``a_tilde = 0`` selects the harmonic force.
    """

    Delta: float
    kappa: float
    Omega: float
    g0: float
    gamma: float
    omega_b: float
    a_tilde: float = 0.0

    @classmethod
    def from_population(
        cls,
        alpha2: float,
        omega_b: float = 20.0,
        delta_omega_b: float = 0.0,
        g0: float = 2.0,
        kappa: float = 60.0,
        gamma: float = 0.05,
        Delta: Optional[float] = None,
    ) -> "TrajectorySystem":
        """Drive set by the bare cavity population |alpha|^2.

        Default detuning Delta = omega_1 - omega_l = -omega_b puts the Stokes
        line on the cavity peak.
        """
        if Delta is None:
            Delta = -omega_b
        Omega = math.sqrt(alpha2) * math.sqrt(Delta * Delta + kappa * kappa / 4)
        return cls(Delta, kappa, Omega, g0, gamma, omega_b, math.sqrt(delta_omega_b / omega_b))

    @property
    def morse(self) -> bool:
        return self.a_tilde > 0

    @property
    def bare_population(self) -> float:
        return self.Omega**2 / (self.Delta**2 + self.kappa**2 / 4)

    def normalized(self):
        wb = self.omega_b
        return (
            self.Delta / wb,
            self.g0 / wb,
            self.Omega / wb,
            self.kappa / (2 * wb),
            self.gamma / (2 * wb),
            self.a_tilde,
        )


@numba.njit(cache=True)
def _rhs(ar, ai, x, p, D, G, O, K, Gm, at):
    w = D + G * x
    dar = w * ai - K * ar
    dai = -w * ar - O - K * ai
    if at > 0.0:
        e = math.exp(-at * x)
        F = -math.expm1(-at * x) * e / (2.0 * at)
    else:
        F = 0.5 * x
    dx = 2.0 * p - Gm * x
    dp = -G * (ar * ar + ai * ai) - F - Gm * p
    return dar, dai, dx, dp


@numba.njit(cache=True)
def _rk4_chunk(y, D, G, O, K, Gm, at, dt, nsteps, every, guard):
    """Advance y in place; return (samples of x, |a|^2, escape step or -1)."""
    ar, ai, x, p = y[0], y[1], y[2], y[3]
    nout = nsteps // every
    xs = np.empty(nout)
    a2 = np.empty(nout)
    j = 0
    h = 0.5 * dt
    for n in range(nsteps):
        k1 = _rhs(ar, ai, x, p, D, G, O, K, Gm, at)
        k2 = _rhs(ar + h * k1[0], ai + h * k1[1], x + h * k1[2], p + h * k1[3], D, G, O, K, Gm, at)
        k3 = _rhs(ar + h * k2[0], ai + h * k2[1], x + h * k2[2], p + h * k2[3], D, G, O, K, Gm, at)
        k4 = _rhs(ar + dt * k3[0], ai + dt * k3[1], x + dt * k3[2], p + dt * k3[3], D, G, O, K, Gm, at)
        c = dt / 6.0
        ar += c * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        ai += c * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        x += c * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        p += c * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
        if not (math.isfinite(x) and math.isfinite(p) and math.isfinite(ar) and math.isfinite(ai)):
            return xs[:j], a2[:j], n
        if x > guard or x < -guard:
            return xs[:j], a2[:j], n
        if (n + 1) % every == 0:
            xs[j] = x
            a2[j] = ar * ar + ai * ai
            j += 1
    y[0], y[1], y[2], y[3] = ar, ai, x, p
    return xs, a2, -1


@dataclass
class TrajectoryResult:
    tau: np.ndarray
    x: np.ndarray
    alpha2: np.ndarray
    sigma_x: float
    x_mean: float
    converged: bool = True
    final_state: np.ndarray = field(default_factory=lambda: np.zeros(4))

    @property
    def n_coh(self) -> float:
        return self.sigma_x**2 / 4

    @property
    def realized_population(self) -> float:
        """Mean |alpha|^2 over the analysis window (second half of the series)."""
        return float(np.mean(self.alpha2[len(self.alpha2) // 2 :]))


def _advance(system: TrajectorySystem, y, tau0, nsteps, dtau, every):
    D, G, O, K, Gm, at = system.normalized()
    guard = DISSOCIATION_FACTOR / at if at > 0 else 1e150
    xs, a2, esc = _rk4_chunk(y, D, G, O, K, Gm, at, dtau, nsteps, every, guard)
    if esc >= 0:
        t = tau0 + (esc + 1) * dtau
        raise TrajectoryEscaped(
            f"trajectory escaped/diverged at tau={t:.6g} (t={t / system.omega_b:.6g} ps)", t
        )
    taus = tau0 + dtau * every * np.arange(1, len(xs) + 1)
    return taus, xs, a2


def oscillation_stats(tau, x, settle_fraction: float = 0.5, min_periods: float = 50.0):
    """(sigma_x, x_mean, n_coh) over the final (1 - settle_fraction) of the series."""
    tau = np.asarray(tau, dtype=float)
    x = np.asarray(x, dtype=float)
    if not 0 <= settle_fraction < 1:
        raise ValueError("settle_fraction must lie in [0, 1)")
    start = int(math.floor(settle_fraction * len(x)))
    win_t, win_x = tau[start:], x[start:]
    if len(win_x) < 2 or (win_t[-1] - win_t[0]) / (2 * math.pi) < min_periods:
        raise WindowTooShort(f"analysis window shorter than {min_periods:g} periods")
    mean = float(np.mean(win_x))
    sigma = float(np.std(win_x))
    return sigma, mean, sigma * sigma / 4


def integrate_trajectory(
    system: TrajectorySystem,
    tau_max: float,
    dtau: float = DEFAULT_DTAU,
    y0=None,
    every: int = SAMPLE_EVERY,
    settle_fraction: float = 0.5,
) -> TrajectoryResult:
    """Fixed-step RK4 from y0 (default alpha = x = p = 0) up to tau_max."""
    if dtau > 0.01:
        raise ValueError("dtau must be <= 0.01 to resolve the mechanical period")
    y = np.zeros(4) if y0 is None else np.array(y0, dtype=float)
    nsteps = int(round(tau_max / dtau))
    nsteps -= nsteps % every
    tau, xs, a2 = _advance(system, y, 0.0, nsteps, dtau, every)
    try:
        sigma, mean, _ = oscillation_stats(tau, xs, settle_fraction)
    except WindowTooShort:
        sigma, mean = float("nan"), float("nan")
    tau = np.r_[0.0, tau]
    x0 = 0.0 if y0 is None else float(y0[2])
    a20 = 0.0 if y0 is None else float(y0[0] ** 2 + y0[1] ** 2)
    return TrajectoryResult(tau, np.r_[x0, xs], np.r_[a20, a2], sigma, mean, True, y)


def run_to_steady(
    system: TrajectorySystem,
    window_periods: int = 100,
    max_periods: int = 20000,
    rtol: float = 0.01,
    atol: float = 1e-6,
    min_periods: int = 200,
) -> TrajectoryResult:
    """Integrate in 100-period windows until sigma_x of two consecutive windows agrees.

    Agreement means |s1 - s2| <= rtol * max(s1, s2) or both below ``atol``
    (quiescent). Returns the last window only; ``converged`` is False when
    ``max_periods`` is hit first. Very close to the instability threshold the
    growth per window drops below ``rtol`` and the test can pass during the
    slow transient; callers sweeping across the onset should keep grid
    points a few percent away from it.
    """
    dtau = DEFAULT_DTAU
    n_win = window_periods * STEPS_PER_PERIOD
    y = np.zeros(4)
    tau0 = 0.0
    prev = None
    done = 0
    converged = False
    while done < max_periods:
        tau, xs, a2 = _advance(system, y, tau0, n_win, dtau, SAMPLE_EVERY)
        tau0 = tau[-1]
        done += window_periods
        sigma = float(np.std(xs))
        if prev is not None and done >= min_periods:
            if (sigma <= atol and prev <= atol) or abs(sigma - prev) <= rtol * max(sigma, prev):
                converged = True
                break
        prev = sigma
    return TrajectoryResult(tau, xs, a2, sigma, float(np.mean(xs)), converged, y)


# ------------------------------------------------------------ linear stability


def _force(x, at):
    if at > 0:
        return -math.expm1(-at * x) * math.exp(-at * x) / (2 * at)
    return 0.5 * x


def _dforce(x, at):
    if at > 0:
        e = math.exp(-at * x)
        return 0.5 * e * (2 * e - 1)
    return 0.5


def fixed_point(system: TrajectorySystem) -> np.ndarray:
    """Static equilibrium (Re a, Im a, x, p) in normalized units.

    Eliminating the cavity gives a scalar equation in x:
    G |a(x)|^2 + F(x) + Gm^2 x / 2 = 0 with |a|^2 = O^2 / ((D + G x)^2 + K^2).
    """
    D, G, O, K, Gm, at = system.normalized()

    def h(x):
        return G * O * O / ((D + G * x) ** 2 + K * K) + _force(x, at) + 0.5 * Gm * Gm * x

    if O == 0 or G == 0:
        x = 0.0
    else:
        lo = -1.0
        while h(lo) > 0:
            lo *= 2
            if lo < -1e6:
                raise ArithmeticError("no static equilibrium")
        x = brentq(h, lo, 0.0, xtol=1e-15, rtol=1e-15)
    w = D + G * x
    a = -1j * O / (1j * w + K)
    return np.array([a.real, a.imag, x, 0.5 * Gm * x])


def _jacobian(system: TrajectorySystem, y) -> np.ndarray:
    D, G, O, K, Gm, at = system.normalized()
    ar, ai, x, _ = y
    w = D + G * x
    return np.array(
        [
            [-K, w, G * ai, 0.0],
            [-w, -K, -G * ar, 0.0],
            [0.0, 0.0, -Gm, 2.0],
            [-2 * G * ar, -2 * G * ai, -_dforce(x, at), -Gm],
        ]
    )


def stability_margin(system: TrajectorySystem) -> float:
    """Largest real part of the Jacobian spectrum at the static equilibrium."""
    y = fixed_point(system)
    return float(np.max(np.linalg.eigvals(_jacobian(system, y)).real))


def instability_threshold(
    delta_omega_b: float,
    lo: float = 0.05,
    hi: float = 2.0,
    **kw,
) -> float:
    """Cavity population at which the static equilibrium loses stability (Hopf onset)."""

    def f(a2):
        return stability_margin(TrajectorySystem.from_population(a2, delta_omega_b=delta_omega_b, **kw))

    if f(lo) >= 0 or f(hi) <= 0:
        raise ArithmeticError("instability threshold not bracketed")
    return brentq(f, lo, hi, xtol=1e-12)
