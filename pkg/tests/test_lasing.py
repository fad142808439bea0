import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anharm_om.lasing import (
    DEFAULT_DTAU,
    MeanFieldParams,
    NoMeanFieldSolution,
    TrajectoryEscaped,
    TrajectorySystem,
    WindowTooShort,
    fixed_point,
    instability_threshold,
    integrate_trajectory,
    meanfield_coefficients,
    meanfield_steady,
    oscillation_stats,
    run_to_steady,
    stability_margin,
)
from anharm_om.morse import MorseParams
from anharm_om.rates import BathConfig, DriveConfig, linearized_params
from anharm_om.steady_state import steady_state

# Hopf onsets (cavity population) for omega_b = 20, g0 = 2, kappa = 60, gamma = 0.05
HOPF = {0.0: 0.29359, 0.1: 0.29475, 0.2: 0.29524}


def _mf(Gp, Gm, ep=0.0, em=0.0, g=1.0, dw=0.0, gamma=0.05, n_th=0.05):
    return MeanFieldParams(Gp, Gm, ep, em, g, dw, gamma, n_th)


# ----------------------------------------------------------------- mean field


def test_harmonic_meanfield_formula():
    r = meanfield_steady(_mf(0.02, 0.01))
    assert r.quadratic == 0
    assert r.n_x == pytest.approx((0.02 + 0.05 * 0.05) / (0.05 + 0.01 - 0.02), rel=1e-14)


def test_cooling_limit():
    r = meanfield_steady(_mf(0.0, 1.0))
    assert r.n_x == pytest.approx(0.05 * 0.05 / 1.05, rel=1e-14)


def test_harmonic_beyond_threshold_diverges():
    with pytest.raises(NoMeanFieldSolution):
        meanfield_steady(_mf(0.1, 0.01))
    assert meanfield_coefficients(_mf(0.1, 0.01))[0] < 0


def test_anharmonic_branch_saturates_beyond_harmonic_threshold():
    # Stokes rate falls with k: eta_plus < 0 gives a stabilising quadratic term
    r = meanfield_steady(_mf(0.1, 0.01, ep=-0.05, em=0.0, g=1.0, dw=0.2))
    assert r.linearly_unstable is False or r.n_x > 0
    L, Q, C = r.linear_damping, r.quadratic, r.constant
    assert Q * r.n_x**2 - L * r.n_x + C == pytest.approx(0, abs=1e-12)
    assert r.n_x == min(x for x in r.roots if x >= 0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 0.04), st.floats(0, 1), st.floats(-0.1, 0.1), st.floats(-0.1, 0.1))
def test_small_anharmonicity_continuity(Gp, Gm, ep, em):
    base = meanfield_steady(_mf(Gp, Gm)).n_x
    near = meanfield_steady(_mf(Gp, Gm, ep, em, dw=1e-7)).n_x
    assert near == pytest.approx(base, rel=1e-4, abs=1e-10)


def test_meanfield_params_validation():
    with pytest.raises(ValueError):
        _mf(0.1, 0.1, g=-1)


@pytest.mark.parametrize("dw", [0.1, 0.2])
def test_meanfield_tracks_ladder_at_low_drive(single_spec, bath, dw):
    m = MorseParams(20.0, dw)
    for a2 in (0.05, 0.1, 0.2):
        d = DriveConfig.from_population(570.0, a2, 2.0)
        ladder = steady_state(m, single_spec, d, bath, 120 if m.n_bound > 120 else m.n_bound).n_x
        mf = meanfield_steady(MeanFieldParams.from_linearized(linearized_params(m, single_spec, d), bath)).n_x
        assert abs(mf - ladder) / ladder < 0.05


# --------------------------------------------------------------- trajectories


def test_system_from_population():
    s = TrajectorySystem.from_population(0.4, delta_omega_b=0.2)
    assert s.Delta == -20.0 and s.morse
    assert s.bare_population == pytest.approx(0.4, rel=1e-14)
    assert s.a_tilde == pytest.approx(math.sqrt(0.01))
    assert not TrajectorySystem.from_population(0.4).morse


def test_undriven_stays_at_rest():
    s = TrajectorySystem(-20.0, 60.0, 0.0, 2.0, 0.05, 20.0, 0.1)
    r = integrate_trajectory(s, 100 * 2 * math.pi)
    assert np.all(r.x == 0) and np.all(r.alpha2 == 0)


def test_uncoupled_cavity_relaxes_to_lorentzian():
    s = TrajectorySystem.from_population(0.3, g0=0.0)
    r = integrate_trajectory(s, 20 * 2 * math.pi)
    expected = -1j * s.Omega / (1j * s.Delta + s.kappa / 2)
    a = r.final_state[0] + 1j * r.final_state[1]
    assert a == pytest.approx(expected, rel=1e-10)
    assert np.all(r.x == 0)
    assert r.realized_population == pytest.approx(0.3, rel=1e-10)


@pytest.mark.parametrize("gamma", [0.0, 0.05, 1.0])
def test_harmonic_energy_non_increasing(gamma):
    s = TrajectorySystem(-20.0, 60.0, 0.0, 0.0, gamma, 20.0, 0.0)
    r = integrate_trajectory(s, 50 * 2 * math.pi, y0=[0.0, 0.0, 1.5, 0.3], every=1)
    # E = p^2 + x^2/4 from x and its samples; reconstruct p via the final state
    E_end = r.final_state[3] ** 2 + r.final_state[2] ** 2 / 4
    E0 = 0.3**2 + 1.5**2 / 4
    assert E_end <= E0 * (1 + 1e-10)
    assert E_end == pytest.approx(E0 * math.exp(-gamma / 20.0 * 50 * 2 * math.pi), rel=1e-6)
    # the amplitude envelope never grows
    peaks = [np.max(np.abs(r.x[i : i + 1000])) for i in range(0, len(r.x) - 1000, 1000)]
    assert all(b <= a * (1 + 1e-9) for a, b in zip(peaks, peaks[1:]))


def test_step_size_guard():
    with pytest.raises(ValueError):
        integrate_trajectory(TrajectorySystem.from_population(0.1), 10.0, dtau=0.05)


def test_short_run_has_no_stats():
    r = integrate_trajectory(TrajectorySystem.from_population(0.1), 10 * 2 * math.pi)
    assert math.isnan(r.sigma_x) and math.isnan(r.x_mean)


def test_escape_raises_with_time():
    s = TrajectorySystem(-20.0, 60.0, 0.0, 0.0, 0.0, 20.0, 1.0)
    with pytest.raises(TrajectoryEscaped) as ei:
        integrate_trajectory(s, 20 * 2 * math.pi, y0=[0.0, 0.0, 0.0, 3.0])
    assert 0 < ei.value.tau < 20 * 2 * math.pi


def test_oscillation_stats_sinusoid():
    tau = np.arange(0, 400 * 2 * math.pi, 2 * math.pi / 100)
    sigma, mean, n = oscillation_stats(tau, 0.2 + 3.0 * np.sin(tau))
    assert sigma == pytest.approx(3.0 / math.sqrt(2), rel=1e-4)
    assert mean == pytest.approx(0.2, abs=1e-4)
    assert n == pytest.approx(sigma**2 / 4)


def test_oscillation_stats_constant_and_short():
    tau = np.linspace(0, 400 * 2 * math.pi, 40001)
    sigma, mean, _ = oscillation_stats(tau, np.full_like(tau, -1.3))
    assert sigma < 1e-15 and mean == pytest.approx(-1.3, rel=1e-15)
    with pytest.raises(WindowTooShort):
        oscillation_stats(tau[:1000], tau[:1000])
    with pytest.raises(ValueError):
        oscillation_stats(tau, tau, settle_fraction=1.0)


# ----------------------------------------------------------- linear stability


def test_fixed_point_is_stationary():
    s = TrajectorySystem.from_population(0.25, delta_omega_b=0.2)
    y = fixed_point(s)
    r = integrate_trajectory(s, 2 * math.pi, y0=y, every=1)
    assert np.allclose(r.final_state, y, atol=1e-10)


@pytest.mark.parametrize("dw", sorted(HOPF))
def test_hopf_thresholds(dw):
    assert instability_threshold(dw) == pytest.approx(HOPF[dw], abs=5e-5)


def test_onset_ordering():
    t = [instability_threshold(dw) for dw in (0.0, 0.1, 0.2)]
    assert t[0] < t[1] < t[2]


def test_threshold_bracket_errors():
    with pytest.raises(ArithmeticError):
        instability_threshold(0.1, lo=0.5, hi=2.0)


@pytest.mark.parametrize("dw", [0.0, 0.2])
def test_quiescent_below_threshold(dw):
    s = TrajectorySystem.from_population(0.25, delta_omega_b=dw)
    assert stability_margin(s) < 0
    r = run_to_steady(s)
    assert r.converged and r.sigma_x < 1e-5


@pytest.mark.slow
def test_self_oscillation_above_threshold():
    s = TrajectorySystem.from_population(0.35, delta_omega_b=0.2)
    assert stability_margin(s) > 0
    r = run_to_steady(s)
    assert r.sigma_x > 0.1
