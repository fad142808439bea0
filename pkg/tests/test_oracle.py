import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import harmonic_X, thermal_populations

from anharm_om.morse import MorseParams, eigenfrequencies, position_matrix
from anharm_om.oracle import (
    GridSpec,
    GridTooSmall,
    StabilityError,
    evolve_rate_ladder,
    grid_diagonalize,
    numeric_position_elements,
    overlap_matrix,
)
from anharm_om.rates import BathConfig, RateLadder, total_rates


@pytest.fixture(scope="module")
def morse_eig():
    return grid_diagonalize(MorseParams(20.0, 0.2), n_states=25)


def test_harmonic_eigenvalues():
    eig = grid_diagonalize(MorseParams(20.0, 0.0, max_levels=11), n_states=11)
    assert np.allclose(eig.eigenvalues, 20.0 * (np.arange(11) + 0.5), rtol=1e-8)


def test_morse_eigenvalues_k_le_24(morse_eig):
    m = MorseParams(20.0, 0.2)
    assert np.allclose(morse_eig.eigenvalues, eigenfrequencies(m, 25), rtol=1e-8)


def test_bound_state_count():
    m = MorseParams(20.0, 2.0)
    assert m.n_bound == 5
    eig = grid_diagonalize(m, n_states=5)
    # the fifth state sits just below the dissociation energy 50 THz
    assert eig.eigenvalues[-1] < 20.0**2 / (4 * 2.0)
    with pytest.raises(ValueError):
        grid_diagonalize(m, n_states=7)
    with pytest.raises(ValueError):
        grid_diagonalize(m, n_states=0)


def test_orthonormality(morse_eig):
    assert np.max(np.abs(overlap_matrix(morse_eig) - np.eye(25))) < 1e-8


def test_position_elements_match_closed_form(morse_eig):
    m = MorseParams(20.0, 0.2)
    X = numeric_position_elements(morse_eig)[:10, :10]
    assert np.max(np.abs(X - position_matrix(m, 10))) < 1e-6


def test_harmonic_x01():
    eig = grid_diagonalize(MorseParams(20.0, 0.0, max_levels=4), n_states=4)
    X = numeric_position_elements(eig)
    assert X[0, 1] == pytest.approx(1.0, abs=1e-8)
    assert X[1, 2] == pytest.approx(math.sqrt(2), abs=1e-8)
    assert abs(X[0, 2]) < 1e-8


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        GridSpec(1.0, 5.0)
    with pytest.raises(ValueError):
        GridSpec(-1.0, 1.0, 1)
    g = GridSpec(-1.0, 1.0, 11).refined()
    assert g.n_points == 21 and np.allclose(g.points()[::2], GridSpec(-1.0, 1.0, 11).points())


def test_explicit_small_grid_is_rejected():
    with pytest.raises(GridTooSmall):
        grid_diagonalize(MorseParams(20.0, 0.2), grid=GridSpec(-2.0, 2.0, 2000), n_states=5)


def test_refinement_changes_eigenvalues_little():
    m = MorseParams(20.0, 0.1)
    a = grid_diagonalize(m, n_states=6)
    b = grid_diagonalize(m, grid=a.grid.refined(), n_states=6)
    assert np.max(np.abs(a.eigenvalues - b.eigenvalues) / b.eigenvalues) < 1e-8


def test_richardson_improves_accuracy():
    m = MorseParams(20.0, 0.2)
    ex = eigenfrequencies(m, 6)
    raw = grid_diagonalize(m, n_states=6, richardson=False)
    rich = grid_diagonalize(m, n_states=6)
    assert np.max(np.abs(rich.eigenvalues - ex)) < 0.1 * np.max(np.abs(raw.eigenvalues - ex))


# ------------------------------------------------------------ ladder evolution


def _thermal_ladder(K, n_th=0.1, gamma=0.05):
    return total_rates(RateLadder(np.zeros(K), np.zeros(K), np.zeros(K)), BathConfig(gamma, n_th))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_evolution_conserves_probability(K, seed):
    rng = np.random.default_rng(seed)
    lad = total_rates(
        RateLadder(np.zeros(K), np.r_[rng.uniform(0, 1, K - 1), 0], np.r_[0, rng.uniform(0, 1, K - 1)]),
        BathConfig(0.05, 0.05),
    )
    p0 = rng.dirichlet(np.ones(K))
    _, P = evolve_rate_ladder(lad, position_matrix(MorseParams(20.0, 0.5), K), p0, 20.0)
    assert np.allclose(P.sum(axis=1), 1, atol=1e-12)
    assert np.all(P > -1e-12)


def test_evolution_thermalises():
    K = 20
    t, P = evolve_rate_ladder(_thermal_ladder(K), harmonic_X(K), np.eye(K)[0], 200 / 0.05)
    assert t[0] == 0 and t[-1] == pytest.approx(4000.0)
    assert np.max(np.abs(P[-1] - thermal_populations(0.1, K))) < 1e-8


def test_evolution_step_guard():
    lad = _thermal_ladder(4)
    with pytest.raises(StabilityError):
        evolve_rate_ladder(lad, harmonic_X(4), np.eye(4)[0], 10.0, dt=100.0)
    zero = total_rates(RateLadder(np.zeros(3), np.zeros(3), np.zeros(3)), BathConfig(0.0, 0.0))
    with pytest.raises(StabilityError):
        evolve_rate_ladder(zero, harmonic_X(3), np.eye(3)[0], 1.0)
