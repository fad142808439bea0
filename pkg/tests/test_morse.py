import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anharm_om.morse import (
    HarmonicLadderError,
    LevelOutOfRange,
    MorseParams,
    bound_state_count,
    diagonal_element_approx,
    dressing_step_approx,
    eigenfrequencies,
    eigenfrequency,
    position_element,
    position_matrix,
)

# 40-digit mpmath evaluations of the closed-form elements
X_REF = {
    (0.2, 0, 1): 1.0049854899791944,
    (0.2, 1, 2): 1.4284939215085404,
    (0.2, 0, 2): -0.071773154232761148,
    (0.2, 0, 3): 0.0084125121937010278,
    (0.2, 0, 0): 0.15109343351014069,
    (0.2, 3, 3): 1.0953795216318716,
    (0.2, 4, 2): -0.17944802958457914,
    (0.1, 0, 1): 1.0024966283474347,
    (0.1, 1, 1): 0.32108815518862549,
    (0.1, 4, 2): -0.12464967678754285,
    (2.0, 0, 1): 1.0458250331675944,
    (2.0, 0, 3): 0.09960238411119947,
    (2.0, 3, 3): 6.3133843359470872,
}


def test_bound_state_counts():
    assert MorseParams(20, 0.2).lam == pytest.approx(49.5)
    assert bound_state_count(MorseParams(20, 0.2)) == 50
    assert bound_state_count(MorseParams(20, 0.1)) == 100
    assert bound_state_count(MorseParams(20, 2.0)) == 5


def test_integer_lambda_drops_level_at_dissociation():
    # N = (20/4 - 1)/2 = 2 exactly: level 2 would sit at the dissociation limit
    m = MorseParams(20, 4.0)
    assert m.lam == 2.0
    assert bound_state_count(m) == 2


def test_harmonic_has_no_bound_count():
    with pytest.raises(HarmonicLadderError):
        bound_state_count(MorseParams(20, 0.0))
    with pytest.raises(HarmonicLadderError):
        MorseParams(20, 0.0).n_bound
    assert MorseParams(20, 0.0, max_levels=12).n_bound == 12


def test_max_levels_caps_ladder():
    assert MorseParams(20, 0.1, max_levels=16).n_bound == 16
    assert MorseParams(20, 2.0, max_levels=16).n_bound == 5


@pytest.mark.parametrize("dw", [-0.1, 20.0, 25.0])
def test_invalid_anharmonicity(dw):
    with pytest.raises(ValueError):
        MorseParams(20, dw)


def test_a_tilde_identity():
    for dw in (0.1, 0.2, 2.0, 7.3):
        m = MorseParams(20, dw)
        assert m.a_tilde**2 * m.omega_b == pytest.approx(dw, rel=1e-15)


def test_eigenfrequency_examples():
    m = MorseParams(20, 0.2)
    assert eigenfrequency(m, 0) == pytest.approx(9.95, abs=1e-12)
    assert eigenfrequency(m, 1) - eigenfrequency(m, 0) == pytest.approx(19.6, abs=1e-12)
    assert np.allclose(eigenfrequencies(m, 5), [eigenfrequency(m, k) for k in range(5)], rtol=0, atol=1e-12)


def test_eigenfrequency_out_of_range():
    m = MorseParams(20, 0.2)
    eigenfrequency(m, 49)
    with pytest.raises(LevelOutOfRange):
        eigenfrequency(m, 50)
    with pytest.raises(LevelOutOfRange):
        eigenfrequency(m, -1)
    with pytest.raises(LevelOutOfRange):
        position_element(m, 50, 0)


def test_harmonic_eigenfrequencies_unbounded():
    m = MorseParams(20, 0.0)
    assert eigenfrequency(m, 1000) == pytest.approx(20 * 1000.5)


@pytest.mark.parametrize("dw", [0.1, 0.2, 2.0])
def test_spectrum_monotone_below_bound(dw):
    m = MorseParams(20, dw)
    kmax = 20 / (2 * dw) - 0.5
    w = eigenfrequencies(m, m.n_bound)
    k = np.arange(m.n_bound - 1)
    assert np.all(np.diff(w)[k + 1 < kmax] > 0)


@pytest.mark.parametrize("key", sorted(X_REF))
def test_position_element_reference(key):
    dw, n, mm = key
    assert position_element(MorseParams(20, dw), n, mm) == pytest.approx(X_REF[key], abs=1e-12)


def test_near_harmonic_ground_element():
    m = MorseParams(20, 20e-8)
    assert abs(position_element(m, 0, 1) - 1.0) < 1e-3


def test_harmonic_recovery_block():
    m = MorseParams(20, 20e-8)
    X = position_matrix(m, 11)
    for n in range(11):
        for k in range(11):
            if abs(n - k) == 1:
                assert abs(X[n, k] - math.sqrt(max(n, k))) <= 1e-3
            elif abs(n - k) >= 2:
                assert abs(X[n, k]) <= 1e-3


def test_harmonic_mode_elements():
    m = MorseParams(20, 0.0)
    assert position_element(m, 3, 4) == 2.0
    assert position_element(m, 4, 3) == 2.0
    assert position_element(m, 3, 5) == 0.0
    assert position_element(m, 2, 2) == 0.0


def test_elements_do_not_overflow_for_deep_wells():
    m = MorseParams(20, 0.01)  # N ~ 1000, Gamma(2N) overflows float64
    v = position_element(m, 40, 3)
    assert math.isfinite(v) and abs(v) < 1


@pytest.mark.parametrize("dw", [0.1, 0.2, 2.0])
def test_offdiagonal_decay(dw):
    m = MorseParams(20, dw)
    K = min(11, m.n_bound)
    X = np.abs(position_matrix(m, K))
    for n in range(K):
        for side in (1, -1):
            vals = [X[n, n + side * d] for d in range(1, K) if 0 <= n + side * d < K]
            assert all(a > b for a, b in zip(vals, vals[1:]))


@settings(max_examples=150, deadline=None)
@given(
    st.floats(min_value=0.01, max_value=3.0),
    st.integers(min_value=0, max_value=10),
    st.integers(min_value=0, max_value=10),
)
def test_symmetry(dw, n, k):
    m = MorseParams(20, dw)
    if max(n, k) >= m.n_bound:
        return
    assert position_element(m, n, k) == position_element(m, k, n)


def test_diagonal_approx_is_affine():
    m = MorseParams(20, 0.1)
    N = m.lam
    step = math.sqrt(20 / 0.1) * (3 + 2 / N) / (2 * N + 1)
    d = [diagonal_element_approx(m, n) for n in range(6)]
    assert np.allclose(np.diff(d), step, rtol=0, atol=1e-12)


def test_diagonal_approx_tracks_exact_increments():
    # the expansion reproduces the k-dependence; the n-independent offset is
    # only roughly captured (33% off at n = 0 for dw = 0.1)
    m = MorseParams(20, 0.1)
    e = [position_element(m, n, n) for n in range(6)]
    a = [diagonal_element_approx(m, n) for n in range(6)]
    assert abs((a[1] - a[0]) - (e[1] - e[0])) / (e[1] - e[0]) < 0.01
    for n in range(1, 6):
        assert abs((a[n] - a[0]) - (e[n] - e[0])) / (e[n] - e[0]) < 0.03
    assert abs(a[5] - e[5]) / e[5] < 0.01


def test_dressing_step_example():
    m = MorseParams(20, 0.2)
    approx = dressing_step_approx(m, 1.0, 2.0)
    assert approx == pytest.approx(2 * 10 * (3 + 2 / 49.5) / 100, rel=1e-12)
    assert approx == pytest.approx(0.608, abs=5e-4)
    exact = 2 * (position_element(m, 1, 1) - position_element(m, 0, 0))
    assert abs(approx - exact) / exact < 0.02
