"""Spin algebra: operator construction, Dicke states, and coherent states."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from doublewell_qfi import (
    SpinQuantumNumber,
    StateVector,
    build_operators,
    dicke_state,
    expectation,
    spin_coherent_state,
    symmetrized_second_moments,
)

from oracles import random_state


def ops_for(twice_j):
    return build_operators(SpinQuantumNumber(twice_j))


def test_spin_half_matrices():
    ops = ops_for(1)
    np.testing.assert_allclose(np.diag(ops.jz), [-0.5, 0.5])
    np.testing.assert_allclose(ops.jx, [[0.0, 0.5], [0.5, 0.0]])


def test_spin_one_ladder_entries():
    # ladder formula by hand: both off-diagonals equal 1/sqrt(2)
    ops = ops_for(2)
    np.testing.assert_allclose(np.diag(ops.jz), [-1.0, 0.0, 1.0])
    np.testing.assert_allclose(np.diag(ops.jx, 1), [1.0 / math.sqrt(2)] * 2, atol=1e-15)
    np.testing.assert_allclose(ops.jx, ops.jx.T)


@pytest.mark.parametrize("twice_j", [1, 2, 10, 100])
def test_su2_algebra(twice_j):
    ops = ops_for(twice_j)
    jj = twice_j / 2.0
    dim = twice_j + 1

    assert np.max(np.abs(ops.jx - ops.jx.T)) == 0.0
    assert np.max(np.abs(ops.jz - ops.jz.T)) == 0.0
    assert np.max(np.abs(ops.jy.real)) == 0.0
    assert np.max(np.abs(ops.jy + ops.jy.T)) == 0.0

    pairs = [(ops.jx, ops.jy, ops.jz), (ops.jy, ops.jz, ops.jx), (ops.jz, ops.jx, ops.jy)]
    for a, b, c in pairs:
        comm = a @ b - b @ a
        assert np.max(np.abs(comm - 1j * c)) < 1e-12

    casimir = ops.jx @ ops.jx + ops.jy @ ops.jy + ops.jz @ ops.jz
    assert np.max(np.abs(casimir - jj * (jj + 1.0) * np.eye(dim))) < 1e-10
    np.testing.assert_allclose(ops.jz @ ops.jz, ops.jz2, atol=1e-14)


def test_nested_commutator_does_not_vanish():
    ops = ops_for(4)
    inner = ops.jx @ ops.jz - ops.jz @ ops.jx
    nested = ops.jx @ inner - inner @ ops.jx
    assert np.max(np.abs(nested)) > 0.1


@pytest.mark.parametrize("bad", [0, -2])
def test_rejects_nonpositive_spin(bad):
    with pytest.raises(ValueError):
        SpinQuantumNumber(bad)


def test_rejects_non_half_integer_j():
    with pytest.raises(ValueError):
        SpinQuantumNumber.from_j(0.6)
    assert SpinQuantumNumber.from_j(2.5).twice_j == 5


def test_dicke_examples():
    j1 = SpinQuantumNumber(2)
    np.testing.assert_allclose(dicke_state(j1, 0).amplitudes, [0, 1, 0])

    j50 = SpinQuantumNumber(100)
    lowest = dicke_state(j50, -50)
    assert lowest.amplitudes[0] == 1.0
    assert np.count_nonzero(lowest.amplitudes) == 1


def test_dicke_rejects_bad_m():
    j1 = SpinQuantumNumber(2)
    with pytest.raises(ValueError):
        dicke_state(j1, 1.5)
    with pytest.raises(ValueError):
        dicke_state(j1, 2)
    with pytest.raises(ValueError):
        dicke_state(SpinQuantumNumber(1), 0)


@st.composite
def spin_levels(draw):
    twice_j = draw(st.integers(min_value=1, max_value=60))
    level = draw(st.integers(min_value=0, max_value=twice_j))
    return twice_j, level


@given(spin_levels())
@settings(max_examples=40, deadline=None)
def test_dicke_state_properties(spin_level):
    twice_j, level = spin_level
    j = SpinQuantumNumber(twice_j)
    m = -j.j + level
    state = dicke_state(j, m)
    ops = build_operators(j)

    assert abs(np.linalg.norm(state.amplitudes) - 1.0) < 1e-12
    np.testing.assert_allclose(expectation(ops, state), [0.0, 0.0, m], atol=1e-10)

    moments = symmetrized_second_moments(ops, state)
    transverse = (j.j * (j.j + 1.0) - m * m) / 2.0
    np.testing.assert_allclose(
        moments, np.diag([transverse, transverse, m * m]), atol=1e-9
    )


def test_spin_half_equator_coherent_state():
    state = spin_coherent_state(SpinQuantumNumber(1), math.pi / 2.0, 0.0)
    np.testing.assert_allclose(state.amplitudes, [1 / math.sqrt(2)] * 2, atol=1e-15)


@pytest.mark.parametrize("twice_j", [1, 7, 100])
def test_coherent_state_poles(twice_j):
    j = SpinQuantumNumber(twice_j)
    np.testing.assert_array_equal(
        spin_coherent_state(j, 0.0, 1.3).amplitudes, dicke_state(j, -j.j).amplitudes
    )
    np.testing.assert_array_equal(
        spin_coherent_state(j, math.pi, 0.2).amplitudes, dicke_state(j, j.j).amplitudes
    )


@pytest.mark.parametrize("twice_j", [1, 10, 100, 500])
def test_equator_amplitudes_match_binomials(twice_j):
    # at theta = pi/2 the amplitudes are sqrt(binom(2j, k)) / 2^j
    state = spin_coherent_state(SpinQuantumNumber(twice_j), math.pi / 2.0, 0.0)
    exact = np.array(
        [math.sqrt(math.comb(twice_j, k)) * 2.0 ** (-twice_j / 2.0) for k in range(twice_j + 1)]
    )
    rel = np.max(np.abs(state.amplitudes.real - exact) / exact)
    assert rel < 1e-12
    assert np.max(np.abs(state.amplitudes.imag)) == 0.0


@pytest.mark.parametrize("twice_j", [5, 100, 500])
def test_coherent_state_expectation_grid(twice_j):
    j = SpinQuantumNumber(twice_j)
    ops = build_operators(j)
    half_n = twice_j / 2.0
    for theta in np.linspace(0.0, math.pi, 10):
        for phi in np.linspace(0.0, 2.0 * math.pi, 10, endpoint=False):
            state = spin_coherent_state(j, float(theta), float(phi))
            got = expectation(ops, state)
            want = half_n * np.array(
                [
                    math.sin(theta) * math.cos(phi),
                    math.sin(theta) * math.sin(phi),
                    -math.cos(theta),
                ]
            )
            assert np.linalg.norm(got - want) < 1e-9 * half_n


@pytest.mark.parametrize("twice_j", [1, 2, 5, 10])
def test_coherent_state_rotation_identity(twice_j):
    # the coherent state equals the rotated lowest-weight state
    j = SpinQuantumNumber(twice_j)
    ops = build_operators(j)
    lowest = dicke_state(j, -j.j).amplitudes
    for theta in (0.4, 1.2, 2.1, 2.9):
        for phi in (0.0, 0.9, 2.2, 4.4):
            generator = -1j * theta * (ops.jx * math.sin(phi) - ops.jy * math.cos(phi))
            want = expm(generator) @ lowest
            got = spin_coherent_state(j, theta, phi).amplitudes
            assert np.linalg.norm(got - want) < 1e-8


def test_coherent_state_rejects_bad_theta():
    j = SpinQuantumNumber(4)
    with pytest.raises(ValueError):
        spin_coherent_state(j, -0.1, 0.0)
    with pytest.raises(ValueError):
        spin_coherent_state(j, math.pi + 0.1, 0.0)
    with pytest.raises(ValueError):
        spin_coherent_state(j, 1.0, math.inf)


def test_second_moment_trace_is_casimir():
    rng = np.random.default_rng(11)
    for twice_j in (1, 4, 9, 40):
        j = SpinQuantumNumber(twice_j)
        ops = build_operators(j)
        for _ in range(5):
            state = random_state(rng, twice_j)
            moments = symmetrized_second_moments(ops, state)
            assert abs(np.trace(moments) - j.j * (j.j + 1.0)) < 1e-9
            np.testing.assert_allclose(moments, moments.T)


def test_spin_half_equator_second_moments():
    # spin 1/2: every squared component is the identity over 4
    ops = ops_for(1)
    state = spin_coherent_state(SpinQuantumNumber(1), math.pi / 2.0, 0.0)
    moments = symmetrized_second_moments(ops, state)
    np.testing.assert_allclose(np.diag(moments), [0.25, 0.25, 0.25], atol=1e-15)


def test_statevector_rejects_unnormalized():
    j = SpinQuantumNumber(2)
    with pytest.raises(ValueError):
        StateVector(np.array([1.0, 1.0, 0.0]), j)
    with pytest.raises(ValueError):
        StateVector(np.array([1.0, 0.0]), j)


def test_statevector_amplitudes_are_frozen():
    state = dicke_state(SpinQuantumNumber(2), 0)
    with pytest.raises(ValueError):
        state.amplitudes[0] = 1.0


def test_expectation_dimension_mismatch():
    ops = ops_for(2)
    state = dicke_state(SpinQuantumNumber(4), 0)
    with pytest.raises(ValueError):
        expectation(ops, state)
    with pytest.raises(ValueError):
        symmetrized_second_moments(ops, state)
