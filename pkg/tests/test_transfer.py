import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdx.errors import DegenerateFit
from qdx.lattice import PotentialSpec, potential_array
from qdx.transfer import (
    TransferMatrix, fibonacci_matrix, fibonacci_matrix_direct, fibonacci_number,
    log_norm_profile, power_law_fit, transfer_matrix, window_log_max_norm_sq, window_max_norm,
)

FIB8 = PotentialSpec.fibonacci(8.0)


def mp_window_max_norm_sq(z, N, side, spec, dps=60):
    """Direct product of 2x2 matrices in mpmath, largest singular value squared."""
    with mpmath.workdps(dps):
        z = mpmath.mpc(z.real, z.imag)
        m = mpmath.eye(2)
        best = mpmath.mpf(1)
        if side == "right":
            sites = range(1, N)
        else:
            sites = range(0, -N + 1, -1)
        for n in sites:
            v = float(potential_array(spec, np.array([n]))[0])
            if side == "right":
                m = mpmath.matrix([[z - v, -1], [1, 0]]) * m
            else:
                m = mpmath.matrix([[0, 1], [-1, z - v]]) * m
            ev = mpmath.eighe(m.H * m, eigvals_only=True)
            best = max(best, max(ev))
        return best


def test_identity_at_zero():
    m = transfer_matrix(0, 0.3 + 0.1j, FIB8)
    assert np.allclose(m.to_array(), np.eye(2))


@pytest.mark.parametrize("n", [1, 2, 3, 7, 50])
def test_free_zero_energy_is_rotation(n):
    m = transfer_matrix(n, 0.0, PotentialSpec.free()).to_array()
    rot = np.array([[0, -1], [1, 0]])
    assert np.allclose(m, np.linalg.matrix_power(rot, n))
    assert math.isclose(transfer_matrix(n, 0.0, PotentialSpec.free()).norm(), 1.0)


def test_propagates_solutions():
    z = 0.7 + 0.2j
    n = 40
    v = potential_array(FIB8, np.arange(-5, n + 2))
    u = {0: 0.3 + 0j, 1: 1.0 + 0.5j}
    for k in range(1, n + 1):
        u[k + 1] = (z - v[k + 5]) * u[k] - u[k - 1]
    for k in range(0, -5, -1):
        u[k - 1] = (z - v[k + 5]) * u[k] - u[k + 1]
    for m in (5, 17, n):
        got = transfer_matrix(m, z, FIB8).apply((u[1], u[0]))
        assert np.allclose(got, [u[m + 1], u[m]], rtol=1e-10)
    got = transfer_matrix(-4, z, FIB8).apply((u[1], u[0]))
    assert np.allclose(got, [u[-3], u[-4]], rtol=1e-10)


def test_unimodular_and_inverse():
    z = -1.3 + 0.05j
    for n in (1, 10, 60):
        for m in (transfer_matrix(n, z, FIB8), transfer_matrix(-n, z, FIB8)):
            # cancellation in ad - bc costs about eps ||Phi||^2
            assert abs(m.det() - 1) < 1e-14 * n * m.norm() ** 2 + 1e-14


def test_window_examples():
    assert window_max_norm(0.3 + 2j, 1, "right", FIB8) == 1.0
    assert window_max_norm(0.3 + 2j, 1, "left", FIB8) == 1.0
    assert math.isclose(window_max_norm(0.0, 57, "right", PotentialSpec.free()), 1.0)


@pytest.mark.parametrize("side", ["right", "left"])
def test_window_max_norm_high_precision(side):
    z = 0.01j
    got = window_max_norm(z, 100, side, FIB8)
    want = float(mp_window_max_norm_sq(z, 100, side, FIB8))
    assert got >= 1
    assert math.isclose(got, want, rel_tol=1e-9)


def test_window_log_norm_survives_overflow():
    # far outside the spectrum the norm grows like (lam + 4)^n
    ln = window_log_max_norm_sq(np.array([40.0 + 0.0j]), 2000, "right", FIB8)[0]
    assert math.isfinite(ln) and ln > 2 * 1000 * math.log(30)
    assert window_max_norm(40.0, 2000, "right", FIB8) == math.inf


def test_window_monotone_in_N():
    z = np.linspace(-10, 10, 7) + 0.03j
    prev = window_log_max_norm_sq(z, 1, "right", FIB8)
    for N in (2, 5, 20, 80):
        cur = window_log_max_norm_sq(z, N, "right", FIB8)
        assert np.all(cur >= prev)
        prev = cur


def test_fibonacci_numbers():
    assert [fibonacci_number(k) for k in range(8)] == [1, 1, 2, 3, 5, 8, 13, 21]


def test_fibonacci_matrix_level_one():
    z = 1.5 - 0.25j
    assert cmath.isclose(fibonacci_matrix(1, z, 8.0).trace(), z - 8.0)


@pytest.mark.parametrize("k", [2, 3, 5, 9])
def test_fibonacci_matrix_recursion_and_direct(k):
    z = 0.4 + 0.01j
    a = fibonacci_matrix(k, z, 8.0).to_array()
    b = fibonacci_matrix_direct(k, z, 8.0).to_array()
    assert np.allclose(a, b, rtol=1e-9, atol=1e-9)
    if k >= 3:
        m = (fibonacci_matrix(k - 2, z, 8.0) @ fibonacci_matrix(k - 1, z, 8.0)).to_array()
        assert np.allclose(a, m, rtol=1e-12, atol=1e-12)


def test_m5_product():
    z = -0.9 + 0.2j
    a = fibonacci_matrix(5, z, 8.0).to_array()
    b = (fibonacci_matrix(3, z, 8.0) @ fibonacci_matrix(4, z, 8.0)).to_array()
    assert np.allclose(a, b)


def test_rescaled_product_keeps_value():
    big = TransferMatrix.from_array([[1e200, 0], [0, 1e-200]])
    sq = big @ big
    assert sq.scale_exponent > 0
    assert math.isclose(sq.log_norm(), 2 * math.log(1e200), rel_tol=1e-12)
    assert sq.norm() == math.inf


def test_log_norm_profile_matches_matrices():
    z = np.array([0.2 + 0.0j, 3.0 + 0.1j])
    prof = log_norm_profile(z, 30, FIB8)
    for n in (0, 1, 13, 30):
        for i, zi in enumerate(z):
            assert math.isclose(prof[n, i], transfer_matrix(n, zi, FIB8).log_norm(),
                                rel_tol=1e-10, abs_tol=1e-12)


def test_power_law_fit_envelope():
    z = np.linspace(-2, 2, 9) + 0j
    fit = power_law_fit(z, 50, PotentialSpec.free())
    prof = log_norm_profile(z, 50, PotentialSpec.free())
    n = np.arange(1, 51)
    env = fit.log_c + fit.gamma * np.log(n)
    assert np.all(prof[1:] <= env[:, None] + 1e-12)
    with pytest.raises(DegenerateFit):
        power_law_fit(z, 1, PotentialSpec.free())


@settings(max_examples=30, deadline=None)
@given(st.floats(-12, 12), st.floats(0.0, 1.0), st.integers(1, 60), st.floats(0.5, 20))
def test_determinant_one(x, y, n, lam):
    m = transfer_matrix(n, complex(x, y), PotentialSpec.fibonacci(lam))
    assert abs(m.det() - 1) < 1e-14 * n * m.norm() ** 2 + 1e-14
