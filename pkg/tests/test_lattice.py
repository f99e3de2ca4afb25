import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdx.errors import DomainError, OutOfRangeError
from qdx.lattice import (
    LatticeWindow, PotentialSpec, apply_hamiltonian, potential_array, potential_value,
    spectral_bound,
)


def indicator_oracle(n, lam, theta=0.0):
    # V(n) = lam * 1[frac(n/phi + theta) >= 1 - 1/phi] at 60 digits
    import mpmath
    with mpmath.workdps(60):
        a = 1 / mpmath.phi
        x = n * a + theta
        f = x - mpmath.floor(x)
        return lam if f >= 1 - a else 0.0


def test_fibonacci_examples():
    spec = PotentialSpec.fibonacci(8.0)
    assert potential_value(spec, 1) == 8.0
    assert potential_value(spec, 2) == 0.0
    assert potential_value(spec, 0) == 0.0


def test_free_is_zero():
    assert np.all(potential_array(PotentialSpec.free(), np.arange(-50, 50)) == 0)


def test_matches_high_precision_indicator():
    spec = PotentialSpec.fibonacci(3.0)
    n = np.concatenate([np.arange(-200, 201), [10 ** 6, -(10 ** 6) - 7, 123456789]])
    got = potential_array(spec, n)
    want = [indicator_oracle(int(k), 3.0) for k in n]
    assert np.array_equal(got, want)


def test_phase_shifts_the_sequence():
    spec = PotentialSpec.fibonacci(1.0, theta=0.3)
    n = np.arange(-100, 100)
    want = [indicator_oracle(int(k), 1.0, 0.3) for k in n]
    assert np.array_equal(potential_array(spec, n), want)


def test_two_letter_sturmian_counts():
    # balanced word: counts of V = lam in windows of equal length differ by at most one
    v = potential_array(PotentialSpec.fibonacci(1.0), np.arange(0, 5000))
    for m in (5, 13, 40):
        s = np.convolve(v, np.ones(m), "valid")
        assert s.max() - s.min() <= 1


def test_custom_out_of_range():
    spec = PotentialSpec.custom([1.0, 2.0, 3.0], table_start=-1)
    assert potential_value(spec, 1) == 3.0
    with pytest.raises(OutOfRangeError):
        potential_value(spec, 2)


@pytest.mark.parametrize("kw", [dict(kind="bogus"), dict(kind="fibonacci", lam=-1.0),
                                dict(kind="fibonacci", lam=1.0, theta=1.0)])
def test_invalid_specs(kw):
    with pytest.raises(DomainError):
        PotentialSpec(**kw)


def test_roundtrip_dict():
    for spec in (PotentialSpec.free(), PotentialSpec.fibonacci(8.0, 0.25),
                 PotentialSpec.custom([0.5, 1.5], 3)):
        assert PotentialSpec.from_dict(spec.to_dict()) == spec


def test_apply_hamiltonian_examples():
    out = apply_hamiltonian(LatticeWindow.delta(0), PotentialSpec.free())
    assert out.left == -1
    assert np.array_equal(out.amplitudes, [1, 0, 1])
    out = apply_hamiltonian(LatticeWindow.delta(0), PotentialSpec.fibonacci(8.0))
    assert np.array_equal(out.amplitudes, [1, 0, 1])


def test_spectral_bound_examples():
    assert spectral_bound(PotentialSpec.free()) == 4
    assert spectral_bound(PotentialSpec.fibonacci(8.0)) == 11
    assert spectral_bound(PotentialSpec.custom([0.0] * 5)) == 4


@settings(max_examples=40, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=30),
       st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=30),
       st.floats(0.5, 20.0))
def test_hamiltonian_is_symmetric(a, b, lam):
    spec = PotentialSpec.fibonacci(lam)
    u = LatticeWindow(-(len(a) // 2), np.array(a))
    v = LatticeWindow(-(len(b) // 2), np.array(b))
    lhs = apply_hamiltonian(u, spec).inner(v)
    rhs = u.inner(apply_hamiltonian(v, spec))
    assert abs(lhs - rhs) <= 1e-9 * (1 + abs(lhs))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=40))
def test_hamiltonian_norm_bound(a):
    spec = PotentialSpec.fibonacci(8.0)
    u = LatticeWindow(-(len(a) // 2), np.array(a))
    K = spectral_bound(spec)
    assert apply_hamiltonian(u, spec).norm() <= (K - 1) * u.norm() + 1e-9
