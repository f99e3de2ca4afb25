import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdx.errors import GridTooCoarse
from qdx.quadrature import integrate


def test_polynomial_exact():
    r = integrate(lambda x: 3 * x ** 2 + x ** 7, -1.0, 2.0)
    assert math.isclose(r.value, 9.0 + (2 ** 8 - 1) / 8, rel_tol=1e-13)


def test_lorentzian_peak():
    eta = 1e-3
    r = integrate(lambda x: eta / (x * x + eta * eta), -1.0, 1.0, rtol=1e-10, initial=8)
    want = 2 * math.atan(1 / eta)
    assert abs(r.value - want) < 1e-9 * want
    assert r.error < 1e-8 * want


def test_error_estimate_is_honest():
    r = integrate(np.sqrt, 0.0, 1.0, rtol=1e-8)
    assert abs(r.value - 2 / 3) <= max(r.error, 1e-12) * 10


def test_depth_limit():
    with pytest.raises(GridTooCoarse):
        integrate(lambda x: np.where(x > 0.3, 1.0 / np.abs(x - 0.3) ** 1.2, 0.0), 0.0, 1.0,
                  rtol=1e-12, max_depth=10)


def test_bad_interval():
    with pytest.raises(ValueError):
        integrate(np.sin, 1.0, 1.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 20), st.floats(-3, 3))
def test_gaussian(a, c):
    r = integrate(lambda x: np.exp(-a * (x - c) ** 2), -15.0, 15.0, rtol=1e-10, initial=4)
    assert math.isclose(r.value, math.sqrt(math.pi / a), rel_tol=1e-9)
