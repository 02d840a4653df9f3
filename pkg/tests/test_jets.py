import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvstab.geometry.jets import Jet, cos, sin, stack

coords = st.lists(st.floats(-1.5, 1.5), min_size=2, max_size=2)


def _fd_grad_hess(f, x, h=1e-4):
    x = np.asarray(x, dtype=float)
    d = x.size
    grad = np.zeros(d)
    hess = np.zeros((d, d))
    e = np.eye(d) * h
    for i in range(d):
        grad[i] = (f(x + e[i]) - f(x - e[i])) / (2 * h)
        for j in range(d):
            hess[i, j] = (f(x + e[i] + e[j]) - f(x + e[i] - e[j]) - f(x - e[i] + e[j])
                          + f(x - e[i] - e[j])) / (4 * h * h)
    return grad, hess


def _expr(x, y):
    return sin(x) * cos(y) ** 2 / (2.0 + x * x) + (1.5 + y * y) ** 0.5 - 3.0 * x * y


@settings(max_examples=30, deadline=None)
@given(coords)
def test_jet_matches_finite_differences(p):
    x, y = Jet.variables(p)
    j = _expr(x, y)
    g, h = _fd_grad_hess(lambda q: _expr(q[0], q[1]), p)
    assert j.val == pytest.approx(_expr(*p), rel=1e-14)
    np.testing.assert_allclose(j.grad, g, rtol=1e-7, atol=1e-7)
    np.testing.assert_allclose(j.hess, h, rtol=1e-5, atol=1e-5)


def test_hessian_is_symmetric_and_exact_for_polynomials():
    x, y, z = Jet.variables([0.3, -0.7, 1.1])
    j = x * x * y + 2.0 * y * z - z * z * z
    np.testing.assert_array_equal(j.hess, j.hess.T)
    expected = np.array([[2 * -0.7, 2 * 0.3, 0.0], [2 * 0.3, 0.0, 2.0], [0.0, 2.0, -6 * 1.1]])
    np.testing.assert_allclose(j.hess, expected, rtol=0, atol=1e-15)


def test_constant_and_reverse_operators():
    (x,) = Jet.variables([2.0])
    j = 1.0 / x - (3.0 - x) + 2 * x
    assert j.val == pytest.approx(0.5 - 1.0 + 4.0)
    assert j.grad[0] == pytest.approx(-0.25 + 1.0 + 2.0)
    assert j.hess[0, 0] == pytest.approx(2.0 / 8.0)
    c = Jet.constant(5.0, 3)
    assert c.grad.shape == (3,) and not c.hess.any()


def test_sqrt_and_stack():
    (x,) = Jet.variables([4.0])
    s = x.sqrt()
    assert (s.val, s.grad[0], s.hess[0, 0]) == pytest.approx((2.0, 0.25, -1.0 / 32.0))
    st_ = stack([x, 1.0, x * x], 1)
    assert st_.val.shape == (3,) and st_.grad.shape == (3, 1) and st_.hess.shape == (3, 1, 1)
    assert st_.grad[2, 0] == pytest.approx(8.0)


def test_plain_numbers_pass_through_trig():
    assert sin(0.5) == pytest.approx(math.sin(0.5))
    assert cos(0.5) == pytest.approx(math.cos(0.5))
