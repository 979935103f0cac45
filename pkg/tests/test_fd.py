import math

import numpy as np
import pytest

from lcd import fd


def test_d1_d2_scalar():
    f = math.sin
    for x in [0.0, 0.3, 1.7]:
        assert fd.d1(f, x) == pytest.approx(math.cos(x), abs=1e-8)
        assert fd.d2(f, x) == pytest.approx(-math.sin(x), abs=1e-6)
        assert fd.d1(f, x, order=4) == pytest.approx(math.cos(x), abs=1e-10)
        assert fd.d2(f, x, order=4) == pytest.approx(-math.sin(x), abs=1e-8)


def test_richardson_improves_and_estimates_error():
    f = lambda t: math.exp(2.0 * t)
    val, err = fd.d1_richardson(f, 0.4, 1e-3)
    true = 2.0 * math.exp(0.8)
    assert abs(val - true) <= max(10 * err, 1e-11)
    val2, err2 = fd.d2_richardson(f, 0.4, 1e-3)
    assert abs(val2 - 4.0 * math.exp(0.8)) <= max(10 * err2, 1e-8)


def test_gradient_jacobian_hessian():
    def f(x):
        return x[0] ** 2 * x[1] + math.sin(x[1])

    x = np.array([0.7, -0.4])
    grad = fd.gradient(f, x)
    assert grad == pytest.approx([2 * 0.7 * -0.4, 0.49 + math.cos(-0.4)],
                                 abs=1e-7)

    def vec(x):
        return np.array([x[0] * x[1], x[0] - x[1] ** 2])

    J = fd.jacobian(vec, x)
    assert np.allclose(J, [[-0.4, 0.7], [1.0, 0.8]], atol=1e-7)

    H = fd.hessian(f, x)
    H_true = np.array([[2 * -0.4, 2 * 0.7],
                       [2 * 0.7, -math.sin(-0.4)]])
    assert np.allclose(H, H_true, atol=1e-5)
    assert np.allclose(H, H.T)  # symmetrized


def test_directional():
    def f(x):
        return math.cos(x[0]) * x[1]

    x = np.array([0.2, 1.1])
    u = np.array([1.0, 2.0]) / math.sqrt(5.0)
    want = np.dot([-math.sin(0.2) * 1.1, math.cos(0.2)], u)
    assert fd.directional(f, x, u, 1e-3) == pytest.approx(want, abs=1e-10)


def test_step_scaling():
    # default steps should balance truncation against roundoff
    assert fd.step_first(1.0) < fd.step_second(1.0)
    big = fd.step_first(1e6)
    small = fd.step_first(1e-3)
    assert big > small
