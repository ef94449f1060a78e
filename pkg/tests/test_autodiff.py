import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetgeom import autodiff as ad


def f(a, b, c):
    return ad.exp(a * b) / (1.0 + c * c) + ad.sqrt(b + 3.0) * ad.sin(c) - ad.log(2.0 + a) ** 3


def f_exact(a, b, c):
    # value, gradient and Hessian worked out by hand
    e = np.exp(a * b)
    q = 1.0 + c * c
    r = np.sqrt(b + 3.0)
    s, co = np.sin(c), np.cos(c)
    lg = np.log(2.0 + a)
    u = 1.0 / (2.0 + a)
    val = e / q + r * s - lg**3
    grad = np.array([b * e / q - 3 * lg**2 * u,
                     a * e / q + s / (2 * r),
                     -2 * c * e / q**2 + r * co])
    H = np.zeros((3, 3))
    H[0, 0] = b * b * e / q - (6 * lg * u * u - 3 * lg**2 * u * u)
    H[1, 1] = a * a * e / q - s / (4 * r**3)
    H[2, 2] = e * (6 * c * c - 2) / q**3 - r * s
    H[0, 1] = H[1, 0] = (1 + a * b) * e / q
    H[0, 2] = H[2, 0] = -2 * c * b * e / q**2
    H[1, 2] = H[2, 1] = -2 * c * a * e / q**2 + co / (2 * r)
    return val, grad, H


@settings(max_examples=100, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-2, 2))
def test_matches_hand_derivatives(a, b, c):
    v, g, H = ad.value_grad_hess(f, [a, b, c])
    ve, ge_, He = f_exact(a, b, c)
    assert v == pytest.approx(ve, rel=1e-13, abs=1e-13)
    assert np.allclose(g, ge_, rtol=1e-12, atol=1e-12)
    assert np.allclose(H, He, rtol=1e-11, atol=1e-11)


def test_batched_evaluation():
    pts = np.random.default_rng(0).uniform(-1, 1, (6, 3))
    v, g, H = ad.value_grad_hess(f, pts)
    for k in range(6):
        vk, gk, Hk = ad.value_grad_hess(f, pts[k])
        assert v[k] == vk and np.array_equal(g[k], gk) and np.array_equal(H[k], Hk)


def test_polynomial_against_finite_differences():
    poly = lambda x, y, z: x**3 * y - 2 * x * z**2 + y**4 + 5.0
    p = np.array([0.3, -0.7, 1.1])
    _, g, H = ad.value_grad_hess(poly, p)
    val = lambda q: poly(*q)
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1e-5 * (1 + abs(p[i]))
        assert g[i] == pytest.approx((val(p + e) - val(p - e)) / (2 * e[i]), rel=1e-6)
        gp = ad.value_grad_hess(poly, p + e)[1]
        gm = ad.value_grad_hess(poly, p - e)[1]
        assert np.allclose(H[:, i], (gp - gm) / (2 * e[i]), rtol=1e-6, atol=1e-8)


def test_constant_function_promoted():
    v, g, H = ad.value_grad_hess(lambda x, y: 2.5, [1.0, 2.0])
    assert v == 2.5 and not g.any() and not H.any()


def test_powers_and_division():
    v, g, H = ad.value_grad_hess(lambda x: x**0 + x**1 + x**2 + x**3 + 1 / x + x**0.5, [4.0])
    assert v == pytest.approx(1 + 4 + 16 + 64 + 0.25 + 2)
    assert g[0] == pytest.approx(1 + 8 + 48 - 1 / 16 + 0.25)
    assert H[0, 0] == pytest.approx(2 + 24 + 2 / 64 - 0.25 / 8)
    v, g, _ = ad.value_grad_hess(lambda x, y: x**y, [2.0, 3.0])
    assert v == pytest.approx(8.0) and g[1] == pytest.approx(8 * np.log(2))


def test_numpy_defers_to_jet():
    v, g, _ = ad.value_grad_hess(lambda x: np.float64(3.0) * x - np.float64(1.0), [2.0])
    assert v == 5.0 and g[0] == 3.0
