import numpy as np
import pytest

from cmc_simons import jets as J
from cmc_simons.errors import InsufficientJetOrder


def fd_partial(f, x, y, alpha, h=1e-3):
    """Central finite differences for orders up to 2."""
    a, b = alpha
    if (a, b) == (1, 0):
        return (f(x + h, y) - f(x - h, y)) / (2 * h)
    if (a, b) == (0, 1):
        return (f(x, y + h) - f(x, y - h)) / (2 * h)
    if (a, b) == (2, 0):
        return (f(x + h, y) - 2 * f(x, y) + f(x - h, y)) / h**2
    if (a, b) == (0, 2):
        return (f(x, y + h) - 2 * f(x, y) + f(x, y - h)) / h**2
    return (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4 * h * h)


def test_polynomial_derivatives_exact():
    u, v = J.variables([np.array([0.3, -1.2]), np.array([0.7, 2.0])])
    f = u**3 * v - 2 * u * v**2 + 5
    x, y = np.array([0.3, -1.2]), np.array([0.7, 2.0])
    assert np.allclose(f.value, x**3 * y - 2 * x * y**2 + 5)
    assert np.allclose(f.derivative((1, 0)), 3 * x**2 * y - 2 * y**2)
    assert np.allclose(f.derivative((1, 1)), 3 * x**2 - 4 * y)
    assert np.allclose(f.derivative((3, 0)), 6 * y)
    assert np.allclose(f.derivative((1, 2)), -4 * np.ones_like(x))


@pytest.mark.parametrize("alpha", [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)])
def test_transcendental_against_finite_differences(alpha):
    def g(x, y):
        return np.exp(np.sin(x) * y) / (1 + x * x) + np.sqrt(2 + np.cos(x * y)) + np.arctan2(y, 1.5 + x)

    x0, y0 = np.array([0.2, 0.9]), np.array([-0.4, 0.6])
    u, v = J.variables([x0, y0])
    jet = J.exp(J.sin(u) * v) / (1 + u * u) + J.sqrt(2 + J.cos(u * v)) + J.atan2(v, 1.5 + u)
    assert np.allclose(jet.value, g(x0, y0))
    assert np.allclose(jet.derivative(alpha), fd_partial(g, x0, y0, alpha), atol=1e-5)


def test_diff_lowers_order_and_guards():
    u, v = J.variables([0.1, 0.2], degree=3)
    f = J.sin(u * v)
    g = f.diff(0).diff(1).diff(1)
    assert g.order == 0
    with pytest.raises(InsufficientJetOrder):
        g.derivative((1, 0))


def test_substitute_composes_chain_rule():
    s, t = J.variables([0.4, -0.3])
    x, y = J.variables([1.0, 2.0])
    poly = x * x * y  # expanded around (1, 2)
    dx, dy = s * t - 0.4 * -0.3, s + t - 0.1  # displacements vanishing at the base point
    comp = J.substitute(poly, [dx, dy])
    direct = (1 + dx) ** 2 * (2 + dy) - 2
    assert np.allclose(comp.c[1:], direct.c[1:])


from hypothesis import given, settings
from hypothesis import strategies as st

coord = st.floats(-1.0, 1.0, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(coord, coord)
def test_product_and_quotient_rules(x, y):
    u, v = J.variables([x, y])
    f, g = J.sin(u) + v * v, 2.0 + J.cos(u * v)
    for k in range(2):
        lhs = (f * g).diff(k).value
        rhs = (f.diff(k) * g + f * g.diff(k)).value
        assert np.allclose(lhs, rhs, atol=1e-12)
        q = (f / g).diff(k).value
        assert np.allclose(q, ((f.diff(k) * g - f * g.diff(k)) / (g * g)).value, atol=1e-12)
