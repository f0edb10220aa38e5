import math

import numpy as np
import pytest

from rectmorley.functions import (PolynomialFunction, ScaledFunction,
                                  SineProduct, sine_eigenvalue,
                                  unit_box_eigenfunction)
from rectmorley.polynomial import Polynomial
from rectmorley.quadrature import tensor_rule


def finite_difference_gradient(func, x, step=1e-6):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for a in range(x.size):
        hi = x.copy()
        lo = x.copy()
        hi[a] += step
        lo[a] -= step
        out[a] = (func.value(hi) - func.value(lo)) / (2.0 * step)
    return out


def finite_difference_hessian(func, x, step=1e-5):
    x = np.asarray(x, dtype=float)
    d = x.size
    out = np.empty((d, d))
    for a in range(d):
        hi = x.copy()
        lo = x.copy()
        hi[a] += step
        lo[a] -= step
        out[a] = (func.gradient(hi) - func.gradient(lo)) / (2.0 * step)
    return 0.5 * (out + out.T)


@pytest.mark.parametrize("modes", [(1, 1), (2, 1), (1, 2, 3)])
def test_sine_gradient_and_hessian_match_finite_differences(modes):
    f = SineProduct(modes=modes, amplitude=1.7)
    rng = np.random.default_rng(3)
    for _ in range(4):
        x = rng.uniform(0.05, 0.95, size=len(modes))
        assert f.gradient(x) == pytest.approx(
            finite_difference_gradient(f, x), abs=1e-8
        )
        assert f.hessian(x) == pytest.approx(
            finite_difference_hessian(f, x), abs=1e-6
        )


def test_sine_values_vectorize():
    f = SineProduct(modes=(2, 1))
    pts = np.array([[0.25, 0.5], [0.5, 0.5]])
    vals = f.value(pts)
    assert vals.shape == (2,)
    assert vals[0] == pytest.approx(math.sin(math.pi / 2) * math.sin(math.pi / 2))
    assert vals[1] == pytest.approx(0.0, abs=1e-15)
    grads = f.gradient(pts)
    assert grads.shape == (2, 2)
    hess = f.hessian(pts)
    assert hess.shape == (2, 2, 2)


@pytest.mark.parametrize("modes", [(1, 1), (2, 3), (1, 1, 1), (2, 1, 3)])
def test_unit_box_eigenfunction_has_unit_l2_norm(modes):
    f = unit_box_eigenfunction(modes)
    dim = len(modes)
    # Map the [-1, 1]^dim rule onto the unit box.
    rule = tensor_rule(dim, 16)
    pts = 0.5 * (rule.points + 1.0)
    weights = rule.weights * 0.5 ** dim
    norm_sq = float(f.value(pts) ** 2 @ weights)
    assert norm_sq == pytest.approx(1.0, abs=1e-9)


def test_sine_eigenvalue_closed_form():
    assert sine_eigenvalue((1, 1)) == pytest.approx(4.0 * math.pi ** 4)
    assert sine_eigenvalue((2, 1)) == pytest.approx(25.0 * math.pi ** 4)
    assert sine_eigenvalue((1, 1, 1)) == pytest.approx(9.0 * math.pi ** 4)


def test_eigenfunction_satisfies_biharmonic_equation():
    # The bilaplacian of a sine product is its eigenvalue times itself; with
    # separable modes the laplacian is -pi^2 (sum m_i^2) f, applied twice.
    f = unit_box_eigenfunction((2, 1))
    lam = sine_eigenvalue((2, 1))
    x = np.array([0.3, 0.7])
    lap = np.trace(f.hessian(x))
    assert lap == pytest.approx(-math.pi ** 2 * 5.0 * f.value(x), rel=1e-12)
    assert (math.pi ** 2 * 5.0) ** 2 == pytest.approx(lam)


def test_polynomial_function_derivatives():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    p = x ** 3 * y + y ** 2
    f = PolynomialFunction(p)
    pt = np.array([0.5, -0.25])
    assert f.value(pt) == pytest.approx(p(pt))
    assert f.gradient(pt) == pytest.approx([p.diff(0)(pt), p.diff(1)(pt)])
    hess = f.hessian(pt)
    assert hess[0, 0] == pytest.approx(p.diff(0, 2)(pt))
    assert hess[0, 1] == pytest.approx(p.diff_multi((1, 1))(pt))
    assert hess[1, 0] == hess[0, 1]
    pts = np.array([[0.0, 0.0], [1.0, 1.0]])
    assert f.value(pts).shape == (2,)
    assert f.gradient(pts).shape == (2, 2)
    assert f.hessian(pts).shape == (2, 2, 2)


def test_scaled_function_scales_all_derivatives():
    base = SineProduct(modes=(1, 1))
    scaled = ScaledFunction(base, -2.5)
    x = np.array([0.3, 0.6])
    assert scaled.value(x) == pytest.approx(-2.5 * base.value(x))
    assert scaled.gradient(x) == pytest.approx(-2.5 * base.gradient(x))
    assert scaled.hessian(x) == pytest.approx(-2.5 * base.hessian(x))
    assert scaled.dim == 2


def test_sine_product_validates_modes():
    with pytest.raises(ValueError):
        SineProduct(modes=(0, 1))
    with pytest.raises(ValueError):
        SineProduct(modes=(1, -2))
