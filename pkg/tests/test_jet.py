"""Forward-mode jet arithmetic against hand derivatives and central differences."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcrkit import jet
from gcrkit.jet import (
    FiniteDifferenceError,
    Jet,
    JetDomainError,
    finite_difference_jet,
    jet_constant,
    jet_variable,
)


def test_variable_seed_structure():
    x = jet_variable(1, 2.5, 3, 2)
    assert x.value == 2.5
    assert np.array_equal(x.grad, [0.0, 1.0, 0.0])
    assert not x.hess.any()
    x1 = jet_variable(0, -1.0, 1, 3)
    assert x1.grad[0] == 1.0 and not x1.third.any()


def test_variable_seed_validation():
    with pytest.raises(ValueError):
        jet_variable(0, 1.0, 4, 2)
    with pytest.raises(ValueError):
        jet_variable(0, 1.0, 2, 0)
    with pytest.raises(ValueError):
        jet_variable(2, 1.0, 2, 2)


def test_constant_has_no_derivatives():
    c = jet_constant(4.2, 2, 3)
    assert c.value == 4.2
    assert not c.grad.any() and not c.hess.any() and not c.third.any()


# -- oracle first: the finite-difference estimator itself, on hand-computable cases ------


def test_fd_oracle_on_monomial():
    # f(x, y) = x^3 + 2 x^2 y at (1.5, -0.5): all derivatives by hand
    f = lambda q: q[0] ** 3 + 2.0 * q[0] ** 2 * q[1]
    fd = finite_difference_jet(f, (1.5, -0.5), order=3)
    x, y = 1.5, -0.5
    assert fd.value == f((x, y))
    assert np.allclose(fd.grad, [3 * x**2 + 4 * x * y, 2 * x**2], rtol=1e-9)
    assert np.allclose(
        fd.hess, [[6 * x + 4 * y, 4 * x], [4 * x, 0.0]], rtol=1e-7, atol=1e-7
    )
    expect3 = np.zeros((2, 2, 2))
    expect3[0, 0, 0] = 6.0
    expect3[0, 0, 1] = expect3[0, 1, 0] = expect3[1, 0, 0] = 4.0
    assert np.allclose(fd.third, expect3, atol=5e-6)


def test_fd_raises_when_function_fails():
    def f(q):
        if q[0] > 1.0:
            raise ValueError("outside")
        return q[0]

    with pytest.raises(FiniteDifferenceError):
        finite_difference_jet(f, (1.0,), order=1)


# -- jets against the oracle --------------------------------------------------------------


def _check_against_fd(expr_jet, f, p, rtol=2e-5):
    n = len(p)
    vals = [jet_variable(i, p[i], n, 3) for i in range(n)]
    out = expr_jet(vals)
    fd = finite_difference_jet(f, p, order=3)
    assert math.isclose(out.value, fd.value, rel_tol=1e-12, abs_tol=1e-12)
    for exact, est, tol in ((out.grad, fd.grad, 1e-9), (out.hess, fd.hess, 1e-6),
                            (out.third, fd.third, rtol)):
        scale = max(1.0, float(np.max(np.abs(exact))))
        assert np.max(np.abs(np.asarray(exact) - est)) <= tol * scale


def test_product_quotient_chain_vs_fd():
    _check_against_fd(
        lambda v: jet.sin(v[0]) * jet.exp(v[1]) / (v[0] + 2.0),
        lambda q: math.sin(q[0]) * math.exp(q[1]) / (q[0] + 2.0),
        (0.7, -0.3),
    )


def test_deep_composition_vs_fd():
    _check_against_fd(
        lambda v: jet.exp(jet.sin(v[0]) * v[1] * v[1] + jet.log(v[2])),
        lambda q: math.exp(math.sin(q[0]) * q[1] ** 2 + math.log(q[2])),
        (0.4, 1.2, 1.7),
    )


def test_sqrt_tan_atan_vs_fd():
    _check_against_fd(
        lambda v: jet.sqrt(v[0] * v[0] + 1.0) + jet.tan(v[1]) * jet.atan(v[0]),
        lambda q: math.sqrt(q[0] ** 2 + 1.0) + math.tan(q[1]) * math.atan(q[0]),
        (0.8, 0.6),
    )


def test_asin_acos_vs_fd():
    _check_against_fd(
        lambda v: jet.asin(v[0] * 0.5) + jet.acos(v[1] * 0.4),
        lambda q: math.asin(q[0] * 0.5) + math.acos(q[1] * 0.4),
        (0.9, 0.7),
        rtol=1e-4,
    )


def test_atan2_vs_fd_all_quadrants():
    for p in [(1.0, 0.8), (-1.2, 0.7), (-0.9, -1.1), (1.3, -0.6)]:
        _check_against_fd(
            lambda v: jet.atan2(v[1], v[0]),
            lambda q: math.atan2(q[1], q[0]),
            p,
            rtol=1e-4,
        )


# -- elementary tables at a frozen point --------------------------------------------------


def test_elementary_derivative_tables():
    x0 = 0.6
    x = jet_variable(0, x0, 1, 3)
    cases = {
        jet.sin: (math.sin(x0), math.cos(x0), -math.sin(x0), -math.cos(x0)),
        jet.cos: (math.cos(x0), -math.sin(x0), -math.cos(x0), math.sin(x0)),
        jet.exp: (math.exp(x0),) * 4,
        jet.log: (math.log(x0), 1 / x0, -1 / x0**2, 2 / x0**3),
        jet.sqrt: (
            math.sqrt(x0),
            0.5 * x0**-0.5,
            -0.25 * x0**-1.5,
            0.375 * x0**-2.5,
        ),
    }
    for fn, (v, d1, d2, d3) in cases.items():
        out = fn(x)
        assert math.isclose(out.value, v, rel_tol=1e-15)
        assert math.isclose(out.grad[0], d1, rel_tol=1e-14)
        assert math.isclose(out.hess[0, 0], d2, rel_tol=1e-14)
        assert math.isclose(out.third[0, 0, 0], d3, rel_tol=1e-13)


def test_tan_table():
    x0 = 0.4
    t = math.tan(x0)
    out = jet.tan(jet_variable(0, x0, 1, 3))
    sec2 = 1 + t * t
    assert math.isclose(out.grad[0], sec2, rel_tol=1e-14)
    assert math.isclose(out.hess[0, 0], 2 * t * sec2, rel_tol=1e-13)
    assert math.isclose(out.third[0, 0, 0], 2 * sec2 * (sec2 + 2 * t * t), rel_tol=1e-13)


def test_abs_branches():
    x = jet_variable(0, -1.7, 1, 2)
    out = abs(x * x * x)  # |x^3| has derivative -3x^2 at negative x
    assert math.isclose(out.value, 1.7**3, rel_tol=1e-15)
    assert math.isclose(out.grad[0], -3 * 1.7**2, rel_tol=1e-14)
    with pytest.raises(JetDomainError):
        abs(jet_variable(0, 0.0, 1, 1))


def test_domain_errors():
    bad = jet_variable(0, -0.5, 1, 2)
    for fn in (jet.log, jet.sqrt):
        with pytest.raises(JetDomainError):
            fn(bad)
    with pytest.raises(JetDomainError):
        jet.asin(jet_variable(0, 1.5, 1, 1))
    with pytest.raises(JetDomainError):
        (jet_variable(0, 0.0, 1, 1)).__rtruediv__(1.0)


def test_leibniz_third_order():
    # (fg)''' = f''' g + 3 f'' g' + 3 f' g'' + f g''' for univariate jets
    x0 = 0.9
    x = jet_variable(0, x0, 1, 3)
    f, g = jet.sin(x), jet.exp(x)
    prod = f * g
    expect = (
        f.third[0, 0, 0] * g.value
        + 3 * f.hess[0, 0] * g.grad[0]
        + 3 * f.grad[0] * g.hess[0, 0]
        + f.value * g.third[0, 0, 0]
    )
    assert math.isclose(prod.third[0, 0, 0], expect, rel_tol=1e-14)


def test_truncation_and_partial():
    x = jet_variable(0, 0.5, 2, 3)
    y = jet_variable(1, 1.5, 2, 3)
    full = jet.sin(x) * y
    t1 = full.truncated(1)
    assert t1.order == 1 and not t1.hess.any() and not t1.third.any()
    assert t1.value == full.value and np.array_equal(t1.grad, full.grad)
    # partial demotes the order and differentiates along the chosen axis
    dx = full.partial(0)
    assert dx.order == 2
    assert math.isclose(dx.value, full.grad[0], rel_tol=1e-15)
    assert math.isclose(dx.grad[1], full.hess[0, 1], rel_tol=1e-15)
    assert math.isclose(dx.hess[1, 1], full.third[0, 1, 1], rel_tol=1e-15)


def test_division_mirrors_reciprocal_multiply():
    a = jet.sin(jet_variable(0, 0.8, 1, 3))
    b = jet.exp(jet_variable(0, 0.8, 1, 3)) + 1.5
    q1 = a / b
    q2 = a * (1.0 / b)
    assert q1.value == q2.value
    assert np.array_equal(q1.grad, q2.grad)
    assert np.array_equal(q1.hess, q2.hess)
    assert np.array_equal(q1.third, q2.third)


def test_integer_power_square_and_multiply():
    x = jet_variable(0, 1.3, 1, 3) + 0.2
    p5 = x**5
    manual = ((x * x) * (x * x)) * x
    assert p5.value == manual.value
    assert np.array_equal(p5.grad, manual.grad)
    assert np.array_equal(p5.third, manual.third)
    inv = x**-2
    assert math.isclose(inv.value, 1.5**-2, rel_tol=1e-15)
    one = x**0
    assert one.value == 1.0 and not one.grad.any()


def test_real_power_vs_fd():
    _check_against_fd(
        lambda v: v[0] ** 2.5,
        lambda q: q[0] ** 2.5,
        (1.4,),
    )
    with pytest.raises(JetDomainError):
        (jet_variable(0, -1.0, 1, 1)) ** 0.5


@settings(max_examples=60, deadline=None)
@given(
    coeffs=st.lists(st.floats(-3, 3), min_size=1, max_size=6),
    x0=st.floats(-2, 2),
)
def test_polynomial_jets_match_analytic_derivatives(coeffs, x0):
    # numpy polynomial derivatives are an independent oracle for jet slots
    x = jet_variable(0, x0, 1, 3)
    acc = jet_constant(0.0, 1, 3)
    for c in coeffs:
        acc = acc * x + c
    poly = np.polynomial.Polynomial(coeffs[::-1])
    assert math.isclose(acc.value, poly(x0), rel_tol=1e-10, abs_tol=1e-10)
    assert math.isclose(acc.grad[0], poly.deriv(1)(x0), rel_tol=1e-10, abs_tol=1e-10)
    assert math.isclose(acc.hess[0, 0], poly.deriv(2)(x0), rel_tol=1e-10, abs_tol=1e-10)
    assert math.isclose(
        acc.third[0, 0, 0], poly.deriv(3)(x0), rel_tol=1e-10, abs_tol=1e-10
    )


@settings(max_examples=40, deadline=None)
@given(
    a=st.floats(0.2, 2.0), b=st.floats(0.2, 2.0),
    x0=st.floats(-1.2, 1.2), y0=st.floats(-1.2, 1.2),
)
def test_schwarz_symmetry(a, b, x0, y0):
    # mixed partials commute: the stored tensors must be exactly symmetric
    x = jet_variable(0, x0, 2, 3)
    y = jet_variable(1, y0, 2, 3)
    out = jet.exp(a * x) * jet.sin(b * y) + x * x * y
    assert np.array_equal(out.hess, out.hess.T)
    for perm in ((0, 2, 1), (1, 0, 2), (2, 1, 0)):
        assert np.array_equal(out.third, np.transpose(out.third, perm))


def test_mixed_arity_rejected():
    x = jet_variable(0, 1.0, 2, 2)
    z = jet_variable(0, 1.0, 3, 2)
    with pytest.raises(ValueError):
        x + z
