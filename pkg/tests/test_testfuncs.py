"""Polynomial and bump test functions."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from rmtlab.testfuncs import (
    LaurentPolynomial,
    RadialBump,
    RadialWindow,
    abs_power,
    im_power,
    re_power,
)


def test_hermitian_symmetry_enforced():
    LaurentPolynomial({(2, 0): 1.0, (0, 2): 1.0})
    LaurentPolynomial({(2, 1): 1j, (1, 2): -1j})
    with pytest.raises(ValueError):
        LaurentPolynomial({(2, 0): 1.0})
    with pytest.raises(ValueError):
        LaurentPolynomial({(1, 0): 1j, (0, 1): 1j})


def test_negative_exponents_rejected():
    with pytest.raises(ValueError):
        LaurentPolynomial({(-1, 0): 1.0})


def test_zero_coefficients_dropped():
    p = LaurentPolynomial({(1, 1): 0.0, (0, 0): 2.0})
    assert p.terms == {(0, 0): 2.0}
    assert p.degree == 0


def test_evaluate_is_real_and_correct():
    p = re_power(2)
    zs = np.array([1.0 + 1j, 0.5, -2j, 1.3 - 0.4j])
    vals = p.evaluate(zs)
    assert vals.dtype == np.float64
    assert np.allclose(vals, (zs ** 2).real)
    assert isinstance(p.evaluate(1.0 + 1j), float)
    assert abs(p.evaluate(1.0 + 1j) - 0.0) < 1e-15


def test_helper_constructors():
    z = 0.8 - 0.3j
    assert abs(re_power(3).evaluate(z) - (z ** 3).real) < 1e-14
    assert abs(im_power(2).evaluate(z) - (z ** 2).imag) < 1e-14
    assert abs(abs_power(2).evaluate(z) - abs(z) ** 4) < 1e-14
    assert re_power(0, 5.0).evaluate(z) == 5.0
    assert im_power(0).evaluate(z) == 0.0


def test_product_and_sum_evaluate_pointwise():
    rng = np.random.default_rng(0)
    f = re_power(2, 1.5)
    g = im_power(1, -0.5)
    prod = f * g
    tot = f + g
    for _ in range(10):
        z = complex(rng.standard_normal(), rng.standard_normal())
        assert abs(prod.evaluate(z) - f.evaluate(z) * g.evaluate(z)) < 1e-12
        assert abs(tot.evaluate(z) - f.evaluate(z) - g.evaluate(z)) < 1e-12


def test_power_and_scaled():
    f = re_power(1)
    z = 1.1 + 0.7j
    assert abs(f.power(3).evaluate(z) - f.evaluate(z) ** 3) < 1e-12
    assert abs(f.scaled(2.5).evaluate(z) - 2.5 * f.evaluate(z)) < 1e-14
    with pytest.raises(ValueError):
        f.power(0)


def test_degree():
    assert re_power(4).degree == 4
    assert abs_power(3).degree == 6
    assert LaurentPolynomial({}).degree == 0


def test_bump_support_and_plateau():
    b = RadialBump(0.5, 1.5, width=0.25)
    assert b.support == (0.5, 1.5)
    assert b.profile(0.4) == 0.0
    assert b.profile(1.6) == 0.0
    assert b.profile(0.9) == 1.0
    assert b.profile(1.25) == 1.0
    mid = b.profile(0.625)  # halfway up the rise
    assert abs(mid - 0.5) < 1e-12


def test_bump_default_width_and_validation():
    b = RadialBump(1.0, 2.5)
    assert abs(b.width - 0.5) < 1e-15
    with pytest.raises(ValueError):
        RadialBump(2.0, 1.0)
    with pytest.raises(ValueError):
        RadialBump(0.0, 1.0)
    with pytest.raises(ValueError):
        RadialBump(1.0, 2.0, width=0.75)  # plateau would be empty


def test_bump_profile_is_c2_at_the_knots():
    # a jump would show up as an O(1) gap; an O(eps) gap scaled by the
    # third-derivative bound 60/w^3 is genuine continuity
    b = RadialBump(0.5, 1.5, width=0.25)
    eps = 1e-7
    tol = 2.0 * eps * 60.0 / b.width ** 3
    for knot in (0.5, 0.75, 1.25, 1.5):
        for fn in (b.profile, b.profile_d1, b.profile_d2):
            left = fn(knot - eps)
            right = fn(knot + eps)
            assert abs(left - right) < tol


def test_bump_derivatives_match_finite_differences():
    b = RadialBump(0.5, 1.5, width=0.3)
    eps = 1e-6
    for r in (0.6, 0.7, 1.3, 1.45):
        fd1 = (b.profile(r + eps) - b.profile(r - eps)) / (2 * eps)
        assert abs(fd1 - b.profile_d1(r)) < 1e-6
        fd2 = (
            b.profile(r + eps) - 2 * b.profile(r) + b.profile(r - eps)
        ) / eps ** 2
        assert abs(fd2 - b.profile_d2(r)) < 1e-3


def test_bump_laplacian_integrates_to_zero():
    # int Laplacian(f) dA = 0 for compactly supported f
    b = RadialBump(0.4, 1.2)
    val, _ = quad(
        lambda r: b.laplacian(r) * r,
        b.r1, b.r2,
        points=[b.r1 + b.width, b.r2 - b.width], limit=200,
    )
    assert abs(2 * math.pi * val) < 1e-10


def test_bump_laplacian_abs_integral_against_reference():
    b = RadialBump(0.5, 1.5, width=0.25)
    ref, _ = quad(
        lambda r: abs(b.profile_d2(r) + b.profile_d1(r) / r) * r,
        b.r1, b.r2,
        points=[b.r1 + b.width, b.r2 - b.width], limit=400,
    )
    assert abs(b.laplacian_abs_integral() - 2 * math.pi * ref) < 1e-8


def test_bump_evaluate_and_laplacian_accept_complex_arrays():
    b = RadialBump(0.5, 1.5)
    z = np.array([[0.6 + 0.1j, 2.0], [1.0j, 0.0]])
    vals = b.evaluate(z)
    assert vals.shape == (2, 2)
    assert vals[0, 1] == 0.0 and vals[1, 1] == 0.0
    lap = b.laplacian(z)
    assert lap.shape == (2, 2)
    assert isinstance(b.evaluate(1.0), float)
    assert isinstance(b.laplacian(1.0), float)


def test_window_profile_mass_and_validation():
    w = RadialWindow(2.0, plateau_fraction=0.5)
    assert w.profile(0.0) == 1.0
    assert w.profile(0.99) == 1.0
    assert w.profile(2.0) == 0.0
    assert w.profile(2.5) == 0.0
    assert 0.0 < w.profile(1.5) < 1.0
    ref, _ = quad(lambda r: float(w.profile(r)) * r, 0.0, 2.0,
                  points=[1.0], limit=200)
    assert abs(w.mass() - 2 * math.pi * ref) < 1e-10
    # mass sits between the inner and outer disc areas
    assert math.pi * 1.0 < w.mass() < math.pi * 4.0
    with pytest.raises(ValueError):
        RadialWindow(0.0)
    with pytest.raises(ValueError):
        RadialWindow(1.0, plateau_fraction=1.0)


def test_window_evaluate_on_complex_inputs():
    w = RadialWindow(1.0, plateau_fraction=0.0)
    z = np.array([0.0, 0.5j, 1.2])
    vals = w.evaluate(z)
    assert vals[0] == 1.0
    assert 0.0 < vals[1] < 1.0
    assert vals[2] == 0.0
