"""Monte Carlo statistics layer: variances, cumulants, residual checks."""

import math

import numpy as np
import pytest

from oracles import gradient_energy_from_quadrature, h_half_from_circle_samples
from rmtlab.ensembles import SeedStream, atom
from rmtlab.numlin import SpectrumSample
from rmtlab.spectra_stats import (
    CorrelationEstimate,
    MIN_GIRKO_GRID,
    MIN_REPLICAS_FOR_CUMULANTS,
    StatisticSample,
    anticoncentration_check,
    empirical_cumulants,
    girko_residual,
    gradient_energy,
    h_half_norm_sq,
    linear_statistic,
    predicted_variance_ginibre,
    predicted_variance_trunc,
    product_vs_root_statistic,
    smoothed_correlation,
    stieltjes_swap_residual,
)
from rmtlab.testfuncs import (
    LaurentPolynomial,
    RadialBump,
    RadialWindow,
    abs_power,
    im_power,
    re_power,
)


def _complex_factors(rng, n, m, scale=1.0):
    return [
        scale
        * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        for _ in range(m)
    ]


# ------------------------------------------------------ linear statistic


def test_linear_statistic_on_arrays_and_samples():
    eigs = np.array([1.0 + 0j, -1.0 + 0j, 2.0j])
    f = re_power(2)
    direct = float(np.sum((eigs ** 2).real))
    assert linear_statistic(eigs, f) == pytest.approx(direct, rel=1e-14)
    sample = SpectrumSample(eigs, 3, {})
    assert linear_statistic(sample, f) == pytest.approx(direct, rel=1e-14)
    assert linear_statistic(np.array([], dtype=complex), f) == 0.0
    with pytest.raises(ValueError):
        linear_statistic(np.array([np.nan + 0j]), f)


def test_linear_statistic_is_additive_in_f():
    rng = np.random.default_rng(0)
    eigs = rng.standard_normal(20) + 1j * rng.standard_normal(20)
    f, g = re_power(2, 0.3), im_power(1, 1.7)
    assert linear_statistic(eigs, f + g) == pytest.approx(
        linear_statistic(eigs, f) + linear_statistic(eigs, g), rel=1e-12
    )


# ------------------------------------------------------ variance pieces


def test_h_half_seminorm_frozen_values():
    assert h_half_norm_sq(re_power(1), 1.0) == pytest.approx(0.5, rel=1e-14)
    assert h_half_norm_sq(re_power(2), 1.0) == pytest.approx(1.0, rel=1e-14)
    assert h_half_norm_sq(abs_power(2), 1.0) == 0.0  # radial, no circle modes
    with pytest.raises(ValueError):
        h_half_norm_sq(re_power(1), 0.0)


def test_h_half_seminorm_against_circle_samples():
    rng = np.random.default_rng(1)
    for _ in range(5):
        terms = {}
        for a in range(4):
            for b in range(a, 4):
                c = complex(rng.standard_normal(), rng.standard_normal())
                if a == b:
                    c = complex(c.real, 0.0)
                terms[(a, b)] = terms.get((a, b), 0) + c
                terms[(b, a)] = terms.get((b, a), 0) + c.conjugate()
        f = LaurentPolynomial(terms)
        for radius in (1.0, 1.3):
            assert h_half_norm_sq(f, radius) == pytest.approx(
                h_half_from_circle_samples(f, radius), rel=1e-9, abs=1e-12
            )


def test_gradient_energy_frozen_values():
    assert gradient_energy(re_power(1), 1.0) == pytest.approx(0.25, rel=1e-14)
    assert gradient_energy(re_power(2), 1.0) == pytest.approx(0.5, rel=1e-14)
    assert gradient_energy(re_power(0, 3.0), 1.0) == 0.0


def test_gradient_energy_against_quadrature():
    rng = np.random.default_rng(2)
    for _ in range(4):
        terms = {}
        for a in range(3):
            for b in range(a, 3):
                c = complex(rng.standard_normal(), rng.standard_normal())
                if a == b:
                    c = complex(c.real, 0.0)
                terms[(a, b)] = terms.get((a, b), 0) + c
                terms[(b, a)] = terms.get((b, a), 0) + c.conjugate()
        f = LaurentPolynomial(terms)
        for radius in (1.0, 0.7):
            assert gradient_energy(f, radius) == pytest.approx(
                gradient_energy_from_quadrature(f, radius),
                rel=1e-6,
                abs=1e-9,
            )


def test_predicted_variance_monomial_family():
    # Re z^p carries limiting variance p/2
    for p in (1, 2, 3, 4):
        assert predicted_variance_ginibre(re_power(p)) == pytest.approx(
            p / 2.0, rel=1e-12
        )
        assert predicted_variance_ginibre(im_power(p)) == pytest.approx(
            p / 2.0, rel=1e-12
        )


def test_predicted_variance_of_constants_vanishes():
    assert predicted_variance_ginibre(re_power(0, 4.0)) == 0.0


def test_predicted_variance_trunc_frozen_value():
    with pytest.warns(RuntimeWarning):
        # tau = 1 sits just outside the reference window, hence the warning
        val = predicted_variance_trunc(re_power(1), 1.0, 1)
    assert val == pytest.approx(0.25, rel=1e-12)
    with pytest.warns(RuntimeWarning):
        predicted_variance_trunc(re_power(1), 0.3, 1)
    with pytest.raises(ValueError):
        predicted_variance_trunc(re_power(1), -0.5, 1)


def test_predicted_variance_routes_agree_on_random_polynomials():
    rng = np.random.default_rng(3)
    for _ in range(50):
        terms = {}
        for a in range(4):
            for b in range(a, 4):
                if rng.random() < 0.4:
                    continue
                c = complex(rng.standard_normal(), rng.standard_normal())
                if a == b:
                    c = complex(c.real, 0.0)
                terms[(a, b)] = terms.get((a, b), 0) + c
                terms[(b, a)] = terms.get((b, a), 0) + c.conjugate()
        f = LaurentPolynomial(terms)
        # the function itself raises if its two routes disagree
        predicted_variance_ginibre(f)
        predicted_variance_trunc(f, 0.8, 2)


# --------------------------------------------------- empirical cumulants


def test_k_statistics_frozen_two_point_sample():
    values = np.array([-1.0, 1.0] * 50)
    out = empirical_cumulants(StatisticSample(values, "pm1", "synthetic"), 4)
    k1, h1 = out[0]
    k2, h2 = out[1]
    k3, h3 = out[2]
    k4, h4 = out[3]
    assert k1 == 0.0
    assert h1 == pytest.approx(math.sqrt(20.0 / 99.0), rel=1e-12)
    assert k2 == pytest.approx(100.0 / 99.0, rel=1e-12)
    assert k3 == 0.0
    assert k4 == pytest.approx(-1960000.0 / 941094.0, rel=1e-12)


def test_empirical_cumulants_on_gaussian_sample():
    rng = np.random.default_rng(4)
    values = rng.standard_normal(4000)
    out = empirical_cumulants(values, 4)
    assert abs(out[0][0]) <= out[0][1]
    assert abs(out[1][0] - 1.0) <= out[1][1]
    assert abs(out[2][0]) <= out[2][1]
    assert abs(out[3][0]) <= out[3][1]


def test_empirical_cumulants_validation():
    with pytest.raises(ValueError):
        empirical_cumulants(np.zeros(MIN_REPLICAS_FOR_CUMULANTS - 1), 2)
    with pytest.raises(ValueError):
        empirical_cumulants(np.zeros(20), 5)
    with pytest.raises(ValueError):
        StatisticSample(np.array([[1.0, 2.0]]))
    with pytest.raises(ValueError):
        StatisticSample(np.array([1.0, np.inf]))


# ------------------------------------------------------- identity checks


def test_girko_residual_small_case():
    rng = np.random.default_rng(5)
    factors = _complex_factors(rng, 6, 1, scale=math.sqrt(0.5))
    bump = RadialBump(0.25, 0.75)
    res = girko_residual(factors, bump, 128)
    assert res < 0.02
    with pytest.raises(ValueError):
        girko_residual(factors, bump, MIN_GIRKO_GRID - 1)
    with pytest.raises(TypeError):
        girko_residual(factors, re_power(2), 128)


def test_girko_residual_two_factors():
    rng = np.random.default_rng(6)
    factors = _complex_factors(rng, 5, 2, scale=math.sqrt(0.5))
    bump = RadialBump(0.3, 0.8)
    assert girko_residual(factors, bump, 128) < 0.02


def test_product_vs_root_statistic_is_solver_noise():
    rng = np.random.default_rng(7)
    factors = _complex_factors(rng, 10, 3)
    assert product_vs_root_statistic(factors, re_power(1)) < 1e-7
    assert product_vs_root_statistic(factors, abs_power(1), "raw") < 1e-6


# -------------------------------------------------- smoothed correlation


def _sample(eigs, metadata=None):
    eigs = np.asarray(eigs, dtype=np.complex128)
    return SpectrumSample(eigs, len(eigs), metadata or {})


def test_smoothed_correlation_counts_isolated_points():
    win = RadialWindow(1.0, plateau_fraction=0.9)
    samples = [_sample([0.0, 30.0 + 0j]), _sample([0.0, 30.0 + 0j])]
    est = smoothed_correlation(samples, win, [0.0], 1)
    assert est.value == pytest.approx(1.0, rel=1e-12)
    assert est.halfwidth == 0.0
    assert est.n_replicas == 2
    assert not est.flagged


def test_smoothed_correlation_two_point_product():
    win = RadialWindow(1.0, plateau_fraction=0.9)
    samples = [_sample([0.0, 30.0 + 0j])] * 2
    est = smoothed_correlation(samples, win, [0.0, 30.0 + 0j], 2)
    # one point in each window: sum_i G1 * sum_j G2 minus the diagonal = 1
    assert est.value == pytest.approx(1.0, rel=1e-12)


def test_smoothed_correlation_flags_empty_windows():
    win = RadialWindow(0.5)
    samples = [_sample([10.0 + 10.0j])] * 3
    est = smoothed_correlation(samples, win, [0.0], 1)
    assert est == CorrelationEstimate(0.0, 0.0, 3, flagged=True)


def test_smoothed_correlation_validation():
    win = RadialWindow(1.0)
    samples = [_sample([0.0])] * 2
    with pytest.raises(ValueError):
        smoothed_correlation(samples, win, [0.0], 3)
    with pytest.raises(ValueError):
        smoothed_correlation(samples, win, [0.0, 1.0], 1)
    with pytest.raises(ValueError):
        smoothed_correlation([], win, [0.0], 1)


def test_smoothed_correlation_bulk_guard_for_raw_scale():
    win = RadialWindow(1.0)
    meta = {"scale": "raw", "m_factors": 2}
    inside = [_sample(np.zeros(8), meta)] * 2  # source_dim 8, n = 4
    smoothed_correlation(inside, win, [0.5 + 0.5j], 1)
    with pytest.raises(ValueError):
        smoothed_correlation(inside, win, [10.0], 1)
    with pytest.raises(ValueError):
        smoothed_correlation(inside, win, [0.0], 1)  # zero radius, not bulk


# ------------------------------------------------------ resolvent swap


def test_swap_residual_vanishes_at_zero_shift():
    rng = np.random.default_rng(8)
    factors = _complex_factors(rng, 8, 2, scale=math.sqrt(0.5))
    res = stieltjes_swap_residual(
        factors, 0.3, [0.0], entry=(0, 1, 2), eta=1.0
    )
    assert res == [0.0]


def test_swap_residual_fifth_order_ratio():
    rng = np.random.default_rng(9)
    factors = _complex_factors(rng, 16, 2, scale=math.sqrt(0.5))
    res = stieltjes_swap_residual(
        factors, 0.3, [0.4, 0.2], entry=(0, 1, 2), eta=1.0
    )
    assert res[0] > 0 and res[1] > 0
    ratio = res[0] / res[1]
    assert 16.0 <= ratio <= 64.0


def test_swap_residual_fit_coefficients_returned():
    rng = np.random.default_rng(10)
    factors = _complex_factors(rng, 6, 2, scale=math.sqrt(0.5))
    res, coeffs = stieltjes_swap_residual(
        factors, 0.1, [0.2], entry=(1, 0, 0), return_fit=True
    )
    assert len(res) == 1
    assert coeffs.shape == (4,)


def test_swap_residual_validation():
    rng = np.random.default_rng(11)
    factors = _complex_factors(rng, 4, 2)
    with pytest.raises(ValueError):
        stieltjes_swap_residual(factors, 0.1, [0.1], entry=(2, 0, 0))
    with pytest.raises(ValueError):
        stieltjes_swap_residual(factors, 0.1, [0.1], entry=(0, 4, 0))
    with pytest.raises(ValueError):
        stieltjes_swap_residual(factors, 0.1, [0.1], entry=(0, 0, 0), eta=0.0)


# --------------------------------------------------- anticoncentration


def test_anticoncentration_discrete_gap_is_zero():
    est, hw = anticoncentration_check(
        atom("rademacher"),
        np.array([1.0, 0.0, 0.0]),
        shifts=[0.0],
        replicas=2000,
        c=0.5,
        stream=SeedStream(9, 0),
    )
    assert est == 0.0
    assert hw == pytest.approx(
        math.sqrt((1.0 / 8000.0) / (0.05 * 2000)), rel=1e-12
    )


def test_anticoncentration_hits_atoms_through_shifts():
    est, _ = anticoncentration_check(
        atom("rademacher"),
        np.array([1.0, 0.0]),
        shifts=[0.0, 1.0],
        replicas=4000,
        c=0.5,
        stream=SeedStream(9, 1),
    )
    assert 0.4 < est < 0.6  # the shift at +1 catches half the mass


def test_anticoncentration_gaussian_level():
    # P(|xi - 0| < 1/2) = 1 - exp(-1/4) for a standard complex gaussian
    est, hw = anticoncentration_check(
        atom("complex-gaussian"),
        np.array([1.0, 0.0, 0.0]),
        shifts=[0.0],
        replicas=4000,
        c=0.5,
        stream=SeedStream(9, 2),
    )
    target = 1.0 - math.exp(-0.25)
    assert abs(est - target) < 3.0 * hw


def test_anticoncentration_unit_vector_required():
    with pytest.raises(ValueError):
        anticoncentration_check(
            atom("rademacher"), np.array([1.0, 1.0]), [0.0], 100
        )
    with pytest.raises(ValueError):
        anticoncentration_check(
            atom("rademacher"), np.array([1.0]), [0.0], 0
        )
