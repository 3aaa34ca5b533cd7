import math

import numpy as np
import pytest

from app.errors import InvalidArgumentError, PoleEvaluationError
from app.newton import compute_series
from app.pade import PadeApproximant, error_coefficient, fit_bundle, pade_eval, pade_fit, pole_distance
from app.series import TruncatedSeries, cauchy
from app.systems import hyperbola_homotopy


def hyperbola_coefficients(w=8):
    return compute_series(hyperbola_homotopy(0.1), 0.0, w, [math.sqrt(0.26)]).series.coeffs[:, 0]


@pytest.mark.parametrize("L", [0, 1, 3, 5])
def test_geometric_series_is_represented_exactly(L):
    c = np.ones(L + 3)
    P = pade_fit(c[: L + 2], L, 1)
    np.testing.assert_allclose(P.denominator, [1, -1])
    expected = np.zeros(L + 1)
    expected[0] = 1.0
    np.testing.assert_allclose(P.numerator, expected, atol=1e-15)
    assert P.poles() == [pytest.approx(1.0)]
    assert abs(error_coefficient(c, P)) < 1e-13


def test_polynomial_input_falls_back_to_taylor():
    P = pade_fit([1, 2, 0, 0], 2, 1)
    np.testing.assert_allclose(P.numerator, [1, 2, 0])
    np.testing.assert_allclose(P.denominator, [1, 0])
    assert P.effective_m == 0
    assert P.poles() == []
    assert pade_eval(P, 3.0) == pytest.approx(7.0)


def test_exact_rational_has_zero_defect():
    # (1 + t) / (1 - t / 2) = 1 + 3/2 t + 3/4 t^2 + 3/8 t^3 + ...
    c = [1.0, 1.5, 0.75, 0.375, 0.1875, 0.09375]
    P = pade_fit(c[:4], 2, 1)
    np.testing.assert_allclose(P.denominator, [1, -0.5])
    assert abs(error_coefficient(c, P)) < 1e-13


def test_rank_deficient_block_reduces_denominator_degree():
    # c has no t^2, t^3 terms so the M = 2 block is singular
    P = pade_fit([1, 1, 0, 0, 0], 2, 2)
    assert P.effective_m < 2
    assert P.denominator.size == 3
    assert P.denominator[0] == 1


def test_type_two_denominator_recovers_two_poles():
    # 1 / ((1 - t/2)(1 - t/3)) = sum_k (3 (1/2)^k - 2 (1/3)^k) t^k
    c = [3 * 0.5**k - 2 * (1 / 3) ** k for k in range(6)]
    P = pade_fit(c[:5], 2, 2)
    assert sorted(abs(z) for z in P.poles()) == [pytest.approx(2.0), pytest.approx(3.0)]
    assert abs(error_coefficient(c, P)) < 1e-12


def test_hyperbola_type_five_one_closed_form():
    c = hyperbola_coefficients()
    P = pade_fit(c[:7], 5, 1)
    b1 = -c[6] / c[5]
    assert P.denominator[1] == pytest.approx(b1)
    expected = [c[0]] + [c[i] + b1 * c[i - 1] for i in range(1, 6)]
    np.testing.assert_allclose(P.numerator, expected, atol=1e-14)
    assert error_coefficient(c, P) == pytest.approx(-(c[7] + b1 * c[6]))


def test_error_coefficient_is_the_first_defect_coefficient():
    c = hyperbola_coefficients()
    P = pade_fit(c[:7], 5, 1)
    q = np.zeros(8, dtype=complex)
    q[:2] = P.denominator
    p = np.zeros(8, dtype=complex)
    p[:6] = P.numerator
    defect = p - cauchy(q, c)
    assert np.max(np.abs(defect[:7])) < 1e-13
    assert error_coefficient(c, P) == pytest.approx(defect[7])


def test_hyperbola_pole_distance_near_branch_points():
    c = hyperbola_coefficients()
    P = pade_fit(c[:7], 5, 1)
    D = pole_distance([P])
    assert D == pytest.approx(abs(c[5] / c[6]))
    assert 0.5 * math.sqrt(0.26) < D < 2 * math.sqrt(0.26)


def test_pole_distance_trivial_cases():
    assert pole_distance([PadeApproximant(np.array([1.0]), np.array([1.0, 0.0]), 0, 1)]) == math.inf
    P = PadeApproximant(np.array([1.0 + 0j]), np.array([1.0, -2.0 + 0j]), 0, 1)
    assert pole_distance([P]) == pytest.approx(0.5)


def test_far_poles_are_ignored():
    P = PadeApproximant(np.array([1.0 + 0j]), np.array([1.0, -1e-8 + 0j]), 0, 1)
    assert pole_distance([P]) == math.inf


def test_pade_eval():
    geometric = pade_fit(np.ones(3), 1, 1)
    assert pade_eval(geometric, 0.5) == pytest.approx(2.0)
    c = hyperbola_coefficients()
    P = pade_fit(c[:7], 5, 1)
    assert abs(pade_eval(P, 0.05) - math.sqrt((0.05 - 0.5) ** 2 + 0.01)) < 1e-6


def test_pade_eval_at_the_pole():
    P = PadeApproximant(np.array([1.0 + 0j]), np.array([1.0, -1.0 + 0j]), 0, 1)
    with pytest.raises(PoleEvaluationError):
        pade_eval(P, 1.0)


def test_fit_bundle():
    c = hyperbola_coefficients()
    xs = TruncatedSeries(np.stack([c, np.ones_like(c)], axis=1))
    bundle = fit_bundle(xs, 5, 1)
    assert bundle.k == 7
    assert len(bundle.approximants) == 2
    assert bundle.e0[0] == pytest.approx(error_coefficient(c, bundle.approximants[0]))
    assert abs(bundle.e0[1]) < 1e-13
    assert bundle.pole_distance == pytest.approx(pole_distance(bundle.approximants))
    np.testing.assert_allclose(bundle.evaluate(0.5)[1], 2.0)


def _random_analytic_coefficients(rng, size, radius=1.5):
    g = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return g / radius ** np.arange(size)


def test_defect_vanishes_through_order_l_plus_m_on_random_series():
    rng = np.random.default_rng(41)
    full = 0
    for _ in range(100):
        L, M = int(rng.integers(0, 6)), int(rng.integers(0, 4))
        c = _random_analytic_coefficients(rng, L + M + 2)
        P = pade_fit(c[: L + M + 1], L, M)
        assert P.denominator[0] == 1
        if P.effective_m < M:
            continue
        full += 1
        k = L + M + 1
        q = np.zeros(k, dtype=complex)
        q[: M + 1] = P.denominator
        p = np.zeros(k, dtype=complex)
        p[: L + 1] = P.numerator
        defect = p - cauchy(q, c[:k])
        assert np.max(np.abs(defect)) <= 1e-10 * (1.0 + np.max(np.abs(q)))
    assert full >= 90


def test_single_pole_is_ratio_of_last_two_coefficients():
    rng = np.random.default_rng(42)
    for _ in range(100):
        L = int(rng.integers(0, 8))
        c = _random_analytic_coefficients(rng, L + 2)
        if abs(c[L + 1]) / abs(c[L]) <= 1e-8:
            continue
        (pole,) = pade_fit(c, L, 1).poles()
        assert pole == pytest.approx(c[L] / c[L + 1], rel=1e-12)


@pytest.mark.parametrize("p", [0.15, 0.19])
def test_type_six_one_pole_estimates_branch_point_distance(p):
    c = compute_series(hyperbola_homotopy(p), 0.0, 9, [math.sqrt(0.25 + p * p)]).series.coeffs[:, 0]
    D = pole_distance([pade_fit(c[:8], 6, 1)])
    true = math.sqrt(0.25 + p * p)
    assert true / 2 <= D <= 2 * true


def test_pade_fit_argument_checks():
    with pytest.raises(InvalidArgumentError):
        pade_fit([1, 2], 2, 1)
    with pytest.raises(InvalidArgumentError):
        pade_fit([1, 2, 3], -1, 1)
