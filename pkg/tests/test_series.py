import math

import numpy as np
import pytest

from app.errors import InvalidArgumentError
from app.series import TruncatedSeries, add, extend, mul, order, scale, sub, truncate


def S(*coeffs):
    return TruncatedSeries(np.array(coeffs, dtype=complex))


def test_add_sub_scale():
    np.testing.assert_allclose(add(S(1, 1), S(1, -1)).coeffs, [2, 0])
    a = S(1, 2, 3)
    assert order(sub(a, a)) == math.inf
    np.testing.assert_allclose(scale(S(1, 1), 2j).coeffs, [2j, 2j])


def test_operators_match_functions():
    a, b = S(1, 2, 3), S(0, 1, -1)
    np.testing.assert_allclose((a + b).coeffs, add(a, b).coeffs)
    np.testing.assert_allclose((a - b).coeffs, sub(a, b).coeffs)
    np.testing.assert_allclose((a * b).coeffs, mul(a, b).coeffs)
    np.testing.assert_allclose((-a).coeffs, [-1, -2, -3])


def test_mul_binomial_square():
    np.testing.assert_allclose(mul(S(1, 1, 0), S(1, 1, 0)).coeffs, [1, 2, 1])


def test_mul_geometric_identity():
    geometric = S(*([1] * 6))
    np.testing.assert_allclose(mul(geometric, S(1, -1, 0, 0, 0, 0)).coeffs, [1, 0, 0, 0, 0, 0], atol=1e-15)


def test_mul_matches_double_loop_convolution():
    rng = np.random.default_rng(5)
    a = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    b = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    expected = np.zeros(8, dtype=complex)
    for i in range(8):
        for j in range(8 - i):
            expected[i + j] += a[i] * b[j]
    np.testing.assert_allclose(mul(S(*a), S(*b)).coeffs, expected, atol=1e-12)


def test_mul_mismatched_orders():
    with pytest.raises(InvalidArgumentError):
        mul(S(1, 1), S(1, 1, 1))


def test_vector_series_multiply_entrywise():
    a = TruncatedSeries(np.array([[1, 2], [1, 0], [0, 0]], dtype=complex))
    b = TruncatedSeries(np.array([[1, 1], [1, 1], [0, 0]], dtype=complex))
    np.testing.assert_allclose(mul(a, b).coeffs, [[1, 2], [2, 2], [1, 0]])
    np.testing.assert_allclose(a[1].coeffs, [2, 0, 0])


def _random_series(rng, w, leading_zeros=0):
    c = rng.standard_normal(w) + 1j * rng.standard_normal(w)
    c[:leading_zeros] = 0
    return S(*c)


def test_ring_axioms_hold_modulo_truncation():
    rng = np.random.default_rng(21)
    for _ in range(20):
        a, b, c = (_random_series(rng, 6) for _ in range(3))
        one = TruncatedSeries.constant(1.0, 6)
        zero = TruncatedSeries.zeros(6)
        np.testing.assert_allclose((a + b).coeffs, (b + a).coeffs)
        np.testing.assert_allclose((a * b).coeffs, (b * a).coeffs, atol=1e-12)
        np.testing.assert_allclose(((a * b) * c).coeffs, (a * (b * c)).coeffs, atol=1e-11)
        np.testing.assert_allclose((a * (b + c)).coeffs, (a * b + a * c).coeffs, atol=1e-11)
        np.testing.assert_allclose((a * one).coeffs, a.coeffs)
        np.testing.assert_allclose((a + zero).coeffs, a.coeffs)
        assert order(a + (-a)) == math.inf


def test_order_of_product_at_least_sum_of_orders():
    rng = np.random.default_rng(22)
    for i in range(4):
        for j in range(4):
            a = _random_series(rng, 8, i)
            b = _random_series(rng, 8, j)
            assert order(a) == i and order(b) == j
            assert order(mul(a, b)) >= i + j
    # orders beyond the truncation give the zero series
    assert order(mul(_random_series(rng, 4, 2), _random_series(rng, 4, 3))) == math.inf


def test_order():
    assert order(S(0, 0, 0)) == math.inf
    assert order(S(0, 0, 1, 1)) == 2
    assert order(S(1e-20, 1)) == 1


def test_order_of_vector_is_componentwise_minimum():
    v = TruncatedSeries(np.array([[0, 0], [0, 1], [1, 0]], dtype=complex))
    assert order(v) == 1


def test_truncate():
    np.testing.assert_allclose(truncate(S(1, 1, 1), 2).coeffs, [1, 1])
    a = S(1, 2, 3)
    np.testing.assert_allclose(truncate(a, 3).coeffs, a.coeffs)
    with pytest.raises(InvalidArgumentError):
        truncate(a, 4)


def test_truncate_commutes_with_mul():
    rng = np.random.default_rng(9)
    a = S(*(rng.standard_normal(7) + 1j * rng.standard_normal(7)))
    b = S(*(rng.standard_normal(7) + 1j * rng.standard_normal(7)))
    for w in (1, 3, 5):
        lhs = truncate(mul(a, b), w)
        rhs = mul(truncate(a, w), truncate(b, w))
        np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, atol=1e-14)


def test_extend_pads_with_zeros():
    np.testing.assert_allclose(extend(S(1, 2), 4).coeffs, [1, 2, 0, 0])


def test_evaluate_uses_all_coefficients():
    a = S(1, 2, 3)
    assert a.evaluate(2.0) == pytest.approx(17.0)


def test_series_rejects_non_finite_coefficients():
    with pytest.raises(InvalidArgumentError):
        S(1, np.inf)


def test_series_coefficients_are_read_only():
    a = S(1, 2)
    with pytest.raises(ValueError):
        a.coeffs[0] = 5
