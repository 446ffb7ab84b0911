import threading
from fractions import Fraction

import pytest

from abeliand.stirling import (
    E2_LOWER,
    Polynomial,
    bound_f,
    check_bound_f,
    check_lemma_P,
    check_product_bound,
    falling_factorial,
    poly_P,
    poly_h,
    stirling_row,
    unsigned_stirling,
    unsigned_stirling_subset_oracle,
)


def test_falling_factorial_basics():
    assert falling_factorial(5, 0) == 1
    assert falling_factorial(3, 3) == 6
    assert falling_factorial(3, 4) == 0  # factor (x-3) vanishes
    assert falling_factorial(Fraction(1, 2), 2) == Fraction(-1, 4)
    with pytest.raises(ValueError):
        falling_factorial(3, -1)


@pytest.mark.parametrize(
    "i, coeffs",
    [
        (0, (1,)),
        (1, (-1, 1)),
        (2, (2, -3, 1)),
        (3, (-6, 11, -6, 1)),
        (4, (24, -50, 35, -10, 1)),
    ],
)
def test_stirling_rows(i, coeffs):
    row = stirling_row(i)
    assert row.i == i
    assert row.coeffs == coeffs


@pytest.mark.parametrize("i", range(0, 61))
def test_row_expands_falling_factorial(i):
    # evaluating the row polynomial at integer points pins every coefficient
    coeffs = stirling_row(i).coeffs
    for x in range(i + 2):
        value = sum(c * x**j for j, c in enumerate(coeffs))
        assert value == falling_factorial(x - 1, i)


@pytest.mark.parametrize("i", range(0, 61))
def test_unsigned_rows_expand_rising_side(i):
    coeffs = stirling_row(i).coeffs
    for x in range(1, 11):
        value = sum(abs(c) * x**j for j, c in enumerate(coeffs))
        assert value == falling_factorial(x + i, i)


@pytest.mark.parametrize("i", range(0, 61))
def test_diagonal_and_subdiagonal(i):
    coeffs = stirling_row(i).coeffs
    assert coeffs[i] == 1
    if i >= 1:
        assert coeffs[i - 1] == -i * (i + 1) // 2


def test_unsigned_stirling_values():
    assert unsigned_stirling(2, 1) == 3
    assert unsigned_stirling(4, 1) == 50
    assert all(unsigned_stirling(i, i) == 1 for i in range(30))
    assert all(unsigned_stirling(i, j) >= 0 for i in range(15) for j in range(i + 1))
    with pytest.raises(ValueError):
        unsigned_stirling(3, 4)


def test_subset_oracle_values():
    assert unsigned_stirling_subset_oracle(2, 1) == 3
    assert unsigned_stirling_subset_oracle(3, 3) == 1
    assert unsigned_stirling_subset_oracle(3, 1) == 11


@pytest.mark.parametrize("i", range(1, 13))
def test_subset_oracle_matches_rows(i):
    for j in range(1, i + 1):
        assert unsigned_stirling_subset_oracle(i, j) == unsigned_stirling(i, j)


def test_subset_oracle_rejects_bad_args():
    with pytest.raises(ValueError):
        unsigned_stirling_subset_oracle(15, 1)
    with pytest.raises(ValueError):
        unsigned_stirling_subset_oracle(4, 0)
    with pytest.raises(ValueError):
        unsigned_stirling_subset_oracle(3, 4)


def test_polynomial_normalization():
    p = Polynomial((Fraction(1), Fraction(2), Fraction(0), Fraction(0)))
    assert p.coeffs == (Fraction(1), Fraction(2))
    assert p.degree == 1
    assert Polynomial(()).degree == -1
    assert Polynomial((Fraction(0),)).degree == -1
    assert p(3) == 7


def test_poly_P_values():
    assert poly_P(0).coeffs == (Fraction(2),)
    assert poly_P(1).coeffs == (Fraction(-6), Fraction(11))
    assert poly_P(1)(4) == 38
    assert poly_P(5).degree == 5


def test_poly_h_values():
    assert poly_h(1)(4) == 32
    assert poly_h(0)(3) == 0  # root at (i+2)(i+3)/2
    assert poly_h(1).coeffs[-1] == -1
    assert poly_h(4).degree == 6


def test_bound_f_values():
    assert bound_f(0) == 6
    assert bound_f(1) == 22
    assert bound_f(2) == 88
    assert all(bound_f(i) > 0 for i in range(60))


def test_check_lemma_P_small():
    cert = check_lemma_P(1, 4)
    assert cert.p_at_N == 38 and cert.falling_part == 6 and cert.h_part == 32
    assert cert.equality_holds
    assert not cert.strong_gate and cert.inequalities_hold is None
    assert cert.ok


def test_check_lemma_P_gated():
    cert = check_lemma_P(4, 8)
    assert cert.equality_holds and cert.strong_gate and cert.inequalities_hold
    assert cert.p_at_N == 431024
    assert cert.falling_part == 5040 and cert.h_part == 425984


def test_check_lemma_P_rejects_bad_args():
    with pytest.raises(ValueError):
        check_lemma_P(2, 4)  # N - 3 < i
    with pytest.raises(ValueError):
        check_lemma_P(0, 10)


@pytest.mark.parametrize("n", range(4, 41))
def test_lemma_P_sweep(n):
    for i in range(1, n - 2):
        cert = check_lemma_P(i, n)
        assert cert.equality_holds
        if cert.strong_gate:
            assert cert.inequalities_hold


def test_check_bound_f_examples():
    cert = check_bound_f(2, 1)
    assert cert.lhs == 50 and cert.rhs == 264 and cert.holds
    cert = check_bound_f(0, 0)
    assert cert.lhs == 2 and cert.rhs == 6 and cert.holds
    with pytest.raises(ValueError):
        check_bound_f(1, 2)


@pytest.mark.parametrize("i", range(0, 41))
def test_bound_f_sweep(i):
    for j in range(i + 1):
        assert check_bound_f(i, j).holds


def test_check_product_bound():
    assert check_product_bound(0, 7).product == 1
    cert = check_product_bound(4, 10)
    assert cert.product == Fraction(11 * 12 * 13 * 14, 10**4)
    assert cert.holds
    assert check_product_bound(14, 100).holds  # 14^2 = 196 < 200
    with pytest.raises(ValueError):
        check_product_bound(15, 100)  # 15^2 = 225 >= 200


def test_product_bound_sweep():
    import math

    for n in range(1, 201):
        for i in range(math.isqrt(2 * n - 1) + 1):
            assert check_product_bound(i, n).holds


def test_e2_bound_is_under_approximation():
    # comparisons against E2_LOWER must imply the e^2 claim
    import math

    assert float(E2_LOWER) < math.e**2


def test_rows_safe_under_concurrent_growth():
    results = {}

    def worker(idx, top):
        results[idx] = [stirling_row(i).coeffs for i in range(top, -1, -1)]

    threads = [threading.Thread(target=worker, args=(k, 80 + k)) for k in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for idx, rows in results.items():
        top = 80 + idx
        assert len(rows) == top + 1
        for i, coeffs in zip(range(top, -1, -1), rows):
            assert coeffs == stirling_row(i).coeffs
