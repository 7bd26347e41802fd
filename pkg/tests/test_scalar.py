"""Exact scalar arithmetic: rationals and cyclotomic integers."""

import random
from fractions import Fraction

import pytest

from vertexcalc.scalar import (
    CycScalar,
    cyclotomic_polynomial,
    root_power,
    root_power_cyc,
    scalar_from_str,
    scalar_inv,
    scalar_pow,
    scalar_str,
)
from vertexcalc.util import val_is_zero

# Coefficient tuples (low degree first) of the first cyclotomic polynomials,
# frozen from the standard tables.
CYCLOTOMIC_TABLE = {
    1: (-1, 1),
    2: (1, 1),
    3: (1, 1, 1),
    4: (1, 0, 1),
    5: (1, 1, 1, 1, 1),
    6: (1, -1, 1),
    7: (1, 1, 1, 1, 1, 1, 1),
    8: (1, 0, 0, 0, 1),
    9: (1, 0, 0, 1, 0, 0, 1),
    10: (1, -1, 1, -1, 1),
    12: (1, 0, -1, 0, 1),
}


def test_cyclotomic_polynomial_table():
    for n, coeffs in CYCLOTOMIC_TABLE.items():
        assert cyclotomic_polynomial(n) == coeffs, n


def test_cyclotomic_product_recovers_x_power_n_minus_one():
    # prod_{d | n} Phi_d(x) = x^n - 1, checked by naive polynomial product.
    for n in range(1, 13):
        prod = [Fraction(1)]
        for d in range(1, n + 1):
            if n % d:
                continue
            phi = cyclotomic_polynomial(d)
            out = [Fraction(0)] * (len(prod) + len(phi) - 1)
            for i, a in enumerate(prod):
                for j, b in enumerate(phi):
                    out[i + j] += a * b
            prod = out
        want = [Fraction(0)] * (n + 1)
        want[0], want[n] = Fraction(-1), Fraction(1)
        assert prod == want, n


def test_low_orders_degenerate_to_fractions():
    assert root_power(1, 0) == Fraction(1)
    assert root_power(2, 1) == Fraction(-1)
    assert isinstance(root_power(2, 1), Fraction)
    assert isinstance(root_power(2, 5), Fraction)


def test_root_powers_cycle_and_are_primitive():
    for N in range(3, 9):
        e = root_power(N, 1)
        acc = e
        for k in range(2, N):
            acc = acc * e
            assert val_is_zero(acc - root_power(N, k))
            assert not val_is_zero(acc - 1), (N, k)
        assert val_is_zero(acc * e - 1), N


def test_all_roots_sum_to_zero():
    for N in range(2, 9):
        acc = root_power(N, 0)
        for k in range(1, N):
            acc = acc + root_power(N, k)
        assert val_is_zero(acc), N


def test_field_axioms_randomized():
    rng = random.Random(7)
    N = 5
    deg = len(cyclotomic_polynomial(N)) - 1

    def rand():
        return CycScalar(N, [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(deg)])

    for _ in range(60):
        a, b, c = rand(), rand(), rand()
        assert val_is_zero((a + b) * c - (a * c + b * c))
        assert val_is_zero(a * b - b * a)
        assert val_is_zero((a * b) * c - a * (b * c))
        assert val_is_zero(a - b - (a - b))


def test_inverse_roundtrip():
    rng = random.Random(11)
    for N in (3, 4, 5, 6, 8):
        deg = len(cyclotomic_polynomial(N)) - 1
        for _ in range(20):
            x = CycScalar(N, [Fraction(rng.randint(-3, 3)) for _ in range(deg)])
            if val_is_zero(x):
                continue
            assert val_is_zero(x * scalar_inv(x) - 1), (N, scalar_str(x))
    assert scalar_inv(Fraction(3, 7)) == Fraction(7, 3)
    with pytest.raises(ZeroDivisionError):
        scalar_inv(Fraction(0))


def test_scalar_pow():
    e = root_power(5, 1)
    assert val_is_zero(scalar_pow(e, 5) - 1)
    assert val_is_zero(scalar_pow(e, -1) - root_power(5, 4))
    assert scalar_pow(Fraction(2), -2) == Fraction(1, 4)
    assert scalar_pow(Fraction(5), 0) == Fraction(1)


def test_string_roundtrip():
    rng = random.Random(13)
    for N in (1, 2, 3, 4, 6, 8):
        deg = max(len(cyclotomic_polynomial(N)) - 1, 1)
        for _ in range(25):
            if N <= 2:
                x = Fraction(rng.randint(-9, 9), rng.randint(1, 7))
            else:
                x = CycScalar(N, [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(deg)])
            s = scalar_str(x)
            back = scalar_from_str(s, N)
            assert val_is_zero(back - x), (N, s)


def test_string_rational_shortcut_any_order():
    assert scalar_from_str("-3/4", 5) == Fraction(-3, 4)
    assert scalar_str(Fraction(-3, 4)) == "-3/4"
    assert scalar_str(Fraction(6, 3)) == "2"


def test_mixed_order_arithmetic_raises():
    a = root_power_cyc(3, 1)
    b = root_power_cyc(5, 1)
    with pytest.raises((ValueError, TypeError)):
        a + b  # noqa: B018
    with pytest.raises((ValueError, TypeError)):
        a * b  # noqa: B018


def test_int_and_fraction_coerce_into_any_order():
    e = root_power(3, 1)
    assert val_is_zero((e + 1) - (1 + e))
    assert val_is_zero((e * Fraction(1, 2)) - (Fraction(1, 2) * e))
    assert val_is_zero((2 - e) + (e - 2))


def test_is_rational_flag():
    e = root_power_cyc(4, 1)
    assert not e.is_rational()
    sq = e * e  # = -1
    assert val_is_zero(sq + 1)
