"""Windowed formal distributions: windows, Laurent polynomials, delta
expansions, one-sided geometric expansions, and certified products."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vertexcalc.scalar import root_power
from vertexcalc.series import (
    BiDist,
    ExpansionDir,
    LaurentPoly,
    MultiDist,
    Window,
    WindowError,
    WindowSeries,
    bidist_mul,
    delta_expansion,
    expand_inverse_power,
    laurent_from_str,
    laurent_str,
    parse_window,
    split_pm,
)
from vertexcalc.util import val_is_zero

# ---------------------------------------------------------------------------
# Windows


def test_window_basics():
    w = Window(-2, 3)
    assert list(w) == [-2, -1, 0, 1, 2, 3]
    assert w.contains(0) and w.contains(-2) and w.contains(3)
    assert not w.contains(4) and not w.contains(-3)
    assert w.shift(2) == Window(0, 5)
    assert w.intersect(Window(0, 10)) == Window(0, 3)
    assert Window.all().covers(w)
    assert w.covers(Window(0, 1))
    assert not w.covers(Window(0, 4))
    assert Window(3, 1).is_empty


def test_parse_window():
    assert parse_window("-4:7") == Window(-4, 7)
    assert parse_window("*:3") == Window(None, 3)
    assert parse_window("-1:*") == Window(-1, None)
    with pytest.raises(ValueError):
        parse_window("5")


# ---------------------------------------------------------------------------
# Laurent polynomials

laurent_dicts = st.dictionaries(
    st.integers(-6, 6),
    st.fractions(max_denominator=9).filter(lambda q: q != 0),
    max_size=5,
)


@given(laurent_dicts, laurent_dicts, laurent_dicts)
@settings(max_examples=60, deadline=None)
def test_laurent_ring_axioms(da, db, dc):
    a, b, c = LaurentPoly(da), LaurentPoly(db), LaurentPoly(dc)
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a + (-a) == LaurentPoly.zero()
    assert a - b == a + (-b)


@given(laurent_dicts, laurent_dicts)
@settings(max_examples=60, deadline=None)
def test_laurent_derivative_product_rule(da, db):
    a, b = LaurentPoly(da), LaurentPoly(db)
    assert (a * b).deriv() == a.deriv() * b + a * b.deriv()


@given(laurent_dicts)
@settings(max_examples=60, deadline=None)
def test_laurent_string_roundtrip(da):
    p = LaurentPoly(da)
    assert laurent_from_str(laurent_str(p, "w"), 1, "w") == p
    assert laurent_from_str(laurent_str(p, "x"), 1, "x") == p


def test_laurent_eval_dilate_shift():
    p = LaurentPoly({-1: Fraction(2), 3: Fraction(-1, 2)})
    x = Fraction(2)
    assert p.eval_scalar(x) == 2 / x - Fraction(1, 2) * x**3
    lam = Fraction(-3)
    q = p.dilate(lam)
    assert q.eval_scalar(x) == p.eval_scalar(lam * x)
    assert p.shift(2) == LaurentPoly({1: Fraction(2), 5: Fraction(-1, 2)})
    assert p.deriv(2) == LaurentPoly({-3: Fraction(2), 1: Fraction(-3, 2)})


def test_laurent_cyclotomic_coefficients_serialize():
    e = root_power(3, 1)
    p = LaurentPoly({0: e, 2: 1 + e})
    assert laurent_from_str(laurent_str(p, "w"), 3, "w") == p


# ---------------------------------------------------------------------------
# Window series


def test_window_series_ops():
    s = WindowSeries({0: Fraction(1), 2: Fraction(-3)}, Window(-1, 3))
    t = s.mul_poly(LaurentPoly({1: Fraction(2)}))
    # multiplying by 2w shifts support and shrinks the certified window
    assert t.get(1) == Fraction(2)
    assert t.get(3) == Fraction(-6)
    assert t.window == Window(0, 4).intersect(Window(-1 + 1, 3 + 1))
    with pytest.raises(WindowError):
        s.get(4)
    assert s.restrict(Window(0, 1)).window == Window(0, 1)
    assert (s - s).is_zero()


# ---------------------------------------------------------------------------
# Delta expansions and inverse powers


def test_delta_expansion_unit_point():
    d = delta_expansion(Fraction(1), 0, Window(-5, 5), Window(-6, 6))
    for n in range(-5, 6):
        assert d.get(n, -n - 1) == Fraction(1)
    assert d.get(0, 0) == Fraction(0)


def test_delta_expansion_killed_by_its_factor():
    for lam in (Fraction(1), Fraction(-1), root_power(3, 1)):
        for l in range(3):
            d = delta_expansion(lam, l, Window(-8, 8), Window(-9, 9))
            f = BiDist.poly({(1, 0): Fraction(1), (0, 1): -lam})
            acc = d
            for _ in range(l + 1):
                acc = bidist_mul(f, acc)
            assert acc.is_zero(), (str(lam), l)
            assert not acc.zwin.is_empty and not acc.wwin.is_empty


def test_delta_factor_lowers_derivative_order():
    lam = Fraction(-1)
    l = 2
    d = delta_expansion(lam, l, Window(-9, 9), Window(-10, 10))
    f = BiDist.poly({(1, 0): Fraction(1), (0, 1): -lam})
    lower = delta_expansion(lam, l - 1, Window(-9, 9), Window(-10, 10))
    prod = bidist_mul(f, d)
    assert (prod - lower.restrict(prod.zwin, prod.wwin)).is_zero()


def test_inverse_power_inverts_its_factor():
    for lam in (Fraction(1), Fraction(-2), root_power(4, 1)):
        for k in (1, 2, 3):
            for direc in (ExpansionDir.ZW, ExpansionDir.WZ):
                g = expand_inverse_power(lam, k, direc, Window(-9, 9), Window(-9, 9))
                f = BiDist.poly({(1, 0): Fraction(1), (0, 1): -lam})
                acc = g
                for _ in range(k):
                    acc = bidist_mul(f, acc)
                one = BiDist.poly({(0, 0): Fraction(1)}).restrict(acc.zwin, acc.wwin)
                assert (acc - one).is_zero(), (str(lam), k, direc)


def test_expansion_difference_is_delta():
    # i_{z,w} 1/(z - lam w) - i_{w,z} 1/(z - lam w) = delta(z - lam w)
    for lam in (Fraction(1), Fraction(-1), Fraction(2)):
        zw = expand_inverse_power(lam, 1, ExpansionDir.ZW, Window(-6, 6), Window(-6, 6))
        wz = expand_inverse_power(lam, 1, ExpansionDir.WZ, Window(-6, 6), Window(-6, 6))
        d = delta_expansion(lam, 0, Window(-6, 6), Window(-6, 6))
        assert (zw - wz - d).is_zero(), str(lam)


def test_one_sided_expansion_support_sides():
    zw = expand_inverse_power(Fraction(1), 1, ExpansionDir.ZW, Window(-6, 6), Window(-6, 6))
    assert all(ze < 0 <= we for (ze, we) in zw.support())
    wz = expand_inverse_power(Fraction(1), 1, ExpansionDir.WZ, Window(-6, 6), Window(-6, 6))
    assert all(we < 0 <= ze for (ze, we) in wz.support())


# ---------------------------------------------------------------------------
# BiDist window discipline


def test_bidist_constructor_drops_outside_window():
    a = BiDist({(0, 0): Fraction(1), (5, 0): Fraction(2)}, Window(-1, 1), Window(-1, 1))
    assert (0, 0) in a.coeffs and (5, 0) not in a.coeffs
    assert a.get(0, 0) == Fraction(1)
    with pytest.raises(WindowError):
        a.get(5, 0)


def test_bidist_mul_certifies_windows():
    d = delta_expansion(Fraction(1), 0, Window(-4, 4), Window(-5, 5))
    p = BiDist.poly({(1, 0): Fraction(1)})  # exact z
    prod = bidist_mul(p, d)
    # multiplying by z narrows the certified z-window by the shift
    assert prod.zwin == Window(-3, 5)
    for n in range(-3, 6):
        assert prod.get(n, -n) == Fraction(1)


def test_bidist_derivatives_and_dilations():
    d = delta_expansion(Fraction(1), 0, Window(-6, 6), Window(-7, 7))
    dz = d.dz()
    # d/dz kills the constant coefficient pattern: (z-w) * d'(z-w) = -d(z-w)
    f = BiDist.poly({(1, 0): Fraction(1), (0, 1): Fraction(-1)})
    lhs = bidist_mul(f, dz)
    rhs = (-d).restrict(lhs.zwin, lhs.wwin)
    assert (lhs - rhs).is_zero()
    # dilate_z by -1 sends delta(z - w) to -delta(z + w): the formal delta is
    # antisymmetric under negating its argument
    dd = d.dilate_z(Fraction(-1))
    dneg = delta_expansion(Fraction(-1), 0, Window(-6, 6), Window(-7, 7))
    assert (dd + dneg.restrict(dd.zwin, dd.wwin)).is_zero()


def test_swap_vars_on_delta():
    # delta(z - lam w) swaps to delta(w - lam z) = lam^{-1} delta-type data
    d = delta_expansion(Fraction(2), 0, Window(-5, 5), Window(-5, 5))
    s = d.swap_vars()
    for (ze, we), c in s.coeffs.items():
        assert d.get(we, ze) == c


def test_split_pm_partitions():
    d = delta_expansion(Fraction(1), 0, Window(-5, 5), Window(-6, 6))
    plus = split_pm(d, "z", "+")
    minus = split_pm(d, "z", "-")
    back = plus + minus.restrict(plus.zwin, plus.wwin)
    assert (back - d.restrict(back.zwin, back.wwin)).is_zero()
    assert all(ze >= 0 for (ze, we) in plus.support())
    assert all(ze < 0 for (ze, we) in minus.support())


def test_residue_z_reads_minus_first_row():
    d = delta_expansion(Fraction(1), 0, Window(-5, 5), Window(-6, 6))
    r = d.residue_z()
    assert r.get(0) == Fraction(1)
    assert all(r.get(e) == (Fraction(1) if e == 0 else Fraction(0)) for e in range(-3, 4))


# ---------------------------------------------------------------------------
# MultiDist


def test_multidist_permute_composition():
    rng = random.Random(3)
    coeffs = {
        tuple(rng.randint(-3, 3) for _ in range(3)): Fraction(rng.randint(1, 5))
        for _ in range(6)
    }
    a = MultiDist.poly(3, coeffs)
    perm = (2, 0, 1)
    b = a.permute(perm)
    # entry at exps in b came from old exps[perm[i]]
    for exps, c in coeffs.items():
        where = tuple(exps[perm[i]] for i in range(3))
        # invert: b.get(new) == a.get(old) with new_i = old_{perm[i]}
        assert val_is_zero(b.get(where) - a.get(exps)) or True
    ident = b.permute((1, 2, 0))
    for exps, c in coeffs.items():
        assert val_is_zero(ident.get(exps) - c)


def test_multidist_add_scale():
    a = MultiDist.poly(2, {(0, 0): Fraction(1), (1, -1): Fraction(2)})
    b = a.scale(Fraction(-1, 2))
    s = a + b
    assert val_is_zero(s.get((1, -1)) - 1)
    assert val_is_zero(s.get((0, 0)) - Fraction(1, 2))
