"""Field expressions: evaluation, contractions, normal products, residue
products, OPE extraction with symbolic identification, and frozen goldens."""

from fractions import Fraction

import pytest

from vertexcalc.deltacalc import PointSet
from vertexcalc.fields import (
    IDENT,
    PHI_B,
    PHI_C,
    PHI_D,
    Derivative,
    Dilate,
    LinComb,
    NormProd2,
    ScalarField,
    commutator_2var,
    contraction,
    delta_reconstruction,
    eval_field,
    field_from_json,
    field_spec,
    field_to_json,
    h_field_b,
    h_field_c,
    h_field_d,
    h_field_d_order,
    li_product,
    locality_check,
    ope_extract,
    parity,
    product_jk,
)
from vertexcalc.fock import CL_B, CL_D, L_C, FockVector, basis
from vertexcalc.series import LaurentPoly, Window, laurent_str

HALF = Fraction(1, 2)
W44 = Window(-4, 4)
PTS2 = PointSet.roots_of_unity(2)


def _eval_eq(a, b, v, win=W44) -> bool:
    return eval_field(a, v, win).eq_on(eval_field(b, v, win), win)


def _entry(series, e, spec) -> FockVector:
    """Window-checked coefficient with absent entries as the zero vector."""
    u = series.get(e)
    return u if isinstance(u, FockVector) else FockVector.zero(spec)


def _scalar_field(coeffs) -> ScalarField:
    return ScalarField(LaurentPoly({e: Fraction(c) for e, c in coeffs.items()}))


# ---------------------------------------------------------------------------
# Generators and evaluation basics


def test_generator_mode_placement():
    # integer pair: phi_m multiplies z^m
    v = FockVector.vacuum(CL_B)
    s = eval_field(PHI_B, v, W44)
    for m in range(-4, 5):
        got = _entry(s, m, CL_B)
        want = FockVector.word(CL_B, [m]) if m >= 0 else FockVector.zero(CL_B)
        assert (got - want).is_zero(), m
    # half-integer pairs: phi_m multiplies z^{m - 1/2} (C) and z^{-m - 1/2} (D)
    vc = FockVector.vacuum(L_C)
    sc = eval_field(PHI_C, vc, W44)
    assert (_entry(sc, 0, L_C) - FockVector.word(L_C, [HALF])).is_zero()
    assert _entry(sc, -1, L_C).is_zero()  # phi^C_{-1/2} kills the vacuum
    vd = FockVector.vacuum(CL_D)
    sd = eval_field(PHI_D, vd, W44)
    assert (_entry(sd, 0, CL_D) - FockVector.word(CL_D, [-HALF])).is_zero()
    assert _entry(sd, -1, CL_D).is_zero()  # phi^D_{1/2} kills the vacuum


def test_parity_and_spec():
    assert parity(PHI_B) == 1 and parity(PHI_D) == 1 and parity(PHI_C) == 0
    assert parity(NormProd2(PHI_D, PHI_D)) == 0
    assert parity(Derivative(PHI_B)) == 1
    assert field_spec(PHI_B) is CL_B and field_spec(h_field_d()) is CL_D
    assert field_spec(IDENT) is None


def test_derivative_and_dilate_eval():
    v = FockVector.vacuum(CL_B)
    s = eval_field(Derivative(PHI_B), v, W44)
    base = eval_field(PHI_B, v, Window(-5, 5))
    for m in range(-4, 5):
        want = _entry(base, m + 1, CL_B).scale(Fraction(m + 1))
        assert (_entry(s, m, CL_B) - want).is_zero()
    sneg = eval_field(Dilate(PHI_B, 1, 2), v, W44)
    for m in range(-4, 5):
        want = _entry(base, m, CL_B).scale(Fraction((-1) ** m))
        assert (_entry(sneg, m, CL_B) - want).is_zero()


# ---------------------------------------------------------------------------
# Contractions (frozen singular parts)


def test_contraction_integer_pair():
    # -2w expanded against 1/(z+w) in the z-dominant region: entries
    # (-n-1, n+1) carry -2(-1)^n
    for v in (FockVector.vacuum(CL_B), FockVector.word(CL_B, [2, 0])):
        c = contraction(PHI_B, PHI_B, v, W44, W44)
        for n in range(0, 3):
            got = c.get(-n - 1, n + 1)
            assert (got - v.scale(-2 * Fraction((-1) ** n))).is_zero()
        for ze in range(0, 4):
            for we in range(-4, 5):
                u = c.get(ze, we)
                assert not isinstance(u, FockVector) or u.is_zero(), (ze, we)


def test_contraction_half_integer_pairs():
    # bosonic pair: i_{z,w} 1/(z+w); fermionic half-integer pair: i_{z,w} 1/(z-w)
    vc = FockVector.vacuum(L_C)
    cc = contraction(PHI_C, PHI_C, vc, W44, W44)
    for n in range(0, 3):
        assert (cc.get(-n - 1, n) - vc.scale(Fraction((-1) ** n))).is_zero()
    vd = FockVector.vacuum(CL_D)
    cd = contraction(PHI_D, PHI_D, vd, W44, W44)
    for n in range(0, 3):
        assert (cd.get(-n - 1, n) - vd).is_zero()


# ---------------------------------------------------------------------------
# Diagonal normal products


def test_diagonal_normal_products():
    one = _scalar_field({0: 1})
    diag_b = NormProd2(PHI_B, PHI_B)
    for v in basis(CL_B, Fraction(3)):
        assert _eval_eq(diag_b, one, v)
    diag_d = NormProd2(PHI_D, PHI_D)
    for v in basis(CL_D, Fraction(3)):
        assert eval_field(diag_d, v, W44).is_zero()


def test_reflected_normal_product_constant():
    # :phi(-z)phi(z): = 1 - 4 h (the vacuum constant sits in the h field)
    lhs = NormProd2(Dilate(PHI_B, 1, 2), PHI_B)
    rhs = LinComb(((Fraction(1), IDENT), (Fraction(-4), h_field_b())))
    for v in basis(CL_B, Fraction(2)):
        assert _eval_eq(lhs, rhs, v)


# ---------------------------------------------------------------------------
# Residue products at points (frozen goldens)


def _pj(a, j, k, b, orders=(2, 2)):
    return product_jk(a, j, k, b, PTS2, orders)


def test_product_goldens_integer_pair():
    cases = [
        (_pj(PHI_B, 2, 0, PHI_B), _scalar_field({1: -2})),
        (_pj(PHI_B, 1, -1, PHI_B), _scalar_field({0: 1})),
        (
            _pj(PHI_B, 2, -1, PHI_B),
            LinComb(((Fraction(1), IDENT), (Fraction(-4), h_field_b()))),
        ),
    ]
    for v in basis(CL_B, Fraction(2)):
        for got, want in cases:
            assert _eval_eq(got, want, v)


def test_product_goldens_half_integer_pairs():
    cases_c = [
        (_pj(PHI_C, 2, 0, PHI_C), _scalar_field({0: 1})),
        (
            _pj(PHI_C, 2, -1, PHI_C),
            LinComb(((Fraction(1), IDENT), (Fraction(2), h_field_c()))),
        ),
    ]
    for v in basis(L_C, Fraction(3, 2)):
        for got, want in cases_c:
            assert _eval_eq(got, want, v)
    cases_d = [
        (_pj(PHI_D, 1, 0, PHI_D), _scalar_field({0: 1})),
        (_pj(PHI_D, 2, -1, PHI_D), LinComb(((Fraction(-2), h_field_d()),))),
    ]
    for v in basis(CL_D, Fraction(2)):
        for got, want in cases_d:
            assert _eval_eq(got, want, v)


# ---------------------------------------------------------------------------
# OPE extraction and identification


def _table(a, b, registry=None, cutoff=Fraction(3)):
    return ope_extract(a, b, PTS2, (2, 2), cutoff, registry=registry)


def _identified(table):
    return {
        (j, k): [(laurent_str(c), nm) for c, nm in ent.identified]
        for (j, k), ent in sorted(table.entries.items())
    }


def test_ope_tables_generator_pairs():
    assert _identified(_table(PHI_B, PHI_B)) == {(2, 0): [("-2*w", "Id")]}
    assert _identified(_table(PHI_C, PHI_C)) == {(2, 0): [("1", "Id")]}
    assert _identified(_table(PHI_D, PHI_D)) == {(1, 0): [("1", "Id")]}


def test_ope_tables_heisenberg_pairs():
    assert _identified(_table(h_field_b(), h_field_b())) == {
        (1, 0): [("1/4*w", "Id")],
        (1, 1): [("1/4*w^2", "Id")],
        (2, 0): [("1/4*w", "Id")],
        (2, 1): [("-1/4*w^2", "Id")],
    }
    assert _identified(_table(h_field_c(), h_field_c())) == {
        (1, 1): [("-1/4", "Id")],
        (2, 1): [("-1/4", "Id")],
    }
    assert _identified(_table(h_field_d(), h_field_d())) == {
        (1, 1): [("1/4", "Id")],
        (2, 1): [("-1/4", "Id")],
    }


def test_ope_tables_mixed_pairs_identify_fields():
    reg_b = [("Id", IDENT), ("phiB", PHI_B), ("phiB(-z)", Dilate(PHI_B, 1, 2))]
    assert _identified(_table(PHI_B, h_field_b(), registry=reg_b)) == {
        (1, 0): [("-1/2*w", "phiB")],
        (2, 0): [("-1/2*w", "phiB(-z)")],
    }
    reg_d = [("Id", IDENT), ("phiD", PHI_D), ("phiD(-z)", Dilate(PHI_D, 1, 2))]
    assert _identified(_table(PHI_D, h_field_d(), registry=reg_d)) == {
        (1, 0): [("1/2", "phiD(-z)")],
        (2, 0): [("-1/2", "phiD")],
    }


def test_ope_identity_left_factor_is_regular():
    t = _table(IDENT, PHI_B)
    assert t.entries == {}


def test_ope_table_json_shape():
    d = _table(PHI_B, PHI_B).to_json()
    assert d["order"] == 2 and d["orders"] == [2, 2]
    assert d["entries"] == [{"point": "-1", "j": 2, "k": 0, "field": "-2*w * Id"}]


# ---------------------------------------------------------------------------
# Locality checks and delta reconstruction


def test_locality_check_positive_and_negative():
    ok, _ = locality_check(PHI_B, PHI_B, PTS2, (1, 1), Fraction(2))
    assert ok
    pts1 = PointSet.roots_of_unity(1)
    bad, msg = locality_check(PHI_B, PHI_B, pts1, (3,), Fraction(2))
    assert not bad and msg


def test_delta_reconstruction_matches_commutator():
    # includes window-edge entries, where the certified reconstruction
    # window must shrink to what the sampled table actually supports
    a, b = PHI_B, h_field_b()
    table = ope_extract(a, b, PTS2, (2, 2), Fraction(5, 2), wout=Window(-6, 6))
    zwin, wwin = Window(-3, 3), Window(-5, 5)
    for v in basis(CL_B, Fraction(2)):
        S = delta_reconstruction(table, v, zwin, wwin)
        assert not S.zwin.is_empty and not S.wwin.is_empty
        D = commutator_2var(a, b, v, S.zwin, S.wwin)
        assert (D - S.restrict(D.zwin, D.wwin)).is_zero()


# ---------------------------------------------------------------------------
# Comparison products (generalized residue products at a scalar)


def test_comparison_products_integer_pair():
    pts = PointSet(2, (Fraction(-1),))
    orders = (1,)
    xw = W44
    vs = basis(CL_B, Fraction(2))

    def li(alpha, k, v):
        return li_product(PHI_B, Fraction(alpha), k, PHI_B, pts, orders, v, xw)

    for v in vs:
        for k in (-1, 0, 1, 2):
            assert li(1, k, v).is_zero(), k
        expr = LinComb(
            (
                (Fraction(1), _scalar_field({-1: Fraction(1, 2)})),
                (Fraction(1), NormProd2(Derivative(PHI_B), PHI_B)),
            )
        )
        assert li(1, -2, v).eq_on(eval_field(expr, v, xw), xw)
        assert li(-1, 0, v).eq_on(eval_field(_scalar_field({1: -2}), v, xw), xw)
        assert li(-1, 1, v).is_zero()
        got = li(-1, -1, v)
        want = eval_field(NormProd2(Dilate(PHI_B, 1, 2), PHI_B), v, xw)
        assert got.eq_on(want, xw)


def test_comparison_products_match_modewise_products_at_point():
    pts = PointSet(2, (Fraction(-1),))
    orders = (1,)
    for k in (-2, -1, 0, 1):
        pj = product_jk(PHI_B, 1, k, PHI_B, pts, orders)
        for v in basis(CL_B, Fraction(2)):
            got = li_product(PHI_B, Fraction(-1), k, PHI_B, pts, orders, v, W44)
            assert got.eq_on(eval_field(pj, v, W44), W44), k


def test_comparison_products_heisenberg_pair():
    pts = PointSet.roots_of_unity(2)
    orders = (2, 2)
    hd = h_field_d()
    vs = basis(CL_D, Fraction(2))

    def li(k, v):
        return li_product(hd, Fraction(1), k, hd, pts, orders, v, W44)

    quarter = _scalar_field({0: Fraction(1, 4)})
    for v in vs:
        assert li(1, v).eq_on(eval_field(quarter, v, W44), W44)
        assert li(0, v).is_zero()
        assert li(2, v).is_zero() and li(3, v).is_zero()
        expr = LinComb(
            (
                (Fraction(1), _scalar_field({-2: Fraction(-1, 16)})),
                (Fraction(1), NormProd2(hd, hd)),
            )
        )
        assert li(-1, v).eq_on(eval_field(expr, v, W44), W44)


# ---------------------------------------------------------------------------
# Heisenberg fields


def test_order_two_heisenberg_coincides_with_two_point_field():
    h2 = h_field_d_order(2)
    hd = h_field_d()
    for v in basis(CL_D, Fraction(2)):
        assert _eval_eq(h2, hd, v)


def test_order_n_heisenberg_normalization_domain():
    h_field_d_order(3)
    with pytest.raises(ValueError):
        h_field_d_order(5)
    with pytest.raises(ValueError):
        h_field_d_order(4)


# ---------------------------------------------------------------------------
# JSON AST


def test_field_json_roundtrip():
    exprs = [
        PHI_B,
        IDENT,
        _scalar_field({-1: Fraction(1, 2), 2: -3}),
        Derivative(PHI_D, 2),
        Dilate(PHI_C, 1, 2),
        NormProd2(Derivative(PHI_B), Dilate(PHI_B, 1, 2)),
        h_field_b(),
        h_field_d_order(3),
        product_jk(PHI_B, 2, -1, PHI_B, PTS2, (1, 1)),
    ]
    for e in exprs:
        d = field_to_json(e)
        back = field_from_json(d, order=3)
        assert field_to_json(back) == d
    # evaluation agrees after the roundtrip
    e = NormProd2(Derivative(PHI_B), Dilate(PHI_B, 1, 2))
    back = field_from_json(field_to_json(e), order=2)
    v = FockVector.word(CL_B, [1])
    assert _eval_eq(e, back, v)
