"""N-point locality, delta decomposition, Bell polynomials, and exact
two-variable partial fractions."""

import random
from fractions import Fraction

import pytest

from vertexcalc.deltacalc import (
    DeltaSum,
    LocalityError,
    PartialFractionForm,
    PointSet,
    RatFrac,
    annihilator,
    bell_polynomial,
    decompose,
    expand_ratfrac,
    is_local,
    partial_fractions,
)
from vertexcalc.series import (
    BiDist,
    ExpansionDir,
    LaurentPoly,
    Window,
    WindowError,
    bidist_mul,
    delta_expansion,
    expand_inverse_power,
    laurent_str,
)
from vertexcalc.util import val_is_zero

# ---------------------------------------------------------------------------
# Point sets and annihilators


def test_roots_of_unity_points():
    p2 = PointSet.roots_of_unity(2)
    assert p2.lam(1) == Fraction(1) and p2.lam(2) == Fraction(-1)
    p4 = PointSet.roots_of_unity(4)
    # lam(3) = e^2 = -1 in the order-4 tower
    assert val_is_zero(p4.lam(3) + 1)
    assert val_is_zero(p4.lam(2) * p4.lam(2) + 1)


def test_pointset_json_roundtrip():
    for N in (1, 2, 3, 4):
        p = PointSet.roots_of_unity(N)
        q = PointSet.from_json(p.to_json())
        assert q.order == p.order
        assert all(val_is_zero(p.lam(j) - q.lam(j)) for j in range(1, N + 1))


def test_annihilator_two_points():
    pts = PointSet.roots_of_unity(2)
    f = annihilator(pts, (1, 1))
    assert f.get(2, 0) == Fraction(1)
    assert f.get(0, 2) == Fraction(-1)
    assert f.get(1, 1) == Fraction(0)


# ---------------------------------------------------------------------------
# Locality certificates


def _expand(ds: DeltaSum, zwin: Window, wwin: Window) -> BiDist:
    acc = BiDist.zero(zwin, wwin)
    for (k, l), c in ds.terms.items():
        d = delta_expansion(ds.points.lam(k), l, zwin, wwin)
        acc = acc + bidist_mul(BiDist.poly({(0, e): v for e, v in c.coeffs.items()}), d)
    return acc


def test_is_local_positive_and_negative():
    pts = PointSet.roots_of_unity(2)
    ds = DeltaSum(pts, {(2, 0): LaurentPoly({1: Fraction(-2)})})
    a = _expand(ds, Window(-8, 8), Window(-8, 8))
    assert is_local(a, pts, (1, 1)).ok
    assert is_local(a, pts, (0, 1)).ok
    bad = expand_inverse_power(Fraction(1), 1, ExpansionDir.ZW, Window(-8, 8), Window(-8, 8))
    assert not is_local(bad, pts, (1, 1)).ok


def test_is_local_window_too_small():
    a = BiDist({(0, 0): Fraction(1)}, Window(0, 0), Window(0, 0))
    with pytest.raises(WindowError):
        is_local(a, PointSet.roots_of_unity(2), (1, 1))


def test_decompose_rejects_nonlocal():
    pts = PointSet.roots_of_unity(2)
    bad = expand_inverse_power(Fraction(1), 1, ExpansionDir.ZW, Window(-8, 8), Window(-8, 8))
    with pytest.raises(LocalityError):
        decompose(bad, pts, (1, 1))


# ---------------------------------------------------------------------------
# Decomposition


def test_decompose_single_delta_term():
    pts = PointSet.roots_of_unity(2)
    ds = DeltaSum(pts, {(2, 0): LaurentPoly({1: Fraction(-2)})})
    a = _expand(ds, Window(-8, 8), Window(-8, 8))
    out = decompose(a, pts, (1, 1))
    assert out.terms == ds.terms


def test_decompose_derivative_terms():
    pts = PointSet.roots_of_unity(1)
    ds = DeltaSum(
        pts,
        {
            (1, 0): LaurentPoly({0: Fraction(3)}),
            (1, 2): LaurentPoly({-1: Fraction(1, 2), 2: Fraction(-5)}),
        },
    )
    a = _expand(ds, Window(-12, 12), Window(-12, 12))
    out = decompose(a, pts, (3,))
    assert out.terms == ds.terms


def _random_deltasum(rng: random.Random):
    N = rng.randint(1, 4)
    pts = PointSet.roots_of_unity(N)
    orders = [rng.randint(0, 3) for _ in range(N)]
    if not any(orders):
        orders[rng.randrange(N)] = 1
    terms = {}
    for k in range(1, N + 1):
        for l in range(orders[k - 1]):
            if rng.random() < 0.35:
                continue
            coeffs = {}
            for _ in range(rng.randint(1, 3)):
                coeffs[rng.randint(-3, 3)] = Fraction(rng.randint(-5, 5))
            p = LaurentPoly(coeffs)
            if not p.is_zero():
                terms[(k, l)] = p
    return DeltaSum(pts, terms), tuple(orders)


def test_decompose_roundtrip_randomized():
    rng = random.Random(424242)
    W = 16
    for _ in range(60):
        ds, orders = _random_deltasum(rng)
        a = _expand(ds, Window(-W, W), Window(-W, W))
        out = decompose(a, ds.points, orders)
        assert out.terms == ds.terms, (ds.points.order, orders)


def test_deltasum_json_roundtrip():
    rng = random.Random(5)
    for _ in range(20):
        ds, _ = _random_deltasum(rng)
        back = DeltaSum.from_json(ds.to_json())
        assert back.terms == ds.terms
        assert back.points.order == ds.points.order


# ---------------------------------------------------------------------------
# Bell polynomials vs the set-partition enumerator


def _set_partitions(items):
    """All partitions of a list into nonempty blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [first]] + part[i + 1 :]
        yield [[first]] + part


def _bell_by_partitions(n: int, k: int, xs):
    """B_{n,k}(x_1..) = sum over partitions of an n-set with k blocks of
    prod_b x_{|b|}, evaluated at the given values."""
    total = Fraction(0)
    for part in _set_partitions(list(range(n))):
        if len(part) != k:
            continue
        prod = Fraction(1)
        for block in part:
            prod *= xs[len(block) - 1]
        total += prod
    return total


def test_bell_matches_partition_enumerator():
    vals = [Fraction(p, q) for p, q in ((2, 1), (3, 2), (5, 3), (7, 1), (1, 4), (11, 5))]
    for n in range(1, 7):
        for k in range(1, n + 1):
            got = bell_polynomial(n, k, vals)
            want = _bell_by_partitions(n, k, vals)
            assert got == want, (n, k)


def test_bell_known_values():
    xs = [Fraction(1)] * 6
    # B_{n,k}(1,1,...) = Stirling numbers of the second kind
    stirling = {(4, 2): 7, (5, 3): 25, (6, 3): 90, (6, 1): 1, (6, 6): 1}
    for (n, k), s in stirling.items():
        assert bell_polynomial(n, k, xs) == Fraction(s)


def test_bell_input_validation():
    with pytest.raises(ValueError):
        bell_polynomial(0, 1, [Fraction(1)])
    with pytest.raises(ValueError):
        bell_polynomial(3, 4, [Fraction(1)] * 4)
    with pytest.raises(ValueError):
        bell_polynomial(5, 2, [Fraction(1)] * 2)  # needs n-k+1 = 4 values


# ---------------------------------------------------------------------------
# Partial fractions


def test_partial_fractions_two_point_example():
    pts = PointSet.roots_of_unity(2)
    f = RatFrac({(0, 0): Fraction(1)}, 0, 0, pts, (1, 1))
    pf = partial_fractions(f)
    assert pf.poly_part == {}
    assert pf.z_pole_coeffs == {}
    assert pf.point_coeffs == {
        (1, 1): LaurentPoly({-1: Fraction(1, 2)}),
        (2, 1): LaurentPoly({-1: Fraction(-1, 2)}),
    }


def test_partial_fractions_reassemble_exact():
    pts = PointSet.roots_of_unity(2)
    f = RatFrac(
        {(3, 0): Fraction(1), (0, 1): Fraction(-2, 3)}, 1, 2, pts, (2, 1)
    )
    pf = partial_fractions(f)
    back = pf.reassemble(f.z_pole, f.w_pole, f.point_poles)
    assert (back - BiDist.poly(f.num)).is_zero()


def _random_ratfrac(rng: random.Random) -> RatFrac:
    N = rng.randint(1, 4)
    pts = PointSet.roots_of_unity(N)
    num = {}
    for _ in range(rng.randint(1, 4)):
        num[(rng.randint(0, 4), rng.randint(-2, 2))] = Fraction(
            rng.randint(-6, 6), rng.randint(1, 3)
        )
    point_poles = [0] * N
    for _ in range(rng.randint(0, 4)):
        point_poles[rng.randrange(N)] += 1
    return RatFrac(num, rng.randint(0, 2), rng.randint(0, 2), pts, point_poles)


def test_partial_fractions_roundtrip_randomized():
    rng = random.Random(1234)
    for _ in range(40):
        f = _random_ratfrac(rng)
        if not f.num:
            continue
        pf = partial_fractions(f)
        back = pf.reassemble(f.z_pole, f.w_pole, f.point_poles)
        assert (back - BiDist.poly(f.num)).is_zero(), f.to_json()


def test_ratfrac_json_roundtrip():
    rng = random.Random(77)
    for _ in range(15):
        f = _random_ratfrac(rng)
        g = RatFrac.from_json(f.to_json())
        assert g.num.keys() == f.num.keys()
        assert all(val_is_zero(g.num[k] - f.num[k]) for k in f.num)
        assert (g.z_pole, g.w_pole, g.point_poles) == (f.z_pole, f.w_pole, f.point_poles)


def test_expand_ratfrac_directions_differ_by_delta():
    # the two expansions of 1/(z - lam w)^(k+1) differ by the divided k-th
    # delta derivative
    pts = PointSet.roots_of_unity(2)
    for j, k in ((1, 0), (2, 0), (1, 1), (2, 2)):
        poles = [0, 0]
        poles[j - 1] = k + 1
        f = RatFrac({(0, 0): Fraction(1)}, 0, 0, pts, poles)
        zw = expand_ratfrac(f, ExpansionDir.ZW, Window(-7, 7), Window(-7, 7))
        wz = expand_ratfrac(f, ExpansionDir.WZ, Window(-7, 7), Window(-7, 7))
        d = delta_expansion(pts.lam(j), k, Window(-7, 7), Window(-7, 7))
        diff = zw - wz
        assert (diff - d.restrict(diff.zwin, diff.wwin)).is_zero(), (j, k)


def test_partial_fraction_form_json_shape():
    pts = PointSet.roots_of_unity(2)
    f = RatFrac({(0, 0): Fraction(1)}, 0, 0, pts, (1, 1))
    d = partial_fractions(f).to_json()
    assert d["order"] == 2
    assert d["poly"] == []
    assert d["z_pole_coeffs"] == {}
    assert d["point_coeffs"] == [
        {"k": 1, "i": 1, "coeff": laurent_str(LaurentPoly({-1: Fraction(1, 2)}))},
        {"k": 2, "i": 1, "coeff": laurent_str(LaurentPoly({-1: Fraction(-1, 2)}))},
    ]


def test_ratfrac_validation():
    pts = PointSet.roots_of_unity(2)
    with pytest.raises(ValueError):
        RatFrac({}, -1, 0, pts, (0, 0))
    with pytest.raises(ValueError):
        RatFrac({}, 0, 0, pts, (1,))
