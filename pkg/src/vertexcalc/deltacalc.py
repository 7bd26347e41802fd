"""Multi-point delta calculus: decomposition of local distributions into
delta derivatives, and exact partial fractions for rational functions with
poles at z=0, w=0, and z = lam_k w.

A distribution a(z,w) is N-point local at points lam_1..lam_N with orders
n_1..n_N when prod_k (z - lam_k w)^{n_k} annihilates it.  Such a distribution
is a unique finite sum  sum_{k,l} c_{kl}(w) d^{(l)} delta(z - lam_k w), and
`decompose` recovers the c_{kl} by taking residues against explicit
multiplier polynomials whose inverse-series coefficients come from partial
Bell polynomials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .scalar import Scalar, scalar_inv, scalar_pow, scalar_str, scalar_from_str, root_power
from .series import (
    BiDist,
    ExpansionDir,
    LaurentPoly,
    Window,
    WindowError,
    bidist_mul,
    delta_expansion,
    expand_inverse_power,
    laurent_from_str,
    laurent_str,
)
from .util import binom, val_is_zero


class LocalityError(Exception):
    """The input distribution is not annihilated by the point polynomial."""


class PointSet:
    """Distinct nonzero expansion points lam_1..lam_N, 1-indexed.

    `order` is the cyclotomic order the points live in; the default point set
    is the full group of N-th roots of unity, lam_k = eps^(k-1).
    """

    __slots__ = ("order", "points")

    def __init__(self, order: int, points):
        points = tuple(points)
        if not points:
            raise ValueError("need at least one point")
        for i, p in enumerate(points):
            if val_is_zero(p):
                raise ValueError("points must be nonzero")
            for q in points[:i]:
                if val_is_zero(p - q):
                    raise ValueError("points must be pairwise distinct")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "points", points)

    def __setattr__(self, *a):
        raise AttributeError("PointSet is immutable")

    @staticmethod
    def roots_of_unity(N: int) -> "PointSet":
        return PointSet(N, tuple(root_power(N, k) for k in range(N)))

    def __len__(self) -> int:
        return len(self.points)

    def lam(self, k: int) -> Scalar:
        """Point number k, 1-based."""
        if not 1 <= k <= len(self.points):
            raise ValueError(f"point index {k} out of range 1..{len(self.points)}")
        return self.points[k - 1]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PointSet)
            and self.order == other.order
            and len(self.points) == len(other.points)
            and all(val_is_zero(a - b) for a, b in zip(self.points, other.points))
        )

    def __hash__(self):
        return hash((self.order, len(self.points)))

    def to_json(self) -> dict:
        return {"order": self.order, "points": [scalar_str(p) for p in self.points]}

    @staticmethod
    def from_json(d: dict) -> "PointSet":
        order = d["order"]
        return PointSet(order, tuple(scalar_from_str(s, order) for s in d["points"]))


def point_factor(lam: Scalar) -> BiDist:
    """The exact polynomial (z - lam*w)."""
    return BiDist.poly({(1, 0): Fraction(1), (0, 1): -lam})


def annihilator(points: PointSet, orders, skip: int | None = None) -> BiDist:
    """prod_k (z - lam_k w)^{n_k}, optionally omitting point `skip`."""
    acc = BiDist.poly({(0, 0): Fraction(1)})
    for k in range(1, len(points) + 1):
        if k == skip:
            continue
        f = point_factor(points.lam(k))
        for _ in range(orders[k - 1]):
            acc = bidist_mul(acc, f)
    return acc


def delta_term(points: PointSet, k: int, l: int, out) -> BiDist:
    """Windowed expansion of d^{(l)} delta(z - lam_k w) on out = (zwin, wwin)."""
    zwin, wwin = out
    return delta_expansion(points.lam(k), l, zwin, wwin)


class DeltaSum:
    """Finite sum  sum c_{kl}(w) d^{(l)} delta(z - lam_k w).

    `coeff_window` records where the coefficient polynomials are certified;
    Window.all() means they are exact (e.g. built symbolically).
    """

    __slots__ = ("points", "terms", "coeff_window")

    def __init__(self, points: PointSet, terms, coeff_window: Window = Window.all()):
        if isinstance(terms, dict):
            items = terms.items()
        else:
            items = [((k, l), c) for (k, l, c) in terms]
        clean: dict[tuple[int, int], LaurentPoly] = {}
        for (k, l), c in items:
            points.lam(k)  # validates index
            if l < 0:
                raise ValueError("derivative order must be >= 0")
            if not isinstance(c, LaurentPoly):
                c = LaurentPoly(c)
            if not c.is_zero():
                if (k, l) in clean:
                    c = clean[(k, l)] + c
                if c.is_zero():
                    clean.pop((k, l), None)
                else:
                    clean[(k, l)] = c
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "coeff_window", coeff_window)

    def __setattr__(self, *a):
        raise AttributeError("DeltaSum is immutable")

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "DeltaSum") -> "DeltaSum":
        if self.points != other.points:
            raise ValueError("point sets differ")
        out = dict(self.terms)
        for kl, c in other.terms.items():
            out[kl] = out.get(kl, LaurentPoly.zero()) + c
        return DeltaSum(self.points, out, self.coeff_window.intersect(other.coeff_window))

    def __neg__(self) -> "DeltaSum":
        return DeltaSum(self.points, {kl: -c for kl, c in self.terms.items()}, self.coeff_window)

    def __sub__(self, other: "DeltaSum") -> "DeltaSum":
        return self + (-other)

    def scale(self, c: Scalar) -> "DeltaSum":
        return DeltaSum(self.points, {kl: p * c for kl, p in self.terms.items()}, self.coeff_window)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DeltaSum)
            and self.points == other.points
            and set(self.terms) == set(other.terms)
            and all(self.terms[kl] == other.terms[kl] for kl in self.terms)
        )

    def realize(self, zwin: Window, wwin: Window) -> BiDist:
        """Expand every term on a window certifying (zwin, wwin)."""
        acc = BiDist.zero(zwin, wwin)
        for (k, l), c in sorted(self.terms.items()):
            pad = Window(
                None if wwin.lo is None else wwin.lo - c.max_exp(),
                None if wwin.hi is None else wwin.hi - c.min_exp(),
            )
            d = delta_term(self.points, k, l, (zwin, pad))
            cpoly = BiDist.poly({(0, e): v for e, v in c.coeffs.items()})
            acc = acc + bidist_mul(cpoly, d).restrict(zwin, wwin)
        return acc

    def to_json(self) -> dict:
        terms = [
            {"k": k, "l": l, "coeff": laurent_str(c, "w")}
            for (k, l), c in sorted(self.terms.items())
        ]
        return {**self.points.to_json(), "terms": terms}

    @staticmethod
    def from_json(d: dict) -> "DeltaSum":
        points = PointSet.from_json(d)
        terms = [
            (t["k"], t["l"], laurent_from_str(t["coeff"], points.order, "w"))
            for t in d["terms"]
        ]
        return DeltaSum(points, terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for (k, l), c in sorted(self.terms.items()):
            dd = f"d^({l})" if l else ""
            bits.append(f"({laurent_str(c)}) * {dd}delta(z - ({scalar_str(self.points.lam(k))})w)")
        return " + ".join(bits)

    __repr__ = __str__


def factor_rewrite(t: DeltaSum, i: int) -> DeltaSum:
    """The DeltaSum equal to (z - lam_i w) * t.

    Uses (z - lam_i w) d^{(l)} delta_j = d^{(l-1)} delta_j
    + (lam_j - lam_i) w d^{(l)} delta_j; the first term is absent for l = 0.
    """
    lam_i = t.points.lam(i)
    out: dict[tuple[int, int], LaurentPoly] = {}

    def add(kl, c):
        out[kl] = out.get(kl, LaurentPoly.zero()) + c

    for (j, l), c in t.terms.items():
        if l >= 1:
            add((j, l - 1), c)
        diff = t.points.lam(j) - lam_i
        if not val_is_zero(diff):
            add((j, l), c.shift(1) * diff)
    return DeltaSum(t.points, out, t.coeff_window)


def bell_polynomial(n: int, k: int, xs):
    """Partial exponential Bell polynomial B_{n,k}(x_1..x_{n-k+1}).

    Values form any commutative ring (scalars or Laurent polynomials);
    computed by B_{n,k} = sum_i binom(n-1, i-1) x_i B_{n-i,k-1}.
    """
    if n < 1 or k < 1 or k > n:
        raise ValueError("need 1 <= k <= n")
    if len(xs) < n - k + 1:
        raise ValueError("not enough variables")
    memo: dict[tuple[int, int], object] = {}

    def B(n: int, k: int):
        if n == 0 and k == 0:
            return Fraction(1)
        if n == 0 or k == 0:
            return Fraction(0)
        if (n, k) not in memo:
            acc = None
            for i in range(1, n - k + 2):
                sub = B(n - i, k - 1)
                if isinstance(sub, Fraction) and sub == 0:
                    continue
                term = binom(n - 1, i - 1) * xs[i - 1] * sub
                acc = term if acc is None else acc + term
            memo[(n, k)] = Fraction(0) if acc is None else acc
        return memo[(n, k)]

    return B(n, k)


def inverse_series_coeffs(points: PointSet, orders, j: int) -> list[LaurentPoly]:
    """Coefficients P_{0,j}..P_{n_j-1,j} of the inverse of
    p_j(z,w) = prod_{r!=j}(z - lam_r w)^{n_r} expanded around z = lam_j w.

    p_{-i,j}(w), the i-th divided z-derivative at z = lam_j w, is a monomial
    in w, so every P is a Laurent polynomial.
    """
    lam_j = points.lam(j)
    nj = orders[j - 1]
    # Taylor coefficients in x of prod_{r!=j} ((lam_j - lam_r) w + x)^{n_r}.
    p: dict[int, LaurentPoly] = {0: LaurentPoly.one()}
    for r in range(1, len(points) + 1):
        if r == j:
            continue
        diff = lam_j - points.lam(r)
        if val_is_zero(diff):
            raise ValueError("repeated points")
        for _ in range(orders[r - 1]):
            nxt: dict[int, LaurentPoly] = {}
            for i, c in p.items():
                # multiply by (diff*w + x)
                nxt[i] = nxt.get(i, LaurentPoly.zero()) + c.shift(1) * diff
                nxt[i + 1] = nxt.get(i + 1, LaurentPoly.zero()) + c
            p = nxt
    p0 = p[0]
    # p0 is a monomial c*w^S; invert it directly.
    (S,) = p0.support()
    p0_inv = LaurentPoly({-S: scalar_inv(p0.get(S))})
    out = [p0_inv]
    for n in range(1, nj):
        acc = LaurentPoly.zero()
        fact_n = math.factorial(n)
        for k in range(1, n + 1):
            # Bell arguments are ordinary derivatives i! * p_{-i,j}.
            xs = [
                math.factorial(i) * p.get(i, LaurentPoly.zero())
                for i in range(1, n - k + 2)
            ]
            bn = bell_polynomial(n, k, xs)
            if isinstance(bn, Fraction):
                bn = LaurentPoly({0: bn})
            coef = Fraction((-1) ** k * math.factorial(k), fact_n)
            acc = acc + (p0_inv ** (k + 1)) * bn * coef
        out.append(acc)
    return out


@dataclass(frozen=True)
class LocalityCertificate:
    ok: bool
    zwin: Window
    wwin: Window

    def __bool__(self) -> bool:
        return self.ok


def is_local(a: BiDist, points: PointSet, orders) -> LocalityCertificate:
    """Does prod_k (z - lam_k w)^{n_k} annihilate a on a certifiable window?"""
    prod = bidist_mul(annihilator(points, orders), a)
    if prod.zwin.is_empty or prod.wwin.is_empty:
        raise WindowError(
            f"window too small for a locality check at orders {tuple(orders)}: "
            f"product window {prod.zwin}x{prod.wwin} is empty"
        )
    return LocalityCertificate(prod.is_zero(), prod.zwin, prod.wwin)


def decompose(a: BiDist, points: PointSet, orders) -> DeltaSum:
    """Write an N-point local distribution as a DeltaSum.

    c_{j,n_j-r}(w) = Res_z [ sum_{i=0}^{r-1} (z - lam_j w)^{n_j-r+i} P_{i,j}(w)
                             * prod_{r'!=j} (z - lam_r' w)^{n_r'} * a ]
    for r = 1..n_j.  Fails loudly when a is not local or the window cannot
    certify the residues.
    """
    orders = tuple(orders)
    if len(orders) != len(points):
        raise ValueError("one order per point required")
    if any(n < 0 for n in orders):
        raise ValueError("orders must be >= 0")
    S = sum(orders)
    cert = is_local(a, points, orders)
    if not cert.ok:
        raise LocalityError(f"not local at the given points and orders {orders}")
    terms: dict[tuple[int, int], LaurentPoly] = {}
    cwin = Window.all()
    for j in range(1, len(points) + 1):
        nj = orders[j - 1]
        if nj == 0:
            continue
        P = inverse_series_coeffs(points, orders, j)
        others = annihilator(points, orders, skip=j)
        fac = point_factor(points.lam(j))
        for r in range(1, nj + 1):
            mult = BiDist.zero()
            for i in range(r):
                # (z - lam_j w)^{n_j - r + i} * P_{i,j}(w)
                piece = BiDist.poly({(0, e): v for e, v in P[i].coeffs.items()})
                for _ in range(nj - r + i):
                    piece = bidist_mul(piece, fac)
                mult = mult + piece
            prod = bidist_mul(bidist_mul(mult, others), a)
            if not prod.zwin.contains(-1) or prod.wwin.is_empty:
                raise WindowError(
                    "window too small to certify the decomposition residues: "
                    f"need z-window covering [{-S}, -1] and w-margin about {2 * S}; "
                    f"got {a.zwin}x{a.wwin}"
                )
            series = prod.residue_z()
            cwin = cwin.intersect(series.window)
            c = LaurentPoly(dict(series.coeffs))
            if not c.is_zero():
                terms[(j, nj - r)] = c
    return DeltaSum(points, terms, cwin)


# ---------------------------------------------------------------------------
# Rational functions and partial fractions


class RatFrac:
    """num(z,w) / (z^m w^n prod_k (z - lam_k w)^{n_k}) with exact numerator."""

    __slots__ = ("num", "z_pole", "w_pole", "points", "point_poles")

    def __init__(self, num: dict, z_pole: int, w_pole: int, points: PointSet, point_poles):
        point_poles = tuple(point_poles)
        if z_pole < 0 or w_pole < 0 or any(n < 0 for n in point_poles):
            raise ValueError("pole orders must be >= 0")
        if len(point_poles) != len(points):
            raise ValueError("one pole order per point required")
        clean = {}
        for (ze, we), c in num.items():
            if isinstance(c, int):
                c = Fraction(c)
            if not val_is_zero(c):
                clean[(ze, we)] = c
        object.__setattr__(self, "num", clean)
        object.__setattr__(self, "z_pole", z_pole)
        object.__setattr__(self, "w_pole", w_pole)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "point_poles", point_poles)

    def __setattr__(self, *a):
        raise AttributeError("RatFrac is immutable")

    def denominator(self) -> BiDist:
        den = annihilator(self.points, self.point_poles)
        return den.shift(self.z_pole, self.w_pole)

    def to_json(self) -> dict:
        return {
            "num": [[ze, we, scalar_str(c)] for (ze, we), c in sorted(self.num.items())],
            "z_pole": self.z_pole,
            "w_pole": self.w_pole,
            "order": self.points.order,
            "points": [scalar_str(p) for p in self.points.points],
            "point_poles": list(self.point_poles),
        }

    @staticmethod
    def from_json(d: dict) -> "RatFrac":
        points = PointSet.from_json(d)
        num = {(ze, we): scalar_from_str(c, points.order) for ze, we, c in d["num"]}
        return RatFrac(num, d["z_pole"], d["w_pole"], points, d["point_poles"])


@dataclass
class PartialFractionForm:
    """q(z,w) + sum_i A_{-i,0}(w)/z^i + sum_{k,i} A_{-i,k}(w)/(z - lam_k w)^i.

    q has nonnegative z-exponents; w-exponents may be negative everywhere.
    """

    points: PointSet
    poly_part: dict = field(default_factory=dict)            # (ze,we) -> Scalar, ze >= 0
    z_pole_coeffs: dict = field(default_factory=dict)        # i -> LaurentPoly in w
    point_coeffs: dict = field(default_factory=dict)         # (k,i) -> LaurentPoly in w

    def residue_at_point(self, k: int) -> LaurentPoly:
        return self.point_coeffs.get((k, 1), LaurentPoly.zero())

    def reassemble(self, z_pole: int, w_pole: int, point_poles) -> BiDist:
        """Multiply back over the common denominator
        z^z_pole w^w_pole prod (z-lam_k w)^{n_k}; returns the exact numerator."""
        den = annihilator(self.points, point_poles).shift(z_pole, w_pole)
        acc = bidist_mul(BiDist.poly(self.poly_part), den)
        for i, c in self.z_pole_coeffs.items():
            # i may exceed z_pole when the numerator has negative z-exponents;
            # the cleared form is then Laurent, which shift() handles exactly.
            part = annihilator(self.points, point_poles).shift(z_pole - i, w_pole)
            cpoly = BiDist.poly({(0, e): v for e, v in c.coeffs.items()})
            acc = acc + bidist_mul(cpoly, part)
        for (k, i), c in self.point_coeffs.items():
            if i > point_poles[k - 1]:
                raise ValueError("point pole order exceeds denominator")
            orders2 = list(point_poles)
            orders2[k - 1] -= i
            part = annihilator(self.points, orders2).shift(z_pole, w_pole)
            cpoly = BiDist.poly({(0, e): v for e, v in c.coeffs.items()})
            acc = acc + bidist_mul(cpoly, part)
        return acc

    def to_json(self) -> dict:
        return {
            "order": self.points.order,
            "points": [scalar_str(p) for p in self.points.points],
            "poly": [[ze, we, scalar_str(c)] for (ze, we), c in sorted(self.poly_part.items())],
            "z_pole_coeffs": {str(i): laurent_str(c) for i, c in sorted(self.z_pole_coeffs.items())},
            "point_coeffs": [
                {"k": k, "i": i, "coeff": laurent_str(c)}
                for (k, i), c in sorted(self.point_coeffs.items())
            ],
        }


def _poly_divmod_t(num: LaurentPoly, den: LaurentPoly):
    """Division with remainder for polynomials in t (nonnegative exponents)."""
    if den.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    dd = den.max_exp()
    lead = den.get(dd)
    q: dict[int, Scalar] = {}
    rem = dict(num.coeffs)

    def deg(c):
        return max(c) if c else -1

    while rem and deg(rem) >= dd:
        d = deg(rem)
        c = rem[d] / lead
        q[d - dd] = c
        for e, v in den.coeffs.items():
            ne = e + (d - dd)
            acc = rem.get(ne, Fraction(0)) - c * v
            if val_is_zero(acc):
                rem.pop(ne, None)
            else:
                rem[ne] = acc
    return LaurentPoly(q), LaurentPoly(rem)


def _invert_scalar_series(ds: list, nterms: int) -> list:
    """First nterms coefficients of 1/(d_0 + d_1 s + ...) with d_0 invertible."""
    g = [scalar_inv(ds[0])]
    for n in range(1, nterms):
        acc = Fraction(0)
        for i in range(1, n + 1):
            di = ds[i] if i < len(ds) else Fraction(0)
            acc = acc + di * g[n - i]
        g.append(-(acc * g[0]))
    return g


def partial_fractions(f: RatFrac) -> PartialFractionForm:
    """Exact partial fractions via the one-variable substitution t = z/w.

    Each numerator monomial c z^a w^b becomes c t^a w^{a+b} over
    t^m w^{m+n+sum n_k - ...}; long division in t plus truncated Taylor
    expansion at each pole gives the unique decomposition, mapped back with
    1/(t - lam_k)^i = w^i/(z - lam_k w)^i.
    """
    out = PartialFractionForm(points=f.points)
    m, n = f.z_pole, f.w_pole
    poles = [(Fraction(0), 0)] + [
        (f.points.lam(k), f.point_poles[k - 1]) for k in range(1, len(f.points) + 1)
    ]
    sum_nk = sum(f.point_poles)

    def add_poly(ze, we, c):
        key = (ze, we)
        acc = out.poly_part.get(key, Fraction(0)) + c
        if val_is_zero(acc):
            out.poly_part.pop(key, None)
        else:
            out.poly_part[key] = acc

    def add_zpole(i, c: LaurentPoly):
        acc = out.z_pole_coeffs.get(i, LaurentPoly.zero()) + c
        if acc.is_zero():
            out.z_pole_coeffs.pop(i, None)
        else:
            out.z_pole_coeffs[i] = acc

    def add_point(k, i, c: LaurentPoly):
        acc = out.point_coeffs.get((k, i), LaurentPoly.zero()) + c
        if acc.is_zero():
            out.point_coeffs.pop((k, i), None)
        else:
            out.point_coeffs[(k, i)] = acc

    for (a, b), cmono in sorted(f.num.items()):
        W = a + b - m - n - sum_nk
        z0 = max(m - a, 0)  # t-pole order at 0 for this monomial
        numer = LaurentPoly({max(a - m, 0): Fraction(1)})
        den = LaurentPoly({z0: Fraction(1)})
        for k in range(1, len(f.points) + 1):
            fac = LaurentPoly({1: Fraction(1), 0: -f.points.lam(k)})
            den = den * fac ** f.point_poles[k - 1]
        Q, rem = _poly_divmod_t(numer, den)
        for jj, qc in Q.coeffs.items():
            add_poly(jj, W - jj, cmono * qc)
        if rem.is_zero():
            continue
        for mu, p in poles:
            p_here = z0 if val_is_zero(mu) else p
            if p_here == 0:
                continue
            # Taylor data at t = mu + s: den/s^p_here and rem
            ds = [den.deriv(p_here + i).eval_scalar(mu) for i in range(p_here)]
            rs = [rem.deriv(i).eval_scalar(mu) for i in range(p_here)]
            g = _invert_scalar_series(ds, p_here)
            for r in range(p_here):
                A = Fraction(0)
                for i in range(r + 1):
                    A = A + rs[i] * g[r - i]
                if val_is_zero(A):
                    continue
                i_pole = p_here - r
                coeff = LaurentPoly({W + i_pole: cmono * A})
                if val_is_zero(mu):
                    add_zpole(i_pole, coeff)
                else:
                    k = next(
                        kk for kk in range(1, len(f.points) + 1)
                        if val_is_zero(f.points.lam(kk) - mu)
                    )
                    add_point(k, i_pole, coeff)
    return out


def expand_ratfrac(f: RatFrac, direction: ExpansionDir, zwin: Window, wwin: Window) -> BiDist:
    """Geometric expansion i_{z,w} or i_{w,z} of a RatFrac on a window,
    assembled from its partial fractions (pure powers expand identically in
    both directions)."""
    pf = partial_fractions(f)
    acc = BiDist.zero(zwin, wwin)
    if pf.poly_part:
        acc = acc + BiDist.poly(pf.poly_part).restrict(zwin, wwin)
    for i, c in pf.z_pole_coeffs.items():
        cpoly = BiDist.poly({(-i, e): v for e, v in c.coeffs.items()})
        acc = acc + cpoly.restrict(zwin, wwin)
    for (k, i), c in pf.point_coeffs.items():
        pad = Window(
            None if wwin.lo is None else wwin.lo - c.max_exp(),
            None if wwin.hi is None else wwin.hi - c.min_exp(),
        )
        base = expand_inverse_power(f.points.lam(k), i, direction, zwin, pad)
        cpoly = BiDist.poly({(0, e): v for e, v in c.coeffs.items()})
        acc = acc + bidist_mul(cpoly, base).restrict(zwin, wwin)
    return acc
