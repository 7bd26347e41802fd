"""Field expressions over Fock spaces and the calculus on them: derivatives,
dilations by roots of unity, normal ordered products, contractions,
(j,k)-products, OPE extraction, a Taylor-expansion identity checker, and the
appendix-style comparison products.

Evaluation is vector-wise and windowed: eval_field(e, v, out) returns the
coefficients of e(z)v on the exponent window `out`, exactly.  Every product
is pointwise finite because annihilation parts act on vectors of bounded
energy; lower_bound computes the exponent below which coefficients vanish.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .deltacalc import PointSet, annihilator, inverse_series_coeffs, point_factor, LocalityError
from .fock import FockVector, ModeAlgebraSpec, SPECS, apply_mode, basis
from .scalar import Scalar, root_power, scalar_inv, scalar_pow, scalar_str
from .series import (
    BiDist,
    LaurentPoly,
    Window,
    WindowError,
    WindowSeries,
    bidist_mul,
    laurent_from_str,
    laurent_str,
)
from .util import binom, val_is_zero


# ---------------------------------------------------------------------------
# Expression nodes (immutable; identity-hashed so caches key on object)


@dataclass(frozen=True, eq=False)
class FieldExpr:
    pass


@dataclass(frozen=True, eq=False)
class GeneratorField(FieldExpr):
    """A generator a(z) = sum a_n z^{e(n)} with injective affine exponent map
    e(n) = mul*n + off mapping the mode lattice onto the integers."""

    spec: ModeAlgebraSpec
    mul: int
    off: Fraction

    def mode_of(self, e: int):
        """Mode index at z-exponent e, or None if off the lattice."""
        n = (Fraction(e) - self.off) / self.mul
        try:
            return self.spec.validate_index(n)
        except ValueError:
            return None


@dataclass(frozen=True, eq=False)
class IdentityField(FieldExpr):
    pass


@dataclass(frozen=True, eq=False)
class ScalarField(FieldExpr):
    """c(z)·Id for a Laurent polynomial c; houses central OPE coefficients."""

    poly: LaurentPoly


@dataclass(frozen=True, eq=False)
class Derivative(FieldExpr):
    """Divided derivative d^(l) = (1/l!) d^l (ordinary derivative at l=1)."""

    child: FieldExpr
    l: int = 1


@dataclass(frozen=True, eq=False)
class Dilate(FieldExpr):
    """a(eps^k z) for eps the primitive root of the given cyclotomic order."""

    child: FieldExpr
    k: int
    order: int

    @property
    def lam(self) -> Scalar:
        return root_power(self.order, self.k)


@dataclass(frozen=True, eq=False)
class NormProd2(FieldExpr):
    """One-variable normal ordered product :a(z)b(z):."""

    left: FieldExpr
    right: FieldExpr


@dataclass(frozen=True, eq=False)
class ProductJK(FieldExpr):
    """(j,k)-product of mutually local fields at the ambient points."""

    left: FieldExpr
    j: int
    k: int
    right: FieldExpr
    points: PointSet
    orders: tuple


@dataclass(frozen=True, eq=False)
class LinComb(FieldExpr):
    """Linear combination; coefficients are scalars or LaurentPoly shifts."""

    terms: tuple  # of (Scalar | LaurentPoly, FieldExpr)


IDENT = IdentityField()

PHI_B = GeneratorField(SPECS["B"], 1, Fraction(0))
PHI_C = GeneratorField(SPECS["C"], 1, Fraction(-1, 2))
PHI_D = GeneratorField(SPECS["D"], -1, Fraction(-1, 2))


def parity(e: FieldExpr) -> int:
    if isinstance(e, GeneratorField):
        return e.spec.parity
    if isinstance(e, (IdentityField, ScalarField)):
        return 0
    if isinstance(e, (Derivative, Dilate)):
        return parity(e.child)
    if isinstance(e, (NormProd2, ProductJK)):
        return (parity(e.left) + parity(e.right)) % 2
    if isinstance(e, LinComb):
        ps = {parity(ch) for _, ch in e.terms}
        if len(ps) > 1:
            raise ValueError("mixed-parity linear combination")
        return ps.pop() if ps else 0
    raise TypeError(f"unknown field expression {e!r}")


def field_spec(e: FieldExpr) -> ModeAlgebraSpec | None:
    """The mode algebra the expression acts on (None for pure scalars)."""
    if isinstance(e, GeneratorField):
        return e.spec
    if isinstance(e, (IdentityField, ScalarField)):
        return None
    if isinstance(e, (Derivative, Dilate)):
        return field_spec(e.child)
    if isinstance(e, (NormProd2, ProductJK)):
        return field_spec(e.left) or field_spec(e.right)
    if isinstance(e, LinComb):
        for _, ch in e.terms:
            s = field_spec(ch)
            if s is not None:
                return s
        return None
    raise TypeError(f"unknown field expression {e!r}")


def _sigma(a: FieldExpr, b: FieldExpr) -> Fraction:
    return Fraction(-1) if parity(a) * parity(b) % 2 else Fraction(1)


# ---------------------------------------------------------------------------
# Lower support bounds


_LB_CACHE: dict = {}
_EVAL_CACHE: dict = {}


def clear_caches():
    _LB_CACHE.clear()
    _EVAL_CACHE.clear()


def _annihilator_exponents(g: GeneratorField, energy: Fraction):
    """z-exponents of annihilator modes that can act nontrivially on a vector
    of the given maximal energy."""
    spec = g.spec
    out = []
    n = Fraction(1, 2) if spec.half_integer else Fraction(1)
    while n <= energy:
        idx = n if spec.is_annihilator(n) else -n
        out.append(int(g.mul * idx + g.off))
        n += 1
    return out


def lower_bound(e: FieldExpr, v: FockVector):
    """Exponent below which all coefficients of e(z)v vanish; None if e(z)v
    is identically zero."""
    if v.is_zero():
        return None
    key = (e, v)
    if key in _LB_CACHE:
        return _LB_CACHE[key]
    lb = _lower_bound(e, v)
    _LB_CACHE[key] = lb
    return lb


def _lower_bound(e: FieldExpr, v: FockVector):
    if isinstance(e, GeneratorField):
        ann = _annihilator_exponents(e, v.energy_max())
        return min([0] + ann)
    if isinstance(e, IdentityField):
        return 0
    if isinstance(e, ScalarField):
        return None if e.poly.is_zero() else e.poly.min_exp()
    if isinstance(e, Derivative):
        lb = lower_bound(e.child, v)
        return None if lb is None else lb - e.l
    if isinstance(e, Dilate):
        return lower_bound(e.child, v)
    if isinstance(e, LinComb):
        cands = []
        for c, ch in e.terms:
            lb = lower_bound(ch, v)
            if lb is None:
                continue
            shift = c.min_exp() if isinstance(c, LaurentPoly) and not c.is_zero() else 0
            cands.append(lb + shift)
        return min(cands) if cands else None
    if isinstance(e, NormProd2):
        cands = []
        lb_b = lower_bound(e.right, v)
        if lb_b is not None:
            cands.append(lb_b)  # plus part: p >= 0, q >= lb_b
        lb_a = lower_bound(e.left, v)
        if lb_a is not None and lb_a <= -1:
            av = eval_field(e.left, v, Window(lb_a, -1))
            for p, u in av.coeffs.items():
                lb_bu = lower_bound(e.right, u)
                if lb_bu is not None:
                    cands.append(p + lb_bu)
        return min(cands) if cands else None
    if isinstance(e, ProductJK):
        if e.k < 0:
            return lower_bound(_negative_jk_expansion(e), v)
        mult, _ = _jk_multiplier(e)
        if mult.is_zero():
            return None
        wes = [we for _, we in mult.coeffs]
        S = sum(e.orders)
        cands = []
        lb_b = lower_bound(e.right, v)
        if lb_b is not None:
            cands.append(lb_b)
        lb_a = lower_bound(e.left, v)
        if lb_a is not None and lb_a <= -1:
            av = eval_field(e.left, v, Window(max(lb_a, -S), -1))
            for _, u in av.coeffs.items():
                lb_bu = lower_bound(e.right, u)
                if lb_bu is not None:
                    cands.append(lb_bu)
        return min(wes) + min(cands) if cands else None
    raise TypeError(f"unknown field expression {e!r}")


# ---------------------------------------------------------------------------
# Evaluation


def eval_field(e: FieldExpr, v: FockVector, out: Window) -> WindowSeries:
    """Coefficients of e(z)v on the window `out`, exactly."""
    key = (e, v, out)
    if key in _EVAL_CACHE:
        return _EVAL_CACHE[key]
    s = _eval(e, v, out)
    _EVAL_CACHE[key] = s
    return s


def _need_finite(out: Window):
    if out.lo is None or out.hi is None:
        raise WindowError("window must be finite for field evaluation")


def _eval(e: FieldExpr, v: FockVector, out: Window) -> WindowSeries:
    if v.is_zero():
        return WindowSeries.zero(out)
    if isinstance(e, GeneratorField):
        _need_finite(out)
        coeffs = {}
        if not out.is_empty:
            for exp in out:
                n = e.mode_of(exp)
                if n is None:
                    continue
                u = apply_mode(e.spec, n, v)
                if not u.is_zero():
                    coeffs[exp] = u
        return WindowSeries(coeffs, out)
    if isinstance(e, IdentityField):
        return WindowSeries({0: v}, Window.all()).restrict(out)
    if isinstance(e, ScalarField):
        return WindowSeries(
            {exp: v.scale(c) for exp, c in e.poly.coeffs.items()}, Window.all()
        ).restrict(out)
    if isinstance(e, Derivative):
        inner = eval_field(e.child, v, out.shift(e.l))
        return WindowSeries(
            {exp - e.l: u.scale(Fraction(binom(exp, e.l)))
             for exp, u in inner.coeffs.items() if binom(exp, e.l)},
            out,
        )
    if isinstance(e, Dilate):
        inner = eval_field(e.child, v, out)
        lam = e.lam
        return WindowSeries(
            {exp: u.scale(scalar_pow(lam, exp)) for exp, u in inner.coeffs.items()}, out
        )
    if isinstance(e, LinComb):
        acc = WindowSeries.zero(Window.all())
        for c, ch in e.terms:
            if isinstance(c, LaurentPoly):
                if c.is_zero():
                    continue
                pad = Window(
                    None if out.lo is None else out.lo - c.max_exp(),
                    None if out.hi is None else out.hi - c.min_exp(),
                )
                acc = acc + eval_field(ch, v, pad).mul_poly(c)
            else:
                acc = acc + eval_field(ch, v, out).scale(c)
        return acc.restrict(out)
    if isinstance(e, NormProd2):
        return _eval_normprod_diag(e.left, e.right, v, out)
    if isinstance(e, ProductJK):
        if e.k < 0:
            return eval_field(_negative_jk_expansion(e), v, out)
        return _eval_jk_nonneg(e, v, out)
    raise TypeError(f"unknown field expression {e!r}")


def _eval_normprod_diag(a: FieldExpr, b: FieldExpr, v: FockVector, out: Window) -> WindowSeries:
    """:a(z)b(z): v  =  sum_{p>=0} a_p b_{m-p} v + sigma sum_{p<0} b_{m-p} a_p v."""
    _need_finite(out)
    sig = _sigma(a, b)
    acc: dict[int, object] = {}

    def add(m, u):
        if out.contains(m) and not u.is_zero():
            cur = acc.get(m)
            acc[m] = u if cur is None else cur + u

    lb_b = lower_bound(b, v)
    if lb_b is not None and lb_b <= out.hi:
        bv = eval_field(b, v, Window(lb_b, out.hi))
        for q, u in bv.coeffs.items():
            pw = Window(max(0, out.lo - q), out.hi - q)
            if pw.is_empty:
                continue
            for p, w in eval_field(a, u, pw).coeffs.items():
                add(p + q, w)
    lb_a = lower_bound(a, v)
    if lb_a is not None and lb_a <= -1:
        av = eval_field(a, v, Window(lb_a, -1))
        for p, u in av.coeffs.items():
            for q, w in eval_field(b, u, out.shift(-p)).coeffs.items():
                add(p + q, w.scale(sig))
    return WindowSeries(acc, out)


def _negative_jk_expansion(e: ProductJK) -> FieldExpr:
    """a_{(j,k)}b for k < 0 is :d^{(-k-1)}a evaluated at lam_j z, times b:."""
    m = -e.k - 1
    left: FieldExpr = e.left
    if m:
        left = Derivative(left, m)
    return NormProd2(_dilate_by(left, e.points.lam(e.j)), e.right)


def _jk_multiplier(e: ProductJK):
    """The exact polynomial sum_{i<r} (z - lam_j w)^{n_j-r+i} P_{i,j}(w)
    times prod_{r'!=j}(z - lam_r' w)^{n_r'}, for r = n_j - k."""
    nj = e.orders[e.j - 1]
    r = nj - e.k
    if r < 1:
        return BiDist.zero(), 0
    P = inverse_series_coeffs(e.points, e.orders, e.j)
    others = annihilator(e.points, e.orders, skip=e.j)
    fac = point_factor(e.points.lam(e.j))
    mult = BiDist.zero()
    for i in range(r):
        piece = BiDist.poly({(0, exp): c for exp, c in P[i].coeffs.items()})
        for _ in range(nj - r + i):
            piece = bidist_mul(piece, fac)
        mult = mult + piece
    return bidist_mul(mult, others), r


def commutator_2var(a: FieldExpr, b: FieldExpr, v: FockVector, zwin: Window, wwin: Window) -> BiDist:
    """Graded commutator a(z)b(w)v - (-1)^{p(a)p(b)} b(w)a(z)v, exact on the
    requested rectangle."""
    ab = field_product_2var(a, b, v, zwin, wwin, order="ab")
    ba = field_product_2var(a, b, v, zwin, wwin, order="ba")
    return ab - ba.scale(_sigma(a, b))


def field_product_2var(
    a: FieldExpr, b: FieldExpr, v: FockVector, zwin: Window, wwin: Window, order: str = "ab"
) -> BiDist:
    """a(z)b(w)v with b acting first ("ab") or b(w)a(z)v with a first ("ba")."""
    _need_finite(zwin)
    _need_finite(wwin)
    out: dict[tuple[int, int], object] = {}
    if order == "ab":
        inner = eval_field(b, v, wwin)
        for q, u in inner.coeffs.items():
            for p, w in eval_field(a, u, zwin).coeffs.items():
                _acc2(out, (p, q), w)
    elif order == "ba":
        inner = eval_field(a, v, zwin)
        for p, u in inner.coeffs.items():
            for q, w in eval_field(b, u, wwin).coeffs.items():
                _acc2(out, (p, q), w)
    else:
        raise ValueError("order must be 'ab' or 'ba'")
    return BiDist(out, zwin, wwin)


def _acc2(out: dict, key, w):
    if w.is_zero():
        return
    cur = out.get(key)
    out[key] = w if cur is None else cur + w


def normprod_2var(a: FieldExpr, b: FieldExpr, v: FockVector, zout: Window, wout: Window) -> BiDist:
    """:a(z)b(w): v = a(z)_+ b(w) v + sigma b(w) a(z)_- v, exact on the
    rectangle; the split keeps nonnegative z-exponents in the plus part."""
    _need_finite(zout)
    _need_finite(wout)
    sig = _sigma(a, b)
    out: dict[tuple[int, int], object] = {}
    plus = Window(max(0, zout.lo), zout.hi)
    if not plus.is_empty:
        bv = eval_field(b, v, wout)
        for q, u in bv.coeffs.items():
            for p, w in eval_field(a, u, plus).coeffs.items():
                _acc2(out, (p, q), w)
    minus = Window(zout.lo, min(-1, zout.hi))
    if not minus.is_empty:
        av = eval_field(a, v, minus)
        for p, u in av.coeffs.items():
            for q, w in eval_field(b, u, wout).coeffs.items():
                _acc2(out, (p, q), w.scale(sig))
    return BiDist(out, zout, wout)


def contraction(a: FieldExpr, b: FieldExpr, v: FockVector, zout: Window, wout: Window) -> BiDist:
    """a(z)b(w)v - :a(z)b(w):v = [a(z)_-, b(w)] v (graded)."""
    prod = field_product_2var(a, b, v, zout, wout, order="ab")
    return prod - normprod_2var(a, b, v, zout, wout)


def product_jk(a: FieldExpr, j: int, k: int, b: FieldExpr, points: PointSet, orders) -> ProductJK:
    """Constructor for the (j,k)-product; orders are caller-supplied and
    verified during evaluation, never inferred."""
    orders = tuple(orders)
    points.lam(j)
    if len(orders) != len(points):
        raise ValueError("one order per point required")
    return ProductJK(a, j, k, b, points, orders)


def _eval_jk_nonneg(e: ProductJK, v: FockVector, out: Window) -> WindowSeries:
    """Residue formula: c_{j,k}(w)v = Res_z [multiplier * commutator] with the
    locality hypothesis verified on the same data."""
    _need_finite(out)
    mult, r = _jk_multiplier(e)
    if r < 1:
        return WindowSeries.zero(out)  # c_{jk} = 0 for k >= n_j
    S = sum(e.orders)
    zwin = Window(-S, max(S - 1, 0))
    wes = [we for _, we in mult.coeffs]
    wwin = Window(out.lo - max(wes) - S, out.hi - min(wes))
    D = commutator_2var(e.left, e.right, v, zwin, wwin)
    ann = annihilator(e.points, e.orders)
    check = bidist_mul(ann, D)
    if check.zwin.is_empty or check.wwin.is_empty:
        raise WindowError("window too small to certify locality in a (j,k)-product")
    if not check.is_zero():
        raise LocalityError(
            f"fields are not mutually local at orders {e.orders}; "
            "(j,k)-product residue formula does not apply"
        )
    series = bidist_mul(mult, D).residue_z()
    return series.restrict(out)


# ---------------------------------------------------------------------------
# OPE extraction and symbolic identification


@dataclass
class OpeEntry:
    j: int
    k: int
    point: Scalar
    samples: dict  # FockVector -> WindowSeries
    identified: list | None = None  # list of (LaurentPoly, name)

    def field_str(self) -> str:
        if self.identified is None:
            return None
        if not self.identified:
            return "0"
        return " + ".join(f"{laurent_str(c)} * {name}" for c, name in self.identified)


@dataclass
class OpeTable:
    points: PointSet
    orders: tuple
    entries: dict  # (j,k) -> OpeEntry
    vectors: list

    def entry(self, j: int, k: int) -> OpeEntry | None:
        return self.entries.get((j, k))

    def to_json(self) -> dict:
        ents = []
        for (j, k), ent in sorted(self.entries.items()):
            ents.append(
                {
                    "point": scalar_str(ent.point),
                    "j": j,
                    "k": k,
                    "field": ent.field_str(),
                }
            )
        return {
            "order": self.points.order,
            "orders": list(self.orders),
            "entries": ents,
        }


def ope_extract(
    a: FieldExpr,
    b: FieldExpr,
    points: PointSet,
    orders,
    cutoff,
    wout: Window = Window(-8, 8),
    registry=None,
) -> OpeTable:
    """Extract the singular OPE coefficients c_{jk}(w) of a(z)b(w) as sampled
    fields on a basis, identifying them symbolically against the registry
    (identity plus any supplied named fields) times a uniform w-shift."""
    orders = tuple(orders)
    spec = field_spec(a) or field_spec(b)
    vs = basis(spec, cutoff)
    S = sum(orders)
    mults = {}
    for j in range(1, len(points) + 1):
        for k in range(orders[j - 1]):
            mult, _ = _jk_multiplier(
                ProductJK(a, j, k, b, points, orders)
            )
            mults[(j, k)] = mult
    all_wes = [we for m in mults.values() for _, we in m.coeffs] or [0]
    zwin = Window(-S, max(S - 1, 0))
    wwin = Window(wout.lo - max(all_wes) - S, wout.hi - min(all_wes))
    entries: dict[tuple[int, int], OpeEntry] = {}
    ann = annihilator(points, orders)
    for v in vs:
        D = commutator_2var(a, b, v, zwin, wwin)
        check = bidist_mul(ann, D)
        if not check.is_zero():
            raise LocalityError(f"not mutually local at orders {orders}")
        for (j, k), mult in mults.items():
            series = bidist_mul(mult, D).residue_z().restrict(wout)
            if series.is_zero() and (j, k) not in entries:
                continue
            ent = entries.setdefault(
                (j, k), OpeEntry(j, k, points.lam(j), {})
            )
            ent.samples[v] = series
    # fill in zero samples for vectors that never contributed
    for ent in entries.values():
        for v in vs:
            if v not in ent.samples:
                ent.samples[v] = WindowSeries.zero(wout)
        ent.identified = identify_samples(ent.samples, registry or [("Id", IDENT)])
    return OpeTable(points, orders, entries, vs)


def _gauss_solve(rows: list, rhs: list):
    """Exact Gaussian elimination; returns any solution of rows*x = rhs or
    None if inconsistent (free variables are set to zero)."""
    m = [list(r) + [c] for r, c in zip(rows, rhs)]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    rix = 0
    for col in range(ncols):
        piv = None
        for i in range(rix, len(m)):
            if not val_is_zero(m[i][col]):
                piv = i
                break
        if piv is None:
            continue
        m[rix], m[piv] = m[piv], m[rix]
        inv = m[rix][col]
        m[rix] = [x / inv for x in m[rix]]
        for i in range(len(m)):
            if i != rix and not val_is_zero(m[i][col]):
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[rix])]
        pivots.append(col)
        rix += 1
        if rix == len(m):
            break
    for i in range(rix, len(m)):
        if not val_is_zero(m[i][-1]):
            return None
    x = [Fraction(0)] * ncols
    for i, col in enumerate(pivots):
        x[col] = m[i][-1]
    return x


def identify_samples(samples: dict, registry, shift_range=range(-8, 9)):
    """Match sampled series v -> S_v against sum_r alpha_r w^s g_r(w) with a
    single uniform shift s; returns [(LaurentPoly, name)] or None.

    The fit is verified exactly on every sampled coefficient before being
    accepted; an inconsistent system simply moves on to the next shift.
    """
    if all(s.is_zero() for s in samples.values()):
        return []
    names = [name for name, _ in registry]
    exprs = [g for _, g in registry]
    for s in sorted(shift_range, key=lambda t: (abs(t), t)):
        rows, rhs = [], []
        feasible = True
        for v, S in samples.items():
            win = S.window
            if win.lo is None or win.hi is None:
                feasible = False
                break
            gs = []
            for g in exprs:
                try:
                    gs.append(eval_field(g, v, Window(win.lo - s, win.hi - s)))
                except WindowError:
                    feasible = False
                    break
            if not feasible:
                break
            words = set()
            for e in win:
                val = S.coeffs.get(e)
                if val is not None:
                    words.update(val.terms)
                for gseries in gs:
                    gval = gseries.coeffs.get(e - s)
                    if gval is not None:
                        words.update(gval.terms)
                for word in words:
                    row = []
                    for gseries in gs:
                        gval = gseries.coeffs.get(e - s)
                        row.append(gval.terms.get(word, Fraction(0)) if gval is not None else Fraction(0))
                    sval = S.coeffs.get(e)
                    rows.append(row)
                    rhs.append(sval.terms.get(word, Fraction(0)) if sval is not None else Fraction(0))
                words.clear()
        if not feasible or not rows:
            continue
        sol = _gauss_solve(rows, rhs)
        if sol is None:
            continue
        # exact residual check over every equation
        ok = all(
            val_is_zero(sum((c * x for c, x in zip(row, sol)), Fraction(0)) - r)
            for row, r in zip(rows, rhs)
        )
        if ok:
            return [
                (LaurentPoly({s: c}), name)
                for c, name in zip(sol, names)
                if not val_is_zero(c)
            ]
    return None


def singular_part(table: OpeTable, v: FockVector, zwin: Window, wwin: Window) -> BiDist:
    """i_{z,w} sum_{j,k} c_{jk}(w)v / (z - lam_j w)^{k+1} from the sampled
    table; each expansion is supported on the line ze + we = -k-1."""
    out: dict[tuple[int, int], object] = {}
    owin_w = wwin
    for (j, k), ent in table.entries.items():
        S = ent.samples[v]
        lam = table.points.lam(j)
        rs = []
        for ze in range(zwin.lo, min(zwin.hi, -k - 1) + 1):
            r = -k - 1 - ze
            rs.append(r)
            gam = Fraction(binom(k + r, r)) * scalar_pow(lam, r)
            for e, u in S.coeffs.items():
                we = e + r
                if wwin.contains(we):
                    _acc2(out, (ze, we), u.scale(gam))
        if rs:
            owin_w = owin_w.intersect(Window(
                None if S.window.lo is None else S.window.lo + min(rs),
                None if S.window.hi is None else S.window.hi + max(rs),
            ))
    return BiDist(out, zwin, owin_w.intersect(wwin))


def delta_reconstruction(table: OpeTable, v: FockVector, zwin: Window, wwin: Window) -> BiDist:
    """sum_{j,k} c_{jk}(w)v d^{(k)}delta(z - lam_j w): the graded commutator
    a table encodes; each delta term lives on the line ze + we = -k-1."""
    out: dict[tuple[int, int], object] = {}
    owin_w = wwin
    for (j, k), ent in table.entries.items():
        S = ent.samples[v]
        lam = table.points.lam(j)
        rs = []
        for ze in range(zwin.lo, zwin.hi + 1):
            r = -k - 1 - ze  # w-shift of the coefficient function
            rs.append(r)
            gam = Fraction((-1) ** k) * Fraction(binom(ze + k, k)) * scalar_pow(lam, -ze - 1 - k)
            if val_is_zero(gam):
                continue
            for e, u in S.coeffs.items():
                we = e + r
                if wwin.contains(we):
                    _acc2(out, (ze, we), u.scale(gam))
        if rs:
            # safe output w-window: every z-column in zwin must find its
            # coefficient sample inside the sampled window, so the binding
            # shifts are the extreme ones
            owin_w = owin_w.intersect(Window(
                None if S.window.lo is None else S.window.lo + max(rs),
                None if S.window.hi is None else S.window.hi + min(rs),
            ))
    return BiDist(out, zwin, owin_w.intersect(wwin))


def locality_check(a: FieldExpr, b: FieldExpr, points: PointSet, orders, cutoff) -> tuple[bool, str]:
    """Is prod (z - lam_i w)^{n_i} [a(z), b(w)]_graded = 0 on every basis
    vector up to the cutoff, on certified windows?"""
    orders = tuple(orders)
    spec = field_spec(a) or field_spec(b)
    if spec is None:
        return True, "pure scalar fields commute"
    S = sum(orders)
    zwin = Window(-S - 1, S + 1)
    wwin = Window(-S - 4, S + 4)
    ann = annihilator(points, orders)
    for v in basis(spec, cutoff):
        D = commutator_2var(a, b, v, zwin, wwin)
        prod = bidist_mul(ann, D)
        if prod.zwin.is_empty or prod.wwin.is_empty:
            raise WindowError("window too small for locality certification")
        if not prod.is_zero():
            return False, f"residual on {v}"
    return True, f"annihilated at orders {orders} on cutoff-{cutoff} basis"


# ---------------------------------------------------------------------------
# Taylor expansion identity for normal ordered products


def taylor_normprod_check(
    a: FieldExpr, b: FieldExpr, lam: Scalar, z0_order: int, zwin: Window, vectors
) -> tuple[bool, str]:
    """Check i_{z,z0} :a(lam z + z0) b(z): = sum_k :(d^(k)a)(lam z) b(z): z0^k
    coefficientwise on (zwin) x (z0 powers 0..z0_order) for each vector.

    The left side is computed from raw mode sums of the two-variable split,
    the right side through the generic evaluator — two independent routes.
    """
    _need_finite(zwin)
    sig = _sigma(a, b)
    K = z0_order
    for v in vectors:
        lhs: dict[tuple[int, int], object] = {}
        lb_b = lower_bound(b, v)
        if lb_b is not None:
            bv = eval_field(b, v, Window(lb_b, zwin.hi + 0))
            for q, u in bv.coeffs.items():
                # n >= max(k, 0); M = n + q - k in zwin
                au = eval_field(a, u, Window(0, zwin.hi - q + K))
                for n, w in au.coeffs.items():
                    for k in range(0, min(n, K) + 1):
                        M = n + q - k
                        if zwin.contains(M):
                            _acc2(lhs, (M, k), w.scale(Fraction(binom(n, k)) * scalar_pow(lam, n - k)))
        lb_a = lower_bound(a, v)
        if lb_a is not None and lb_a <= -1:
            av = eval_field(a, v, Window(lb_a, -1))
            for n, u in av.coeffs.items():
                bu = eval_field(b, u, Window(zwin.lo - n, zwin.hi - n + K))
                for q, w in bu.coeffs.items():
                    for k in range(0, K + 1):
                        M = n + q - k
                        if zwin.contains(M):
                            _acc2(lhs, (M, k), w.scale(sig * Fraction(binom(n, k)) * scalar_pow(lam, n - k)))
        for k in range(0, K + 1):
            left_k = Derivative(a, k) if k else a
            rhs_expr = NormProd2(_dilate_by(left_k, lam), b)
            rhs = eval_field(rhs_expr, v, zwin)
            for M in zwin:
                got = lhs.get((M, k), Fraction(0))
                want = rhs.coeffs.get(M, Fraction(0))
                if not val_is_zero(got - want):
                    return False, f"mismatch at z^{M} z0^{k} on {v}"
    return True, f"verified to z0 order {z0_order} on {len(list(vectors))} vectors"


def _dilate_by(e: FieldExpr, lam: Scalar) -> FieldExpr:
    """Dilate by an explicit root of unity value."""
    for order in (1, 2, 3, 4, 6, 8, 12):
        for k in range(order):
            if val_is_zero(root_power(order, k) - lam):
                if order == 1 or k == 0:
                    return e
                return Dilate(e, k, order)
    raise ValueError(f"dilation value {scalar_str(lam)} is not a supported root of unity")


# ---------------------------------------------------------------------------
# Comparison products (residue recipe with an explicit clearing polynomial)


def li_product(
    a: FieldExpr,
    alpha: Scalar,
    k: int,
    b: FieldExpr,
    points: PointSet,
    orders,
    v: FockVector,
    xwin: Window,
) -> WindowSeries:
    """a(x)_{ov(alpha,k)} b(x) applied to v:  the x0^{-k-1} coefficient of
    iota_{x,x0}[f(alpha x + x0, x)^{-1}] * (f * a(x1)b(x))|_{x1 = alpha x + x0}
    where f(x1,x) = prod_i (x1 - lam_i x)^{n_i} is the clearing polynomial.

    The expansion factor is homogeneous of degree -sum(n_i), so the final
    contraction runs over a finite diagonal.
    """
    _need_finite(xwin)
    orders = tuple(orders)
    Stot = sum(orders)
    n_alpha = 0
    for i in range(1, len(points) + 1):
        if val_is_zero(points.lam(i) - alpha):
            n_alpha = orders[i - 1]
    R = -k - 1 + n_alpha  # highest x0-power of S that contributes
    if R < 0:
        return WindowSeries.zero(xwin)

    # clearing-polynomial sanity: f must kill the graded commutator
    S_ = Stot
    Dz = Window(-S_ - 1, S_ + 1)
    Dw = Window(-S_ - 3, S_ + 3)
    D = commutator_2var(a, b, v, Dz, Dw)
    fpoly = annihilator(points, orders)
    if not bidist_mul(fpoly, D).is_zero():
        raise LocalityError("clearing polynomial insufficient: residual poles remain")

    # expansion coefficients c_K of iota_{x,x0} f(alpha x + x0, x)^{-1} along
    # the line (x0^K, x^{-Stot-K}); K >= -n_alpha
    conv = {0: Fraction(1)}
    for i in range(1, len(points) + 1):
        lam_i = points.lam(i)
        if val_is_zero(lam_i - alpha):
            continue
        ni = orders[i - 1]
        mu = lam_i - alpha  # factor x0 - mu*x
        fac = {
            r: Fraction((-1) ** ni) * Fraction(binom(ni - 1 + r, r)) * scalar_pow(mu, -ni - r)
            for r in range(R + 1)
        }
        nxt: dict[int, object] = {}
        for r1, c1 in conv.items():
            for r2, c2 in fac.items():
                if r1 + r2 <= R:
                    nxt[r1 + r2] = nxt.get(r1 + r2, Fraction(0)) + c1 * c2
        conv = nxt
    cK = {r - n_alpha: c for r, c in conv.items()}  # K = r - n_alpha

    # The substituted x-exponent is X = n + m + k + 1 - Stot independently of
    # the x0-split, so only the diagonals n + m = X - k - 1 + Stot contribute.
    # G = f * a(x1)b(x) v vanishes for n < lower_bound(a, v) (swap the order
    # under f) and for m < lower_bound(b, v) (apply b first), so each
    # contributing diagonal is a priori finite.
    lb_a = lower_bound(a, v)
    lb_b = lower_bound(b, v)
    if lb_a is None or lb_b is None:
        return WindowSeries.zero(xwin)
    T_hi = xwin.hi - k - 1 + Stot
    n_hi = T_hi - lb_b
    m_hi = T_hi - lb_a
    if n_hi < lb_a or m_hi < lb_b:
        return WindowSeries.zero(xwin)
    sigma = _sigma(a, b)
    # b-after-a order has an honest floor in the x1 variable; pad by the
    # clearing degree so the product certificate still covers
    # [lb_a, n_hi] x [lb_b, m_hi] after bidist_mul shrinks the windows
    P = field_product_2var(
        a, b, v, Window(lb_a - Stot, n_hi), Window(lb_b - Stot, m_hi), order="ba"
    )
    G = bidist_mul(fpoly, P)

    # substitute x1 = alpha x + x0 and contract against the expansion line
    out: dict[int, object] = {}
    for (n, m), u in G.coeffs.items():
        if n < lb_a or m < lb_b:
            continue
        for rp in range(0, R + 1):  # x0-exponent of S
            bc = binom(n, rp)
            if not bc:
                continue
            K = -k - 1 - rp
            if K not in cK:
                continue
            X = n + m - rp - Stot - K
            if xwin.contains(X):
                c = cK[K] * Fraction(sigma * bc) * scalar_pow(alpha, n - rp)
                _acc2(out, X, u.scale(c))
    return WindowSeries(out, xwin)


# ---------------------------------------------------------------------------
# Standard fields


def h_field_b() -> FieldExpr:
    """quarter(:phiB(z) phiB(-z): - 1)."""
    return LinComb((
        (Fraction(1, 4), NormProd2(PHI_B, Dilate(PHI_B, 1, 2))),
        (Fraction(-1, 4), IDENT),
    ))


def h_field_c() -> FieldExpr:
    """half(:phiC(z) phiC(-z): - 1)."""
    return LinComb((
        (Fraction(1, 2), NormProd2(PHI_C, Dilate(PHI_C, 1, 2))),
        (Fraction(-1, 2), IDENT),
    ))


def h_field_d() -> FieldExpr:
    """half :phiD(z) phiD(-z):."""
    return LinComb(((Fraction(1, 2), NormProd2(PHI_D, Dilate(PHI_D, 1, 2))),))


def h_field_d_order(N: int) -> FieldExpr:
    """Order-N Heisenberg field (1/(N tau_N)) sum_i eps^{i+1}
    :phiD(eps^{i-1} z) phiD(eps^i z): with tau_N^2 equal to the bracket
    coefficient of the unnormalized sum, so that [h_m, h_n] = m delta_{m+n,0}.

    tau_2 = 2 (the field then coincides with the two-point h^D exactly) and
    tau_3 = 1 + 2 eps_3 = sqrt(-3); for other N the constant is sqrt(+-N)
    times a phase, which need not lie in Q(eps_N), so only N in {2, 3} are
    provided.
    """
    if N == 2:
        tau = Fraction(2)
    elif N == 3:
        tau = 1 + 2 * root_power(3, 1)
    else:
        raise ValueError("order-N Heisenberg normalization is provided for N in {2, 3}")
    pref = scalar_inv(tau) * Fraction(1, N)
    terms = []
    for i in range(N):
        coeff = root_power(N, (i + 1) % N) * pref
        left = Dilate(PHI_D, (i - 1) % N, N)
        right = Dilate(PHI_D, i % N, N)
        terms.append((coeff, NormProd2(left, right)))
    return LinComb(tuple(terms))


def standard_field(name: str, N: int | None = None) -> FieldExpr:
    table = {
        "phiB": lambda: PHI_B,
        "phiC": lambda: PHI_C,
        "phiD": lambda: PHI_D,
        "hB": h_field_b,
        "hC": h_field_c,
        "hD": h_field_d,
    }
    if name in table:
        return table[name]()
    if name == "hD_N":
        if not N:
            raise ValueError("hD_N requires an order N")
        return h_field_d_order(N)
    raise ValueError(f"unknown field {name!r}")


# ---------------------------------------------------------------------------
# JSON AST


def field_to_json(e: FieldExpr) -> dict:
    if isinstance(e, GeneratorField):
        return {"op": "gen", "spec": e.spec.name, "mul": e.mul, "off": str(e.off)}
    if isinstance(e, IdentityField):
        return {"op": "id"}
    if isinstance(e, ScalarField):
        return {"op": "scalar", "poly": laurent_str(e.poly, "z")}
    if isinstance(e, Derivative):
        return {"op": "d", "l": e.l, "child": field_to_json(e.child)}
    if isinstance(e, Dilate):
        return {"op": "dilate", "k": e.k, "order": e.order, "child": field_to_json(e.child)}
    if isinstance(e, NormProd2):
        return {"op": "normprod", "left": field_to_json(e.left), "right": field_to_json(e.right)}
    if isinstance(e, ProductJK):
        return {
            "op": "prodjk",
            "jk": [e.j, e.k],
            "left": field_to_json(e.left),
            "right": field_to_json(e.right),
            "order": e.points.order,
            "orders": list(e.orders),
        }
    if isinstance(e, LinComb):
        terms = []
        for c, ch in e.terms:
            cs = laurent_str(c, "z") if isinstance(c, LaurentPoly) else scalar_str(c)
            terms.append({"coeff": cs, "child": field_to_json(ch)})
        return {"op": "lincomb", "terms": terms}
    raise TypeError(f"unknown field expression {e!r}")


def field_from_json(d: dict, order: int = 1) -> FieldExpr:
    op = d["op"]
    if op == "gen":
        return GeneratorField(SPECS[d["spec"]], d["mul"], Fraction(d["off"]))
    if op == "id":
        return IDENT
    if op == "scalar":
        return ScalarField(laurent_from_str(d["poly"], order, "z"))
    if op == "d":
        return Derivative(field_from_json(d["child"], order), d["l"])
    if op == "dilate":
        return Dilate(field_from_json(d["child"], order), d["k"], d["order"])
    if op == "normprod":
        return NormProd2(field_from_json(d["left"], order), field_from_json(d["right"], order))
    if op == "prodjk":
        j, k = d["jk"]
        pts = PointSet.roots_of_unity(d["order"])
        return ProductJK(
            field_from_json(d["left"], order), j, k,
            field_from_json(d["right"], order), pts, tuple(d["orders"]),
        )
    if op == "lincomb":
        terms = []
        for t in d["terms"]:
            c = laurent_from_str(t["coeff"], order, "z")
            if list(c.coeffs) == [0]:
                terms.append((c.get(0), field_from_json(t["child"], order)))
            else:
                terms.append((c, field_from_json(t["child"], order)))
        return LinComb(tuple(terms))
    raise ValueError(f"unknown op {op!r}")
