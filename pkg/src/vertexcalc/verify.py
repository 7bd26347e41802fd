"""Verification suites over the quadratic mode-algebra constructions.

Each suite runs a family of exact identities — Heisenberg commutation
relations, representations of the infinite-rank classical matrix algebras,
axiom audits for the order-N twisted structures, locality closure, the
four-variable quadratic commutator expansion, and the comparison-product
values — and returns a Report of independent pass/fail checks.  Everything
is computed on certified windows in exact rational/cyclotomic arithmetic.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction

from .deltacalc import PointSet
from .fields import (
    IDENT,
    PHI_B,
    PHI_C,
    PHI_D,
    Derivative,
    Dilate,
    FieldExpr,
    LinComb,
    NormProd2,
    ScalarField,
    _sigma,
    commutator_2var,
    delta_reconstruction,
    eval_field,
    field_spec,
    h_field_b,
    h_field_c,
    h_field_d,
    h_field_d_order,
    li_product,
    locality_check,
    lower_bound,
    normprod_2var,
    ope_extract,
    parity,
    product_jk,
)
from .fock import SPECS, FockVector, basis
from .scalar import Scalar, scalar_str
from .series import (
    BiDist,
    ExpansionDir,
    LaurentPoly,
    MultiDist,
    Window,
    WindowSeries,
    delta_expansion,
    expand_inverse_power,
)
from .util import val_is_zero


# ---------------------------------------------------------------------------
# Reports


@dataclass
class Check:
    desc: str
    ok: bool
    witness: str = ""


@dataclass
class Report:
    suite: str
    params: dict
    checks: list = field(default_factory=list)

    def add(self, desc: str, ok, witness: str = "") -> None:
        self.checks.append(Check(desc, bool(ok), witness))

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_json(self) -> dict:
        params = {
            k: (str(v) if isinstance(v, Fraction) else v)
            for k, v in sorted(self.params.items())
        }
        return {
            "suite": self.suite,
            "params": params,
            "pass": self.ok,
            "checks": [
                {"desc": c.desc, "pass": c.ok, "witness": c.witness}
                for c in self.checks
            ],
        }

    def text(self) -> str:
        lines = [f"suite {self.suite}: {'PASS' if self.ok else 'FAIL'}"]
        for c in self.checks:
            tail = f"  [{c.witness}]" if c.witness else ""
            lines.append(f"  {'ok  ' if c.ok else 'FAIL'} {c.desc}{tail}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Finitely supported infinite matrices with the standard 2-cocycle


class InfMatrix:
    """sum a_ij E_ij plus a central multiple, finitely many nonzero entries."""

    __slots__ = ("entries", "central")

    def __init__(self, entries=None, central=Fraction(0)):
        d = {}
        for key, c in (entries or {}).items():
            if isinstance(c, int):
                c = Fraction(c)
            if not val_is_zero(c):
                d[key] = c
        object.__setattr__(self, "entries", d)
        object.__setattr__(self, "central", central)

    def __setattr__(self, *a):
        raise AttributeError("InfMatrix is immutable")

    @staticmethod
    def unit(i: int, j: int, c=1) -> "InfMatrix":
        return InfMatrix({(i, j): Fraction(c) if isinstance(c, int) else c})

    def add(self, other: "InfMatrix") -> "InfMatrix":
        d = dict(self.entries)
        for k, c in other.entries.items():
            d[k] = d.get(k, Fraction(0)) + c
        return InfMatrix(d, self.central + other.central)

    def scale(self, c) -> "InfMatrix":
        return InfMatrix(
            {k: c * v for k, v in self.entries.items()}, c * self.central
        )

    def sub(self, other: "InfMatrix") -> "InfMatrix":
        return self.add(other.scale(Fraction(-1)))

    def is_zero(self) -> bool:
        return not self.entries and val_is_zero(self.central)


def _msign(k: int) -> Fraction:
    """(-1)^k as an exact Fraction for any integer k."""
    return Fraction(-1 if k % 2 else 1)


def cocycle(i: int, j: int, k: int, l: int) -> Fraction:
    """alpha(E_ij, E_kl): +1 when (k,l) = (j,i) with i <= 0 < j, -1 for the
    transposed range, 0 otherwise."""
    if (k, l) != (j, i):
        return Fraction(0)
    if i <= 0 and j >= 1:
        return Fraction(1)
    if j <= 0 and i >= 1:
        return Fraction(-1)
    return Fraction(0)


def matrix_bracket(A: InfMatrix, B: InfMatrix, central_weight) -> InfMatrix:
    """[A, B] + central_weight * alpha(A, B) c on finitely supported parts;
    central summands of A and B drop out."""
    out: dict[tuple[int, int], Fraction] = {}
    cen = Fraction(0)
    for (i, j), a in A.entries.items():
        for (k, l), b in B.entries.items():
            c = a * b
            if j == k:
                out[(i, l)] = out.get((i, l), Fraction(0)) + c
            if l == i:
                out[(k, j)] = out.get((k, j), Fraction(0)) - c
            al = cocycle(i, j, k, l)
            if al:
                cen += c * al
    return InfMatrix(out, central_weight * cen)


# ---------------------------------------------------------------------------
# The three flavors of quadratic representations


@dataclass(frozen=True)
class Flavor:
    name: str  # "b", "c", "d"
    spec_key: str  # mode algebra carrying the representation
    central_weight: Fraction  # cocycle multiple in the abstract bracket
    central_image: Scalar  # rho(c), as a multiple of the identity


FLAVORS = {
    "b": Flavor("b", "B", Fraction(1, 2), Fraction(1)),
    "c": Flavor("c", "C", Fraction(1), Fraction(-1, 2)),
    "d": Flavor("d", "D", Fraction(1, 2), Fraction(1)),
}

_FLAVOR_PHI = {"b": PHI_B, "c": PHI_C, "d": PHI_D}


def generator(flavor: Flavor, i: int, j: int) -> InfMatrix:
    """The spanning matrix B_ij of the flavor's twisted-involution algebra."""
    if flavor.name == "b":
        return InfMatrix.unit(i, -j, _msign(j)).add(
            InfMatrix.unit(j, -i, -_msign(i))
        )
    if flavor.name == "c":
        return InfMatrix.unit(i, j, _msign(j)).add(
            InfMatrix.unit(1 - j, 1 - i, -_msign(i))
        )
    return InfMatrix.unit(i, j).add(InfMatrix.unit(1 - j, 1 - i, -1))


def flavor_symmetric(flavor: Flavor, A: InfMatrix) -> bool:
    """Does A satisfy the defining entry symmetry of the flavor's algebra?"""
    for (i, j), a in A.entries.items():
        if flavor.name == "b":
            want = _msign(i + j - 1) * A.entries.get((-j, -i), Fraction(0))
        elif flavor.name == "c":
            want = _msign(i + j - 1) * A.entries.get((1 - j, 1 - i), Fraction(0))
        else:
            want = -A.entries.get((1 - j, 1 - i), Fraction(0))
        if not val_is_zero(a - want):
            return False
    return True


_REP_CACHE: dict = {}


def rep_generator_apply(flavor: Flavor, i: int, j: int, v: FockVector) -> FockVector:
    """rho(B_ij) v: a single coefficient of the normally ordered pair
    :phi(z)phi(w): acting on v.  The b flavor pairs B_ij with the plain
    mode coefficient (z^i, w^j), subtracts the vacuum constant at (0, 0)
    and halves; c and d pair B_ij with (z^{i-1}, w^{-j}), with an extra
    overall sign for c (the square of the would-be quarter turn)."""
    key = (flavor.name, i, j, v)
    got = _REP_CACHE.get(key)
    if got is not None:
        return got
    phi = _FLAVOR_PHI[flavor.name]
    if flavor.name == "b":
        ze, we = i, j
    else:
        ze, we = i - 1, -j
    G = normprod_2var(phi, phi, v, Window(ze, ze), Window(we, we))
    u = G.get(ze, we)
    if not isinstance(u, FockVector):
        u = FockVector.zero(SPECS[flavor.spec_key])
    if flavor.name == "b":
        if i == 0 and j == 0:
            u = u - v
        u = u.scale(Fraction(1, 2))
    elif flavor.name == "c":
        u = u.scale(Fraction(-1))
    _REP_CACHE[key] = u
    return u


def rep_apply(flavor: Flavor, A: InfMatrix, v: FockVector) -> FockVector:
    """rho(A) v for a flavor-symmetric A: each entry a_ij contributes half a
    generator image (A = 1/2 sum a_ij eps_j B_..), plus the central part."""
    out = FockVector.zero(SPECS[flavor.spec_key])
    half = Fraction(1, 2)
    for (i, j), a in A.entries.items():
        if flavor.name == "b":
            u = rep_generator_apply(flavor, i, -j, v)
            c = half * a * _msign(j)
        elif flavor.name == "c":
            u = rep_generator_apply(flavor, i, j, v)
            c = half * a * _msign(j)
        else:
            u = rep_generator_apply(flavor, i, j, v)
            c = half * a
        out = out + u.scale(c)
    if not val_is_zero(A.central):
        out = out + v.scale(A.central * flavor.central_image)
    return out


def check_representation(
    flavor_name: str, index_range: int = 2, cutoff=Fraction(3)
) -> Report:
    """Bracket identity [rho(x), rho(y)] = rho([x, y]) over all generator
    pairs in the index box, including the cocycle's central terms, together
    with the flavor symmetry of the generating quadratic series."""
    flavor = FLAVORS[flavor_name]
    rep = Report(
        f"rep-{flavor_name}", {"index_range": index_range, "cutoff": cutoff}
    )
    spec = SPECS[flavor.spec_key]
    phi = _FLAVOR_PHI[flavor.name]
    vs = basis(spec, cutoff)

    # entry symmetry of the quadratic generating series
    W = Window(-3, 3)
    sym_ok = True
    for v in vs:
        G = normprod_2var(phi, phi, v, W, W)
        T = G.swap_vars()
        if flavor.name == "b":
            # G(z,w) - E and its swap are antisymmetric mates: G + G^T = 2E
            want = BiDist({(0, 0): v.scale(Fraction(2))}, W, W)
            sym_ok = sym_ok and (G + T - want).is_zero()
        elif flavor.name == "c":
            sym_ok = sym_ok and (G - T).is_zero()
        else:
            sym_ok = sym_ok and (G + T).is_zero()
    label = {"b": "odd about the identity", "c": "even", "d": "odd"}[flavor.name]
    rep.add(f"generating series exchange symmetry ({label})", sym_ok)

    gens = []
    for i in range(-index_range, index_range + 1):
        for j in range(-index_range, index_range + 1):
            m = generator(flavor, i, j)
            if not m.is_zero():
                gens.append(((i, j), m))
    rep.add(
        "abstract generators satisfy the flavor symmetry",
        all(flavor_symmetric(flavor, m) for _, m in gens),
    )

    bad = ""
    pairs = 0
    for xi in range(len(gens)):
        for yi in range(xi + 1, len(gens)):
            (ij, X), (kl, Y) = gens[xi], gens[yi]
            BR = matrix_bracket(X, Y, flavor.central_weight)
            pairs += 1
            for v in vs:
                lhs = rep_apply(flavor, X, rep_apply(flavor, Y, v)) - rep_apply(
                    flavor, Y, rep_apply(flavor, X, v)
                )
                if not (lhs - rep_apply(flavor, BR, v)).is_zero():
                    if not bad:
                        bad = f"pair B{ij}, B{kl} on {v}"
                    break
            if bad:
                break
        if bad:
            break
    rep.add(
        f"bracket identity on {pairs} generator pairs x {len(vs)} vectors",
        not bad,
        bad,
    )

    # a pair with a nonvanishing cocycle, checked with the central term split off
    central_pair = None
    for (ij, X), (kl, Y) in itertools.combinations(gens, 2):
        BR = matrix_bracket(X, Y, flavor.central_weight)
        if not val_is_zero(BR.central):
            central_pair = (ij, X, kl, Y, BR)
            break
    if central_pair is None:
        rep.add("central term appears in some bracket", False, "no cocycle pair")
    else:
        ij, X, kl, Y, BR = central_pair
        flat = InfMatrix(BR.entries)  # matrix part only
        cen_ok = True
        for v in vs:
            lhs = rep_apply(flavor, X, rep_apply(flavor, Y, v)) - rep_apply(
                flavor, Y, rep_apply(flavor, X, v)
            )
            want = rep_apply(flavor, flat, v) + v.scale(
                BR.central * flavor.central_image
            )
            cen_ok = cen_ok and (lhs - want).is_zero()
        rep.add(
            "central term appears in some bracket",
            cen_ok,
            f"[B{ij}, B{kl}]: central {scalar_str(BR.central * flavor.central_image)}",
        )
    return rep


# ---------------------------------------------------------------------------
# Heisenberg subalgebras


def _heis_data(kind: str, N: int | None):
    if kind == "B":
        return h_field_b(), "B", (lambda m: -m), 2, Fraction(1, 2), True
    if kind == "C":
        return h_field_c(), "C", (lambda m: -m - 1), 2, Fraction(-1, 2), True
    if kind == "D":
        return h_field_d(), "D", (lambda m: -2 * m - 1), 2, Fraction(1), False
    return (
        h_field_d_order(N),
        "D",
        (lambda m: -N * m - 1),
        N,
        Fraction(1),
        False,
    )


def heisenberg_check(
    kind: str, mode_range: int = 5, cutoff=Fraction(4), N: int | None = None
) -> Report:
    """[h_m, h_n] = kappa m delta_{m+n,0} on the basis up to the cutoff, plus
    the support lattice of the field and vacuum annihilation/creation."""
    h, spec_key, expo, lat, kappa, odd_only = _heis_data(kind, N)
    params: dict = {"mode_range": mode_range, "cutoff": cutoff}
    if kind == "D_N":
        params["roots"] = N
    rep = Report(
        "heisenberg-dn" if kind == "D_N" else f"heisenberg-{kind.lower()}", params
    )
    spec = SPECS[spec_key]
    vs = basis(spec, cutoff)
    if odd_only:
        ms = [m for m in range(-mode_range, mode_range + 1) if m % 2 == 1]
    else:
        ms = list(range(-mode_range, mode_range + 1))

    mcache: dict = {}

    def mode(m: int, v: FockVector) -> FockVector:
        got = mcache.get((m, v))
        if got is None:
            e = expo(m)
            got = eval_field(h, v, Window(e, e)).coeffs.get(e)
            if got is None:
                got = FockVector.zero(spec)
            mcache[(m, v)] = got
        return got

    # support lattice: the field's exponents all share the residue of the
    # mode exponent map (odd for the integer/odd-mode kinds, even for the
    # symplectic kind, = -1 mod N for the order-N kind)
    residue = expo(1) % lat
    on_lattice = lambda e: e % lat == residue
    R = lat * mode_range + 2
    sup_ok = True
    sup_bad = ""
    for v in vs:
        S = eval_field(h, v, Window(-R, R))
        for e, u in S.coeffs.items():
            if not u.is_zero() and not on_lattice(e):
                sup_ok = False
                if not sup_bad:
                    sup_bad = f"exponent {e}"
    rep.add("field supported on the twisted mode lattice", sup_ok, sup_bad)

    ok = True
    bad = ""
    for ai in range(len(ms)):
        for bi in range(ai, len(ms)):
            m, n = ms[ai], ms[bi]
            for v in vs:
                lhs = mode(m, mode(n, v)) - mode(n, mode(m, v))
                want = v.scale(kappa * m) if m + n == 0 else FockVector.zero(spec)
                if not (lhs - want).is_zero():
                    ok = False
                    if not bad:
                        bad = f"[h_{m}, h_{n}] on {v}"
    rep.add(
        f"[h_m, h_n] = kappa m delta_{{m+n,0}} for |m|,|n| <= {mode_range}",
        ok,
        bad or f"kappa = {kappa}",
    )

    vac = FockVector.vacuum(spec)
    rep.add(
        "positive modes annihilate the vacuum",
        all(mode(m, vac).is_zero() for m in ms if m > 0),
    )
    mneg = -1 if -1 in ms else max(m for m in ms if m < 0)
    rep.add(f"h_{mneg} creates from the vacuum", not mode(mneg, vac).is_zero())

    if kind == "B":
        for c in highest_weight_check(mode_range).checks:
            rep.checks.append(c)
    return rep


def highest_weight_check(mode_range: int = 5) -> Report:
    """The two highest-weight vectors of the integer-mode pair algebra: the
    vacuum and its charged partner are both annihilated by the positive odd
    modes, and the -1 mode acts freely on each."""
    rep = Report("highest-weight", {"mode_range": mode_range})
    spec = SPECS["B"]
    h = h_field_b()
    vac = FockVector.vacuum(spec)
    charged = FockVector.word(spec, (0,))

    def mode(m: int, v: FockVector) -> FockVector:
        e = -m
        got = eval_field(h, v, Window(e, e)).coeffs.get(e)
        return FockVector.zero(spec) if got is None else got

    pos = [m for m in range(1, mode_range + 1) if m % 2 == 1]
    rep.add(
        "both highest-weight vectors are annihilated by positive modes",
        all(mode(m, vac).is_zero() and mode(m, charged).is_zero() for m in pos),
    )
    rep.add(
        "h_{-1} acts freely on both highest-weight vectors",
        not mode(-1, vac).is_zero() and not mode(-1, charged).is_zero(),
    )
    return rep


# ---------------------------------------------------------------------------
# Axiom audit for the order-2 twisted structures


def _find_order(a, b, points, cutoff, max_m) -> int | None:
    for m in range(1, max_m + 1):
        good, _ = locality_check(a, b, points, (m,) * len(points), cutoff)
        if good:
            return m
    return None


def _coeff(S: WindowSeries, e: int, spec) -> FockVector:
    got = S.coeffs.get(e)
    return FockVector.zero(spec) if got is None else got


def tva_axiom_audit(kind: str, cutoff=Fraction(2), max_m: int | None = None) -> Report:
    """Vacuum, creation, transfer, locality (with order search), residue and
    modewise-product reconstruction, uniform shift grading, the iterated
    coefficient identity, and a sampled analytic continuation — for the
    order-2 twisted pair of a single generator and its Heisenberg field."""
    if max_m is None:
        max_m = int(os.environ.get("VERTEXCALC_MAX_M", "6"))
    phi = {"B": PHI_B, "C": PHI_C, "D": PHI_D}[kind]
    h = {"B": h_field_b, "C": h_field_c, "D": h_field_d}[kind]()
    spec = SPECS[kind]
    rep = Report(f"tva-{kind.lower()}", {"cutoff": cutoff, "max_m": max_m})
    vs = basis(spec, cutoff)
    points = PointSet.roots_of_unity(2)
    expected_shift = (lambda k: k + 1) if kind == "B" else (lambda k: 0)
    kn = kind.lower()
    registry = [
        ("Id", IDENT),
        (f"phi{kind}", phi),
        (f"phi{kind}(-z)", Dilate(phi, 1, 2)),
        (f"h{kind}", h),
    ]

    # vacuum: the identity field is the delta at z^0
    ok = True
    for v in vs[:4]:
        S = eval_field(IDENT, v, Window(-3, 3))
        for e, u in S.coeffs.items():
            ok = ok and (u - v).is_zero() if e == 0 else ok and u.is_zero()
        ok = ok and (_coeff(S, 0, spec) - v).is_zero()
    rep.add("identity field acts as the z^0 delta", ok)

    # creation: fields applied to the vacuum are regular, with a recorded state
    vac = FockVector.vacuum(spec)
    ok = True
    created = []
    for name, g in registry[1:]:
        lb = lower_bound(g, vac)
        S = eval_field(g, vac, Window(min(lb if lb is not None else 0, -4), -1))
        if not S.is_zero():
            ok = False
        state = eval_field(g, vac, Window(0, 0)).coeffs.get(0)
        created.append(
            f"{name}|0>: z^0 state {'zero' if state is None or state.is_zero() else 'nonzero'}"
        )
    rep.add("fields create regular states from the vacuum", ok, "; ".join(created))

    # transfer: derivative and dilation nodes match coefficientwise transport
    ok = True
    for v in vs[:3]:
        base = eval_field(phi, v, Window(-5, 5))
        drv = eval_field(Derivative(phi), v, Window(-4, 4))
        dil = eval_field(Dilate(phi, 1, 2), v, Window(-4, 4))
        for e in range(-4, 5):
            want_d = _coeff(base, e + 1, spec).scale(Fraction(e + 1))
            ok = ok and (_coeff(drv, e, spec) - want_d).is_zero()
            want_t = _coeff(base, e, spec).scale(_msign(e))
            ok = ok and (_coeff(dil, e, spec) - want_t).is_zero()
    rep.add("derivative and dilation transfer coefficientwise", ok)

    # locality with uniform order search
    found: dict[tuple[str, str], int | None] = {}
    ok = True
    notes = []
    for (na, a), (nb, b) in itertools.combinations_with_replacement(registry[1:], 2):
        M = _find_order(a, b, points, cutoff, max_m)
        found[(na, nb)] = M
        notes.append(f"({na},{nb}): M={M}")
        ok = ok and M is not None
    rep.add(f"pairwise locality at uniform order <= {max_m}", ok, "; ".join(notes))

    # residue reconstruction, modewise products, and shift uniformity per pair
    wout = Window(-6, 6)
    for na, a, nb, b in (
        (f"phi{kn}", phi, f"phi{kn}", phi),
        (f"phi{kn}", phi, f"h{kn}", h),
        (f"h{kn}", h, f"h{kn}", h),
    ):
        M = found.get((f"phi{kind}", f"phi{kind}")) if a is phi and b is phi else None
        if M is None:
            keya = f"phi{kind}" if a is phi else f"h{kind}"
            keyb = f"phi{kind}" if b is phi else f"h{kind}"
            M = found.get((keya, keyb)) or found.get((keyb, keya))
        if M is None:
            rep.add(f"OPE table ({na},{nb})", False, "no locality order found")
            continue
        orders = (M, M)
        table = ope_extract(a, b, points, orders, cutoff, wout, registry)
        S = sum(orders)
        zwin = Window(-S - 1, S + 1)
        wwin = Window(-S - 4, S + 4)
        rec_ok = True
        for v in vs:
            D = commutator_2var(a, b, v, zwin, wwin)
            Rc = delta_reconstruction(table, v, zwin, wwin)
            rec_ok = rec_ok and (Rc - D).is_zero()
        rep.add(f"delta reconstruction matches the commutator ({na},{nb})", rec_ok)

        prod_ok = True
        for (j, k), ent in sorted(table.entries.items()):
            pj = product_jk(a, j, k, b, points, orders)
            for v in vs:
                got = eval_field(pj, v, wout)
                if not got.eq_on(ent.samples[v], wout):
                    prod_ok = False
        rep.add(f"modewise products match sampled coefficients ({na},{nb})", prod_ok)

        sh_ok = True
        parts = []
        for (j, k), ent in sorted(table.entries.items()):
            if ent.identified is None:
                sh_ok = False
                parts.append(f"({j},{k}): unidentified")
                continue
            ss = {e for poly, _ in ent.identified for e in poly.coeffs}
            parts.append(f"({j},{k}): s={sorted(ss)}")
            if ss != {expected_shift(k)}:
                sh_ok = False
        rep.add(
            f"uniform shift grading ({na},{nb})",
            sh_ok,
            "; ".join(parts) or "empty table",
        )

    # iterated-product coefficient identity on the reflected triple
    ok, note = _triple_coefficient_check(
        phi, phi, phi, points, cutoff, max_m, wout, registry
    )
    rep.add("iterated-product coefficient identity", ok, note)

    # analytic continuation of cleared iterated products
    Mphi = found.get((f"phi{kind}", f"phi{kind}"))
    if Mphi is None:
        rep.add("cleared products continue analytically", False, "no locality order")
    else:
        ok2, note2 = analytic_continuation_sample([phi, phi], 2, Mphi, rad=5)
        ok3, note3 = analytic_continuation_sample([phi, phi, phi], 2, Mphi, rad=7)
        rep.add(
            "cleared products continue analytically (2 and 3 points)",
            ok2 and ok3,
            f"k=2: {note2}; k=3: {note3}",
        )
    return rep


def _triple_coefficient_check(
    a: FieldExpr,
    b: FieldExpr,
    c: FieldExpr,
    points: PointSet,
    cutoff,
    max_m: int,
    wout: Window,
    registry,
) -> tuple[bool, str]:
    """Singular coefficients of a(z) against :b(-w)c(w): assemble from the
    (a,c) and (a,b(-w)) tables:

        coeff_{jk}[a, :b'c:] = sigma_ab :b' (a_{(j,k)}c): + s^{ab'}_{jk} c

    with b' the reflected middle factor and sigma_ab the parity sign
    carried by moving a past b'."""
    spec = field_spec(a)
    vs = basis(spec, cutoff)
    bp = Dilate(b, 1, 2)
    P = NormProd2(bp, c)
    M_L = _find_order(a, P, points, cutoff, max_m)
    M_ac = _find_order(a, c, points, cutoff, max_m)
    M_ab = _find_order(a, bp, points, cutoff, max_m)
    if M_L is None or M_ac is None or M_ab is None:
        return False, f"locality orders L={M_L} ac={M_ac} ab'={M_ab}"
    lhs_table = ope_extract(a, P, points, (M_L, M_L), cutoff, wout, registry)
    ac_orders = (M_ac, M_ac)
    ab_table = ope_extract(a, bp, points, (M_ab, M_ab), cutoff, wout, registry)
    sigma = _sigma(a, b)

    keys = set(lhs_table.entries)
    keys.update((j, k) for j in (1, 2) for k in range(max(M_L, M_ac, M_ab)))
    for (j, k) in sorted(keys):
        ent = lhs_table.entries.get((j, k))
        inner = NormProd2(bp, product_jk(a, j, k, c, points, ac_orders)) if k < M_ac else None
        abent = ab_table.entries.get((j, k))
        spoly = LaurentPoly()
        if abent is not None:
            if abent.identified is None or any(
                name != "Id" for _, name in abent.identified
            ):
                return False, f"(a,b') entry ({j},{k}) is not scalar"
            for poly, _ in abent.identified:
                spoly = spoly + poly
        for v in vs:
            want = WindowSeries.zero(wout)
            if inner is not None:
                want = want + eval_field(inner, v, wout).scale(sigma)
            if not spoly.is_zero():
                cv = eval_field(
                    c,
                    v,
                    Window(wout.lo - spoly.max_exp(), wout.hi - spoly.min_exp()),
                )
                want = want + cv.mul_poly(spoly).restrict(wout)
            got = ent.samples[v] if ent is not None else WindowSeries.zero(wout)
            if not got.eq_on(want, wout):
                return False, f"mismatch at ({j},{k}) on {v}"
    return True, f"L-order {M_L}, assembled from (a,c) at {M_ac} and (a,b') at {M_ab}"


def analytic_continuation_sample(
    fields, N: int, M: int, rad: int = 5
) -> tuple[bool, str]:
    """Clear a1(z1)...ak(zk)|0> by prod_{i<j}(z_i^N - z_j^N)^M and check the
    result is regular in the last variable and exchange-(anti)symmetric in
    adjacent equal factors, on the certified box."""
    k = len(fields)
    spec = next(s for s in (field_spec(f) for f in fields) if s is not None)
    win = Window(-rad, rad)
    prod: dict[tuple, FockVector] = {(): FockVector.vacuum(spec)}
    for f in reversed(fields):
        new: dict[tuple, FockVector] = {}
        for key, u in prod.items():
            S = eval_field(f, u, win)
            for e, w in S.coeffs.items():
                new[(e,) + key] = w
        prod = new
    P = MultiDist(
        k, {key: w for key, w in prod.items() if not w.is_zero()}, (win,) * k
    )
    Q = MultiDist.poly(k, {(0,) * k: Fraction(1)})
    for i in range(k):
        for j in range(i + 1, k):
            ki, kj = [0] * k, [0] * k
            ki[i] = N
            kj[j] = N
            fac = MultiDist.poly(
                k, {tuple(ki): Fraction(1), tuple(kj): Fraction(-1)}
            )
            for _ in range(M):
                Q = Q * fac
    G = Q * P

    last = G.windows[k - 1]
    if last.lo is None or last.lo > -1:
        return False, "no certified negative exponents in the last variable"
    reg = all(key[k - 1] >= 0 for key in G.coeffs)

    sym = True
    for i in range(k - 1):
        if fields[i] is not fields[i + 1]:
            continue
        # the swapped clearing factor contributes (-1)^M on top of the
        # field-exchange parity
        sig = Fraction(-1) if (parity(fields[i]) + M) % 2 else Fraction(1)
        perm = list(range(k))
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        T = G.permute(tuple(perm)).scale(sig)
        wins = [wa.intersect(wb) for wa, wb in zip(G.windows, T.windows)]
        sym = sym and G.eq_on(T, wins)
    return reg and sym, (
        f"regular in z_{k} on {last}, exchange symmetry "
        f"{'holds' if sym else 'fails'}"
    )


# ---------------------------------------------------------------------------
# Four-variable quadratic commutator expansion


def _acc4(out: dict, key, w) -> None:
    got = out.get(key)
    out[key] = w if got is None else got + w


def _wick_identity(kind: str, cutoff, rad: int = 4) -> tuple[bool, str]:
    """[:phi(z1)phi(z2):, :phi(w1)phi(w2):] equals the four single
    contractions (signs (-1)^p on the aligned pairs) plus the scalar double
    contractions, entrywise on the certified box."""
    phi = PHI_C if kind == "C" else PHI_D
    spec = SPECS[kind]
    lam = Fraction(-1) if kind == "C" else Fraction(1)
    win = Window(-rad, rad)
    p = parity(phi)
    sgn_same = Fraction((-1) ** p)
    Kdelta = delta_expansion(lam, 0, win, win)
    KF = expand_inverse_power(lam, 1, ExpansionDir.ZW, win, win)
    KB = expand_inverse_power(lam, 1, ExpansionDir.WZ, win, win)
    vs = basis(spec, cutoff)

    for v in vs:
        NP = normprod_2var(phi, phi, v, win, win)
        lhs: dict = {}
        for (w1, w2), u in NP.coeffs.items():
            Z = normprod_2var(phi, phi, u, win, win)
            for (z1, z2), t in Z.coeffs.items():
                _acc4(lhs, (z1, z2, w1, w2), t)
        for (z1, z2), u in NP.coeffs.items():
            Wd = normprod_2var(phi, phi, u, win, win)
            for (w1, w2), t in Wd.coeffs.items():
                _acc4(lhs, (z1, z2, w1, w2), -t)

        rhs: dict = {}
        for a_pos, b_pos in itertools.product((0, 1), repeat=2):
            s = sgn_same if a_pos == b_pos else Fraction(1)
            for (ke_z, ke_w), kc in Kdelta.coeffs.items():
                c = s * kc
                for (e1, e2), u in NP.coeffs.items():
                    key = [0, 0, 0, 0]
                    key[a_pos] = ke_z
                    key[2 + b_pos] = ke_w
                    key[1 - a_pos] = e1
                    key[3 - b_pos] = e2
                    _acc4(rhs, tuple(key), u.scale(c))

        def add_double(Ka: BiDist, Kb: BiDist, b1: int, t: Fraction) -> None:
            b2 = 1 - b1
            for (x1, y1), c1 in Ka.coeffs.items():
                for (x2, y2), c2 in Kb.coeffs.items():
                    key = [x1, x2, 0, 0]
                    key[2 + b1] = y1
                    key[2 + b2] = y2
                    _acc4(rhs, tuple(key), v.scale(t * c1 * c2))

        if p % 2:
            add_double(Kdelta, KF, 0, Fraction(-1))
            add_double(KF, Kdelta, 1, Fraction(1))
            add_double(KB, Kdelta, 0, Fraction(-1))
            add_double(Kdelta, KB, 1, Fraction(1))
        else:
            for b1 in (0, 1):
                add_double(KF, KF, b1, Fraction(1))
                add_double(KB, KB, b1, Fraction(-1))

        for key in set(lhs) | set(rhs):
            d = lhs.get(key, FockVector.zero(spec)) - rhs.get(
                key, FockVector.zero(spec)
            )
            if not d.is_zero():
                return False, f"mismatch at exponents {key} on {v}"
    return True, f"box radius {rad}, {len(vs)} vectors"


def wick_check(cutoff=Fraction(2)) -> Report:
    """The quadratic-commutator expansion for the two half-integer mode pairs
    (where the exponent split is the creation split), plus a mode-level
    bracket run for the integer-mode pair whose zero mode squares to one."""
    rep = Report("wick", {"cutoff": cutoff})
    for kind in ("C", "D"):
        ok, note = _wick_identity(kind, cutoff)
        rep.add(f"four-variable contraction expansion ({kind})", ok, note)
    sub = check_representation("b", 1, Fraction(2))
    rep.add(
        "mode-level quadratic brackets for the integer pair",
        sub.ok,
        "order-1 index box, cutoff 2",
    )
    return rep


# ---------------------------------------------------------------------------
# Locality closure of modewise products


def dong_closure(cutoff=Fraction(2), max_m: int = 6) -> Report:
    """Pairwise locality of each generator triple, and locality of the
    modewise products of the pair field against every member of the triple."""
    rep = Report("dong-closure", {"cutoff": cutoff, "max_m": max_m})
    points = PointSet.roots_of_unity(2)
    for kind in ("B", "D"):
        phi = PHI_B if kind == "B" else PHI_D
        h = h_field_b() if kind == "B" else h_field_d()
        gens = [
            (f"phi{kind}", phi),
            (f"phi{kind}(-z)", Dilate(phi, 1, 2)),
            (f"h{kind}", h),
        ]
        ok = True
        notes = []
        mphi = None
        for (na, a), (nb, b) in itertools.combinations_with_replacement(gens, 2):
            M = _find_order(a, b, points, cutoff, max_m)
            if na == nb == f"phi{kind}":
                mphi = M
            notes.append(f"({na},{nb}): M={M}")
            ok = ok and M is not None
        rep.add(f"generator triple pairwise local ({kind})", ok, "; ".join(notes))

        if mphi is None:
            rep.add(f"products stay local ({kind})", False, "no base order")
            continue
        okc = True
        notesc = []
        for j, k in ((1, 0), (2, 0), (1, -1), (2, -1)):
            pr = product_jk(phi, j, k, phi, points, (mphi, mphi))
            for gname, g in gens:
                M = _find_order(pr, g, points, cutoff, max_m)
                notesc.append(f"(phi{kind}_({j},{k})phi{kind}, {gname}): M={M}")
                okc = okc and M is not None
        rep.add(f"products stay local ({kind})", okc, "; ".join(notesc))
    return rep


# ---------------------------------------------------------------------------
# Comparison-product values


def li_appendix_check(cutoff=Fraction(3), xwin: Window = Window(-4, 4)) -> Report:
    """Frozen comparison-product values for the integer pair at its
    reflection point and the half-integer Heisenberg pair at both points,
    plus the correspondence with plain modewise products."""
    rep = Report("li-appendix", {"cutoff": cutoff, "window": str(xwin)})

    specB = SPECS["B"]
    ptsB = PointSet(2, (-1,))
    ordB = (1,)
    vsB = basis(specB, cutoff)

    def li_b(alpha, k, v):
        return li_product(PHI_B, alpha, k, PHI_B, ptsB, ordB, v, xwin)

    ok = all(
        li_b(Fraction(1), k, v).is_zero() for k in (-1, 0, 1, 2) for v in vsB
    )
    rep.add("pair at alpha=1: orders k >= -1 vanish", ok)

    expr = LinComb(
        (
            (Fraction(1), ScalarField(LaurentPoly({-1: Fraction(1, 2)}))),
            (Fraction(1), NormProd2(Derivative(PHI_B), PHI_B)),
        )
    )
    ok = all(
        li_b(Fraction(1), -2, v).eq_on(eval_field(expr, v, xwin), xwin) for v in vsB
    )
    rep.add("pair at alpha=1, k=-2: 1/(2x) + :(d phi)phi:", ok)

    cases = [
        ("alpha=-1, k=0: -2x", 0, ScalarField(LaurentPoly({1: Fraction(-2)}))),
        ("alpha=-1, k=1: 0", 1, None),
        ("alpha=-1, k=-1: :phi(-x)phi(x):", -1, NormProd2(Dilate(PHI_B, 1, 2), PHI_B)),
        (
            "alpha=-1, k=-2: :(d phi)(-x)phi(x):",
            -2,
            NormProd2(Dilate(Derivative(PHI_B), 1, 2), PHI_B),
        ),
    ]
    for desc, k, e in cases:
        if e is None:
            ok = all(li_b(Fraction(-1), k, v).is_zero() for v in vsB)
        else:
            ok = all(
                li_b(Fraction(-1), k, v).eq_on(eval_field(e, v, xwin), xwin)
                for v in vsB
            )
        rep.add(f"pair {desc}", ok)

    ok = True
    for k in (-2, -1, 0, 1):
        pj = product_jk(PHI_B, 1, k, PHI_B, ptsB, ordB)
        for v in vsB:
            if not li_b(Fraction(-1), k, v).eq_on(eval_field(pj, v, xwin), xwin):
                ok = False
    rep.add("comparison products at the point match modewise products", ok)

    specD = SPECS["D"]
    ptsD = PointSet(2, (1, -1))
    ordD = (2, 2)
    hd = h_field_d()
    vsD = basis(specD, cutoff)

    def li_d(alpha, k, v):
        return li_product(hd, alpha, k, hd, ptsD, ordD, v, xwin)

    ok = all(
        li_d(Fraction(1), 1, v).eq_on(
            eval_field(ScalarField(LaurentPoly({0: Fraction(1, 4)})), v, xwin), xwin
        )
        for v in vsD
    )
    rep.add("Heisenberg pair at alpha=1, k=1: 1/4", ok)

    ok = all(li_d(Fraction(1), 0, v).is_zero() for v in vsD)
    rep.add("Heisenberg pair at alpha=1, k=0: 0", ok)

    exprd = LinComb(
        (
            (Fraction(1), ScalarField(LaurentPoly({-2: Fraction(-1, 16)}))),
            (Fraction(1), NormProd2(hd, hd)),
        )
    )
    ok = all(
        li_d(Fraction(1), -1, v).eq_on(eval_field(exprd, v, xwin), xwin) for v in vsD
    )
    rep.add("Heisenberg pair at alpha=1, k=-1: -1/(16x^2) + :hh:", ok)

    ok = all(li_d(Fraction(1), k, v).is_zero() for k in (2, 3) for v in vsD)
    rep.add("Heisenberg pair at alpha=1: orders k >= 2 vanish", ok)
    return rep


# ---------------------------------------------------------------------------
# Suite registry


SUITES = (
    "heisenberg-b",
    "heisenberg-c",
    "heisenberg-d",
    "heisenberg-dn",
    "rep-b",
    "rep-c",
    "rep-d",
    "tva-b",
    "tva-c",
    "tva-d",
    "dong-closure",
    "wick",
    "li-appendix",
)


def run_suite(
    name: str,
    roots: int | None = None,
    cutoff: Fraction | None = None,
    mode_range: int | None = None,
    max_m: int | None = None,
) -> Report:
    """Dispatch a named verification suite with optional overrides."""
    if name == "heisenberg-dn":
        return heisenberg_check(
            "D_N",
            2 if mode_range is None else mode_range,
            Fraction(4) if cutoff is None else cutoff,
            N=3 if roots is None else roots,
        )
    if name.startswith("heisenberg-"):
        kind = name.split("-", 1)[1].upper()
        if kind not in ("B", "C", "D"):
            raise ValueError(f"unknown suite {name!r}")
        return heisenberg_check(
            kind,
            5 if mode_range is None else mode_range,
            Fraction(4) if cutoff is None else cutoff,
        )
    if name.startswith("rep-"):
        flavor = name[4:]
        if flavor not in FLAVORS:
            raise ValueError(f"unknown suite {name!r}")
        return check_representation(
            flavor,
            2 if mode_range is None else mode_range,
            Fraction(3) if cutoff is None else cutoff,
        )
    if name.startswith("tva-"):
        kind = name[4:].upper()
        if kind not in ("B", "C", "D"):
            raise ValueError(f"unknown suite {name!r}")
        return tva_axiom_audit(
            kind, Fraction(2) if cutoff is None else cutoff, max_m
        )
    if name == "dong-closure":
        return dong_closure(
            Fraction(2) if cutoff is None else cutoff, max_m or 6
        )
    if name == "wick":
        return wick_check(Fraction(2) if cutoff is None else cutoff)
    if name == "li-appendix":
        return li_appendix_check(Fraction(3) if cutoff is None else cutoff)
    raise ValueError(f"unknown suite {name!r}")
