"""Windowed formal Laurent series in one and two variables.

A formal distribution generally has infinite support, so it is stored on a
finite *window* of exponents together with a certificate: every stored-or-zero
coefficient inside the window is exact.  Polynomials (finite support, exact
everywhere) are the same containers with unbounded windows.  All arithmetic
computes the largest output window it can certify from the input windows; a
coefficient request outside the certified window raises WindowError instead
of silently returning a wrong zero.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .scalar import Scalar, scalar_pow, scalar_str
from .util import binom, val_is_zero


class WindowError(Exception):
    """A coefficient outside the certified window was requested, or an
    operation cannot certify any window for its result."""


def _wadd(a: int | None, b: int | None) -> int | None:
    """None-propagating addition of window bounds (None = unbounded)."""
    if a is None or b is None:
        return None
    return a + b


@dataclass(frozen=True)
class Window:
    """Closed exponent interval [lo, hi]; a None endpoint is unbounded."""

    lo: int | None
    hi: int | None

    @staticmethod
    def all() -> "Window":
        return Window(None, None)

    @property
    def is_all(self) -> bool:
        return self.lo is None and self.hi is None

    @property
    def is_empty(self) -> bool:
        return self.lo is not None and self.hi is not None and self.lo > self.hi

    def contains(self, e: int) -> bool:
        if self.lo is not None and e < self.lo:
            return False
        if self.hi is not None and e > self.hi:
            return False
        return True

    def covers(self, other: "Window") -> bool:
        """Does self contain other as a set?"""
        if other.is_empty:
            return True
        if self.lo is not None and (other.lo is None or other.lo < self.lo):
            return False
        if self.hi is not None and (other.hi is None or other.hi > self.hi):
            return False
        return True

    def intersect(self, other: "Window") -> "Window":
        lo = self.lo if other.lo is None else (other.lo if self.lo is None else max(self.lo, other.lo))
        hi = self.hi if other.hi is None else (other.hi if self.hi is None else min(self.hi, other.hi))
        return Window(lo, hi)

    def shift(self, d: int) -> "Window":
        return Window(_wadd(self.lo, d), _wadd(self.hi, d))

    def __iter__(self):
        if self.lo is None or self.hi is None:
            raise WindowError("cannot iterate over an unbounded window")
        return iter(range(self.lo, self.hi + 1))

    def __str__(self) -> str:
        fmt = lambda b, s: s if b is None else str(b)
        return f"[{fmt(self.lo, '-inf')},{fmt(self.hi, '+inf')}]"


def parse_window(text: str) -> Window:
    """Parse "lo:hi" with "*" for an unbounded endpoint."""
    lo_s, _, hi_s = text.partition(":")
    if not _:
        raise ValueError(f"bad window {text!r}, expected lo:hi")
    lo = None if lo_s.strip() == "*" else int(lo_s)
    hi = None if hi_s.strip() == "*" else int(hi_s)
    return Window(lo, hi)


# ---------------------------------------------------------------------------
# One-variable Laurent polynomials (finite support, exact everywhere)


class LaurentPoly:
    """Finite-support Laurent polynomial in one variable, scalar coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict[int, Scalar] | None = None):
        clean = {}
        for e, c in (coeffs or {}).items():
            if isinstance(c, int):
                c = Fraction(c)
            if not val_is_zero(c):
                clean[e] = c
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, *a):
        raise AttributeError("LaurentPoly is immutable")

    @staticmethod
    def zero() -> "LaurentPoly":
        return LaurentPoly({})

    @staticmethod
    def one() -> "LaurentPoly":
        return LaurentPoly({0: Fraction(1)})

    @staticmethod
    def x(e: int = 1, c: Scalar = Fraction(1)) -> "LaurentPoly":
        return LaurentPoly({e: c})

    def is_zero(self) -> bool:
        return not self.coeffs

    def get(self, e: int) -> Scalar:
        return self.coeffs.get(e, Fraction(0))

    def support(self):
        return sorted(self.coeffs)

    def min_exp(self) -> int:
        return min(self.coeffs)

    def max_exp(self) -> int:
        return max(self.coeffs)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, Fraction(0)) + c
        return LaurentPoly(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            out: dict[int, Scalar] = {}
            for e1, c1 in self.coeffs.items():
                for e2, c2 in other.coeffs.items():
                    e = e1 + e2
                    out[e] = out.get(e, Fraction(0)) + c1 * c2
            return LaurentPoly(out)
        return LaurentPoly({e: c * other for e, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            raise ValueError("negative power of a Laurent polynomial")
        out = LaurentPoly.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, d: int) -> "LaurentPoly":
        """Multiply by x^d."""
        return LaurentPoly({e + d: c for e, c in self.coeffs.items()})

    def dilate(self, lam: Scalar) -> "LaurentPoly":
        """Substitute x -> lam*x."""
        return LaurentPoly({e: c * scalar_pow(lam, e) for e, c in self.coeffs.items()})

    def deriv(self, l: int = 1) -> "LaurentPoly":
        """Divided derivative d^(l) = (1/l!) d^l."""
        return LaurentPoly(
            {e - l: c * binom(e, l) for e, c in self.coeffs.items()}
        )

    def eval_scalar(self, x: Scalar) -> Scalar:
        """Evaluate at an invertible scalar."""
        acc: Scalar = Fraction(0)
        for e, c in self.coeffs.items():
            acc = acc + c * scalar_pow(x, e)
        return acc

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __str__(self) -> str:
        return laurent_str(self, "w")

    __repr__ = __str__


def laurent_str(p: LaurentPoly, var: str = "w") -> str:
    """Canonical string, terms in ascending exponent; cyclotomic coefficients
    that are sums get parenthesized so the result parses back unambiguously."""
    if p.is_zero():
        return "0"
    parts = []
    for e in p.support():
        c = p.coeffs[e]
        cs = scalar_str(c)
        if e == 0:
            term = cs if ("+" not in cs[1:] and "-" not in cs[1:]) else f"({cs})"
        else:
            ve = var if e == 1 else f"{var}^{e}"
            if cs == "1":
                term = ve
            elif cs == "-1":
                term = f"-{ve}"
            elif "+" in cs[1:] or "-" in cs[1:]:
                term = f"({cs})*{ve}"
            else:
                term = f"{cs}*{ve}"
        parts.append(term)
    out = parts[0]
    for term in parts[1:]:
        if term.startswith("-"):
            out += " - " + term[1:]
        else:
            out += " + " + term
    return out


def laurent_from_str(text: str, order: int = 1, var: str = "w") -> LaurentPoly:
    """Inverse of laurent_str."""
    from .scalar import scalar_from_str

    text = text.strip()
    if text == "0":
        return LaurentPoly.zero()
    # Split on top-level +/- (not inside parens, not after * or ^ or e).
    terms = []
    depth = 0
    cur = ""
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and i > 0:
            prev = text[:i].rstrip()
            if prev and prev[-1] not in "*^(+-":
                terms.append(cur)
                cur = ch
                continue
        cur += ch
    terms.append(cur)
    coeffs: dict[int, Scalar] = {}
    for term in terms:
        term = term.replace(" ", "")
        sign = Fraction(1)
        while term and term[0] in "+-":
            if term[0] == "-":
                sign = -sign
            term = term[1:]
        if var in term:
            vi = term.index(var)
            cpart, vpart = term[:vi], term[vi:]
            cpart = cpart.rstrip("*")
            if cpart.startswith("(") and cpart.endswith(")"):
                cpart = cpart[1:-1]
            c = scalar_from_str(cpart, order) if cpart else Fraction(1)
            e = int(vpart[len(var) + 1:]) if vpart.startswith(var + "^") else 1
        else:
            if term.startswith("(") and term.endswith(")"):
                term = term[1:-1]
            c = scalar_from_str(term, order)
            e = 0
        coeffs[e] = coeffs.get(e, Fraction(0)) + sign * c
    return LaurentPoly(coeffs)


# ---------------------------------------------------------------------------
# One-variable windowed series


class WindowSeries:
    """Formal series in one variable, exact on a certified window.

    Coefficient values may be scalars or Fock-space vectors.
    """

    __slots__ = ("coeffs", "window")

    def __init__(self, coeffs: dict[int, object], window: Window):
        clean = {}
        for e, v in coeffs.items():
            if isinstance(v, int):
                v = Fraction(v)
            if window.contains(e) and not val_is_zero(v):
                clean[e] = v
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "window", window)

    def __setattr__(self, *a):
        raise AttributeError("WindowSeries is immutable")

    @staticmethod
    def zero(window: Window) -> "WindowSeries":
        return WindowSeries({}, window)

    def get(self, e: int):
        if not self.window.contains(e):
            raise WindowError(f"exponent {e} outside certified window {self.window}")
        return self.coeffs.get(e, Fraction(0))

    def is_zero(self) -> bool:
        return not self.coeffs

    def support(self):
        return sorted(self.coeffs)

    def restrict(self, window: Window) -> "WindowSeries":
        return WindowSeries(self.coeffs, self.window.intersect(window))

    def __add__(self, other: "WindowSeries") -> "WindowSeries":
        win = self.window.intersect(other.window)
        out = {e: v for e, v in self.coeffs.items() if win.contains(e)}
        for e, v in other.coeffs.items():
            if win.contains(e):
                out[e] = out.get(e, Fraction(0)) + v
        return WindowSeries(out, win)

    def __neg__(self) -> "WindowSeries":
        return WindowSeries({e: -v for e, v in self.coeffs.items()}, self.window)

    def __sub__(self, other: "WindowSeries") -> "WindowSeries":
        return self + (-other)

    def scale(self, c: Scalar) -> "WindowSeries":
        return WindowSeries({e: c * v for e, v in self.coeffs.items()}, self.window)

    def mul_poly(self, p: LaurentPoly) -> "WindowSeries":
        """Product with a Laurent polynomial; the output window is the largest
        one every contributing shifted copy of self certifies."""
        if p.is_zero():
            return WindowSeries.zero(Window.all())
        win = self.window.shift(p.max_exp()).intersect(self.window.shift(p.min_exp()))
        out: dict[int, object] = {}
        for s, c in p.coeffs.items():
            for e, v in self.coeffs.items():
                t = e + s
                if win.contains(t):
                    out[t] = out.get(t, Fraction(0)) + c * v
        return WindowSeries(out, win)

    def eq_on(self, other: "WindowSeries", window: Window) -> bool:
        if not (self.window.covers(window) and other.window.covers(window)):
            raise WindowError("comparison window not certified by both operands")
        for e in set(self.coeffs) | set(other.coeffs):
            if window.contains(e):
                if not val_is_zero(self.coeffs.get(e, Fraction(0)) - other.coeffs.get(e, Fraction(0))):
                    return False
        return True

    def __str__(self) -> str:
        inner = " + ".join(f"({v})*z^{e}" for e, v in sorted(self.coeffs.items())) or "0"
        return f"{inner} on {self.window}"

    __repr__ = __str__


# ---------------------------------------------------------------------------
# Two-variable distributions


class BiDist:
    """Formal distribution in (z, w), exact on a certified window pair.

    A polynomial is a BiDist with unbounded windows; `is_exact` tells the
    multiplication routine which convolution is finite.
    """

    __slots__ = ("coeffs", "zwin", "wwin")

    def __init__(self, coeffs: dict[tuple[int, int], object], zwin: Window, wwin: Window):
        clean = {}
        for (ze, we), v in coeffs.items():
            if isinstance(v, int):
                v = Fraction(v)
            if zwin.contains(ze) and wwin.contains(we) and not val_is_zero(v):
                clean[(ze, we)] = v
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "zwin", zwin)
        object.__setattr__(self, "wwin", wwin)

    def __setattr__(self, *a):
        raise AttributeError("BiDist is immutable")

    @staticmethod
    def zero(zwin: Window = Window.all(), wwin: Window = Window.all()) -> "BiDist":
        return BiDist({}, zwin, wwin)

    @staticmethod
    def poly(coeffs: dict[tuple[int, int], object]) -> "BiDist":
        """Exact finite-support distribution (a Laurent polynomial in z, w)."""
        return BiDist(coeffs, Window.all(), Window.all())

    @staticmethod
    def monomial(ze: int, we: int, c: object = Fraction(1)) -> "BiDist":
        return BiDist.poly({(ze, we): c})

    @property
    def is_exact(self) -> bool:
        return self.zwin.is_all and self.wwin.is_all

    def get(self, ze: int, we: int):
        if not (self.zwin.contains(ze) and self.wwin.contains(we)):
            raise WindowError(
                f"coefficient ({ze},{we}) outside certified window {self.zwin}x{self.wwin}"
            )
        return self.coeffs.get((ze, we), Fraction(0))

    def is_zero(self) -> bool:
        return not self.coeffs

    def support(self):
        return sorted(self.coeffs)

    def restrict(self, zwin: Window, wwin: Window) -> "BiDist":
        return BiDist(self.coeffs, self.zwin.intersect(zwin), self.wwin.intersect(wwin))

    def __add__(self, other: "BiDist") -> "BiDist":
        zwin = self.zwin.intersect(other.zwin)
        wwin = self.wwin.intersect(other.wwin)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return BiDist(out, zwin, wwin)

    def __neg__(self) -> "BiDist":
        return BiDist({k: -v for k, v in self.coeffs.items()}, self.zwin, self.wwin)

    def __sub__(self, other: "BiDist") -> "BiDist":
        return self + (-other)

    def scale(self, c: Scalar) -> "BiDist":
        return BiDist({k: c * v for k, v in self.coeffs.items()}, self.zwin, self.wwin)

    def __mul__(self, other: "BiDist") -> "BiDist":
        return bidist_mul(self, other)

    def dz(self, l: int = 1) -> "BiDist":
        """Divided z-derivative (1/l!) d^l/dz^l."""
        out = {(ze - l, we): binom(ze, l) * v for (ze, we), v in self.coeffs.items()}
        return BiDist(out, self.zwin.shift(-l), self.wwin)

    def dw(self, l: int = 1) -> "BiDist":
        out = {(ze, we - l): binom(we, l) * v for (ze, we), v in self.coeffs.items()}
        return BiDist(out, self.zwin, self.wwin.shift(-l))

    def dilate_z(self, lam: Scalar) -> "BiDist":
        """Substitute z -> lam*z."""
        return BiDist(
            {(ze, we): scalar_pow(lam, ze) * v for (ze, we), v in self.coeffs.items()},
            self.zwin, self.wwin,
        )

    def dilate_w(self, lam: Scalar) -> "BiDist":
        return BiDist(
            {(ze, we): scalar_pow(lam, we) * v for (ze, we), v in self.coeffs.items()},
            self.zwin, self.wwin,
        )

    def shift(self, dz: int, dw: int) -> "BiDist":
        """Multiply by z^dz w^dw."""
        return BiDist(
            {(ze + dz, we + dw): v for (ze, we), v in self.coeffs.items()},
            self.zwin.shift(dz), self.wwin.shift(dw),
        )

    def swap_vars(self) -> "BiDist":
        """Exchange the roles of z and w."""
        return BiDist(
            {(we, ze): v for (ze, we), v in self.coeffs.items()}, self.wwin, self.zwin
        )

    def z_coefficient(self, ze: int) -> WindowSeries:
        """Series in w multiplying z^ze."""
        if not self.zwin.contains(ze):
            raise WindowError(f"z-exponent {ze} outside certified window {self.zwin}")
        return WindowSeries(
            {we: v for (z2, we), v in self.coeffs.items() if z2 == ze}, self.wwin
        )

    def w_coefficient(self, we: int) -> WindowSeries:
        if not self.wwin.contains(we):
            raise WindowError(f"w-exponent {we} outside certified window {self.wwin}")
        return WindowSeries(
            {ze: v for (ze, w2), v in self.coeffs.items() if w2 == we}, self.zwin
        )

    def split_z(self, sign: str) -> "BiDist":
        """Keep only negative ("-") or nonnegative ("+") z-exponents.

        The dropped side is identically zero in the result, so when the input
        window reaches the split point the certificate extends past it."""
        if sign == "-":
            keep = lambda ze: ze < 0
            if self.zwin.hi is None or self.zwin.hi >= -1:
                zwin = Window(self.zwin.lo, None)
            else:
                zwin = self.zwin
        elif sign == "+":
            keep = lambda ze: ze >= 0
            if self.zwin.lo is None or self.zwin.lo <= 0:
                zwin = Window(None, self.zwin.hi)
            else:
                zwin = self.zwin
        else:
            raise ValueError("sign must be '+' or '-'")
        return BiDist(
            {(ze, we): v for (ze, we), v in self.coeffs.items() if keep(ze)}, zwin, self.wwin
        )

    def split_w(self, sign: str) -> "BiDist":
        return self.swap_vars().split_z(sign).swap_vars()

    def residue_z(self) -> WindowSeries:
        """Coefficient of z^-1, a series in w."""
        return self.z_coefficient(-1)

    def eq_on(self, other: "BiDist", zwin: Window, wwin: Window) -> bool:
        for d in (self, other):
            if not (d.zwin.covers(zwin) and d.wwin.covers(wwin)):
                raise WindowError("comparison window not certified by both operands")
        for k in set(self.coeffs) | set(other.coeffs):
            if zwin.contains(k[0]) and wwin.contains(k[1]):
                if not val_is_zero(self.coeffs.get(k, Fraction(0)) - other.coeffs.get(k, Fraction(0))):
                    return False
        return True

    def is_zero_on(self, zwin: Window, wwin: Window) -> bool:
        return self.eq_on(BiDist.zero(), zwin, wwin)

    def __str__(self) -> str:
        inner = " + ".join(
            f"({v})*z^{ze}*w^{we}" for (ze, we), v in sorted(self.coeffs.items())
        ) or "0"
        return f"{inner} on {self.zwin}x{self.wwin}"

    __repr__ = __str__


def split_pm(a: BiDist, var: str, sign: str) -> BiDist:
    """Annihilation/creation split: sign "-" keeps exponents of `var` that are
    negative, "+" keeps the nonnegative ones."""
    if var == "z":
        return a.split_z(sign)
    if var == "w":
        return a.split_w(sign)
    raise ValueError("var must be 'z' or 'w'")


def residue_z(a: BiDist) -> WindowSeries:
    return a.residue_z()


def bidist_mul(a: BiDist, b: BiDist) -> BiDist:
    """Product where at least one factor is exact with finite support.

    The output window is certified: for exact `a`, each stored term of `a`
    shifts `b`'s window, and the intersection of the shifted windows is where
    every contribution is known.
    """
    if a.is_exact:
        exact, dist = a, b
    elif b.is_exact:
        exact, dist = b, a
    else:
        raise WindowError("product needs one exact finite-support factor")
    if not exact.coeffs:
        return BiDist.zero()
    zes = [k[0] for k in exact.coeffs]
    wes = [k[1] for k in exact.coeffs]
    zwin = dist.zwin.shift(max(zes)).intersect(dist.zwin.shift(min(zes)))
    wwin = dist.wwin.shift(max(wes)).intersect(dist.wwin.shift(min(wes)))
    out: dict[tuple[int, int], object] = {}
    for (s, t), c in exact.coeffs.items():
        for (ze, we), v in dist.coeffs.items():
            k = (ze + s, we + t)
            if zwin.contains(k[0]) and wwin.contains(k[1]):
                out[k] = out.get(k, Fraction(0)) + c * v
    return BiDist(out, zwin, wwin)


class ExpansionDir(enum.Enum):
    """Which variable dominates when expanding 1/(z - lam*w)^k."""

    ZW = "zw"  # powers of w/z: exponents of z go to -infinity
    WZ = "wz"  # powers of z/w: exponents of w go to -infinity


def expand_inverse_power(
    lam: Scalar, k: int, direction: ExpansionDir, zwin: Window, wwin: Window
) -> BiDist:
    """Geometric-series expansion of (z - lam*w)^-k on the requested window.

    ZW:  sum_r binom(k-1+r, r) lam^r     z^(-k-r) w^r        (r >= 0)
    WZ:  sum_r (-1)^k binom(k-1+r, r) lam^(-k-r) z^r w^(-k-r)

    Raises WindowError when the requested window is unbounded on the side the
    expansion runs off to.
    """
    if k < 1:
        raise ValueError("pole order must be >= 1")
    if val_is_zero(lam):
        raise ValueError("expansion point must be invertible")
    out: dict[tuple[int, int], object] = {}
    if direction is ExpansionDir.ZW:
        # r bounded above by wwin.hi and by -k - zwin.lo
        tops = [b for b in (wwin.hi, None if zwin.lo is None else -k - zwin.lo) if b is not None]
        if not tops:
            raise WindowError("unbounded window for z,w-expansion")
        r_hi = min(tops)
        bots = [0]
        if wwin.lo is not None:
            bots.append(wwin.lo)
        if zwin.hi is not None:
            bots.append(-k - zwin.hi)
        for r in range(max(bots), r_hi + 1):
            out[(-k - r, r)] = binom(k - 1 + r, r) * scalar_pow(lam, r)
    else:
        tops = [b for b in (zwin.hi, None if wwin.lo is None else -k - wwin.lo) if b is not None]
        if not tops:
            raise WindowError("unbounded window for w,z-expansion")
        r_hi = min(tops)
        bots = [0]
        if zwin.lo is not None:
            bots.append(zwin.lo)
        if wwin.hi is not None:
            bots.append(-k - wwin.hi)
        sgn = Fraction((-1) ** k)
        for r in range(max(bots), r_hi + 1):
            out[(r, -k - r)] = sgn * binom(k - 1 + r, r) * scalar_pow(lam, -k - r)
    return BiDist(out, zwin, wwin)


def delta_expansion(lam: Scalar, l: int, zwin: Window, wwin: Window) -> BiDist:
    """Divided l-th w-derivative of the formal delta at z = lam*w:

        sum_n (-1)^l binom(n+l, l) lam^(-n-1-l) z^n w^(-n-1-l)

    equal to the difference of the two expansions of (z - lam*w)^-(l+1).
    """
    if l < 0:
        raise ValueError("derivative order must be >= 0")
    tops = [b for b in (zwin.hi, None if wwin.lo is None else -wwin.lo - 1 - l) if b is not None]
    bots = [b for b in (zwin.lo, None if wwin.hi is None else -wwin.hi - 1 - l) if b is not None]
    if not tops or not bots:
        raise WindowError("unbounded window for a delta expansion")
    out: dict[tuple[int, int], object] = {}
    sgn = Fraction((-1) ** l)
    for n in range(max(bots), min(tops) + 1):
        out[(n, -n - 1 - l)] = sgn * binom(n + l, l) * scalar_pow(lam, -n - 1 - l)
    return BiDist(out, zwin, wwin)


# ---------------------------------------------------------------------------
# n-variable distributions (used by multi-point identity checks)


class MultiDist:
    """Formal distribution in n variables with per-variable certified windows."""

    __slots__ = ("nvars", "coeffs", "windows")

    def __init__(self, nvars: int, coeffs: dict[tuple[int, ...], object], windows):
        windows = tuple(windows)
        if len(windows) != nvars:
            raise ValueError("one window per variable required")
        clean = {}
        for k, v in coeffs.items():
            if len(k) != nvars:
                raise ValueError("exponent tuple arity mismatch")
            if isinstance(v, int):
                v = Fraction(v)
            if all(w.contains(e) for w, e in zip(windows, k)) and not val_is_zero(v):
                clean[k] = v
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "windows", windows)

    def __setattr__(self, *a):
        raise AttributeError("MultiDist is immutable")

    @staticmethod
    def zero(nvars: int, windows=None) -> "MultiDist":
        if windows is None:
            windows = [Window.all()] * nvars
        return MultiDist(nvars, {}, windows)

    @staticmethod
    def poly(nvars: int, coeffs: dict[tuple[int, ...], object]) -> "MultiDist":
        return MultiDist(nvars, coeffs, [Window.all()] * nvars)

    @property
    def is_exact(self) -> bool:
        return all(w.is_all for w in self.windows)

    def get(self, exps: tuple[int, ...]):
        if not all(w.contains(e) for w, e in zip(self.windows, exps)):
            raise WindowError(f"coefficient {exps} outside certified windows")
        return self.coeffs.get(tuple(exps), Fraction(0))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "MultiDist") -> "MultiDist":
        wins = [a.intersect(b) for a, b in zip(self.windows, other.windows)]
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return MultiDist(self.nvars, out, wins)

    def __neg__(self) -> "MultiDist":
        return MultiDist(self.nvars, {k: -v for k, v in self.coeffs.items()}, self.windows)

    def __sub__(self, other: "MultiDist") -> "MultiDist":
        return self + (-other)

    def scale(self, c: Scalar) -> "MultiDist":
        return MultiDist(self.nvars, {k: c * v for k, v in self.coeffs.items()}, self.windows)

    def __mul__(self, other: "MultiDist") -> "MultiDist":
        if self.is_exact:
            exact, dist = self, other
        elif other.is_exact:
            exact, dist = other, self
        else:
            raise WindowError("product needs one exact finite-support factor")
        if not exact.coeffs:
            return MultiDist.zero(self.nvars)
        wins = []
        for i in range(self.nvars):
            es = [k[i] for k in exact.coeffs]
            wins.append(dist.windows[i].shift(max(es)).intersect(dist.windows[i].shift(min(es))))
        out: dict[tuple[int, ...], object] = {}
        for ks, c in exact.coeffs.items():
            for kd, v in dist.coeffs.items():
                k = tuple(a + b for a, b in zip(ks, kd))
                if all(w.contains(e) for w, e in zip(wins, k)):
                    out[k] = out.get(k, Fraction(0)) + c * v
        return MultiDist(self.nvars, out, wins)

    def restrict(self, windows) -> "MultiDist":
        wins = [a.intersect(b) for a, b in zip(self.windows, windows)]
        return MultiDist(self.nvars, self.coeffs, wins)

    def permute(self, perm: tuple[int, ...]) -> "MultiDist":
        """Relabel variables: new variable i is old variable perm[i]."""
        wins = [self.windows[perm[i]] for i in range(self.nvars)]
        out = {}
        for k, v in self.coeffs.items():
            out[tuple(k[perm[i]] for i in range(self.nvars))] = v
        return MultiDist(self.nvars, out, wins)

    def eq_on(self, other: "MultiDist", windows) -> bool:
        windows = tuple(windows)
        for d in (self, other):
            if not all(a.covers(b) for a, b in zip(d.windows, windows)):
                raise WindowError("comparison window not certified by both operands")
        for k in set(self.coeffs) | set(other.coeffs):
            if all(w.contains(e) for w, e in zip(windows, k)):
                if not val_is_zero(self.coeffs.get(k, Fraction(0)) - other.coeffs.get(k, Fraction(0))):
                    return False
        return True

    def __str__(self) -> str:
        inner = " + ".join(f"({v})*x^{k}" for k, v in sorted(self.coeffs.items())) or "0"
        return f"{inner} on {'x'.join(map(str, self.windows))}"

    __repr__ = __str__


def tensor(a: MultiDist, avars: tuple[int, ...], b: MultiDist, bvars: tuple[int, ...], nvars: int) -> "MultiDist":
    """Tensor product placing a's variables at positions avars and b's at
    bvars; the two position sets must be disjoint and cover range(nvars)."""
    if set(avars) & set(bvars):
        raise ValueError("variable sets overlap")
    if set(avars) | set(bvars) != set(range(nvars)):
        raise ValueError("variable sets must cover all positions")
    wins = [None] * nvars
    for i, p in enumerate(avars):
        wins[p] = a.windows[i]
    for i, p in enumerate(bvars):
        wins[p] = b.windows[i]
    out: dict[tuple[int, ...], object] = {}
    for ka, va in a.coeffs.items():
        for kb, vb in b.coeffs.items():
            k = [0] * nvars
            for i, p in enumerate(avars):
                k[p] = ka[i]
            for i, p in enumerate(bvars):
                k[p] = kb[i]
            out[tuple(k)] = va * vb
    return MultiDist(nvars, out, wins)


def bidist_to_multi(a: BiDist, zpos: int, wpos: int, nvars: int) -> MultiDist:
    """Embed a two-variable distribution into n variables: the remaining
    variables do not occur, i.e. carry exponent 0 exactly."""
    wins = [Window.all()] * nvars
    wins[zpos] = a.zwin
    wins[wpos] = a.wwin
    out = {}
    for (ze, we), v in a.coeffs.items():
        k = [0] * nvars
        k[zpos] = ze
        k[wpos] = we
        out[tuple(k)] = v
    return MultiDist(nvars, out, wins)
