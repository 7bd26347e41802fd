"""Exact scalars: arbitrary-precision rationals and the cyclotomic fields Q(e_N).

A scalar is either a ``fractions.Fraction`` (orders 1 and 2 degenerate to plain
rationals, which dominate the test workload) or a :class:`CycScalar`, an element
of Q(e_N) stored as a polynomial in the primitive root e of degree < phi(N),
reduced modulo the N-th cyclotomic polynomial Phi_N.  Reduction modulo Phi_N
(rather than x^N - 1) keeps the arithmetic a field, so every nonzero element is
invertible.

Scalars carry their order: arithmetic between CycScalars of different orders is
an error.  Plain integers and Fractions coerce into any order.  Serialization
is "p/q" for rational values and a polynomial string in "e" otherwise; the
enclosing document carries the order N.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from typing import Union

Scalar = Union[Fraction, "CycScalar"]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _poly_trim(coeffs: list) -> list:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _poly_divmod(num: list, den: list) -> tuple[list, list]:
    """Exact division of coefficient lists (low to high) over the rationals."""
    num = [Fraction(c) for c in num]
    den = [Fraction(c) for c in den]
    if not _poly_trim(den):
        raise ZeroDivisionError("polynomial division by zero")
    quot = [_ZERO] * max(0, len(num) - len(den) + 1)
    rem = list(num)
    _poly_trim(rem)
    dlead = den[-1]
    while len(rem) >= len(den):
        shift = len(rem) - len(den)
        factor = rem[-1] / dlead
        quot[shift] = factor
        for i, dc in enumerate(den):
            rem[shift + i] -= factor * dc
        _poly_trim(rem)
    return _poly_trim(quot), rem


@lru_cache(maxsize=None)
def cyclotomic_polynomial(N: int) -> tuple[int, ...]:
    """Coefficients (low to high) of Phi_N, the N-th cyclotomic polynomial.

    Computed by dividing x^N - 1 by the product of Phi_d over proper divisors
    d of N; the base case is Phi_1 = x - 1.
    """
    if N < 1:
        raise ValueError(f"order must be >= 1, got {N}")
    if N == 1:
        return (-1, 1)
    num = [-1] + [0] * (N - 1) + [1]
    den = [Fraction(1)]
    for d in range(1, N):
        if N % d == 0:
            phi_d = cyclotomic_polynomial(d)
            new = [_ZERO] * (len(den) + len(phi_d) - 1)
            for i, a in enumerate(den):
                if a:
                    for j, b in enumerate(phi_d):
                        new[i + j] += a * b
            den = new
    quot, rem = _poly_divmod(num, den)
    if rem:
        raise ArithmeticError(f"cyclotomic division left a remainder for N={N}")
    return tuple(int(c) for c in quot)


@lru_cache(maxsize=None)
def _reduction_rows(N: int) -> tuple[tuple[int, ...], ...]:
    """Rows r_k = coefficients of e^(d+k) reduced mod Phi_N, for 0 <= k < d-1."""
    phi = cyclotomic_polynomial(N)
    d = len(phi) - 1
    rows = []
    # e^d = -(phi[0] + phi[1] e + ... + phi[d-1] e^(d-1)); Phi_N is monic.
    cur = [-c for c in phi[:d]]
    rows.append(tuple(cur))
    for _ in range(d - 2):
        shifted = [0] + cur[: d - 1]
        top = cur[d - 1]
        if top:
            for i in range(d):
                shifted[i] -= top * phi[i]
        cur = shifted
        rows.append(tuple(cur))
    return tuple(rows)


@lru_cache(maxsize=None)
def _degree(N: int) -> int:
    return len(cyclotomic_polynomial(N)) - 1


class CycScalar:
    """An element of Q(e_N) as a reduced polynomial in the primitive root e."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs):
        d = _degree(order)
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != d:
            raise ValueError(f"need {d} coefficients for order {order}, got {len(coeffs)}")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("CycScalar is immutable")

    @staticmethod
    def from_rational(order: int, value) -> "CycScalar":
        d = _degree(order)
        return CycScalar(order, (Fraction(value),) + (_ZERO,) * (d - 1))

    def _coerce(self, other) -> "CycScalar | None":
        if isinstance(other, CycScalar):
            if other.order != self.order:
                raise ValueError(
                    f"cannot mix cyclotomic orders {self.order} and {other.order}; "
                    "embed explicitly"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return CycScalar.from_rational(self.order, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycScalar(self.order, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycScalar(self.order, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycScalar(self.order, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        d = len(a)
        if d == 1:
            return CycScalar(self.order, (a[0] * b[0],))
        prod = [_ZERO] * (2 * d - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        rows = _reduction_rows(self.order)
        out = prod[:d]
        for k in range(d, 2 * d - 1):
            c = prod[k]
            if c:
                row = rows[k - d]
                for i in range(d):
                    if row[i]:
                        out[i] += c * row[i]
        return CycScalar(self.order, tuple(out))

    __rmul__ = __mul__

    def inv(self) -> "CycScalar":
        """Multiplicative inverse via the extended Euclidean algorithm mod Phi_N."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic scalar")

        def poly_mul(a: list, b: list) -> list:
            if not a or not b:
                return []
            out = [_ZERO] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        out[i + j] += x * y
            return _poly_trim(out)

        def poly_sub(a: list, b: list) -> list:
            n = max(len(a), len(b))
            a = a + [_ZERO] * (n - len(a))
            b = b + [_ZERO] * (n - len(b))
            return _poly_trim([x - y for x, y in zip(a, b)])

        phi = [Fraction(c) for c in cyclotomic_polynomial(self.order)]
        # Track only the Bezout coefficient of self: r_i = s_i * self (mod Phi_N).
        r0, r1 = phi, _poly_trim([Fraction(c) for c in self.coeffs])
        s0, s1 = [], [_ONE]
        while r1:
            q, rem = _poly_divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, poly_sub(s0, poly_mul(q, s1))
        if len(r0) != 1:
            raise ArithmeticError("gcd with Phi_N not a unit")
        unit = r0[0]
        _, reduced = _poly_divmod([c / unit for c in s0], phi)
        d = _degree(self.order)
        inv_coeffs = reduced + [_ZERO] * d
        return CycScalar(self.order, tuple(inv_coeffs[:d]))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inv()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inv()
        k = abs(k)
        acc = CycScalar.from_rational(self.order, 1)
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    def __eq__(self, other):
        if isinstance(other, CycScalar):
            return self.order == other.order and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.order, self.coeffs))

    def __bool__(self):
        return not self.is_zero()

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def embed(self, order: int) -> "CycScalar":
        """Image in Q(e_M) for a multiple M of this order (e_N = e_M^(M/N))."""
        if order % self.order:
            raise ValueError(f"order {self.order} does not divide {order}")
        step = order // self.order
        acc = CycScalar.from_rational(order, 0)
        for k, c in enumerate(self.coeffs):
            if c:
                acc = acc + c * root_power_cyc(order, step * k)
        return acc

    def as_complex(self) -> complex:
        eps = cmath.exp(2j * cmath.pi / self.order)
        return sum(complex(c) * eps**k for k, c in enumerate(self.coeffs))

    def __repr__(self):
        return f"CycScalar({self.order}, {scalar_str(self)!r})"

    def __str__(self):
        return scalar_str(self)


@lru_cache(maxsize=None)
def root_power_cyc(N: int, k: int) -> CycScalar:
    """e^(k mod N) as a CycScalar of order N, reduced mod Phi_N."""
    k %= N
    d = _degree(N)
    if k < d:
        coeffs = [_ZERO] * d
        coeffs[k] = _ONE
        return CycScalar(N, tuple(coeffs))
    if d == 1:
        # N is 1 or 2: e is 1 or -1 respectively.
        return CycScalar.from_rational(N, 1 if N == 1 or k % 2 == 0 else -1)
    e1 = root_power_cyc(N, 1)
    acc = root_power_cyc(N, d - 1)
    for _ in range(k - d + 1):
        acc = acc * e1
    return acc


def root_power(N: int, k: int) -> Scalar:
    """e^(k mod N); plain Fraction for the degenerate orders 1 and 2."""
    if N < 1:
        raise ValueError(f"order must be >= 1, got {N}")
    if N == 1:
        return _ONE
    if N == 2:
        return _ONE if k % 2 == 0 else -_ONE
    return root_power_cyc(N, k)


def scalar_inv(x: Scalar) -> Scalar:
    if isinstance(x, CycScalar):
        return x.inv()
    return 1 / Fraction(x)


def scalar_pow(x: Scalar, k: int) -> Scalar:
    if isinstance(x, CycScalar):
        return x**k
    return Fraction(x) ** k


def is_zero(x) -> bool:
    if isinstance(x, CycScalar):
        return x.is_zero()
    return x == 0


def as_order(x: Scalar, N: int) -> Scalar:
    """Coerce a scalar into the arithmetic used at order N."""
    if isinstance(x, CycScalar):
        if N <= 2:
            return x.as_fraction()
        if x.order == N:
            return x
        return x.embed(N)
    if N <= 2:
        return Fraction(x)
    return CycScalar.from_rational(N, x)


def _fraction_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def scalar_str(x: Scalar) -> str:
    """Canonical serialization: "p/q" when rational, else a polynomial in e."""
    if isinstance(x, CycScalar):
        if x.is_rational():
            return _fraction_str(x.coeffs[0])
        parts = []
        for k, c in enumerate(x.coeffs):
            if c == 0:
                continue
            if k == 0:
                parts.append(_fraction_str(c))
                continue
            e = "e" if k == 1 else f"e^{k}"
            if c == 1:
                term = e
            elif c == -1:
                term = f"-{e}"
            else:
                term = f"{_fraction_str(c)}*{e}"
            parts.append(term)
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out
    return _fraction_str(Fraction(x))


def scalar_from_str(s: str, N: int) -> Scalar:
    """Parse "p/q" or a polynomial string in e, at the given order."""
    text = s.strip()
    if not text:
        raise ValueError("empty scalar string")
    # Split into signed terms at top level (no parentheses in the grammar).
    terms: list[str] = []
    cur = ""
    sign = 1
    prev = ""
    for ch in text:
        if ch in "+-" and cur.strip() and prev not in "*/^":
            terms.append(("-" if sign < 0 else "") + cur.strip())
            cur = ""
            sign = -1 if ch == "-" else 1
        elif ch in "+-" and not cur.strip():
            if ch == "-":
                sign = -sign
        else:
            cur += ch
        if not ch.isspace():
            prev = ch
    if cur.strip():
        terms.append(("-" if sign < 0 else "") + cur.strip())
    total: Scalar = Fraction(0) if N <= 2 else CycScalar.from_rational(N, 0)
    for term in terms:
        neg = term.startswith("-")
        if neg:
            term = term[1:].strip()
        coeff = Fraction(1)
        power = 0
        if "e" in term:
            head, _, tail = term.partition("e")
            head = head.strip().rstrip("*").strip()
            if head:
                coeff = Fraction(head)
            tail = tail.strip()
            if tail.startswith("^"):
                power = int(tail[1:])
            elif tail:
                raise ValueError(f"cannot parse scalar term {term!r}")
            else:
                power = 1
        else:
            coeff = Fraction(term)
        if neg:
            coeff = -coeff
        if power:
            if N <= 2:
                val = coeff * root_power(N, power)
            else:
                val = coeff * root_power_cyc(N, power)
        else:
            val = coeff if N <= 2 else CycScalar.from_rational(N, coeff)
        total = total + val
    return total
