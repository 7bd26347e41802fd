"""Mode algebras with quadratic relations and exact Fock-space vectors.

One generic rewriting engine covers the three constructions: a spec carries
the index lattice, bracket flavor (anticommutator for the Clifford algebras,
commutator for the bosonic one), the structure function kappa with
a_m a_n -+ a_n a_m = kappa(m,n), the vacuum convention, and a normal-order
key.  Canonical words applied to the vacuum have strictly (fermionic) or
weakly (bosonic) decreasing keys left to right and contain no annihilators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .scalar import Scalar, scalar_str, scalar_from_str
from .util import val_is_zero

Index = Fraction
Word = tuple  # tuple[Fraction, ...]


@dataclass(frozen=True)
class ModeAlgebraSpec:
    name: str
    half_integer: bool          # index lattice: integers or half-odd-integers
    fermionic: bool             # anticommutator relations vs commutator
    parity: int                 # parity of the generator modes
    kappa: Callable[[Index, Index], Scalar]
    is_annihilator: Callable[[Index], bool]
    key: Callable[[Index], Fraction]  # normal-order comparator, decreasing

    def validate_index(self, n) -> Index:
        n = Fraction(n)
        if self.half_integer:
            if n.denominator != 2:
                raise ValueError(f"{self.name} indices are half-odd-integers, got {n}")
        elif n.denominator != 1:
            raise ValueError(f"{self.name} indices are integers, got {n}")
        return n

    def energy(self, n: Index) -> Fraction:
        """Grading used for basis enumeration; index 0 counts one half."""
        return abs(n) if n else Fraction(1, 2)


def _kappa_b(m, n):
    return Fraction(2 * (-1) ** int(m)) if m + n == 0 else Fraction(0)


def _kappa_c(m, n):
    return Fraction((-1) ** int(n - Fraction(1, 2))) if m + n == 0 else Fraction(0)


def _kappa_d(m, n):
    return Fraction(1) if m + n == 0 else Fraction(0)


CL_B = ModeAlgebraSpec(
    name="B",
    half_integer=False,
    fermionic=True,
    parity=1,
    kappa=_kappa_b,
    is_annihilator=lambda n: n < 0,
    key=lambda n: n,
)

L_C = ModeAlgebraSpec(
    name="C",
    half_integer=True,
    fermionic=False,
    parity=0,
    kappa=_kappa_c,
    is_annihilator=lambda n: n < 0,
    key=lambda n: n,
)

CL_D = ModeAlgebraSpec(
    name="D",
    half_integer=True,
    fermionic=True,
    parity=1,
    kappa=_kappa_d,
    is_annihilator=lambda n: n > 0,
    key=lambda n: -n,
)

SPECS = {"B": CL_B, "C": L_C, "D": CL_D}


class FockVector:
    """Exact finite linear combination of canonical mode words."""

    __slots__ = ("spec", "terms")

    def __init__(self, spec: ModeAlgebraSpec, terms: dict):
        clean = {}
        for w, c in terms.items():
            if isinstance(c, int):
                c = Fraction(c)
            if not val_is_zero(c):
                clean[tuple(w)] = c
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):
        raise AttributeError("FockVector is immutable")

    @staticmethod
    def vacuum(spec: ModeAlgebraSpec) -> "FockVector":
        return FockVector(spec, {(): Fraction(1)})

    @staticmethod
    def zero(spec: ModeAlgebraSpec) -> "FockVector":
        return FockVector(spec, {})

    @staticmethod
    def word(spec: ModeAlgebraSpec, indices, coeff: Scalar = Fraction(1)) -> "FockVector":
        """Build a_{n_1} ... a_{n_k} |0> by applying modes right to left."""
        v = FockVector.vacuum(spec).scale(coeff)
        for n in reversed(list(indices)):
            v = apply_mode(spec, n, v)
        return v

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "FockVector"):
        if self.spec.name != other.spec.name:
            raise ValueError("mode algebra mismatch")

    def __add__(self, other):
        if isinstance(other, FockVector):
            self._check(other)
            out = dict(self.terms)
            for w, c in other.terms.items():
                out[w] = out.get(w, Fraction(0)) + c
            return FockVector(self.spec, out)
        if val_is_zero(other):
            return self
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return FockVector(self.spec, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, FockVector):
            return self + (-other)
        if val_is_zero(other):
            return self
        return NotImplemented

    def __rsub__(self, other):
        if val_is_zero(other):
            return -self
        return NotImplemented

    def scale(self, c: Scalar) -> "FockVector":
        return FockVector(self.spec, {w: c * v for w, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, FockVector):
            return NotImplemented
        return self.scale(other)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, FockVector):
            return self.spec.name == other.spec.name and self.terms == other.terms
        if val_is_zero(other):
            return self.is_zero()
        return NotImplemented

    def __hash__(self):
        return hash((self.spec.name, frozenset(self.terms.items())))

    def energy_max(self) -> Fraction:
        """Largest word energy present (0 for the zero vector)."""
        best = Fraction(0)
        for w in self.terms:
            e = sum((self.spec.energy(n) for n in w), Fraction(0))
            best = max(best, e)
        return best

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for w, c in sorted(self.terms.items()):
            word = " ".join(f"phi({n})" for n in w)
            word = f"{word} |0>" if word else "|0>"
            bits.append(f"({scalar_str(c)}) {word}")
        return " + ".join(bits)

    __repr__ = __str__

    def to_json(self) -> dict:
        return {
            "spec": self.spec.name,
            "terms": [
                {"word": [str(n) for n in w], "coeff": scalar_str(c)}
                for w, c in sorted(self.terms.items())
            ],
        }

    @staticmethod
    def from_json(d: dict, order: int = 1) -> "FockVector":
        spec = SPECS[d["spec"]]
        terms = {}
        for t in d["terms"]:
            w = tuple(Fraction(s) for s in t["word"])
            terms[w] = scalar_from_str(t["coeff"], order)
        return FockVector(spec, terms)


def _apply_to_word(spec: ModeAlgebraSpec, n: Index, word: Word) -> dict:
    """a_n applied to a canonical word; returns {word: coeff} in normal form.

    Swap rule: a_n a_m = sigma a_m a_n + kappa(n,m) with sigma = -1 for the
    fermionic flavor; each step reduces (length, inversions) lexicographically.
    """
    if not word:
        if spec.is_annihilator(n):
            return {}
        return {(n,): Fraction(1)}
    m = word[0]
    kn, km = spec.key(n), spec.key(m)
    # annihilators carry negative keys, canonical heads nonnegative ones, so
    # kn >= km implies n is a creation (or zero-mode) index
    if kn > km or (kn == km and not spec.fermionic):
        return {(n,) + word: Fraction(1)}
    if kn == km and spec.fermionic:
        # a_n a_n = kappa(n,n)/2
        half = spec.kappa(n, n) / 2
        return {word[1:]: half} if not val_is_zero(half) else {}
    out: dict = {}
    sigma = Fraction(-1) if spec.fermionic else Fraction(1)
    for w2, c in _apply_to_word(spec, n, word[1:]).items():
        key = (m,) + w2
        acc = out.get(key, Fraction(0)) + sigma * c
        if val_is_zero(acc):
            out.pop(key, None)
        else:
            out[key] = acc
    k = spec.kappa(n, m)
    if not val_is_zero(k):
        key = word[1:]
        acc = out.get(key, Fraction(0)) + k
        if val_is_zero(acc):
            out.pop(key, None)
        else:
            out[key] = acc
    return out


def apply_mode(spec: ModeAlgebraSpec, n, v: FockVector) -> FockVector:
    """The vector a_n . v in normal form."""
    n = spec.validate_index(n)
    out: dict = {}
    for w, c in v.terms.items():
        for w2, c2 in _apply_to_word(spec, n, w).items():
            acc = out.get(w2, Fraction(0)) + c * c2
            if val_is_zero(acc):
                out.pop(w2, None)
            else:
                out[w2] = acc
    return FockVector(spec, out)


def _creation_indices(spec: ModeAlgebraSpec, budget: Fraction):
    """Non-annihilator indices with energy <= budget, in decreasing key order."""
    out = []
    if spec.half_integer:
        n = Fraction(1, 2)
        while n <= budget:
            idx = -n if spec.is_annihilator(n) else n
            out.append(idx)
            n += 1
    else:
        if budget >= Fraction(1, 2):
            out.append(Fraction(0))
        n = Fraction(1)
        while n <= budget:
            out.append(-n if spec.is_annihilator(n) else n)
            n += 1
    return sorted(out, key=spec.key, reverse=True)


def basis(spec: ModeAlgebraSpec, cutoff) -> list[FockVector]:
    """All canonical words of energy <= cutoff, as unit vectors, sorted by
    (energy, length, word)."""
    cutoff = Fraction(cutoff)
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    words: list[tuple[Fraction, Word]] = []

    def extend(word: Word, used: Fraction):
        words.append((used, word))
        last_key = spec.key(word[-1]) if word else None
        for idx in _creation_indices(spec, cutoff - used):
            k = spec.key(idx)
            if last_key is not None:
                if k > last_key or (k == last_key and spec.fermionic):
                    continue
            e = spec.energy(idx)
            if used + e <= cutoff:
                extend(word + (idx,), used + e)

    extend((), Fraction(0))
    words.sort(key=lambda t: (t[0], len(t[1]), t[1]))
    return [FockVector(spec, {w: Fraction(1)}) for _, w in words]


def vec_arith(u: FockVector, v, op: str):
    """Spec-named linear algebra entry point: add, scale, or eq."""
    if op == "add":
        return u + v
    if op == "scale":
        return u.scale(v)
    if op == "eq":
        return u == v
    raise ValueError(f"unknown op {op!r}")
