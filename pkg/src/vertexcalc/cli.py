"""Command-line frontend for the exact distribution calculus.

Subcommands
-----------
decompose   write an N-point local distribution as a delta sum
ope         extract and identify singular OPE coefficients of a field pair
pfd         exact partial fractions of a rational function of z and w
bell        partial exponential Bell polynomial, symbolically
verify      run a named verification suite and report pass/fail
eval        evaluate a field on a Fock-space vector over a window

Exit codes: 0 success (all checks pass, for `verify`); 1 malformed input or
unknown suite or failed checks; 2 locality failure ("not local"); 3 window
too small to certify the computation.  On a nonzero exit nothing is written
to stdout except, for `verify`, the completed report; diagnostics go to
stderr.  Identical invocations produce byte-identical JSON output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .deltacalc import (
    DeltaSum,
    LocalityError,
    PointSet,
    RatFrac,
    bell_polynomial,
    decompose,
    partial_fractions,
)
from .fields import (
    IDENT,
    Dilate,
    GeneratorField,
    IdentityField,
    eval_field,
    field_from_json,
    field_spec,
    ope_extract,
    standard_field,
)
from .fock import FockVector
from .scalar import scalar_from_str, scalar_pow, scalar_str
from .util import val_is_zero
from .series import (
    BiDist,
    ExpansionDir,
    Window,
    WindowError,
    bidist_mul,
    delta_expansion,
    expand_inverse_power,
    laurent_str,
    parse_window,
)
from .verify import run_suite

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

FIELD_NAMES = ("Id", "phiB", "phiC", "phiD", "hB", "hC", "hD", "hD_N")


class CliError(ValueError):
    """Malformed command line or input payload."""


# ---------------------------------------------------------------------------
# Argument parsing helpers


def _parse_cutoff(text: str) -> Fraction:
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise CliError(f"bad cutoff {text!r}: {e}") from None
    if q < 0:
        raise CliError(f"cutoff must be >= 0, got {text!r}")
    return q


def _parse_window_pair(text: str, default: tuple[int, int]) -> tuple[Window, Window]:
    """"zlo:zhi,wlo:whi" (or a single "lo:hi" used for both variables)."""
    if not text:
        w = Window(*default)
        return w, w
    parts = text.split(",")
    try:
        if len(parts) == 1:
            w = parse_window(parts[0])
            return w, w
        if len(parts) == 2:
            return parse_window(parts[0]), parse_window(parts[1])
    except ValueError as e:
        raise CliError(str(e)) from None
    raise CliError(f"bad window {text!r}, expected zlo:zhi,wlo:whi")


def _parse_orders(text: str, npoints: int, default: int) -> tuple[int, ...]:
    if not text:
        return (default,) * npoints
    try:
        orders = tuple(int(t) for t in text.split(","))
    except ValueError as e:
        raise CliError(f"bad orders {text!r}: {e}") from None
    if len(orders) == 1:
        orders = orders * npoints
    if len(orders) != npoints:
        raise CliError(f"need one order per point ({npoints}), got {text!r}")
    return orders


def _load_json_arg(text: str) -> dict:
    """Inline JSON (starts with '{'), '-' for stdin, or a file path."""
    if text.lstrip().startswith("{"):
        raw = text
    elif text == "-":
        raw = sys.stdin.read()
    else:
        try:
            with open(text, "r", encoding="utf-8") as fh:
                raw = fh.read()
        except OSError as e:
            raise CliError(f"cannot read {text!r}: {e}") from None
    try:
        return json.loads(raw)
    except json.JSONDecodeError as e:
        raise CliError(f"bad JSON in {text!r}: {e}") from None


def _max_m() -> int | None:
    raw = os.environ.get("VERTEXCALC_MAX_M")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"bad VERTEXCALC_MAX_M {raw!r}: expected an integer") from None


# ---------------------------------------------------------------------------
# Input payloads


def _bidist_fixture(name: str, zwin: Window, wwin: Window) -> BiDist | None:
    if name == "delta-b":
        # -2w * delta(z + w): the singular commutator of the integer-moded pair.
        d = delta_expansion(Fraction(-1), 0, zwin, wwin)
        return bidist_mul(BiDist.poly({(0, 1): Fraction(-2)}), d)
    if name == "nonlocal":
        # i_{z,w} 1/(z - w): one-sided expansion, annihilated by no (z-w)^n.
        return expand_inverse_power(Fraction(1), 1, ExpansionDir.ZW, zwin, wwin)
    if name == "zero":
        return BiDist.zero(zwin, wwin)
    return None


def _bidist_arg(text: str, order: int, zwin: Window, wwin: Window) -> BiDist:
    fx = _bidist_fixture(text, zwin, wwin)
    if fx is not None:
        return fx
    d = _load_json_arg(text)
    try:
        zw = parse_window(d["zwin"]) if "zwin" in d else zwin
        ww = parse_window(d["wwin"]) if "wwin" in d else wwin
        coeffs = {
            (int(ze), int(we)): scalar_from_str(cs, order)
            for ze, we, cs in d["coeffs"]
        }
    except (KeyError, TypeError, ValueError) as e:
        raise CliError(f"bad distribution payload: {e}") from None
    return BiDist(coeffs, zw, ww)


def _field_arg(text: str, order: int, fallback_name: str):
    """Resolve a registry name or a JSON field AST; returns (name, field)."""
    if text == "Id":
        return "Id", IDENT
    if text in FIELD_NAMES:
        try:
            return text, standard_field(text, N=order if text == "hD_N" else None)
        except ValueError as e:
            raise CliError(str(e)) from None
    if not (text.lstrip().startswith("{") or text == "-" or os.path.exists(text)):
        raise CliError(
            f"unknown field {text!r}; known fields: {', '.join(FIELD_NAMES)} "
            "(or a JSON field AST, '-', or a path)"
        )
    d = _load_json_arg(text)
    try:
        return fallback_name, field_from_json(d, order)
    except (KeyError, TypeError, ValueError) as e:
        raise CliError(f"bad field payload: {e}") from None


def _split_top(text: str, seps: str) -> list[str]:
    """Split on separators at paren depth zero, keeping the separators.

    A sign directly after '^', '*', or '/' binds to its operand ("z^-1")
    rather than separating terms.
    """
    out, depth, cur, prev = [], 0, "", ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise CliError(f"unbalanced parentheses in {text!r}")
        if depth == 0 and ch in seps and prev not in "^*/":
            out.append(cur)
            out.append(ch)
            cur = ""
        else:
            cur += ch
        if not ch.isspace():
            prev = ch
    if depth:
        raise CliError(f"unbalanced parentheses in {text!r}")
    out.append(cur)
    return out


def _parse_power(piece: str) -> tuple[str, int]:
    """Strip a trailing ^k (default 1)."""
    base, caret, exp = piece.rpartition("^")
    if not caret:
        return piece, 1
    try:
        return base, int(exp)
    except ValueError:
        raise CliError(f"bad exponent in {piece!r}") from None


def _parse_monomial(term: str, order: int) -> tuple[int, int, object]:
    """c * z^a * w^b with a rational or root-of-unity coefficient."""
    ze, we = 0, 0
    coeff: object = Fraction(1)
    for piece in term.split("*"):
        piece = piece.strip()
        if not piece:
            raise CliError(f"empty factor in numerator term {term!r}")
        base, k = _parse_power(piece)
        if base == "z":
            ze += k
        elif base == "w":
            we += k
        elif base == "-z":
            ze += k
            coeff = coeff * Fraction(-1)
        elif base == "-w":
            we += k
            coeff = coeff * Fraction(-1)
        else:
            try:
                c = scalar_from_str(base, order)
            except (ValueError, TypeError) as e:
                raise CliError(f"bad coefficient {piece!r}: {e}") from None
            coeff = coeff * (scalar_pow(c, k) if k != 1 else c)
    return ze, we, coeff


def _parse_linear_factor(expr: str, points: PointSet):
    """Classify a denominator factor base: "z", "w", or "z - lam*w".

    Returns ("z",), ("w",) or ("pt", j) with j the 1-based point index.
    """
    s = expr.replace(" ", "")
    if s == "z":
        return ("z",)
    if s == "w":
        return ("w",)
    if not s.startswith("z"):
        raise CliError(f"denominator factor {expr!r} must be z, w, or z - lam*w")
    rest = s[1:]
    if rest.startswith("+"):
        sign, rest = Fraction(-1), rest[1:]
    elif rest.startswith("-"):
        sign, rest = Fraction(1), rest[1:]
    else:
        raise CliError(f"denominator factor {expr!r} must be z, w, or z - lam*w")
    if rest == "w":
        lam = sign
    elif rest.endswith("*w"):
        lam = sign * scalar_from_str(rest[:-2], points.order)
    elif rest.endswith("w"):
        lam = sign * scalar_from_str(rest[:-1], points.order)
    else:
        raise CliError(f"denominator factor {expr!r} must be z, w, or z - lam*w")
    for j in range(1, len(points) + 1):
        if val_is_zero(points.lam(j) - lam):
            return ("pt", j)
    raise CliError(
        f"factor {expr!r}: {scalar_str(lam)} is not among the order-{points.order} roots"
    )


def _ratfrac_from_string(text: str, order: int) -> RatFrac:
    """Parse "num/(f1 f2 ...)" with linear factors (z - lam*w)^k, z^a, w^b."""
    s = text.replace(" ", "")
    pieces = _split_top(s, "/")
    if len(pieces) < 3:
        raise CliError(f"expected num/denominator in {text!r}")
    den_s = pieces[-1]
    num_s = "".join(pieces[:-2])
    points = PointSet.roots_of_unity(order)

    num: dict[tuple[int, int], object] = {}
    bits = _split_top(num_s, "+-")
    sign = Fraction(1)
    for bit in bits:
        bit = bit.strip()
        if bit == "+":
            continue
        if bit == "-":
            sign = -sign
            continue
        if not bit:
            continue
        ze, we, c = _parse_monomial(bit, order)
        c = c * sign
        sign = Fraction(1)
        prev = num.get((ze, we), Fraction(0))
        num[(ze, we)] = prev + c

    poles = {"z": 0, "w": 0, "pts": [0] * len(points)}
    _accumulate_den(den_s, points, 1, poles, text)
    return RatFrac(num, poles["z"], poles["w"], points, poles["pts"])


def _accumulate_den(den: str, points: PointSet, mult: int, poles: dict, full: str):
    """Walk a product of denominator factors, adding mult * (its power) to
    the right pole counter; parenthesized sub-products recurse."""
    rest = den
    while rest:
        rest = rest.lstrip("*")
        if not rest:
            break
        if rest.startswith("("):
            depth = 0
            for i, ch in enumerate(rest):
                if ch == "(":
                    depth += 1
                elif ch == ")":
                    depth -= 1
                    if depth == 0:
                        break
            if depth:
                raise CliError(f"unbalanced parentheses in {full!r}")
            inner, tail = rest[1 : i], rest[i + 1 :]
            k = 1
            if tail.startswith("^"):
                j = 1
                if j < len(tail) and tail[j] == "-":
                    j += 1
                while j < len(tail) and tail[j].isdigit():
                    j += 1
                try:
                    k = int(tail[1:j])
                except ValueError:
                    raise CliError(f"bad exponent after {inner!r} in {full!r}") from None
                tail = tail[j:]
            rest = tail
        else:
            j = 0
            while j < len(rest) and rest[j] not in "(*":
                j += 1
            inner, rest = rest[:j], rest[j:]
            inner, k = _parse_power(inner)
        if k < 0:
            raise CliError(f"denominator exponents must be >= 0 in {full!r}")
        if "(" in inner:
            _accumulate_den(inner, points, mult * k, poles, full)
            continue
        kind = _parse_linear_factor(inner, points)
        if kind[0] == "z":
            poles["z"] += mult * k
        elif kind[0] == "w":
            poles["w"] += mult * k
        else:
            poles["pts"][kind[1] - 1] += mult * k


def _ratfrac_arg(text: str, order: int) -> RatFrac:
    if text.lstrip().startswith("{") or text == "-" or os.path.exists(text):
        d = _load_json_arg(text)
        try:
            return RatFrac.from_json(d)
        except (KeyError, TypeError, ValueError) as e:
            raise CliError(f"bad rational-function payload: {e}") from None
    return _ratfrac_from_string(text, order)


# ---------------------------------------------------------------------------
# Symbolic ring for Bell polynomials


class _SymPoly:
    """Multivariate polynomial over Q in x1..xn, just enough ring structure
    for the Bell recurrence (addition, multiplication, Fraction scaling)."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict):
        self.nvars = nvars
        self.terms = {e: c for e, c in terms.items() if c}

    @staticmethod
    def var(i: int, nvars: int) -> "_SymPoly":
        e = [0] * nvars
        e[i] = 1
        return _SymPoly(nvars, {tuple(e): Fraction(1)})

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = _SymPoly(self.nvars, {(0,) * self.nvars: Fraction(other)})
        out = dict(self.terms)
        for e, c in other.terms.items():
            acc = out.get(e, Fraction(0)) + c
            if acc:
                out[e] = acc
            else:
                out.pop(e, None)
        return _SymPoly(self.nvars, out)

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return _SymPoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return _SymPoly(self.nvars, out)

    __rmul__ = __mul__

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(
                f"x{i + 1}" if m == 1 else f"x{i + 1}^{m}"
                for i, m in enumerate(e)
                if m
            )
            if not mono:
                bits.append(str(c))
            elif c == 1:
                bits.append(mono)
            elif c == -1:
                bits.append(f"-{mono}")
            else:
                bits.append(f"{c}*{mono}")
        return " + ".join(bits)


# ---------------------------------------------------------------------------
# Subcommand handlers: each returns (json_payload, text_rendering, exit_code)


def _cmd_decompose(args):
    order = args.roots or 2
    zwin, wwin = _parse_window_pair(args.window, (-6, 6))
    a = _bidist_arg(args.input, order, zwin, wwin)
    points = PointSet.roots_of_unity(order)
    orders = _parse_orders(args.orders, len(points), 1)
    ds = decompose(a, points, orders)
    return ds.to_json(), str(ds), 0


def _ope_text(table) -> str:
    if not table.entries:
        return "no singular part"
    lines = []
    for (j, k), ent in sorted(table.entries.items()):
        rhs = ent.field_str()
        if rhs is None:
            rhs = f"<unidentified: {len(ent.samples)} samples>"
        lines.append(f"({scalar_str(ent.point)}, {k}): {rhs}")
    return "\n".join(lines)


def _cmd_ope(args):
    order = args.roots or 2
    name_a, a = _field_arg(args.a, order, "lhs")
    name_b, b = _field_arg(args.b, order, "rhs")
    points = PointSet.roots_of_unity(order)
    orders = _parse_orders(args.orders, len(points), 2)
    cutoff = _parse_cutoff(args.cutoff or "3")
    _, wwin = _parse_window_pair(args.window, (-8, 8))
    registry = [("Id", IDENT)]
    seen = {"Id"}
    for nm, f in ((name_a, a), (name_b, b)):
        if nm not in seen and not isinstance(f, IdentityField):
            registry.append((nm, f))
            seen.add(nm)
        if isinstance(f, GeneratorField):
            for kk in range(1, order):
                dn = f"{nm}(-z)" if order == 2 else f"{nm}(e{order}^{kk}*z)"
                if dn not in seen:
                    registry.append((dn, Dilate(f, kk, order)))
                    seen.add(dn)
    table = ope_extract(a, b, points, orders, cutoff, wout=wwin, registry=registry)
    return table.to_json(), _ope_text(table), 0


def _pfd_text(pf) -> str:
    bits = []
    for (ze, we), c in sorted(pf.poly_part.items()):
        mono = "*".join(
            ([f"z^{ze}"] if ze else []) + ([f"w^{we}"] if we else []) or ["1"]
        )
        bits.append(f"({scalar_str(c)})*{mono}")
    for i, c in sorted(pf.z_pole_coeffs.items()):
        bits.append(f"({laurent_str(c)})/z^{i}")
    for (k, i), c in sorted(pf.point_coeffs.items()):
        lam = scalar_str(pf.points.lam(k))
        bits.append(f"({laurent_str(c)})/(z - ({lam})w)^{i}")
    return " + ".join(bits) if bits else "0"


def _cmd_pfd(args):
    order = args.roots or 2
    f = _ratfrac_arg(args.input, order)
    pf = partial_fractions(f)
    return pf.to_json(), _pfd_text(pf), 0


def _cmd_bell(args):
    n, k = args.n, args.k
    if n < 1 or k < 1 or k > n:
        raise CliError(f"need 1 <= k <= n, got n={n} k={k}")
    nv = n - k + 1
    xs = [_SymPoly.var(i, nv) for i in range(nv)]
    poly = bell_polynomial(n, k, xs)
    s = str(poly)
    return {"n": n, "k": k, "bell": s}, s, 0


def _cmd_verify(args):
    if args.suite not in SUITES:
        raise CliError(
            f"unknown suite {args.suite!r}; known suites: {', '.join(SUITES)}"
        )
    cutoff = _parse_cutoff(args.cutoff) if args.cutoff else None
    report = run_suite(
        args.suite,
        roots=args.roots,
        cutoff=cutoff,
        mode_range=args.mode_range,
        max_m=_max_m(),
    )
    lines = [
        f"[{'PASS' if c.ok else 'FAIL'}] {c.desc}" + ("" if c.ok else f"  ({c.witness})")
        for c in report.checks
    ]
    n_ok = sum(1 for c in report.checks if c.ok)
    lines.append(
        f"{report.suite}: {n_ok}/{len(report.checks)} checks passed"
    )
    return report.to_json(), "\n".join(lines), 0 if report.ok else 1


def _cmd_eval(args):
    order = args.roots or 2
    name, f = _field_arg(args.field, order, "field")
    spec = field_spec(f)
    if spec is None:
        raise CliError(f"cannot infer a mode algebra for {name!r}; evaluate a non-scalar field")
    if args.state:
        try:
            indices = [Fraction(t) for t in args.state.split(",")]
        except (ValueError, ZeroDivisionError) as e:
            raise CliError(f"bad state {args.state!r}: {e}") from None
        v = FockVector.word(spec, indices)
    else:
        v = FockVector.vacuum(spec)
    zwin, _ = _parse_window_pair(args.window, (-4, 4))
    series = eval_field(f, v, zwin)
    coeffs = [[e, str(series.coeffs[e])] for e in sorted(series.coeffs)]
    payload = {
        "field": name,
        "state": str(v),
        "window": str(series.window),
        "coeffs": coeffs,
    }
    text = "\n".join(f"z^{e}: {s}" for e, s in coeffs) or "0"
    return payload, text, 0


# ---------------------------------------------------------------------------
# Parser and entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with code 2
        raise CliError(message)


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--roots", type=int, metavar="N",
                        help="order of the root-of-unity point set (default 2)")
    common.add_argument("--window", default="", metavar="ZLO:ZHI,WLO:WHI",
                        help="certified exponent windows ('*' for unbounded)")
    common.add_argument("--cutoff", default="", metavar="Q",
                        help="basis energy cutoff, a rational like 3 or 5/2")
    common.add_argument("--mode-range", type=int, default=None, metavar="K",
                        help="mode box half-width for verification suites")
    common.add_argument("--format", choices=("json", "text"), default="json",
                        help="output format (default json)")

    p = _Parser(prog="vertexcalc", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", parents=[common],
                       help="decompose a local distribution into delta terms")
    d.add_argument("input",
                   help="BiDist JSON (inline, path, or '-'), or a fixture: "
                        "delta-b, nonlocal, zero")
    d.add_argument("--orders", default="", metavar="N1,N2,...",
                   help="locality orders per point (default 1 each)")
    d.set_defaults(handler=_cmd_decompose)

    o = sub.add_parser("ope", parents=[common],
                       help="extract singular OPE coefficients of a field pair")
    o.add_argument("a", help=f"field name ({', '.join(FIELD_NAMES)}) or JSON AST")
    o.add_argument("b", help="field name or JSON AST")
    o.add_argument("--orders", default="", metavar="N1,N2,...",
                   help="pole orders per point (default 2 each)")
    o.set_defaults(handler=_cmd_ope)

    f = sub.add_parser("pfd", parents=[common],
                       help="partial fractions of num/(z^a w^b prod (z - lam*w)^k)")
    f.add_argument("input", help="expression like '1/((z-w)(z+w))', or RatFrac JSON")
    f.set_defaults(handler=_cmd_pfd)

    b = sub.add_parser("bell", parents=[common],
                       help="partial exponential Bell polynomial B_{n,k}")
    b.add_argument("n", type=int)
    b.add_argument("k", type=int)
    b.set_defaults(handler=_cmd_bell)

    v = sub.add_parser("verify", parents=[common],
                       help="run a verification suite")
    v.add_argument("suite", help=f"one of: {', '.join(SUITES)}")
    v.set_defaults(handler=_cmd_verify)

    e = sub.add_parser("eval", parents=[common],
                       help="evaluate a field on a Fock-space vector")
    e.add_argument("field", help="field name or JSON AST")
    e.add_argument("--state", default="", metavar="N1,N2,...",
                   help="mode indices of the word applied to the vacuum")
    e.set_defaults(handler=_cmd_eval)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        payload, text, code = args.handler(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except LocalityError as e:
        print(f"error: not local: {e}", file=sys.stderr)
        return 2
    except WindowError as e:
        print(f"error: window too small: {e}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, TypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
