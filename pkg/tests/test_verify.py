"""Tests for the verification suites.

Each suite is run once at reduced parameters (small mode ranges and energy
cutoffs) and cached; the tests then interrogate the shared reports.  The
frozen witness strings below were produced by the engine and cross-checked
against independent mode computations in test_fields/test_fock.
"""

from __future__ import annotations

import functools
import json
from fractions import Fraction

import pytest

from vertexcalc.verify import FLAVORS, SUITES, Check, Report, run_suite

# Reduced parameters keeping every suite meaningful but fast.
_PARAMS = {
    "heisenberg-b": dict(mode_range=4, cutoff=Fraction(3)),
    "heisenberg-c": dict(mode_range=4, cutoff=Fraction(3)),
    "heisenberg-d": dict(mode_range=4, cutoff=Fraction(3)),
    "heisenberg-dn": dict(roots=3, mode_range=4, cutoff=Fraction(3)),
    "rep-b": dict(mode_range=2, cutoff=Fraction(3)),
    "rep-c": dict(mode_range=2, cutoff=Fraction(3)),
    "rep-d": dict(mode_range=2, cutoff=Fraction(3)),
    "tva-b": dict(cutoff=Fraction(2)),
    "tva-c": dict(cutoff=Fraction(2)),
    "tva-d": dict(cutoff=Fraction(2)),
    "dong-closure": dict(cutoff=Fraction(2), max_m=6),
    "wick": dict(cutoff=Fraction(2)),
    "li-appendix": dict(cutoff=Fraction(3)),
}


@functools.lru_cache(maxsize=None)
def _report(name: str) -> Report:
    return run_suite(name, **_PARAMS[name])


@pytest.mark.parametrize("name", SUITES)
def test_suite_passes(name):
    rep = _report(name)
    assert rep.suite == name
    assert rep.checks, "a suite must perform at least one check"
    failing = [c.desc for c in rep.checks if not c.ok]
    assert rep.ok and not failing, failing


def test_suite_registry_is_complete():
    assert SUITES == (
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
    assert set(_PARAMS) == set(SUITES)


def test_unknown_suite_rejected():
    with pytest.raises(ValueError):
        run_suite("no-such-suite")


def test_flavor_central_data():
    # kappa weights and central images of the three free-field flavors.
    assert set(FLAVORS) == {"b", "c", "d"}
    b, c, d = FLAVORS["b"], FLAVORS["c"], FLAVORS["d"]
    assert (b.central_weight, b.central_image) == (Fraction(1, 2), Fraction(1))
    assert (c.central_weight, c.central_image) == (Fraction(1), Fraction(-1, 2))
    assert (d.central_weight, d.central_image) == (Fraction(1, 2), Fraction(1))
    assert (b.spec_key, c.spec_key, d.spec_key) == ("B", "C", "D")


def test_heisenberg_witness_reports_kappa():
    rep = _report("heisenberg-b")
    witnesses = {c.desc: c.witness for c in rep.checks}
    bracket = [w for d, w in witnesses.items() if "kappa" in d]
    assert bracket and bracket[0] == "kappa = 1/2"


def test_dong_closure_witness_orders():
    # Locality orders of the generator triples: simple poles everywhere
    # except the h-h pair, which needs order 2.
    rep = _report("dong-closure")
    for check in rep.checks:
        if "generator triple" not in check.desc:
            continue
        orders = dict(
            part.strip().rsplit(": M=", 1) for part in check.witness.split(";")
        )
        for pair, m_text in orders.items():
            m = int(m_text)
            assert 1 <= m <= 2, (check.desc, pair, m)
            if pair.startswith("(h") and "h" in pair.split(",")[1]:
                assert m == 2, (check.desc, pair)


def test_tva_shift_grading_witnesses():
    # B twist: the (2,0) product of the generator with itself carries the
    # odd shift class; the D twist is entirely untwisted (shift 0).
    rep_b = _report("tva-b")
    grading_b = {
        c.desc: c.witness for c in rep_b.checks if "shift grading" in c.desc
    }
    assert grading_b["uniform shift grading (phib,phib)"] == "(2,0): s=[1]"

    rep_d = _report("tva-d")
    for check in rep_d.checks:
        if "shift grading" not in check.desc:
            continue
        classes = {
            part.strip().rsplit(": s=", 1)[1]
            for part in check.witness.split(";")
        }
        assert classes == {"[0]"}, (check.desc, check.witness)


def test_check_structure():
    rep = _report("wick")
    for check in rep.checks:
        assert isinstance(check, Check)
        assert isinstance(check.desc, str) and check.desc
        assert isinstance(check.ok, bool)
        assert isinstance(check.witness, str)


def test_report_ok_is_conjunction():
    rep = _report("tva-c")
    assert rep.ok == all(c.ok for c in rep.checks)
    # a single failing check must flip the aggregate
    broken = Report(
        suite=rep.suite,
        params=rep.params,
        checks=rep.checks + [Check("forced failure", False, "")],
    )
    assert not broken.ok


def test_report_json_shape_and_determinism():
    rep = _report("heisenberg-dn")
    d = rep.to_json()
    assert set(d) == {"suite", "params", "pass", "checks"}
    assert d["suite"] == "heisenberg-dn"
    assert d["pass"] is True
    # params are JSON-native: Fractions rendered as strings
    assert d["params"]["cutoff"] == "3"
    assert d["params"]["roots"] == 3
    for entry in d["checks"]:
        assert set(entry) == {"desc", "pass", "witness"}
    text = json.dumps(d, sort_keys=True)
    again = json.dumps(run_suite("heisenberg-dn", **_PARAMS["heisenberg-dn"]).to_json(), sort_keys=True)
    assert text == again
