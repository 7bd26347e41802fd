"""Exact calculus of multi-point local formal distributions.

Layers, lowest first:

- ``scalar``: exact coefficients — rationals and cyclotomic integers adjoined
  a primitive root of unity, with canonical string forms.
- ``series``: windowed formal distributions in one and two variables with
  certified exponent windows, delta expansions, and one-sided geometric
  expansions of inverse powers.
- ``deltacalc``: N-point locality, decomposition into delta derivatives with
  Laurent-polynomial coefficients, Bell polynomials, and exact two-variable
  partial fractions.
- ``fock``: mode algebras (CAR/CCR with chosen kernels) acting on exact
  Fock-space vectors.
- ``fields``: field expressions over a mode algebra — generators, normal
  products, dilations, derivatives — their evaluation, OPE extraction, and
  the generalized residue products indexed by point and pole order.
- ``verify``: end-to-end verification suites (Heisenberg mode algebras,
  infinite-matrix Lie algebra representations, twisted-locality axioms,
  closure under residue products, Wick-type commutators, appendix products).
- ``cli``: the ``vertexcalc`` command-line frontend.
"""

from fractions import Fraction

from .deltacalc import (
    DeltaSum,
    LocalityCertificate,
    LocalityError,
    PartialFractionForm,
    PointSet,
    RatFrac,
    bell_polynomial,
    decompose,
    expand_ratfrac,
    is_local,
    partial_fractions,
)
from .fields import (
    IDENT,
    PHI_B,
    PHI_C,
    PHI_D,
    Derivative,
    Dilate,
    FieldExpr,
    GeneratorField,
    LinComb,
    NormProd2,
    OpeTable,
    ProductJK,
    contraction,
    eval_field,
    field_from_json,
    field_to_json,
    h_field_b,
    h_field_c,
    h_field_d,
    h_field_d_order,
    locality_check,
    normprod_2var,
    ope_extract,
    product_jk,
    standard_field,
)
from .fock import SPECS, FockVector, ModeAlgebraSpec, apply_mode, basis
from .scalar import CycScalar, root_power, scalar_from_str, scalar_str
from .series import (
    BiDist,
    ExpansionDir,
    LaurentPoly,
    MultiDist,
    Window,
    WindowError,
    WindowSeries,
    bidist_mul,
    delta_expansion,
    expand_inverse_power,
    laurent_from_str,
    laurent_str,
    parse_window,
)
from .verify import Report, run_suite

__version__ = "0.1.0"

__all__ = [
    "BiDist",
    "CycScalar",
    "DeltaSum",
    "Derivative",
    "Dilate",
    "ExpansionDir",
    "FieldExpr",
    "FockVector",
    "Fraction",
    "GeneratorField",
    "IDENT",
    "LaurentPoly",
    "LinComb",
    "LocalityCertificate",
    "LocalityError",
    "ModeAlgebraSpec",
    "MultiDist",
    "NormProd2",
    "OpeTable",
    "PHI_B",
    "PHI_C",
    "PHI_D",
    "PartialFractionForm",
    "PointSet",
    "ProductJK",
    "RatFrac",
    "Report",
    "SPECS",
    "Window",
    "WindowError",
    "WindowSeries",
    "apply_mode",
    "basis",
    "bell_polynomial",
    "bidist_mul",
    "contraction",
    "decompose",
    "delta_expansion",
    "eval_field",
    "expand_inverse_power",
    "expand_ratfrac",
    "field_from_json",
    "field_to_json",
    "h_field_b",
    "h_field_c",
    "h_field_d",
    "h_field_d_order",
    "is_local",
    "laurent_from_str",
    "laurent_str",
    "locality_check",
    "normprod_2var",
    "ope_extract",
    "parse_window",
    "partial_fractions",
    "product_jk",
    "root_power",
    "run_suite",
    "scalar_from_str",
    "scalar_str",
    "standard_field",
    "__version__",
]
