"""Degrees of reduced principal symbols and bifurcation-set certificates.

The pipeline: a parametrised elliptic symbol (or a matrix map given directly)
is turned into a map ``sigma: S^q x S^(2n-1) -> GL(m, C)``, its degree is
computed as a normalised integral of ``tr((sigma^-1 d sigma)^(q+2n-1))`` on a
tensor quadrature grid, and the integer feeds mod-p / mod-2 criteria that
bound the dimension of the bifurcation set from below.
"""

from .certify import (
    BifurcationCertificate,
    HypothesisChecklist,
    best_bound,
    certify_nonorientable,
    certify_sw,
    certify_wu,
)
from .expr import Dual, ExprError, ExprSyntaxError, EvalError, eval_dual, evaluate, parse, to_source
from .forms import MaurerCartanFrame, frame, top_form, top_form_bruteforce
from .geometry import QuadratureGrid, build_product_grid, build_sphere_grid, sphere_area
from .integrate import (
    ConvergenceError,
    DegreeResult,
    chern_pairing,
    degree,
    degree_constant,
    odd_trace_integral,
    trace_constant,
)
from .problem import DocumentError, Problem
from .symbol import (
    BlockSum,
    Conjugated,
    DirectSigma,
    MatrixProduct,
    MultiIndex,
    ReducedSymbol,
    SingularSymbolError,
    SymbolFamily,
    ValidationReport,
    Variables,
    check_ellipticity,
    check_locality,
    reduce,
)

__version__ = "0.1.0"
