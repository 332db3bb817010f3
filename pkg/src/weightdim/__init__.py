"""Exact toolkit for weighted Diophantine approximation on polynomial manifolds.

Computes the weighted Hausdorff-dimension lower bound for weighted
simultaneously approximable points on a manifold, reproduces the exponent
choice and mass transference step behind it, searches Dirichlet-type
witnesses, and checks covering claims on finite grids with exact arithmetic.
"""

__version__ = "0.1.0"

from .bounds import (  # noqa: E402
    BoundReport,
    ExponentSelection,
    blw_condition_holds,
    full_report,
    select_exponents,
    theorem1_bound,
    theorem1_per_index,
)
from .core import (  # noqa: E402
    DerivativeBounds,
    ManifoldSpec,
    Polynomial,
    RationalBox,
    WeightVector,
    derivative_bounds,
    eval_f,
    partials,
    validate_weights,
)
from .exact import PowerProduct  # noqa: E402
from .mtp import ExponentPair, candidate_levels, dimension_number, mtp_lower_bound, partition  # noqa: E402

__all__ = [
    "BoundReport",
    "DerivativeBounds",
    "ExponentPair",
    "ExponentSelection",
    "ManifoldSpec",
    "Polynomial",
    "PowerProduct",
    "RationalBox",
    "WeightVector",
    "blw_condition_holds",
    "candidate_levels",
    "derivative_bounds",
    "dimension_number",
    "eval_f",
    "full_report",
    "mtp_lower_bound",
    "partials",
    "partition",
    "select_exponents",
    "theorem1_bound",
    "theorem1_per_index",
    "validate_weights",
]
