"""Taylor, Laurent and Taylor-Laurent expansions in several complex points."""

from .contours import (
    CirclePiece,
    Contour,
    QuadratureResult,
    QuadratureSettings,
    cauchy_integral,
    default_contour,
    validate_contour,
)
from .errors import (
    ConditioningWarning,
    DomainError,
    ExpressionSyntaxError,
    GeometryError,
    LemniscateError,
    QuadratureError,
)
from .functions import (
    AnalyticFunction,
    Singularity,
    evaluate,
    jet_eval,
    parse_expression,
    parse_function,
    to_text,
)
from .jets import Jet
from .laurent import (
    LaurentExpansion,
    PoleProfile,
    TaylorLaurentExpansion,
    eval_laurent,
    eval_taylor_laurent,
    expand_laurent_cauchy,
    expand_laurent_poles,
    expand_taylor_laurent_cauchy,
    expand_taylor_laurent_poles,
    laurent_remainder_exact,
    principal_part_subtract,
)
from .oracles import (
    HermitePolynomial,
    hermite_interpolate,
    remainder_order_check,
    residue_coeffs_rational,
)
from .points import PointSet
from .regions import (
    RegionSpec,
    annulus_radii,
    annulus_region,
    boundary_sample,
    contains,
    dqp_parameters,
    lemniscate_radius,
    lemniscate_region,
    taylor_laurent_region,
    write_boundary_csv,
)
from .taylor import (
    BasisPolynomial,
    TaylorExpansion,
    basis_eval,
    coeff_cauchy,
    coeff_derivative,
    confluent_kernel_limit,
    eval_expansion,
    expand_taylor,
    h_kernel,
    remainder_exact,
)

__version__ = "0.1.0"
