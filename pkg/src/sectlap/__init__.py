"""sectlap: inversion of sectorial Laplace transforms by trapezoidal
quadrature on hyperbolic contours, with spectral-order parameter selection
and perturbation-aware error bounds."""

from ._backend import backend_name
from .contour import NodeSet, build_nodes, contour_derivative, contour_point
from .errmodel import (
    BoundFactors,
    ErrorBound,
    L,
    abs_propagation_term,
    apriori_bound,
    apriori_bound_raw,
    phi,
    phi_mu,
    phi_s,
    propagated_bound,
    q_factor,
)
from .quadrature import (
    EvaluationError,
    InversionResult,
    TransformEvaluator,
    apply_shift,
    invert_at,
    invert_grid,
    perturb_evaluator,
    value_norm,
    weight,
)
from .transforms import (
    CatalogEntry,
    catalog,
    exp_decay,
    fd_laplacian,
    inv_sqrt,
    mittag_leffler,
    mittag_leffler_series,
    resolvent_transform,
    t_exp_decay,
)
from .tuning import (
    AccuracyModel,
    ContourConfig,
    DerivedParams,
    Sectoriality,
    a_of_theta,
    a_s_of_theta,
    derive_params,
    eps_n,
    fallback_theta,
    optimal_theta,
    theta_objective,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyModel",
    "BoundFactors",
    "CatalogEntry",
    "ContourConfig",
    "DerivedParams",
    "ErrorBound",
    "EvaluationError",
    "InversionResult",
    "L",
    "NodeSet",
    "Sectoriality",
    "TransformEvaluator",
    "a_of_theta",
    "a_s_of_theta",
    "abs_propagation_term",
    "apply_shift",
    "apriori_bound",
    "apriori_bound_raw",
    "backend_name",
    "build_nodes",
    "catalog",
    "contour_derivative",
    "contour_point",
    "derive_params",
    "eps_n",
    "exp_decay",
    "fallback_theta",
    "fd_laplacian",
    "inv_sqrt",
    "invert_at",
    "invert_grid",
    "mittag_leffler",
    "mittag_leffler_series",
    "optimal_theta",
    "perturb_evaluator",
    "phi",
    "phi_mu",
    "phi_s",
    "propagated_bound",
    "q_factor",
    "resolvent_transform",
    "t_exp_decay",
    "theta_objective",
    "value_norm",
    "weight",
]
