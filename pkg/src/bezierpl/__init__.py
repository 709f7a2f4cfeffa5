"""Bézier midpoint subdivision, exterior-angle convergence and PL certificates."""

from .certification import (
    SimplicityCertificate,
    UnknotCertificate,
    Verdict,
    certify_simple,
    certify_unknotted,
    piece_angle_sum,
)
from .convergence_lab import (
    ConvergenceReport,
    fit_log2_slope,
    hausdorff_estimate,
    sweep_cos_defect,
    sweep_derivative_jumps,
    sweep_exterior_angles,
)
from .curve_core import (
    BezierCurve,
    RegularityReport,
    curvature_at,
    derivative_curve,
    evaluate,
    evaluate_many,
    regularity_check,
    second_derivative_curve,
    total_curvature_arclen,
    total_curvature_smooth,
)
from .pl_geometry import (
    AngleProfile,
    IntersectionReport,
    brute_force_self_intersection,
    derivative_jump,
    discrete_derivative,
    exterior_angles,
    pl_total_curvature,
    uniform_parametrization,
)
from .subdivision import (
    PLCurve,
    SubdivisionLevel,
    SubdivisionPiece,
    level_polyline,
    reconstruct_check,
    split_half,
    subdivide,
)

__version__ = "0.1.0"

__all__ = [
    "SimplicityCertificate",
    "UnknotCertificate",
    "Verdict",
    "certify_simple",
    "certify_unknotted",
    "piece_angle_sum",
    "ConvergenceReport",
    "fit_log2_slope",
    "hausdorff_estimate",
    "sweep_cos_defect",
    "sweep_derivative_jumps",
    "sweep_exterior_angles",
    "BezierCurve",
    "RegularityReport",
    "curvature_at",
    "derivative_curve",
    "evaluate",
    "evaluate_many",
    "regularity_check",
    "second_derivative_curve",
    "total_curvature_arclen",
    "total_curvature_smooth",
    "AngleProfile",
    "IntersectionReport",
    "brute_force_self_intersection",
    "derivative_jump",
    "discrete_derivative",
    "exterior_angles",
    "pl_total_curvature",
    "uniform_parametrization",
    "PLCurve",
    "SubdivisionLevel",
    "SubdivisionPiece",
    "level_polyline",
    "reconstruct_check",
    "split_half",
    "subdivide",
]
