"""Concrete constructions: C₀, C_∞, K_∞, homogeneous Cantor sets, sets with
only ``{0}`` as tangent, the globally rich set A and Whitney gluing."""

from .c0 import C0Generator, C0Params, build_c0, c0_tangent_profile, check_c0, default_c0_params
from .cantor import (
    CantorGenerator,
    CantorParams,
    InvalidCantor,
    cantor_build,
    cantor_dimension,
    cantor_params,
    check_alignment,
    gap_ratio,
    power_family,
    ternary,
)
from .common import ConditionViolation, ScheduleViolation, kplus_patterns
from .global_rich import (
    CompositeGenerator,
    GlobalGenerator,
    GlobalParams,
    check_global,
    default_global_params,
    global_rich_build,
    photograph_profile,
)
from .ifs import (
    IfsGenerator,
    IfsSystem,
    build_cinf,
    build_kinf,
    check_disjoint_cylinders,
    finitely_generated_zoom,
    kinf_cover_sum,
    make_ifs,
    predicted_k,
    self_similar_zoom_check,
)
from .moran import MoranResult, NoConvergence, geometric_tail, moran_dimension
from .whitney import DecompositionBudget, WhitneyCube, WhitneyGlue, check_sandwich, whitney_cubes, whitney_glue
from .zero_tangent import UnionGenerator, zero_tangent_construction, zero_tangent_scan

__all__ = [name for name in dir() if not name.startswith("_")]
