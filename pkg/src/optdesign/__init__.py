"""Optimal approximate designs for gamma regression with inverse link.

Local D- and IMSE-criteria, equivalence-theorem certification,
equivariant transfer of optimal designs between regions and parameters,
symmetry reduction through finite transformation groups, and
maximin-efficiency search over invariant design families.
"""

from .criteria import (
    Certificate,
    Criterion,
    EfficiencyReport,
    certify,
    criterion_value,
    d_homogeneous,
    d_sensitivity,
    d_value,
    efficiency,
    imse_sensitivity,
    imse_value,
    maximin_objective,
)
from .errors import OptDesignError
from .invariance import (
    OrbitPartition,
    TransformGroup,
    check_invariant_criterion,
    generate_group,
    invariant_design,
    orbits,
    symmetrize,
)
from .model import (
    Design,
    ModelSpec,
    WeightingMeasure,
    design_info,
    elemental_info,
    eval_basis,
    intensity,
    make_model,
    merged_design,
    sample_parameters,
    validate_beta,
    validate_info_matrix,
    weight_matrix_v,
)
from .optimize import (
    MaximinResult,
    OptimizeOptions,
    OptimizeResult,
    RegionLabel,
    batch_fixed_support_weights,
    classify_two_factor_region,
    equal_slopes_optimal_design,
    equal_slopes_params,
    gamma_grid,
    invariant_family_design,
    local_opt_design,
    local_opt_result,
    maximin_invariant,
    minimal_design,
    one_factor_imse_weights,
    one_factor_variant_measure,
    optimal_weights_fixed_support,
    zero_slope_optimal_weight,
)
from .region import Region
from .transforms import (
    AffinePointMap,
    TransformPair,
    compose_pairs,
    derive_q,
    design_image,
    identity_pair,
    inverse_pair,
    make_pair,
    named_transform,
    param_transform,
    transfer_optimal,
    transform_model,
    verify_info_equivariance,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
