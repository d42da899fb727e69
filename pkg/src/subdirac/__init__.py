"""Submanifold Dirac operators, spin frames and Weierstrass data on sampled charts."""

from .clifford import (
    CliffordRep,
    SpinElement,
    build_clifford,
    extract_rotation,
    frame_spinors,
    gamma_of_form,
    iota_inclusion,
    phi_map,
    phi_map_inverse,
    spin_exp,
    spin_lift,
    spin_lift_field,
    tau_inclusion,
)
from .dirac import (
    DiracOperatorSpec,
    SpinorField,
    apply_dirac,
    build_curve_dirac,
    build_intrinsic_conformal_dirac,
    build_surface_dirac_E4,
    sa_transform_check,
)
from .geometry import (
    ConformalData,
    ImmersionChart,
    ShapeData,
    TubularMetric,
    conformal_data,
    induced_metric,
    list_shapes,
    make_chart,
    normal_frame,
    schrodinger_potential_E3,
    shape_data,
    tubular_metric,
)
from .weierstrass import (
    FrameVerification,
    ReconstructionResult,
    WeierstrassSpinors,
    fixed_frame_bilinears,
    reconstruct_immersion,
    spinors_from_immersion_E4,
    verify_weierstrass_frame,
    verify_zero_mode,
)

__version__ = "0.1.0"
