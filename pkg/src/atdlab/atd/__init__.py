from .twod import (
    GArgs2D,
    g_function_2d,
    g_inf_2d,
    leading_coeff_2d,
    ray_lhs_2d,
    rhs_audit_2d,
)
from .threed import (
    UnsupportedRegimeError,
    extract_leading_3d,
    f0_3d,
    f_combined_3d,
    leading_combination_3d,
)
from .ladder import (
    LadderResult,
    degeneracy_probe,
    hyperplane_witness,
    ladder_stage_value,
)
from .schedule import RelationVerdict, relation_check, tau_schedule
from .report import AtdReport

__all__ = [
    "GArgs2D",
    "g_function_2d",
    "g_inf_2d",
    "leading_coeff_2d",
    "ray_lhs_2d",
    "rhs_audit_2d",
    "UnsupportedRegimeError",
    "extract_leading_3d",
    "f0_3d",
    "f_combined_3d",
    "leading_combination_3d",
    "LadderResult",
    "degeneracy_probe",
    "hyperplane_witness",
    "ladder_stage_value",
    "RelationVerdict",
    "relation_check",
    "tau_schedule",
    "AtdReport",
]
