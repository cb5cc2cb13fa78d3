"""Brauer groups and genus-one fibrations of the quartic del Pezzo surfaces

    x0 x1 - x2 x3 = 0,   a0 x0^2 + a1 x1^2 + a2 x2^2 + a3 x3^2 + a4 x4^2 = 0

over Q, computed exactly over multiquadratic fields.
"""
from .brauer import (
    BrauerPresentation,
    BrOrder,
    NotAFour,
    PicardModel,
    brauer_presentations,
    classify_formula,
    complement_four,
    double_fours,
    enumerate_fours,
    h1_oracle,
    h1_order,
    picard_model,
    rationality_report,
    star_condition,
    ti_partition_check,
)
from .exactfield import (
    FactorizationIncomplete,
    FieldElement,
    RadicalBasis,
    ZeroInput,
    is_square_in_quadratic,
    set_factor_bound,
    squarefree_part,
)
from .fibration import (
    EllipticModel,
    GenusOnePencil,
    InapplicableTrivialBrauer,
    MixedConfiguration,
    TypeCheckFailed,
    build_pencil,
    contr_I4,
    elliptic_model,
    fibre_type_check,
    height,
    mw_report,
    projection_height,
    verticality,
)
from .galois import contractible_orbit_exists, orbits, splitting_field
from .surface import (
    Coefficients,
    LineConfiguration,
    LineLabel,
    NotSmooth,
    build_lines,
    closed_form_matrix,
    intersection_matrix,
    validate,
)

__version__ = "0.1.0"
