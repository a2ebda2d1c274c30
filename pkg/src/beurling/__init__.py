"""Weighted Wiener-lemma numerics for matrix-valued Fourier series.

Weights on Z and R, convolution p-algebras with matrix coefficients,
symbol inversion on annuli and strips, and off-diagonal decay of inverses.
"""

from .errors import (
    BeurlingError,
    DimensionMismatchError,
    EstimateError,
    InvalidInputError,
    NotInvertibleOnCircle,
    NotInvertibleOnLine,
    PoleError,
    PreconditionError,
    SingularOperatorError,
    WindowError,
)
from .weights_z import (
    AmawReport,
    NuWeight,
    RhoPair,
    WeightZ,
    check_admissible,
    check_amaw,
    check_submultiplicative,
    construct_nu_p_gt_1,
    construct_nu_p_le_1,
    geometric_qsum,
    monotone_envelope,
    rho_bounds,
    subexp_domination_constant,
    weight_from_dict,
)
from .weights_r import (
    StripPair,
    WeightR,
    check_amaw_r,
    construct_nu_real_L1,
    construct_nu_real_Lp,
    envelope_r,
    rho_bounds_r,
    strip_qintegral,
    subexp_constant_r,
)
from .seq_algebra import MatSeq, PNormValue, Unitized, convolve, p_norm, unitize
from .annulus_fourier import (
    AnnulusReport,
    CircleGrid,
    eval_symbol,
    find_annulus,
    fourier_coefficients,
    invertibility_margin,
    symbol_on_grid,
)
from .wiener_engine import (
    InversionReport,
    invert_on_circle,
    invert_real_line,
    trend_verdict,
    verify_inverse_membership,
)
from .operator_decay import (
    BlockOperator,
    DecayProfile,
    decay_profile,
    diagonal_extract,
    inverse_decay_check,
    resolution_constants,
    symbol_of,
    symbol_to_operator,
)

__version__ = "0.1.0"
