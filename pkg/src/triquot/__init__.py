"""triquot: exact cross-verification of the Verlinde / Quot / Segre triangle.

Three invariants of the moduli space of semistable bundles on a smooth
projective curve coincide: the Verlinde-type Euler characteristic
chi(M(r,d), Theta_r^ell (x) det* Theta_1), the virtual intersection number
int a_r^N over the Quot scheme Quot(C^n, r, d'), and the Segre number
int s(alpha_M).  This package computes all three in exact arithmetic, checks
every identity relating them (d-shift invariance, level-rank symmetry,
exponent consistency, integrality, polynomiality in the level), and exposes
the machinery on the command line.
"""

from .cyclotomic import (
    CycloElem,
    Rational,
    as_rational,
    as_rational_integer,
    cyclo_add,
    cyclo_conjugate,
    cyclo_inv,
    cyclo_mul,
    cyclo_pow,
    cyclo_root,
)
from .symcalc import (
    ChernData,
    FormalClass,
    GradedRing,
    ch_to_chern,
    chern_to_ch,
    jacobian_segre,
    proj_pushforward,
    rank_alpha_M,
    segre,
    twist,
    verify_eq7_chain,
)
from .quotvi import (
    CalibrationError,
    DegreeMatchError,
    VIConvention,
    VIInstance,
    calibrate,
    default_search_space,
    enumerate_subsets,
    vi_sum,
)
from .triangle import (
    DerivedParams,
    DNormalizationPolicy,
    KClassCurve,
    ModuliInput,
    TriangleReport,
    build_alpha,
    derive_params,
    fit_level_polynomial,
    segre_number,
    verify_triangle,
    verlinde_number,
)

__version__ = "0.1.0"
