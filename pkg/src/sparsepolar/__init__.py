"""Certify and demonstrate sparse recovery by basis pursuit and greedy pursuit
using the polar polytope of a doubled atom set."""

from .certificates import (
    CertificateReport,
    Representation,
    brute_force_l1_oracle,
    certify,
    check_erc,
    check_erc_by_sign_enumeration,
    check_fuchs,
    check_fuchs_corollary,
    coherence,
    l0_unique,
)
from .errors import (
    GuardExceededError,
    InconsistentCertificateError,
    InfeasibleError,
    SparsePolarError,
    UnboundedError,
    UnboundedPolarError,
)
from .lp import LpSolution, StandardLp, solve_margin_lp, solve_standard
from .numerics import DEFAULT_TOL, Tolerances, pseudoinverse, rank, solve_least_squares
from .polytope import (
    AtomMatrix,
    DoubledMatrix,
    FaceQueryResult,
    PolarVertex,
    SignedSupport,
    cone_contains,
    double,
    enumerate_polar_vertices,
    face_exists,
    is_k_neighbourly,
    spark,
)
from .pursuit import (
    BpResult,
    PursuitStep,
    PursuitTrace,
    basis_pursuit,
    basis_pursuit_brute,
    mp,
    omp,
    omp_eventual,
    recover_primal_from_dual,
)

__version__ = "0.1.0"
