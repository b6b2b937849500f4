"""specshift: spectral shift, inertia and Morse-index toolkit.

Finite-dimensional verification machinery for the lateral-perturbation
picture: the Morse index of an eigenvalue branch K -> lambda(S + K*OmegaK)
equals the spectral shift plus the Morse index of Omega.  Includes the
Hermitian inertia calculus (Schur complements, inertia additivity), the
analytic Hessian operator Q with finite-difference cross-checks, and the
magnetic-nodal correspondence on weighted graphs.
"""

from .backend import backend_name, set_backend
from .errors import (
    AmbiguousRank,
    BetaZero,
    BranchAmbiguity,
    DegenerateStart,
    DimensionMismatch,
    Disconnected,
    GapTooSmall,
    InvariantViolation,
    KernelConditionViolated,
    NoConvergence,
    NumericalError,
    ParseError,
    ResolventViolation,
    SimplicityViolated,
    SingularCongruence,
    ZeroEntry,
)
from .families import (
    demo_directions,
    demo_family,
    haynsworth_case,
    random_family,
    random_graph,
    random_hermitian,
    random_tree,
    random_unitary,
)
from .graphs import (
    FiedlerLevel,
    MagneticFrame,
    NodalReport,
    WeightedGraph,
    build_H,
    build_K_alpha,
    build_S,
    fiedler_check,
    flip_count,
    magnetic_H,
    nodal_report,
    spanning_tree,
)
from .inertia import (
    BlockPartition,
    HaynsworthReport,
    HermitianMatrix,
    Inertia,
    auto_tol,
    eig_herm,
    haynsworth_report,
    inertia,
    pinv,
    schur_complement,
    sylvester_conjugate,
    symmetrize,
)
from .lateral import (
    BranchPath,
    BranchSample,
    HessianReport,
    LateralDecomposition,
    PerturbationFamily,
    RestrictedHessian,
    assemble_H,
    branch_equation_solve,
    branch_track,
    decompose_K,
    fd_gradient,
    fd_hessian,
    hessian_Q,
    restricted_hessian,
    spectral_shift,
    switch_identity_residual,
)

__version__ = "0.1.0"
