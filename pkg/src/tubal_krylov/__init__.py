"""Krylov solvers for tensor equations under the T-product."""

from .errors import (
    BreakdownError,
    FormatError,
    NotInvertibleError,
    RankDeficiencyError,
    ShapeError,
    SingularSystemError,
    SizeGuardError,
    SymmetryError,
    TubalError,
)
from .problems import ProblemSpec, dense_reference_solve, gen_example1, gen_poisson3d, make_problem
from .tcore import (
    bcirc,
    fft_mode3,
    fold,
    frob_norm,
    identity_t,
    ifft_mode3,
    inner_t,
    tdiamond,
    tkron,
    tl2_norm,
    tprod,
    transpose_t,
    ttrace,
    tubal_rank,
    tube_inverse,
    tube_mul,
    tube_times,
    unfold,
    unit_tube,
)
from .tfactor import normalize, tqr_slicewise, tubal_back_substitution, tubal_global_qr
from .tkrylov import (
    SolveReport,
    projected_lsq,
    residual_estimate,
    ttg_gmres,
    ttg_golub_kahan,
    ttgk_solve,
    tubal_global_arnoldi,
)

__version__ = "0.1.0"
