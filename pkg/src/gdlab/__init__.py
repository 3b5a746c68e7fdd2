"""gdlab: a desk-scale laboratory for multi-loss gradient dynamics.

Constructed two-player games whose only critical point is a strict maximum
(or a deformed minimum), the ten standard gradient-based update maps, batch
trajectory classification, and exact-arithmetic certificates that the
critical points are unique.
"""

from .algorithms import (
    ALGO_ORDER,
    Algo,
    AlgoState,
    HyperParams,
    SingularMatrixError,
    g_vector,
    sga_lambda,
    sos_p,
    step,
    update_jacobian_fd,
)
from .certify import (
    BiPoly,
    CertReport,
    DivisionByZeroPolyError,
    RationalPoly,
    UnsupportedGameError,
    certify_unique_critical,
    count_real_roots,
    critical_point_system,
    isolate_roots,
    poly_divrem,
    refine_interval,
    squarefree,
    sturm_sequence,
    sylvester_resultant_y,
)
from .dynamics import (
    STD_NORMAL,
    InitSpec,
    Outcome,
    OutcomeKind,
    RunConfig,
    RunRecord,
    SweepResult,
    Trajectory,
    classify_outcome,
    fixed,
    run,
    run_seed,
    sample_init,
    sweep,
    uniform_box,
    write_sweep_csv,
    write_trajectory_csv,
)
from .games import (
    CONVEX_QUAD,
    MARKET,
    ZERO_SUM,
    CriticalClass,
    DefinitenessReport,
    GameEval,
    GameId,
    Matrix2,
    Params,
    classify_critical_point,
    classify_definiteness,
    decompose_blocks,
    decompose_sym_antisym,
    definiteness_implications_ok,
    eig_real_parts,
    eval_grad,
    eval_hessian,
    eval_losses,
    evaluate,
    fd_grad,
    fd_hessian,
    market_sigma,
)
from .rng import Xoshiro256StarStar, splitmix64, stream_for_run

__version__ = "0.1.0"
