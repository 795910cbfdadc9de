"""Multiqubit entanglement invariants: the n-tangle, I*, concurrences and residual entanglement."""
from .concurrence import (
    ConcurrenceReport,
    DensityMatrix,
    Factorization,
    NotAProduct,
    c_one_rest,
    density_from_pure,
    factor_one_rest,
    pair_concurrence,
    partial_measure_check,
    partial_trace,
    residual_tangle,
    result3_certificate,
    spin_flip,
    wootters_c,
)
from .errors import (
    BudgetExceededError,
    InvalidDensityMatrixError,
    NonConvergenceError,
    QubitCountError,
    StateSpecError,
)
from .invariants import (
    i_star,
    multiplicativity_check,
    n_tangle,
    n_tangle_fast,
    n_tangle_oracle,
    s0,
    s1,
    scalar_invariants,
    tau_prime,
    verify_reduction,
)
from .qstate import (
    QState,
    StateSpec,
    basis,
    dicke,
    from_spec,
    ghz,
    load_state,
    permute_qubits,
    random_pure,
    save_state,
    superposition,
    tensor,
    to_spec,
    w,
)
from .slocc import LocalOperatorSet, apply_local, covariance_check, random_invertible_set
