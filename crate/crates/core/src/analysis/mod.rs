//! Sample-complexity quantities and numerical checks of the structural
//! lemmas behind them.

mod bounds;
mod delta;
mod mps;
mod verify;

pub use bounds::{delta_cm_upper_from_moments, lower_bound_card, Binding, LowerBoundCard, MomentBounds};
pub use delta::{
    best_response_state, chi2_master, closed_form_delta, delta_a_bracket, delta_game_gradient, delta_game_value,
    povm_as_ensemble, symmetric_relaxation, BracketOptions, DeltaBracket, DeltaKind, DeltaValue, MAX_BRACKET_SET,
};
pub use mps::{random_mps, MpsState, MPS_DENSE_LIMIT};
pub use verify::{
    random_memory_povm, run_suite, swap_statistic, verify_chi2_clifford, verify_mps_pauli_bound,
    verify_pauli_identities, verify_permutation_inequality, verify_swap_bound, PauliIdentityCheck, PermutationCheck,
    PermutationSum, SuiteCase, VerifySuite,
};
