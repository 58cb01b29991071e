//! Single-query quantum key recovery, the exact probabilities it achieves,
//! and classical baselines with the same oracles.

mod algorithm;
mod analytic;
mod classical;
mod decryption;
mod experiment;
mod randomness;

pub use algorithm::{bv_lrf_attack, OracleBudget};
pub use analytic::{
    binary_decryption_success_probability, brute_force_success, brute_force_success_fn, exact_success_probability,
    frodo_column_success_probability, ra_iid_bound, ra_iid_expected_success, MAX_ENUMERATION,
};
pub use classical::{ceil_log2, classical_dec_keyrec, classical_ra_keyrec, ClassicalRecovery};
pub use decryption::{attack_frodo, attack_pke, attack_ringlwe, attack_ske};
pub use experiment::{
    brute_force_for_key, run_trial, success_rate_experiment, trial_rng, wilson_interval, AttackKind, AttackParams,
    AttackReport, ColumnOutcome, ColumnStats, ExperimentSummary,
};
pub use randomness::{
    attack_ra_iid, attack_ra_shared_error, attack_randomness_access, IidErrorOracle, SharedErrorOracle,
};
