//! Experiment plumbing behind the command-line front end: validated
//! experiment descriptions, single runs, parameter sweeps, classical
//! baselines, and the verification suite.

mod report;
mod spec;
mod verify;

pub use report::{
    b_column, format_prob, key_fixture, parse_csv, round_prob, rows_json, run_attack, run_baseline, run_sweep,
    summary_json, sweep_row, write_csv, AttackOutput, SweepRow, CSV_COLUMNS,
};
pub use spec::{attack_params, parse_list, parse_schemes, ExperimentSpec, Format, SchemeOptions, SweepSpec};
pub use verify::{closed_form_matches_enumeration, run_verify, CheckResult, VerifyReport, VERIFY_SOFT_LIMIT_SECS};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Process exit code for an error raised while setting up or running an
/// experiment.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Resource { .. } | Error::EnumerationTooLarge(_) => EXIT_RESOURCE,
        _ => EXIT_USAGE,
    }
}

/// The classical counterpart run by `baseline` for a scheme.
pub fn baseline_kind(kind: crate::attacks::AttackKind) -> crate::Result<crate::attacks::AttackKind> {
    use crate::attacks::AttackKind::*;
    match kind {
        Ske | Pke | ClassicalDec => Ok(ClassicalDec),
        RaShared | RaIid | ClassicalRa => Ok(ClassicalRa),
        other => Err(Error::Parameter(format!(
            "no classical baseline for `{other}` (use ske, pke, ra-shared, ra-iid or a classical attack)"
        ))),
    }
}
