//! Instance generation, algorithm dispatch, run records, benchmark sweeps
//! and audit dispatch behind the command-line tool.

mod bench;
mod instance;
mod run;
mod verify;

pub use bench::{read_bench_csv, run_sweep, write_bench_csv, BenchRow, SweepSpec};
pub use instance::{floyd_warshall, Backend, Generator, Instance, InstanceSpec};
pub use run::{audit_outcome, execute, run_algorithm, Algorithm, AuditFlag, Outcome, RunRecord};
pub use verify::{verify, VerifyOutcome, VerifyTarget};

use crate::error::Error;

/// Process exit status for an error: 2 for anything wrong with the input
/// or arguments, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::QueryBudgetExceeded(_) | Error::OracleBudget { .. } | Error::CannotEmpty | Error::DegenerateSpace => 1,
        _ => 2,
    }
}
