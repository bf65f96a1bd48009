//! Experiment harness around `friending-core`: pair sampling, the comparison
//! experiments, and CSV/JSON reports.

pub mod experiment;
pub mod pairs;
pub mod report;

pub use experiment::{run_experiment, Experiment, ExperimentConfig, PairRow, Status};
pub use pairs::{sample_pairs, PairSample};
pub use report::{write_csv, Summary};

use friending_core::Error;

/// Process exit code for a library error: 1 infeasible instance, 2 I/O or
/// parse failure, 3 invalid parameters.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Parse { .. } | Error::SelfLoop { .. } | Error::Normalization { .. } => 2,
        Error::InvalidInstance(_)
        | Error::PMaxTooSmall { .. }
        | Error::ZeroPmax { .. }
        | Error::InfeasibleCover { .. } => 1,
        Error::Contract(_)
        | Error::TooLargeForEnumeration { .. }
        | Error::Intractable(_)
        | Error::InvalidParameter(_)
        | Error::ParamSolve(_) => 3,
    }
}
