//! Driver for the `equiblow` command: model files, reports, subcommands and
//! the acceptance suite.

pub mod commands;
pub mod criteria;
pub mod model;
pub mod report;

use equiblow_core::Error;

pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_THEOREM: i32 = 5;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => EXIT_PARSE,
        Error::Precondition(_) | Error::EmptyBlowup | Error::Unsupported(_) => EXIT_PRECONDITION,
        Error::Budget(_) => EXIT_BUDGET,
        Error::TheoremCheck { .. } => EXIT_THEOREM,
    }
}
