pub mod cli;
pub mod error;
pub mod imfunc;
pub mod matcore;
pub mod monogamy;
pub mod permlemma;
pub mod qstate;
pub mod report;
pub mod search;
pub mod selftest;
pub mod specialcase;

pub use error::{Error, Result};
pub use matcore::ComplexMatrix;
pub use report::{InequalityReport, TAU_CHECK};
