//! Command-line surface: file formats, CNF input, instance generators and reports.

pub mod cli;
pub mod cnf;
pub mod files;
pub mod instance;
pub mod report;

pub use cnf::{cnf_ingest, parse_dimacs, Cnf, CnfMode};
pub use instance::{gen_instance, Family, Instance};
pub use report::{Report, Verdict, SCHEMA_VERSION};

use crate::bitblast::BitblastError;
use crate::circuit::CircuitError;
use crate::pit::PitError;
use crate::proof_cps::CpsError;
use crate::proof_ips::IpsError;
use crate::ratfunc_cert::QyError;
use crate::transforms::TransformError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FrontendError {
    #[error("{0}")]
    Io(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing {0}")]
    Missing(String),
    #[error("circuit block at line {line}: {source}")]
    Block { line: usize, source: CircuitError },
    #[error("expected a `{expected}` file, found `{found}`")]
    WrongKind { expected: String, found: String },
    #[error("DIMACS syntax error at line {0}")]
    DimacsSyntax(usize),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Pit(#[from] PitError),
    #[error(transparent)]
    Ips(#[from] IpsError),
    #[error(transparent)]
    Cps(#[from] CpsError),
    #[error(transparent)]
    Qy(#[from] QyError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Bitblast(#[from] BitblastError),
}

impl FrontendError {
    /// Unreadable or malformed input, as opposed to a rejected proof.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            FrontendError::Io(_)
                | FrontendError::Syntax { .. }
                | FrontendError::Missing(_)
                | FrontendError::Block { .. }
                | FrontendError::WrongKind { .. }
                | FrontendError::DimacsSyntax(_)
                | FrontendError::BadParams(_)
                | FrontendError::Circuit(_)
        )
    }
}
