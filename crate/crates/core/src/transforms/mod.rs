//! Ring-level circuit passes.

pub mod lift;
pub mod split;
pub mod tau;

use crate::circuit::CircuitError;
use crate::ring::{RingError, RingTag};
use thiserror::Error;

pub use lift::{q_to_z_lift, LiftResult};
pub use split::{minus_normalize, SplitMode, SplitResult};
pub use tau::{int_gadget, pow2_gadget, pow_gadget, tau_gadget, TauKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("not supported over {0}")]
    RingUnsupported(RingTag),
    #[error("circuit is not constant-free")]
    NotConstantFree,
    #[error("expected a single output, found {0}")]
    OutputCount(usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Ring(#[from] RingError),
}
