//! Circuit-based algebraic and semi-algebraic proof systems.

pub mod circuit;
pub mod ring;
pub mod pit;
pub mod transforms;
pub mod proof_ips;
pub mod proof_cps;
pub mod bitblast;
pub mod ratfunc_cert;
pub mod frontend;
