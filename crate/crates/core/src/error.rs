//! Error taxonomy shared by the whole crate.
//!
//! `Input`, `Domain` and `Model` are caller-facing failures (bad file, class
//! outside the operation's domain, lattice that cannot support a complete
//! search). `Internal` marks a violated invariant that is supposed to be a
//! theorem; reaching it is a bug, and the CLI maps it to exit code 2.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: unparsable file, bad vector length, unknown builtin.
    #[error("input error: {0}")]
    Input(String),

    /// Valid data outside an operation's domain (non-ample class, non
    /// pseudo-effective divisor, Picard rank mismatch, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The surface model itself cannot support the request (wrong signature,
    /// unbounded enumeration region).
    #[error("model error: {0}")]
    Model(String),

    /// A proved identity failed in exact arithmetic. Always a bug.
    #[error("internal invariant violation: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
