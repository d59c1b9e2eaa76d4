//! Exact-arithmetic divisor invariants on algebraic surfaces.
//!
//! The crate models Néron–Severi lattices with complete negative-curve
//! catalogs, computes Zariski decompositions and piecewise-quadratic volume
//! profiles along rays `L - tE`, derives the thresholds `epsilon`, `eta`,
//! `tau`, the `S`-invariant and the fixed-part degree, and assembles them
//! into certified lower bounds for local stability thresholds together with
//! their equality-case classifications.
//!
//! Everything is computed over arbitrary-precision rationals; there is no
//! floating point anywhere in a computation path. All types are immutable
//! values after construction and all operations are pure functions, so
//! concurrent use needs no coordination.

pub mod concavity_lab;
pub mod delta_engine;
pub mod error;
pub mod linalg;
pub mod ns_lattice;
pub mod poly;
pub mod rat;
pub mod rayscan;
pub mod zariski;

pub use error::{Error, Result};
pub use rat::Rat;
