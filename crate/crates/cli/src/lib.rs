//! Verdict pipelines and report plumbing behind the `fano-cli` binary.

pub mod query;
pub mod report;

pub use query::{
    default_eps_table, hypersurface_verdict, k3_tau_bound, threefold_verdict, ChainCheck,
    HypersurfaceQuery, K3TauReport, Obligation, ThreefoldQuery, Verdict, VerdictStatus,
};
