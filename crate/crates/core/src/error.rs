use crate::subset::SubsetId;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("number of generators p = {p} exceeds the supported maximum {max}")]
    UnsupportedP { p: u32, max: u32 },
    #[error("custom pair table: {0}")]
    CustomTable(String),
    #[error("exhaustive associativity check is infeasible for p = {p} (limit {max}); use sampled mode")]
    ExhaustiveInfeasible { p: u32, max: u32 },
    #[error("operation requires a standard signature")]
    StandardRequired,
    #[error("ideal split requires p ≡ 3 (mod 4), got p = {0}")]
    IdealSplitUnavailable(u32),
    #[error("mismatched operands: {0}")]
    Mismatch(String),
    #[error("block {block} violates its transpose constraint (residual {residual:.3e})")]
    BlockConstraint { block: SubsetId, residual: f64 },
    #[error("non-finite entries in input")]
    NonFinite,
    #[error("eigensolver failed to converge")]
    EigenFailed,
    #[error("characteristic-polynomial cross-check failed at coefficient {index} (|Δ| = {delta:.3e}, scale {scale:.3e})")]
    CharPolyCrossCheck { index: usize, delta: f64, scale: f64 },
    #[error("singular resolvent: {0}")]
    SingularResolvent(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("least-squares fit is ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("polynomial left the real-rooted domain: {0}")]
    OutsideDomain(String),
    #[error("coefficient SDE aborted at t = {t:.6}: {details}")]
    SdeAborted { t: f64, details: String },
}

pub type Result<T> = std::result::Result<T, Error>;
