//! Random symmetric matrices over Clifford algebras.
//!
//! This crate builds real symmetric block matrices from Clifford sign
//! structures, samples them under the natural Euclidean metric, simulates
//! the associated matrix diffusions (Brownian, Ornstein-Uhlenbeck,
//! spherical), and numerically verifies the closed-form action of the
//! generators on characteristic polynomials — root multiplicities,
//! spectral densities and the period-8 structure table included.
//!
//! Module map:
//! - [`subset`], [`signature`]: exact sign combinatorics `(A|B)` on subsets
//!   of the generator set.
//! - [`matrix`]: block matrices `{M^A}`, their real realization `φ(M)`, and
//!   Gaussian sampling under the block metric.
//! - [`poly`]: monic polynomials, characteristic polynomials, resultants,
//!   discriminants, root-power extraction and spectrum clustering.
//! - [`identities`]: numeric assembly of `Γ(P(X), P(Y))` and `L(P(X))`
//!   against their closed forms, coefficient fitting and the multiplicity
//!   equation.
//! - [`simulate`]: Euler–Maruyama simulation of the matrix- and
//!   coefficient-level processes.
//! - [`spectral`]: target spectral densities, an MCMC oracle sampler,
//!   two-sample tests, mean-characteristic-polynomial checks and the
//!   period-8 structure table.

mod dd;
pub mod error;
pub mod identities;
pub mod matrix;
pub mod poly;
pub mod rng;
pub mod signature;
pub mod simulate;
pub mod spectral;
pub mod subset;

pub use error::{Error, Result};
pub use matrix::{CliffordMatrix, EnsembleConfig, EnsembleProcess, RealizedMatrix};
pub use poly::{MonicPolynomial, Poly, SpectrumSummary};
pub use signature::{
    predicted_multiplicity, AssociativityMode, CliffordSignature, FieldCase, SignatureKind,
};
pub use subset::SubsetId;
