//! # convex-order
//!
//! Decide the convex order between finitely supported probability measures on
//! ℝᵈ, with an explicit certificate either way, and cross-validate the verdict
//! through the 2-Wasserstein characterisation of the order.
//!
//! Two measures satisfy `μ ≤c ν` when `∫f dμ ≤ ∫f dν` for every convex `f`.
//! For finitely supported measures this is decidable exactly, and the decision
//! always comes with a checkable artifact:
//!
//! * **positive certificate** — a martingale coupling of `(μ, ν)`: a transport
//!   plan whose conditional barycenters fix every atom of `μ` (Strassen's
//!   theorem says one exists iff the order holds);
//! * **negative certificate** — a max-affine convex witness `f` with bounded
//!   slopes and `∫f dμ − ∫f dν > 0`.
//!
//! The two certificates are the two sides of a Farkas alternative: the
//! martingale coupling is a feasibility LP and the witness is its dual ray,
//! so exactly one of them exists (up to the declared tolerance band).
//!
//! The same verdict can be phrased through squared 2-Wasserstein distances:
//! `μ ≤c ν` holds iff
//!
//! ```text
//! W₂²(ν, ρ) − W₂²(μ, ρ) ≤ ∫|x|² dν − ∫|x|² dμ     for every measure ρ.
//! ```
//!
//! The [`theorem`] module enacts both directions of that equivalence on
//! concrete instances: the forward direction by gluing a martingale coupling
//! to an optimal transport plan and checking the resulting orthogonality and
//! Pythagoras identities, and the reverse direction by pushing `μ` forward
//! through the subgradients of a violating witness, which produces a single
//! adversarial `ρ` breaking the inequality by at least twice the witness gap.
//!
//! ## Modules
//!
//! | Module | What it does |
//! |--------|--------------|
//! | [`measure`] | finitely supported measures, couplings, JSON I/O |
//! | [`transport`] | exact discrete W₂² via a transportation network simplex |
//! | [`order`] | convex-order decision with martingale / witness certificates |
//! | [`theorem`] | inequality gap reports, gluing checks, adversarial ρ, Brenier check |
//! | [`genlab`] | seeded instance generators and an independent 1-D oracle |
//! | [`cli`] | the `convex-order` command line frontend |
//!
//! ## Quick start
//!
//! ```rust
//! use convex_order::measure::DiscreteMeasure;
//! use convex_order::order::{self, OrderVerdict};
//!
//! // μ = δ₀, ν = ½δ₋₁ + ½δ₁: a mean-preserving spread, so μ ≤c ν.
//! let mu = DiscreteMeasure::from_coords(1, &[&[0.0]], &[1.0]).unwrap();
//! let nu = DiscreteMeasure::from_coords(1, &[&[-1.0], &[1.0]], &[0.5, 0.5]).unwrap();
//!
//! match order::check(&mu, &nu).unwrap() {
//!     OrderVerdict::Ordered(cert) => {
//!         assert!(cert.barycenter_error() <= 1e-9);
//!     }
//!     OrderVerdict::NotOrdered(_) => unreachable!(),
//! }
//!
//! // Swapped, the order fails and the witness is (a shifted) f(x) = |x|.
//! let verdict = order::check(&nu, &mu).unwrap();
//! assert!(!verdict.is_ordered());
//! ```
//!
//! Runnable end-to-end walkthroughs live in `examples/`; see the README for
//! the catalogue.

use thiserror::Error;

pub mod cli;
pub mod genlab;
pub mod measure;
pub mod order;
mod simplex;
pub mod theorem;
pub mod transport;

pub use measure::{Coupling, DiscreteMeasure, Point};
pub use order::{MartingaleCertificate, OrderVerdict, WitnessFunction};
pub use theorem::GapReport;
pub use transport::TransportResult;

/// Error variants shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Two objects that must live in the same ℝᵈ do not.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Parallel lists (points vs. weights, atoms vs. images) differ in length.
    #[error("length mismatch: expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    /// A probability weight is negative.
    #[error("negative weight {weight} at atom {index}")]
    NegativeWeight { index: usize, weight: f64 },

    /// Weights do not sum to 1 and normalization was not requested.
    #[error("weights sum to {sum}, not 1 (within 1e-12); pass normalize to rescale")]
    NotNormalized { sum: f64 },

    /// All mass was removed during construction.
    #[error("measure has no atoms")]
    Empty,

    /// A coordinate or weight is NaN or infinite.
    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    /// A coupling fails its marginal or nonnegativity checks.
    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),

    /// A martingale certificate fails its marginal or barycenter checks.
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    /// A witness function fails convexity self-consistency, or its gap is not
    /// positive where a violation is required.
    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    /// An LP solver exceeded its iteration cap or returned an inconsistent
    /// basis. This signals a bug, not an expected condition on valid input.
    #[error("solver failure: {0}")]
    SolverFailure(String),

    /// The martingale LP and the witness LP disagree beyond the tolerance
    /// band, or a derived identity of the equivalence fails. Reported, never
    /// silently resolved.
    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
