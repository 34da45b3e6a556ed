//! Certified bounds on the spectral radius of simple random walks on
//! surface groups.
//!
//! For the fundamental group of a closed orientable surface of genus `g ≥ 2`
//! with its standard generating set (`k = 4g` generators, one relator of
//! length `4g`), this crate computes:
//!
//! * closed-form lower bounds (regular-tree bound, with and without the
//!   girth correction) and upper bounds (combinatorial 1-form bound,
//!   spanning-forest bound, one-relator bound) — [`bounds`];
//! * the Poisson-kernel upper bound obtained by optimizing an exponent
//!   `ν ∈ [0,1]`, together with machine checks of every inequality the
//!   derivation rests on — [`poisson`];
//! * finite Cayley-ball certificates: vertex-type structure, 1-form row
//!   sums, and an explicit spanning forest of (4g−1)-regular trees —
//!   [`ball`] and [`forest`];
//! * exact closed-walk counts and a Dirichlet eigenvalue, the empirical
//!   lower bounds that every upper bound must clear — [`walks`].
//!
//! The `surface-walks` binary exposes all of this as subcommands and can
//! reproduce the reference table for `g = 2..10` (see [`report`]).
//!
//! Group elements are handled as words over indexed letters with Dehn
//! reduction and canonical geodesic representatives ([`words`]); all graph
//! data lives in flat, immutable, deterministic structures.

pub mod ball;
pub mod bounds;
pub mod forest;
pub mod poisson;
pub mod report;
pub mod walks;
pub mod words;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Genus outside the supported range.
    #[error("invalid genus {0}: supported range is 2..=10000")]
    InvalidGenus(u64),
    /// Degree or generator-count argument outside a bound's domain.
    #[error("invalid degree {0}: {1}")]
    InvalidDegree(u64, &'static str),
    /// Scalar parameter outside an operation's domain.
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// A presentation that the word machinery cannot support.
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    /// Ball radius too small for the requested certification.
    #[error("insufficient radius {radius}: {needed}")]
    InsufficientRadius { radius: usize, needed: &'static str },
    /// Vertex cap exceeded while building a ball.
    #[error("vertex cap {cap} exceeded while building the radius-{radius} ball")]
    VertexCapExceeded { cap: usize, radius: usize },
    /// Iterative method failed to converge.
    #[error("no convergence after {iterations} iterations; last value {last}")]
    ConvergenceFailed { iterations: usize, last: f64 },
    /// An internal identity or invariant failed — signals a bug.
    #[error("internal consistency failure: {0}")]
    Internal(String),
    /// Forest construction could not complete (contradicts the geometry).
    #[error("forest construction failure: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
