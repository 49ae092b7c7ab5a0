//! Small-set vertex expansion (SSVE) toolkit: reduction to hypergraph small-set
//! expansion, an SoS-style SDP relaxation with conditioning, shifted-vector
//! preprocessing and Gaussian threshold rounding, plus exact brute-force
//! oracles, gap-instance generators, and Monte Carlo verifiers for the
//! quantitative lemmas the algorithm rests on.

pub mod gaussian;
pub mod generators;
pub mod graph;
pub mod hypergraph;
pub mod oracle;
pub mod pd;
pub mod reduce;
pub mod relax;
pub mod round;
pub mod sdp;
pub mod verify;

use thiserror::Error;

/// Unified error type for the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),
    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),
    #[error("zero-weight side")]
    ZeroWeightSide,
    #[error("CDF range: p={0} outside (0,1)")]
    CdfRange(f64),
    #[error("non-PSD correlation input: {0}")]
    NotPsd(String),
    #[error("oracle scale: {0}")]
    OracleScale(String),
    #[error("infeasible weight target: no subset with relative weight {delta} +- {tol}")]
    InfeasibleWeightTarget { delta: f64, tol: f64 },
    #[error("rollback precondition: {0}")]
    RollbackPrecondition(String),
    #[error("rollback guarantee violated: {0}")]
    RollbackGuarantee(String),
    #[error("degenerate conditioning: Pr[x_{i}={a}] = {p} below 1e-6")]
    DegenerateConditioning { i: usize, a: u8, p: f64 },
    #[error("solver did not converge: {0}")]
    SolverNonConvergence(String),
    #[error("relaxation: {0}")]
    Relaxation(String),
    #[error("no concentrated trial: none of {trials} rounding trials hit the weight window")]
    NoConcentratedTrial { trials: usize },
    #[error("premise violation in constructed instance: {0}")]
    PremiseViolation(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse: {0}")]
    Parse(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Denominator convention for expansion quantities. The introduction divides
/// by |S| while the abstract divides by min{|S|, |S^c|}; both appear in the
/// literature, so every report records which one was used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Denominator {
    /// Divide by the (weighted) size of S itself.
    SetSize,
    /// Divide by the smaller of the two sides.
    MinSide,
}

/// FNV-1a content hash used to tag reports with the instance they came from.
pub fn content_hash(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
