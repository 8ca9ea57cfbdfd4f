//! Null dimension-witness toolkit for the prepare-and-prepare scenario.
//!
//! Two parties each prepare one of `n` states; a fixed binary measurement
//! yields outcome probabilities `p_ij = Tr(M · A_i ⊗ B_j)`. The witness
//! `W_n = det p` vanishes whenever the Hilbert-space dimension `d` is small
//! enough that the preparations cannot span `n` independent directions
//! (`d < n` classically, `d(d+1)/2 < n` for real quantum states, `d² < n`
//! in the complex case). A statistically significant `W_n ≠ 0` therefore
//! falsifies the dimension hypothesis.
//!
//! The crate covers the full workflow:
//!
//! - [`linalg`]: dense complex matrices (Kronecker, determinant, adjugate,
//!   Hermitian eigenvalues) sized for `dim ≤ 32`;
//! - [`states`]: Bloch vectors, density matrices, the Viviani-curve
//!   preparation set, and measurement effects;
//! - [`witness`]: probability-matrix assembly, the determinant witness,
//!   adjugate-based error propagation, and dimension verdicts;
//! - [`circuit`]: gate algebra and statevector simulation of the 3-qubit
//!   implementation, including ECR transpilation identities;
//! - [`maxima`]: classical maximal-determinant matrices, closed-form quantum
//!   optima, and a simulated-annealing search;
//! - [`experiment`]: binomial shot sampling, count-file I/O, and pooled vs
//!   per-job analysis.
//!
//! ```
//! use dimwit::circuit::simulated_probability_matrix;
//! use dimwit::witness::{rank_threshold, witness, Model};
//!
//! // Five preparations on a qubit: d² < n forces the witness to zero.
//! let p = simulated_probability_matrix(false);
//! assert!(witness(&p).abs() < 1e-12);
//! assert_eq!(rank_threshold(2, Model::QuantumComplex), 5);
//! ```

pub mod circuit;
pub mod experiment;
pub mod linalg;
pub mod maxima;
pub mod states;
pub mod witness;

use thiserror::Error;

/// Unified error type for all modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, operation requires a square matrix")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {actual} ({context})")]
    DimensionMismatch {
        expected: usize,
        actual: usize,
        context: &'static str,
    },

    #[error("Bloch vector has norm {norm:.6} > 1")]
    InvalidBloch { norm: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid effect: {0}")]
    InvalidEffect(String),

    #[error("probability out of range at ({i},{j}): {value}")]
    InvalidProbability { i: usize, j: usize, value: f64 },

    #[error("adjugate vanishes identically (rank deficit >= 2); error estimate unreliable")]
    UnreliableError,

    #[error("exhaustive search supports n <= 5, got n = {0}; use verify_table_matrix for 6..=9")]
    OutOfExhaustiveRange(usize),

    #[error("unknown closed-form case `{0}`")]
    UnknownCase(String),

    #[error("unsupported search space: n = {n}, d = {d}")]
    UnsupportedSearch { n: usize, d: usize },

    #[error("invalid annealing configuration: {0}")]
    InvalidConfig(String),

    #[error("dataset contains no jobs")]
    EmptyDataset,

    #[error("per-job analysis needs >= 2 jobs, got {0}; use pooled_analysis instead")]
    TooFewJobs(usize),

    #[error("job `{job_id}`: {reason}")]
    InvalidJob { job_id: String, reason: String },

    #[error("dataset parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
