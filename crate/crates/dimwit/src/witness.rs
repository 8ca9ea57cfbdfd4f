//! The null test: `W_n = det p` with adjugate-based error propagation.
//!
//! For `p_ij = Tr(M · A_i ⊗ B_j)` the determinant vanishes whenever the
//! preparations cannot span `n` linearly independent operators, so a
//! significant nonzero value falsifies the dimension hypothesis. Errors
//! propagate through the Laplace expansion `δW = Σ_kj δp_kj 𝒜_jk`, with
//! the adjugate computed from cofactors — `p` is singular by design, so
//! nothing here may ever invert it.

use serde::Serialize;

use crate::linalg::ComplexMatrix;
use crate::states::{Effect, QuantumState};
use crate::{Error, Result};

/// Tolerance for accepting ideal-model probabilities slightly outside [0,1].
pub const PROB_TOL: f64 = 1e-12;

/// Below this magnitude the adjugate counts as identically zero (rank
/// deficit ≥ 2) and the first-order error estimate is not reliable.
const ADJUGATE_VANISH_TOL: f64 = 1e-12;

/// A witness counts as a violation beyond this many standard deviations.
pub const DEFAULT_SIGMA_THRESHOLD: f64 = 6.0;

/// Real n×n matrix of outcome-0 probabilities, row `i` = preparation `A_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityMatrix {
    n: usize,
    p: Vec<f64>,
}

impl ProbabilityMatrix {
    /// Validates entries against `[−PROB_TOL, 1 + PROB_TOL]` and clamps the
    /// tolerated overshoot to `[0, 1]`; anything further out is an error,
    /// not a clamp.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut p = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                    context: "probability matrix row length",
                });
            }
            for (j, &value) in row.iter().enumerate() {
                if !(-PROB_TOL..=1.0 + PROB_TOL).contains(&value) {
                    return Err(Error::InvalidProbability { i, j, value });
                }
                p.push(value.clamp(0.0, 1.0));
            }
        }
        Ok(ProbabilityMatrix { n, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.p[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n, self.n, |i, j| {
            num_complex::Complex64::new(self.get(i, j), 0.0)
        })
    }
}

/// `p_ij = Tr(M · A_i ⊗ B_j)`, validated real and clamped to `[0, 1]`.
///
/// States and effect are valid by construction of their types; only the
/// dimensions need checking here. Cells accumulate in row-major order so
/// the result is reproducible bit for bit.
pub fn probability_matrix(
    m: &Effect,
    a: &[QuantumState],
    b: &[QuantumState],
) -> Result<ProbabilityMatrix> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: b.len(),
            context: "B preparation count",
        });
    }
    let da = a.first().map_or(0, QuantumState::dim);
    let db = b.first().map_or(0, QuantumState::dim);
    if a.iter().any(|s| s.dim() != da) || b.iter().any(|s| s.dim() != db) {
        return Err(Error::DimensionMismatch {
            expected: da,
            actual: 0,
            context: "preparations of unequal dimension",
        });
    }
    if m.dim() != da * db {
        return Err(Error::DimensionMismatch {
            expected: da * db,
            actual: m.dim(),
            context: "effect dimension vs A⊗B",
        });
    }

    let mut rows = Vec::with_capacity(n);
    for (i, ai) in a.iter().enumerate() {
        let mut row = Vec::with_capacity(n);
        for (j, bj) in b.iter().enumerate() {
            let k = ai.matrix().kron(bj.matrix());
            let dim = m.dim();
            let mut tr = num_complex::Complex64::new(0.0, 0.0);
            for r in 0..dim {
                for c in 0..dim {
                    tr += m.matrix()[(r, c)] * k[(c, r)];
                }
            }
            if tr.im.abs() > PROB_TOL {
                return Err(Error::InvalidProbability { i, j, value: tr.im });
            }
            row.push(tr.re);
        }
        rows.push(row);
    }
    ProbabilityMatrix::from_rows(&rows)
}

/// Determinant of a real row-major matrix: cofactor expansion for n ≤ 4,
/// LU with partial pivoting above.
pub(crate) fn det_real(n: usize, a: &[f64]) -> f64 {
    match n {
        0 => 1.0,
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        4 => {
            let mut det = 0.0;
            let mut minor = [0.0; 9];
            for col in 0..4 {
                let mut idx = 0;
                for i in 1..4 {
                    for j in 0..4 {
                        if j != col {
                            minor[idx] = a[i * 4 + j];
                            idx += 1;
                        }
                    }
                }
                let term = a[col] * det_real(3, &minor);
                det += if col % 2 == 0 { term } else { -term };
            }
            det
        }
        _ => {
            let mut m = a.to_vec();
            let mut det = 1.0;
            for k in 0..n {
                let mut piv = k;
                let mut best = m[k * n + k].abs();
                for i in k + 1..n {
                    if m[i * n + k].abs() > best {
                        best = m[i * n + k].abs();
                        piv = i;
                    }
                }
                if best == 0.0 {
                    return 0.0;
                }
                if piv != k {
                    for j in 0..n {
                        m.swap(k * n + j, piv * n + j);
                    }
                    det = -det;
                }
                let pivot = m[k * n + k];
                det *= pivot;
                for i in k + 1..n {
                    let f = m[i * n + k] / pivot;
                    for j in k + 1..n {
                        m[i * n + j] -= f * m[k * n + j];
                    }
                }
            }
            det
        }
    }
}

/// The witness `W_n = det p`, signed.
pub fn witness(p: &ProbabilityMatrix) -> f64 {
    det_real(p.n, &p.p)
}

/// Adjugate `𝒜` of `p` via cofactors: `𝒜_ji = (−1)^{i+j} det(minor_ij)`.
#[allow(clippy::needless_range_loop)] // transposed adj[j][i] writes
pub fn adjugate(p: &ProbabilityMatrix) -> Vec<Vec<f64>> {
    let n = p.n;
    if n == 1 {
        return vec![vec![1.0]];
    }
    let mut adj = vec![vec![0.0; n]; n];
    let mut minor = vec![0.0; (n - 1) * (n - 1)];
    for i in 0..n {
        for j in 0..n {
            let mut idx = 0;
            for r in 0..n {
                if r == i {
                    continue;
                }
                for c in 0..n {
                    if c == j {
                        continue;
                    }
                    minor[idx] = p.get(r, c);
                    idx += 1;
                }
            }
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            adj[j][i] = sign * det_real(n - 1, &minor);
        }
    }
    adj
}

/// Standard error of `W` after `N` shots per cell:
/// `sqrt(Σ_kj 𝒜²_jk · p_kj(1−p_kj) / N)`.
///
/// When the adjugate vanishes identically the rank deficit is ≥ 2, the
/// first-order term is blind, and this returns [`Error::UnreliableError`]
/// instead of a misleading 0 (second-order minors are out of scope).
#[allow(clippy::needless_range_loop)] // adj is read transposed
pub fn witness_stderr(p: &ProbabilityMatrix, shots_per_cell: u64) -> Result<f64> {
    assert!(shots_per_cell >= 1, "need at least one shot per cell");
    let adj = adjugate(p);
    let n = p.n;
    let max_adj = adj
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));
    if max_adj <= ADJUGATE_VANISH_TOL {
        return Err(Error::UnreliableError);
    }
    let mut var = 0.0;
    for k in 0..n {
        for j in 0..n {
            let pkj = p.get(k, j);
            var += adj[j][k] * adj[j][k] * pkj * (1.0 - pkj);
        }
    }
    Ok((var / shots_per_cell as f64).sqrt())
}

/// First-order witness shift `δW = Σ_kj 𝒜_jk · dp_kj` for a perturbation
/// `dp` of the probabilities.
pub fn witness_sensitivity(p: &ProbabilityMatrix, dp: &[Vec<f64>]) -> f64 {
    let n = p.n;
    assert!(
        dp.len() == n && dp.iter().all(|r| r.len() == n),
        "perturbation shape must match p"
    );
    let adj = adjugate(p);
    let mut shift = 0.0;
    for k in 0..n {
        for j in 0..n {
            shift += adj[j][k] * dp[k][j];
        }
    }
    shift
}

/// The model class whose rank bound the test probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Classical,
    QuantumReal,
    QuantumComplex,
}

/// Minimal `n` at which the witness is forced to zero for dimension `d`:
/// the rank bounds are `d` (classical), `d(d+1)/2` (quantum real) and `d²`
/// (quantum complex).
pub fn rank_threshold(d: usize, model: Model) -> usize {
    match model {
        Model::Classical => d + 1,
        Model::QuantumReal => d * (d + 1) / 2 + 1,
        Model::QuantumComplex => d * d + 1,
    }
}

/// Witness value with its finite-statistics error.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessResult {
    #[serde(rename = "W")]
    pub w: f64,
    pub stderr: f64,
    pub zscore: Option<f64>,
    pub n: usize,
    #[serde(rename = "N")]
    pub n_per_cell: u64,
    /// False when the adjugate vanished and `stderr` is meaningless.
    pub reliable: bool,
}

impl WitnessResult {
    /// Analytic result: `W = det p̂` with the binomial error formula.
    pub fn from_probabilities(p: &ProbabilityMatrix, shots_per_cell: u64) -> Self {
        let w = witness(p);
        let (stderr, reliable) = match witness_stderr(p, shots_per_cell) {
            Ok(s) => (s, true),
            Err(_) => (0.0, false),
        };
        WitnessResult {
            w,
            stderr,
            zscore: (stderr > 0.0).then(|| w.abs() / stderr),
            n: p.n,
            n_per_cell: shots_per_cell,
            reliable,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ConsistentWithNull,
    Violated,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::ConsistentWithNull => write!(f, "consistent-with-null"),
            Verdict::Violated => write!(f, "violated"),
        }
    }
}

/// Violated iff `|W| / stderr > sigma_threshold`.
///
/// A zero error bar with a nonzero witness (or an unreliable adjugate)
/// cannot support either verdict and propagates as an error.
pub fn dimension_verdict(result: &WitnessResult, sigma_threshold: f64) -> Result<Verdict> {
    if !result.reliable {
        return Err(Error::UnreliableError);
    }
    match result.zscore {
        Some(z) if z > sigma_threshold => Ok(Verdict::Violated),
        Some(_) => Ok(Verdict::ConsistentWithNull),
        None if result.w == 0.0 => Ok(Verdict::ConsistentWithNull),
        None => Err(Error::UnreliableError),
    }
}
