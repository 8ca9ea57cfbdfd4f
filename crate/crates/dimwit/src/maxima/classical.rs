//! Classical maxima of the witness: the largest |det| attainable by an n×n
//! matrix with entries in {0, 1}.
//!
//! Deterministic classical models produce probability matrices whose entries
//! are all 0 or 1, and the extremal witness values over such models are the
//! maximal determinants of binary matrices.  Known values up to n = 9 are
//! hard-coded together with matrices attaining them; an exhaustive search is
//! provided for n ≤ 5.

use serde::Serialize;

use crate::{Error, Result};

/// Maximal |det| of an n×n binary matrix, for n = 1..=9 (index n−1).
/// OEIS A003432.
pub const MAX_DET_BINARY: [i64; 9] = [1, 1, 2, 3, 5, 9, 32, 56, 144];

/// A square matrix with entries in {0, 1}, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BinaryMatrix {
    n: usize,
    bits: Vec<u8>,
}

impl BinaryMatrix {
    pub fn new(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NonSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, &b) in row.iter().enumerate() {
                if b > 1 {
                    return Err(Error::InvalidProbability {
                        i,
                        j,
                        value: f64::from(b),
                    });
                }
            }
        }
        Ok(Self {
            n,
            bits: rows.iter().flatten().copied().collect(),
        })
    }

    /// Builds an n×n matrix from per-row bitmasks; bit j of `masks[i]` is
    /// entry (i, j).
    fn from_masks(n: usize, masks: &[u32]) -> Self {
        let mut bits = Vec::with_capacity(n * n);
        for &m in masks {
            for j in 0..n {
                bits.push(((m >> j) & 1) as u8);
            }
        }
        Self { n, bits }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.bits[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.bits.chunks(self.n).map(<[u8]>::to_vec).collect()
    }

    /// Exact determinant via the Bareiss fraction-free elimination.
    pub fn det(&self) -> i64 {
        let n = self.n;
        let mut m: Vec<i64> = self.bits.iter().map(|&b| i64::from(b)).collect();
        let mut sign = 1i64;
        let mut prev = 1i64;
        for k in 0..n.saturating_sub(1) {
            if m[k * n + k] == 0 {
                let Some(r) = (k + 1..n).find(|&r| m[r * n + k] != 0) else {
                    return 0;
                };
                for j in 0..n {
                    m.swap(k * n + j, r * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[i * n + j] =
                        (m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j]) / prev;
                }
                m[i * n + k] = 0;
            }
            prev = m[k * n + k];
        }
        sign * m[n * n - 1]
    }

    /// The matrix reinterpreted as deterministic probabilities.
    pub fn to_probability_rows(&self) -> Vec<Vec<f64>> {
        self.bits
            .chunks(self.n)
            .map(|row| row.iter().map(|&b| f64::from(b)).collect())
            .collect()
    }
}

/// Exhaustive search for the maximal |det| over n×n binary matrices, n ≤ 5.
///
/// |det| is invariant under row permutations and vanishes whenever a row
/// repeats or is zero, so it suffices to scan strictly increasing tuples of
/// nonzero row bitmasks — C(2ⁿ−1, n) candidates instead of 2^(n²).
pub fn classical_max_det(n: usize) -> Result<(i64, BinaryMatrix)> {
    if n == 0 || n > 5 {
        return Err(Error::OutOfExhaustiveRange(n));
    }
    let num_masks = (1u32 << n) - 1;
    let mut combo: Vec<u32> = (1..=n as u32).collect();
    let mut best_val = 0i64;
    let mut best = BinaryMatrix::from_masks(n, &combo);
    loop {
        let candidate = BinaryMatrix::from_masks(n, &combo);
        let v = candidate.det().abs();
        if v > best_val {
            best_val = v;
            best = candidate;
        }
        // next strictly increasing tuple over 1..=num_masks
        let mut i = n;
        loop {
            if i == 0 {
                return Ok((best_val, best));
            }
            i -= 1;
            if combo[i] < num_masks - (n - 1 - i) as u32 {
                combo[i] += 1;
                for k in i + 1..n {
                    combo[k] = combo[k - 1] + 1;
                }
                break;
            }
        }
    }
}

/// The published maximal-determinant binary matrix for n = 1..=9.
pub fn table_matrix(n: usize) -> Result<BinaryMatrix> {
    let rows: &[&[u8]] = match n {
        1 => &[&[1]],
        2 => &[&[1, 0], &[0, 1]],
        3 => &[&[1, 0, 1], &[1, 1, 0], &[0, 1, 1]],
        4 => &[&[0, 1, 1, 1], &[1, 1, 0, 1], &[1, 0, 1, 1], &[1, 1, 1, 0]],
        5 => &[
            &[1, 0, 0, 1, 1],
            &[0, 1, 0, 1, 1],
            &[0, 0, 1, 1, 1],
            &[1, 1, 1, 0, 1],
            &[1, 1, 1, 1, 0],
        ],
        6 => &[
            &[1, 0, 0, 1, 1, 0],
            &[0, 1, 0, 0, 1, 1],
            &[1, 0, 1, 0, 0, 1],
            &[1, 1, 0, 1, 0, 0],
            &[0, 1, 1, 0, 1, 0],
            &[0, 0, 1, 1, 0, 1],
        ],
        7 => &[
            &[1, 0, 1, 0, 1, 0, 1],
            &[0, 1, 1, 0, 0, 1, 1],
            &[1, 1, 0, 0, 1, 1, 0],
            &[0, 0, 0, 1, 1, 1, 1],
            &[1, 0, 1, 1, 0, 1, 0],
            &[1, 1, 0, 1, 0, 0, 1],
            &[0, 1, 1, 1, 1, 0, 0],
        ],
        8 => &[
            &[1, 0, 1, 0, 0, 1, 1, 0],
            &[1, 1, 0, 1, 0, 0, 1, 1],
            &[1, 1, 1, 0, 1, 0, 0, 1],
            &[0, 1, 1, 1, 0, 1, 0, 0],
            &[0, 0, 1, 1, 1, 0, 1, 0],
            &[1, 0, 0, 1, 1, 1, 0, 1],
            &[0, 1, 0, 0, 1, 1, 1, 0],
            &[0, 0, 1, 0, 0, 1, 1, 1],
        ],
        9 => &[
            &[0, 1, 1, 1, 1, 1, 1, 0, 0],
            &[1, 0, 1, 1, 1, 1, 0, 1, 0],
            &[1, 1, 0, 1, 1, 0, 1, 1, 0],
            &[1, 1, 1, 0, 0, 1, 1, 1, 0],
            &[1, 1, 1, 0, 1, 0, 0, 0, 1],
            &[1, 1, 0, 1, 0, 1, 0, 0, 1],
            &[1, 0, 1, 1, 0, 0, 1, 0, 1],
            &[0, 1, 1, 1, 0, 0, 0, 1, 1],
            &[0, 0, 0, 0, 1, 1, 1, 1, 1],
        ],
        _ => return Err(Error::OutOfExhaustiveRange(n)),
    };
    let owned: Vec<Vec<u8>> = rows.iter().map(|r| r.to_vec()).collect();
    BinaryMatrix::new(&owned)
}

/// |det| of the hard-coded maximal matrix for n = 1..=9.
pub fn verify_table_matrix(n: usize) -> Result<i64> {
    Ok(table_matrix(n)?.det().abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn table_determinants_are_the_known_maxima() {
        for n in 1..=9 {
            assert_eq!(
                verify_table_matrix(n).unwrap(),
                MAX_DET_BINARY[n - 1],
                "n = {n}"
            );
        }
    }

    #[test]
    fn exhaustive_search_recovers_small_maxima() {
        for n in 1..=4 {
            let (v, m) = classical_max_det(n).unwrap();
            assert_eq!(v, MAX_DET_BINARY[n - 1], "n = {n}");
            assert_eq!(m.det().abs(), v);
        }
    }

    #[test]
    fn exhaustive_search_n5() {
        let (v, m) = classical_max_det(5).unwrap();
        assert_eq!(v, 5);
        assert_eq!(m.det().abs(), 5);
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert!(matches!(
            classical_max_det(6),
            Err(Error::OutOfExhaustiveRange(6))
        ));
        assert!(matches!(
            classical_max_det(0),
            Err(Error::OutOfExhaustiveRange(0))
        ));
        assert!(table_matrix(10).is_err());
    }

    #[test]
    fn rejects_non_binary_entries() {
        let err = BinaryMatrix::new(&[vec![0, 2], vec![1, 1]]).unwrap_err();
        assert!(matches!(err, Error::InvalidProbability { i: 0, j: 1, .. }));
        assert!(BinaryMatrix::new(&[vec![0, 1], vec![1]]).is_err());
    }

    #[test]
    fn probability_rows_round_trip() {
        let m = table_matrix(3).unwrap();
        assert_eq!(m.rows(), vec![vec![1, 0, 1], vec![1, 1, 0], vec![0, 1, 1]]);
        assert_eq!(m.to_probability_rows()[0], vec![1.0, 0.0, 1.0]);
        assert_eq!(m.get(1, 2), 0);
        assert_eq!(m.n(), 3);
    }

    proptest! {
        #[test]
        fn bareiss_agrees_with_float_determinant(
            n in 1usize..=6,
            seed in proptest::collection::vec(0u8..=1, 36),
        ) {
            let rows: Vec<Vec<u8>> = (0..n).map(|i| seed[i * n..(i + 1) * n].to_vec()).collect();
            let m = BinaryMatrix::new(&rows).unwrap();
            let float_rows = m.to_probability_rows();
            let numeric = crate::linalg::ComplexMatrix::from_real_rows(&float_rows)
                .determinant()
                .unwrap();
            prop_assert!((numeric.re - m.det() as f64).abs() < 1e-6);
            prop_assert!(numeric.im.abs() < 1e-12);
        }
    }
}
