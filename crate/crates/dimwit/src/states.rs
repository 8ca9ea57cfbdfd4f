//! Preparations and measurement effects.
//!
//! The demonstration uses five qubit preparations lying on the Viviani
//! curve, `a = −(sinα·cosα, sin²α, cosα)`: a nonplanar spherical curve whose
//! Bloch vectors span the full 3-space, so the 5×5 probability matrix
//! exhausts the rank available to a real qubit model.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::{ComplexMatrix, DEFAULT_TOL};
use crate::{circuit, Error, Result};

/// Curve parameters of the five preparations, in the order used throughout.
pub const VIVIANI_ANGLES: [f64; 5] = [
    FRAC_PI_4,
    -FRAC_PI_4,
    3.0 * FRAC_PI_4,
    -3.0 * FRAC_PI_4,
    0.0,
];

/// Real 3-vector `a` representing the qubit state `(1 + a·σ)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Density matrix: Hermitian, PSD, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    dim: usize,
    matrix: ComplexMatrix,
}

impl QuantumState {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState(format!(
                "{}x{} matrix is not square",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_hermitian(DEFAULT_TOL) {
            return Err(Error::InvalidState("not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > DEFAULT_TOL {
            return Err(Error::InvalidState(format!("trace = {tr} != 1")));
        }
        if !matrix.is_psd(DEFAULT_TOL) {
            return Err(Error::InvalidState("negative eigenvalue".into()));
        }
        Ok(QuantumState {
            dim: matrix.rows(),
            matrix,
        })
    }

    /// Pure state `|ψ⟩⟨ψ|` from a (not necessarily normalized) vector.
    pub fn from_vector(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let unit: Vec<Complex64> = psi.iter().map(|&z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&unit, &unit))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `Tr ρ²`; equals 1 exactly for pure states.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn is_real(&self, tol: f64) -> bool {
        let mut max_im: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                max_im = max_im.max(self.matrix[(i, j)].im.abs());
            }
        }
        max_im <= tol
    }
}

/// POVM element: Hermitian with spectrum in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Effect {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Effect {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidEffect(format!(
                "{}x{} matrix is not square",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_effect(DEFAULT_TOL) {
            return Err(Error::InvalidEffect(
                "not Hermitian with spectrum in [0,1]".into(),
            ));
        }
        Ok(Effect {
            dim: matrix.rows(),
            matrix,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Effect {
            dim,
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// `(1 + a·σ)/2`; rejects vectors leaving the Bloch ball.
pub fn bloch_to_density(a: BlochVector) -> Result<QuantumState> {
    let norm = a.norm();
    if norm > 1.0 + 1e-12 {
        return Err(Error::InvalidBloch { norm });
    }
    let [x, y, z] = a.0;
    let m = ComplexMatrix::from_rows(&[
        vec![
            Complex64::new((1.0 + z) / 2.0, 0.0),
            Complex64::new(x / 2.0, -y / 2.0),
        ],
        vec![
            Complex64::new(x / 2.0, y / 2.0),
            Complex64::new((1.0 - z) / 2.0, 0.0),
        ],
    ]);
    QuantumState::new(m)
}

pub fn viviani_bloch(alpha: f64) -> BlochVector {
    let (s, c) = alpha.sin_cos();
    BlochVector([-s * c, -s * s, -c])
}

/// Pure state on the Viviani curve at parameter `alpha`.
pub fn viviani_state(alpha: f64) -> QuantumState {
    bloch_to_density(viviani_bloch(alpha)).expect("Viviani Bloch vectors are unit")
}

/// The five demonstration preparations, `α ∈ {π/4, −π/4, 3π/4, −3π/4, 0}`.
pub fn viviani_set() -> Vec<QuantumState> {
    VIVIANI_ANGLES.iter().map(|&a| viviani_state(a)).collect()
}

/// The same states built the way the hardware prepares them: `S_α S |0⟩`.
pub fn state_from_gates(alpha: f64) -> QuantumState {
    let zero = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let psi = circuit::s_theta(alpha)
        .matrix
        .matvec(&circuit::s().matrix.matvec(&zero));
    QuantumState::from_vector(&psi).expect("gate product of unitaries is a unit vector")
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl MatrixRepr {
    fn pack(dim: usize, m: &ComplexMatrix) -> Self {
        MatrixRepr {
            dim,
            re: (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m[(i, j)].re).collect())
                .collect(),
            im: (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m[(i, j)].im).collect())
                .collect(),
        }
    }

    fn unpack(self) -> std::result::Result<ComplexMatrix, String> {
        let d = self.dim;
        let shape_ok = |grid: &Vec<Vec<f64>>| grid.len() == d && grid.iter().all(|r| r.len() == d);
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(format!("re/im grids do not match dim {d}"));
        }
        Ok(ComplexMatrix::from_fn(d, d, |i, j| {
            Complex64::new(self.re[i][j], self.im[i][j])
        }))
    }
}

impl Serialize for QuantumState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr::pack(self.dim, &self.matrix).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QuantumState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let m = MatrixRepr::deserialize(deserializer)?
            .unpack()
            .map_err(D::Error::custom)?;
        QuantumState::new(m).map_err(|e| D::Error::custom(e.to_string()))
    }
}

impl Serialize for Effect {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr::pack(self.dim, &self.matrix).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Effect {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let m = MatrixRepr::deserialize(deserializer)?
            .unpack()
            .map_err(D::Error::custom)?;
        Effect::new(m).map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn assert_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) {
        assert!(
            a.max_abs_diff(b) <= tol,
            "matrices differ by {}",
            a.max_abs_diff(b)
        );
    }

    #[test]
    fn bloch_poles_and_mixtures() {
        let up = bloch_to_density(BlochVector([0.0, 0.0, 1.0])).unwrap();
        assert!((up.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(up.matrix()[(1, 1)].norm() < 1e-15);

        let mixed = bloch_to_density(BlochVector([0.0, 0.0, 0.0])).unwrap();
        assert_close(
            mixed.matrix(),
            &ComplexMatrix::identity(2).scaled(Complex64::new(0.5, 0.0)),
            1e-15,
        );

        let plus = bloch_to_density(BlochVector([1.0, 0.0, 0.0])).unwrap();
        assert!((plus.matrix()[(0, 1)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bloch_rejects_outside_ball() {
        let err = bloch_to_density(BlochVector([0.8, 0.8, 0.0]));
        assert!(matches!(err, Err(Error::InvalidBloch { .. })));
    }

    #[test]
    fn viviani_fixed_points() {
        // α = 0 → south pole |1⟩⟨1|.
        let s = viviani_state(0.0);
        assert!((s.matrix()[(1, 1)].re - 1.0).abs() < 1e-14);

        let b = viviani_bloch(PI / 2.0);
        assert!((b.0[0]).abs() < 1e-15 && (b.0[1] + 1.0).abs() < 1e-15 && b.0[2].abs() < 1e-16);

        let b = viviani_bloch(FRAC_PI_4);
        assert!((b.0[0] + 0.5).abs() < 1e-15);
        assert!((b.0[1] + 0.5).abs() < 1e-15);
        assert!((b.0[2] + 2.0_f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn viviani_set_is_pure_and_spans_rank_3() {
        let set = viviani_set();
        assert_eq!(set.len(), 5);
        for s in &set {
            assert!((s.purity() - 1.0).abs() < 1e-12);
        }
        assert!((set[4].matrix()[(1, 1)].re - 1.0).abs() < 1e-14);

        // Second-moment matrix of the Bloch vectors must have full rank 3.
        let blochs: Vec<BlochVector> = VIVIANI_ANGLES.iter().map(|&a| viviani_bloch(a)).collect();
        let gram = ComplexMatrix::from_fn(3, 3, |i, j| {
            Complex64::new(blochs.iter().map(|b| b.0[i] * b.0[j]).sum(), 0.0)
        });
        let eigs = gram.hermitian_eigenvalues().unwrap();
        assert!(eigs[0] > 0.1, "smallest eigenvalue {} too small", eigs[0]);
    }

    #[test]
    fn gate_construction_matches_curve() {
        for &alpha in &VIVIANI_ANGLES {
            assert_close(
                state_from_gates(alpha).matrix(),
                viviani_state(alpha).matrix(),
                1e-10,
            );
        }
        // S² = −iX sends |0⟩ to −i|1⟩; the phase drops in the density matrix.
        let s = state_from_gates(0.0);
        assert!((s.matrix()[(1, 1)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn effect_validation() {
        assert!(Effect::new(ComplexMatrix::identity(4)).is_ok());
        let too_big = ComplexMatrix::identity(2).scaled(Complex64::new(2.0, 0.0));
        assert!(matches!(Effect::new(too_big), Err(Error::InvalidEffect(_))));
    }

    #[test]
    fn state_json_round_trip() {
        let s = viviani_state(FRAC_PI_4);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"dim\":2") && json.contains("\"re\"") && json.contains("\"im\""));
        let back: QuantumState = serde_json::from_str(&json).unwrap();
        assert_close(back.matrix(), s.matrix(), 1e-12);

        let bad = r#"{"dim":2,"re":[[2.0,0.0],[0.0,0.0]],"im":[[0.0,0.0],[0.0,0.0]]}"#;
        assert!(serde_json::from_str::<QuantumState>(bad).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_gate_and_curve_agree(alpha in -10.0..10.0f64) {
            let gate = state_from_gates(alpha);
            let curve = viviani_state(alpha);
            prop_assert!(gate.matrix().max_abs_diff(curve.matrix()) <= 1e-10);
            prop_assert!((gate.purity() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn prop_bloch_affine(x in -0.7..0.7f64, y in -0.7..0.7f64, lam in 0.0..1.0f64) {
            let z = (1.0 - x * x - y * y).max(0.0).sqrt();
            let a = BlochVector([x, y, z]);
            let scaled = BlochVector([lam * x, lam * y, lam * z]);
            let lhs = bloch_to_density(scaled).unwrap();
            let rho = bloch_to_density(a).unwrap();
            let rhs = &rho.matrix().scaled(Complex64::new(lam, 0.0))
                + &ComplexMatrix::identity(2).scaled(Complex64::new((1.0 - lam) / 2.0, 0.0));
            prop_assert!(lhs.matrix().max_abs_diff(&rhs) <= 1e-12);
        }
    }
}
