//! Dense complex matrices for small dimensions (≤ ~32).
//!
//! Everything the witness needs lives here: Kronecker products,
//! determinants, adjugates, and Hermitian eigenvalues. The adjugate is
//! computed from cofactors, never via the inverse — the probability
//! matrices of interest satisfy det p = 0, where `p⁻¹` does not exist.

use num_complex::Complex64;

use crate::{Error, Result};

/// Absolute tolerance used by validity checks unless a caller overrides it.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        ComplexMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let complex: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Outer product `u v†`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| k * z).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols, "matvec length mismatch");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(&a, &b)| a * b).sum()
            })
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Kronecker product: entry `((i·b.rows + k), (j·b.cols + l)) = a[i,j]·b[k,l]`.
    pub fn kron(&self, b: &Self) -> Self {
        let mut out = Self::zeros(self.rows * b.rows, self.cols * b.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a_ij = self[(i, j)];
                for k in 0..b.rows {
                    for l in 0..b.cols {
                        out[(i * b.rows + k, j * b.cols + l)] = a_ij * b[(k, l)];
                    }
                }
            }
        }
        out
    }

    fn minor(&self, row: usize, col: usize) -> Self {
        let n = self.rows;
        let mut out = Self::zeros(n - 1, n - 1);
        let mut r = 0;
        for i in 0..n {
            if i == row {
                continue;
            }
            let mut c = 0;
            for j in 0..n {
                if j == col {
                    continue;
                }
                out[(r, c)] = self[(i, j)];
                c += 1;
            }
            r += 1;
        }
        out
    }

    /// Determinant: direct cofactor expansion for n ≤ 4 (exact structure at
    /// tiny sizes), LU with partial pivoting above.
    pub fn determinant(&self) -> Result<Complex64> {
        let n = self.require_square()?;
        if n == 0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        if n <= 4 {
            Ok(det_cofactor(n, &self.data))
        } else {
            Ok(self.det_lu())
        }
    }

    fn det_lu(&self) -> Complex64 {
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let mut piv = k;
            let mut best = a[k * n + k].norm_sqr();
            for i in k + 1..n {
                let mag = a[i * n + k].norm_sqr();
                if mag > best {
                    best = mag;
                    piv = i;
                }
            }
            if best == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                for j in k + 1..n {
                    let akj = a[k * n + j];
                    a[i * n + j] -= f * akj;
                }
            }
        }
        det
    }

    /// Adjugate (transposed cofactor matrix) via per-entry minors.
    ///
    /// Satisfies `m · adjugate(m) = det(m) · I`, and stays well defined when
    /// `det m = 0` — exactly the regime the witness lives in.
    pub fn adjugate(&self) -> Result<Self> {
        let n = self.require_square()?;
        if n == 1 {
            return Ok(Self::identity(1));
        }
        let mut adj = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let minor_det = self.minor(i, j).determinant()?;
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                adj[(j, i)] = minor_det * sign;
            }
        }
        Ok(adj)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        for i in 0..n {
            for j in i..n {
                if (self[(i, j)] - self[(j, i)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(tol)
            && self
                .hermitian_eigenvalues()
                .map(|eigs| eigs.iter().all(|&l| l >= -tol))
                .unwrap_or(false)
    }

    /// Effect check: Hermitian with spectrum inside `[−tol, 1 + tol]`.
    pub fn is_effect(&self, tol: f64) -> bool {
        self.is_hermitian(tol)
            && self
                .hermitian_eigenvalues()
                .map(|eigs| eigs.iter().all(|&l| l >= -tol && l <= 1.0 + tol))
                .unwrap_or(false)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let gram = &self.adjoint() * self;
        gram.max_abs_diff(&Self::identity(self.rows)) <= tol
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.hermitian_eigen()?.0)
    }

    /// Full Hermitian eigendecomposition by cyclic complex Jacobi rotations.
    ///
    /// Returns eigenvalues ascending and the unitary whose columns are the
    /// matching eigenvectors: `self ≈ V · diag(λ) · V†`. The input is
    /// symmetrized first, so slightly non-Hermitian numerical noise is
    /// tolerated.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        let n = self.require_square()?;
        let mut a: Vec<Complex64> = (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                (self[(i, j)] + self[(j, i)].conj()) * 0.5
            })
            .collect();
        let mut v = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            v[i * n + i] = Complex64::new(1.0, 0.0);
        }
        jacobi_hermitian(n, &mut a, &mut v);

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| a[x * n + x].re.total_cmp(&a[y * n + y].re));
        let eigs: Vec<f64> = order.iter().map(|&k| a[k * n + k].re).collect();
        let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[i * n + order[j]]);
        Ok((eigs, vectors))
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a_ik = self[(i, k)];
                if a_ik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a_ik * rhs[(k, j)];
                }
            }
        }
        out
    }
}

fn det_cofactor(n: usize, data: &[Complex64]) -> Complex64 {
    match n {
        1 => data[0],
        2 => data[0] * data[3] - data[1] * data[2],
        _ => {
            let mut det = Complex64::new(0.0, 0.0);
            let mut minor = vec![Complex64::new(0.0, 0.0); (n - 1) * (n - 1)];
            for col in 0..n {
                let mut idx = 0;
                for i in 1..n {
                    for j in 0..n {
                        if j != col {
                            minor[idx] = data[i * n + j];
                            idx += 1;
                        }
                    }
                }
                let term = data[col] * det_cofactor(n - 1, &minor);
                if col % 2 == 0 {
                    det += term;
                } else {
                    det -= term;
                }
            }
            det
        }
    }
}

/// In-place cyclic Jacobi for Hermitian `a` (row-major, length n²),
/// accumulating rotations into `v`. On exit `a` is diagonal to machine
/// precision and `v` holds the eigenvectors as columns.
pub(crate) fn jacobi_hermitian(n: usize, a: &mut [Complex64], v: &mut [Complex64]) {
    if n <= 1 {
        return;
    }
    let scale: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if scale == 0.0 {
        return;
    }
    let stop = (f64::EPSILON * scale).powi(2);
    for _sweep in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q].norm_sqr())
            .sum();
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let amag = apq.norm();
                if amag * amag <= stop / (n * n) as f64 {
                    continue;
                }
                let phase = apq / amag;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * amag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Unitary U = D·J with D = diag(1, e^{−iφ}) on the (p,q)
                // plane and J the Golub–Van Loan real rotation; zeroes a_pq.
                let u_qp = -s * phase.conj();
                let u_qq = c * phase.conj();
                for i in 0..n {
                    let aip = a[i * n + p];
                    let aiq = a[i * n + q];
                    a[i * n + p] = c * aip + u_qp * aiq;
                    a[i * n + q] = s * aip + u_qq * aiq;
                }
                for j in 0..n {
                    let apj = a[p * n + j];
                    let aqj = a[q * n + j];
                    a[p * n + j] = c * apj - s * phase * aqj;
                    a[q * n + j] = s * apj + c * phase * aqj;
                }
                a[p * n + q] = Complex64::new(0.0, 0.0);
                a[q * n + p] = Complex64::new(0.0, 0.0);
                a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = c * vip + u_qp * viq;
                    v[i * n + q] = s * vip + u_qq * viq;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));

        let p0 = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        let expected =
            ComplexMatrix::from_diag(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(p0.kron(&p0), expected);
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(
            ComplexMatrix::identity(5).determinant().unwrap(),
            c(1.0, 0.0)
        );
        let m3 = ComplexMatrix::from_real_rows(&[
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ]);
        assert!((m3.determinant().unwrap() - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn determinant_rejects_non_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            m.determinant(),
            Err(Error::NonSquare { rows: 2, cols: 3 })
        ));
        assert!(m.adjugate().is_err());
    }

    #[test]
    fn lu_and_cofactor_agree() {
        // 5x5 exercises the LU branch; compare against cofactor expansion.
        let m = ComplexMatrix::from_fn(5, 5, |i, j| {
            c(
                ((i * 5 + j) as f64 * 0.37).sin(),
                ((i + 2 * j) as f64 * 0.21).cos(),
            )
        });
        let lu = m.determinant().unwrap();
        let mut data = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                data.push(m[(i, j)]);
            }
        }
        let cof = det_cofactor(5, &data);
        assert!((lu - cof).norm() < 1e-12 * cof.norm().max(1.0));
    }

    #[test]
    fn adjugate_closed_forms() {
        let i3 = ComplexMatrix::identity(3);
        assert!(i3.adjugate().unwrap().max_abs_diff(&i3) < 1e-15);

        let d = ComplexMatrix::from_diag(&[c(2.0, 0.0), c(3.0, 0.0)]);
        let adj = d.adjugate().unwrap();
        let expected = ComplexMatrix::from_diag(&[c(3.0, 0.0), c(2.0, 0.0)]);
        assert!(adj.max_abs_diff(&expected) < 1e-15);

        let one = ComplexMatrix::from_real_rows(&[vec![7.0]]);
        assert_eq!(one.adjugate().unwrap(), ComplexMatrix::identity(1));
    }

    #[test]
    fn effect_checks() {
        let i2 = ComplexMatrix::identity(2);
        assert!(i2.is_effect(DEFAULT_TOL));
        assert!(!i2.scaled(c(2.0, 0.0)).is_effect(DEFAULT_TOL));
        let x = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(x.is_hermitian(1e-15));
        assert!(!x.is_psd(DEFAULT_TOL));
    }

    #[test]
    fn hermitian_eigen_known_spectra() {
        let x = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let eigs = x.hermitian_eigenvalues().unwrap();
        assert!((eigs[0] + 1.0).abs() < 1e-12 && (eigs[1] - 1.0).abs() < 1e-12);

        let y = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ]);
        let eigs = y.hermitian_eigenvalues().unwrap();
        assert!((eigs[0] + 1.0).abs() < 1e-12 && (eigs[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unitary_check() {
        let h = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]])
            .scaled(c(1.0 / 2.0_f64.sqrt(), 0.0));
        assert!(h.is_unitary(1e-12));
        assert!(
            !ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).is_unitary(1e-12)
        );
    }

    fn arb_complex() -> impl Strategy<Value = Complex64> {
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec(arb_complex(), n * n).prop_map(move |data| ComplexMatrix {
            rows: n,
            cols: n,
            data,
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn prop_adjugate_identity(n in 1usize..=5, seed in proptest::collection::vec(arb_complex(), 25)) {
            let m = ComplexMatrix::from_fn(n, n, |i, j| seed[i * 5 + j]);
            let adj = m.adjugate().unwrap();
            let det = m.determinant().unwrap();
            let prod = &m * &adj;
            let target = ComplexMatrix::identity(n).scaled(det);
            let scale = prod.max_abs().max(1.0);
            prop_assert!(prod.max_abs_diff(&target) <= 1e-10 * scale);
        }

        #[test]
        fn prop_det_kron(a in arb_matrix(2), b in arb_matrix(3)) {
            let (p, q) = (2, 3);
            let lhs = a.kron(&b).determinant().unwrap();
            let rhs = a.determinant().unwrap().powu(q as u32)
                * b.determinant().unwrap().powu(p as u32);
            prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
        }

        #[test]
        fn prop_kron_associative(a in arb_matrix(2), b in arb_matrix(2), c in arb_matrix(3)) {
            let lhs = a.kron(&b).kron(&c);
            let rhs = a.kron(&b.kron(&c));
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        }

        #[test]
        fn prop_hermitian_eigen_reconstructs(n in 1usize..=6, seed in proptest::collection::vec(arb_complex(), 36)) {
            let raw = ComplexMatrix::from_fn(n, n, |i, j| seed[i * 6 + j]);
            let herm = (&raw + &raw.adjoint()).scaled(Complex64::new(0.5, 0.0));
            let (eigs, v) = herm.hermitian_eigen().unwrap();
            prop_assert!(v.is_unitary(1e-9));
            let diag = ComplexMatrix::from_diag(
                &eigs.iter().map(|&l| Complex64::new(l, 0.0)).collect::<Vec<_>>(),
            );
            let rebuilt = &(&v * &diag) * &v.adjoint();
            prop_assert!(rebuilt.max_abs_diff(&herm) <= 1e-9 * herm.max_abs().max(1.0));
            prop_assert!(eigs.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
