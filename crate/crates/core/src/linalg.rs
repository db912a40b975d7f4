//! Dense real-symmetric linear algebra: matrices, spectral decompositions,
//! Kronecker powers and compensated summation.
//!
//! The eigensolver itself is nalgebra's Householder tridiagonalization followed
//! by implicit symmetric QR. This module adds the contract on top: ascending
//! eigenvalues, verified orthonormality and reconstruction, and a diagnostic
//! error carrying the residual when the iteration cap is hit.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{invalid, Error, Result};

/// Default acceptance threshold for the spectral invariants.
pub const DEFAULT_EIG_TOL: f64 = 1e-12;

/// Largest matrix dimension accepted by [`eigendecompose`].
pub const MAX_DENSE_DIM: usize = 4096;

/// Eigensolver sweeps per matrix row before giving up.
const SWEEPS: usize = 100;

/// A real symmetric matrix. Construction always enforces exact symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    entries: DMatrix<f64>,
}

impl SymmetricMatrix {
    /// Builds a matrix from its upper triangle; `f(i, j)` is called for `i <= j`.
    pub fn from_upper(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            for i in 0..=j {
                let v = f(i, j);
                entries[(i, j)] = v;
                entries[(j, i)] = v;
            }
        }
        Self { entries }
    }

    /// Symmetrizes an arbitrary square matrix as `(A + Aᵀ) / 2`.
    pub fn symmetrize(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
        }
        let mut entries = m;
        let n = entries.nrows();
        for j in 0..n {
            for i in 0..j {
                let v = 0.5 * (entries[(i, j)] + entries[(j, i)]);
                entries[(i, j)] = v;
                entries[(j, i)] = v;
            }
        }
        Ok(Self { entries })
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self { entries: DMatrix::from_diagonal(&DVector::from_column_slice(diag)) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: DMatrix::identity(dim, dim) }
    }

    /// Wraps a matrix the caller guarantees to be exactly symmetric.
    pub(crate) fn from_symmetric_unchecked(entries: DMatrix<f64>) -> Self {
        debug_assert!(entries.is_square());
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.amax()
    }

    pub fn scale(&self, k: f64) -> Self {
        Self { entries: &self.entries * k }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &SymmetricMatrix, b: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(Self { entries: &self.entries * a + &other.entries * b })
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|i| self.entries.row(i).iter().copied().collect()).collect()
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    /// Assembles a decomposition, sorting the pairs by ascending eigenvalue.
    /// The columns of `eigenvectors` must be orthonormal.
    pub fn new(eigenvalues: Vec<f64>, eigenvectors: DMatrix<f64>) -> Result<Self> {
        if eigenvectors.nrows() != eigenvectors.ncols() || eigenvectors.ncols() != eigenvalues.len() {
            return Err(Error::DimensionMismatch(eigenvectors.ncols(), eigenvalues.len()));
        }
        let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
        if order.iter().enumerate().all(|(i, &o)| i == o) {
            return Ok(Self { eigenvalues, eigenvectors });
        }
        let sorted_vals = order.iter().map(|&i| eigenvalues[i]).collect();
        let sorted_vecs = eigenvectors.select_columns(order.iter());
        Ok(Self { eigenvalues: sorted_vals, eigenvectors: sorted_vecs })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// `V · diag(f(λ)) · Vᵀ`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> SymmetricMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            scaled.column_mut(j).scale_mut(w);
        }
        let m = &scaled * self.eigenvectors.transpose();
        SymmetricMatrix::symmetrize(m).expect("square by construction")
    }

    pub fn reconstruct(&self) -> SymmetricMatrix {
        self.map_eigenvalues(|x| x)
    }

    /// `max |V·diag(λ)·Vᵀ − A|`.
    pub fn reconstruction_residual(&self, a: &SymmetricMatrix) -> f64 {
        (self.reconstruct().as_matrix() - a.as_matrix()).amax()
    }

    /// `max |VᵀV − I|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.dim();
        (self.eigenvectors.transpose() * &self.eigenvectors - DMatrix::<f64>::identity(n, n)).amax()
    }
}

/// Full eigendecomposition of a symmetric matrix.
///
/// `tol` bounds both the orthonormality residual and the reconstruction
/// residual relative to `max |A|`.
pub fn eigendecompose(a: &SymmetricMatrix, tol: f64) -> Result<SpectralDecomposition> {
    let n = a.dim();
    if n == 0 || n > MAX_DENSE_DIM {
        return Err(invalid(format!("matrix dimension {n} outside 1..={MAX_DENSE_DIM}")));
    }
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be > 0, got {tol}")));
    }
    if a.as_matrix().iter().any(|x| !x.is_finite()) {
        return Err(invalid("matrix has non-finite entries"));
    }
    let Some(eig) = SymmetricEigen::try_new(a.as_matrix().clone(), f64::EPSILON, SWEEPS * n) else {
        // Report how far the input is from diagonal, the best residual available.
        let off = off_diagonal_norm(a.as_matrix());
        return Err(Error::NoConvergence { residual: off });
    };
    let decomp = SpectralDecomposition::new(eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)?;
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let recon = decomp.reconstruction_residual(a) / scale;
    let ortho = decomp.orthonormality_residual();
    let residual = recon.max(ortho);
    // Rounding grows with the dimension; never demand better than a few ulps per row.
    let limit = tol.max(4.0 * n as f64 * f64::EPSILON);
    if residual > limit {
        return Err(Error::NoConvergence { residual });
    }
    Ok(decomp)
}

/// Eigenvalues only, ascending.
pub fn eigenvalues(a: &SymmetricMatrix) -> Result<Vec<f64>> {
    let n = a.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    if a.as_matrix().iter().any(|x| !x.is_finite()) {
        return Err(invalid("matrix has non-finite entries"));
    }
    let mut vals: Vec<f64> = a.as_matrix().symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Trace norm `Σ |λ|` of a symmetric matrix.
pub fn trace_norm(a: &SymmetricMatrix) -> Result<f64> {
    Ok(neumaier_sum(eigenvalues(a)?.into_iter().map(f64::abs)))
}

/// `Σ_ij A_ij B_ij`, which equals `Tr[A·B]` for symmetric `A`, `B`.
pub fn trace_of_product(a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(neumaier_sum(a.as_matrix().iter().zip(b.as_matrix().iter()).map(|(x, y)| x * y)))
}

/// `A ⊗ B`.
pub fn kron(a: &SymmetricMatrix, b: &SymmetricMatrix) -> SymmetricMatrix {
    SymmetricMatrix::from_symmetric_unchecked(a.as_matrix().kronecker(b.as_matrix()))
}

/// `A^{⊗n}` for `n ≥ 1`.
pub fn kron_power(a: &SymmetricMatrix, n: usize) -> SymmetricMatrix {
    assert!(n >= 1, "tensor power needs n >= 1");
    let mut acc = a.clone();
    for _ in 1..n {
        acc = kron(&acc, a);
    }
    acc
}

fn off_diagonal_norm(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut acc = 0.0_f64;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                acc = acc.max(m[(i, j)].abs());
            }
        }
    }
    acc
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> SymmetricMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SymmetricMatrix::from_upper(n, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn identity_spectrum() {
        let decomp = eigendecompose(&SymmetricMatrix::identity(4), DEFAULT_EIG_TOL).unwrap();
        assert_eq!(decomp.eigenvalues(), &[1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let a = SymmetricMatrix::from_upper(2, |i, j| if i == j { 0.0 } else { 1.0 });
        let decomp = eigendecompose(&a, DEFAULT_EIG_TOL).unwrap();
        assert!((decomp.eigenvalues()[0] + 1.0).abs() < 1e-15);
        assert!((decomp.eigenvalues()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_16_reconstructs() {
        let a = random_symmetric(16, 7);
        let decomp = eigendecompose(&a, DEFAULT_EIG_TOL).unwrap();
        assert!(decomp.reconstruction_residual(&a) < 1e-10 * a.max_abs());
        assert!(decomp.orthonormality_residual() < 1e-10);
        assert!(decomp.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_bad_input() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = f64::NAN;
        let a = SymmetricMatrix::symmetrize(m).unwrap();
        assert!(eigendecompose(&a, DEFAULT_EIG_TOL).is_err());
        assert!(SymmetricMatrix::symmetrize(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn symmetrize_is_exact() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 4.0, 3.0]);
        let s = SymmetricMatrix::symmetrize(m).unwrap();
        assert_eq!(s.get(0, 1), 3.0);
        assert_eq!(s.get(1, 0), 3.0);
    }

    #[test]
    fn kron_power_dims_and_trace() {
        let a = SymmetricMatrix::from_diagonal(&[0.25, 0.75]);
        let p = kron_power(&a, 3);
        assert_eq!(p.dim(), 8);
        assert!((p.trace() - 1.0).abs() < 1e-15);
        assert!((p.get(7, 7) - 0.75f64.powi(3)).abs() < 1e-15);
    }

    #[test]
    fn neumaier_recovers_cancellation() {
        let vals = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(neumaier_sum(vals), 2.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn decomposition_invariants(n in 1usize..24, seed in any::<u64>()) {
            let a = random_symmetric(n, seed);
            let decomp = eigendecompose(&a, DEFAULT_EIG_TOL).unwrap();
            prop_assert!(decomp.reconstruction_residual(&a) < 1e-10 * a.max_abs().max(1e-300));
            prop_assert!(decomp.orthonormality_residual() < 1e-10);
            let vals = eigenvalues(&a).unwrap();
            for (x, y) in vals.iter().zip(decomp.eigenvalues()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
