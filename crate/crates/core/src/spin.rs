//! Dense spin-basis backend: the periodic chain Hamiltonian on `2^L` states,
//! its spectrum, and ground or thermal density matrices.
//!
//! Basis: computational `σᶻ` eigenstates, bit value 0 means `σᶻ = +1`, site 1
//! is the most significant bit. The periodic bond `σˣ_L σˣ_1` is added
//! literally, so for `L = 2` the single bond appears twice.
//!
//! The Hamiltonian commutes with the parity `Π σᶻ_k`, so it is diagonalized
//! one parity block at a time. Eigenvectors therefore carry definite parity,
//! and the ground state stays well defined when the even and odd sector
//! minima are split by less than the working precision (deep in the ordered
//! phase, where the splitting decays like `(h/J)^L`).

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::linalg::{eigendecompose, SpectralDecomposition, SymmetricMatrix, DEFAULT_EIG_TOL};
use crate::params::{Beta, ModelParams};

/// Largest chain handled by the dense backend.
pub const MAX_DENSE_SIZE: usize = 12;

/// Within-sector level spacing below which the ground state counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Eigenvalues of a density matrix may dip this far below zero from rounding.
const PSD_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_state(index: usize) -> Parity {
        if index.count_ones().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

fn check_dense_size(size: usize) -> Result<()> {
    if !(2..=MAX_DENSE_SIZE).contains(&size) {
        return Err(Error::SizeOutOfRange { size, min: 2, max: MAX_DENSE_SIZE });
    }
    Ok(())
}

/// Nonzero entries of row `s`: the diagonal field term and one `-J` per bond flip.
fn row_entries(size: usize, coupling: f64, field: f64, s: usize, mut emit: impl FnMut(usize, f64)) {
    let ones = s.count_ones() as f64;
    // Σ σᶻ = (#zeros) − (#ones)
    let sz = size as f64 - 2.0 * ones;
    emit(s, -field * sz);
    for site in 0..size {
        let a = size - 1 - site;
        let b = if site + 1 == size { size - 1 } else { size - 2 - site };
        let flipped = s ^ (1 << a) ^ (1 << b);
        emit(flipped, -coupling);
    }
}

/// `H = −J Σ σˣ_k σˣ_{k+1} − h Σ σᶻ_k` with periodic boundaries, `2 ≤ L ≤ 12`.
pub fn build_hamiltonian(params: &ModelParams) -> Result<SymmetricMatrix> {
    let size = params.size();
    check_dense_size(size)?;
    let dim = 1usize << size;
    let mut h = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        row_entries(size, params.coupling(), params.field(), s, |t, v| h[(s, t)] += v);
    }
    Ok(SymmetricMatrix::from_symmetric_unchecked(h))
}

/// Energy levels and eigenvectors of the dense Hamiltonian, with the parity
/// of every eigenvector.
#[derive(Debug, Clone)]
pub struct IsingSpectrum {
    decomposition: SpectralDecomposition,
    parities: Vec<Parity>,
}

impl IsingSpectrum {
    pub fn energies(&self) -> &[f64] {
        self.decomposition.eigenvalues()
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        self.decomposition.eigenvectors()
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parities
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomposition
    }

    /// Index (into ascending levels) of the lowest level of `parity`.
    pub fn lowest_in(&self, parity: Parity) -> usize {
        self.parities.iter().position(|&p| p == parity).expect("both sectors are nonempty")
    }
}

/// Diagonalizes the dense Hamiltonian sector by sector.
pub fn spectrum(params: &ModelParams) -> Result<IsingSpectrum> {
    let size = params.size();
    check_dense_size(size)?;
    let dim = 1usize << size;

    let mut energies = Vec::with_capacity(dim);
    let mut vectors = DMatrix::zeros(dim, dim);
    let mut parities = Vec::with_capacity(dim);
    let mut col = 0;
    for parity in [Parity::Even, Parity::Odd] {
        let members: Vec<usize> = (0..dim).filter(|&s| Parity::of_state(s) == parity).collect();
        let mut position = vec![usize::MAX; dim];
        for (i, &s) in members.iter().enumerate() {
            position[s] = i;
        }
        let n = members.len();
        let mut block = DMatrix::zeros(n, n);
        for (i, &s) in members.iter().enumerate() {
            row_entries(size, params.coupling(), params.field(), s, |t, v| block[(i, position[t])] += v);
        }
        let decomp = eigendecompose(&SymmetricMatrix::from_symmetric_unchecked(block), DEFAULT_EIG_TOL)?;
        for (k, &e) in decomp.eigenvalues().iter().enumerate() {
            energies.push(e);
            parities.push(parity);
            for (i, &s) in members.iter().enumerate() {
                vectors[(s, col)] = decomp.eigenvectors()[(i, k)];
            }
            col += 1;
        }
    }

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
    let parities = order.iter().map(|&i| parities[i]).collect();
    let decomposition = SpectralDecomposition::new(energies, vectors)?;
    Ok(IsingSpectrum { decomposition, parities })
}

/// A real symmetric, unit-trace, positive semidefinite matrix together with
/// its spectral decomposition (weights ascending).
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    entries: SymmetricMatrix,
    spectral: SpectralDecomposition,
}

impl DensityMatrix {
    /// Validates and diagonalizes an arbitrary symmetric matrix.
    pub fn from_matrix(entries: SymmetricMatrix) -> Result<Self> {
        let spectral = eigendecompose(&entries, DEFAULT_EIG_TOL)?;
        Self::validated(entries, spectral)
    }

    /// Builds `Σ p_n |v_n⟩⟨v_n|` from weights and orthonormal columns.
    pub fn from_spectrum(weights: Vec<f64>, vectors: DMatrix<f64>) -> Result<Self> {
        let spectral = SpectralDecomposition::new(weights, vectors)?;
        let entries = spectral.reconstruct();
        Self::validated(entries, spectral)
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`. The spectral data uses an orthonormal
    /// completion with exact zero weights.
    pub fn pure(psi: &DVector<f64>) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotDensityMatrix(format!("state vector has norm {norm}")));
        }
        let n = psi.len();
        // Householder reflector mapping e_0 to ψ supplies the completion.
        let mut u = psi.clone();
        let sign = if u[0] >= 0.0 { 1.0 } else { -1.0 };
        u[0] += sign;
        let unorm2 = u.norm_squared();
        let mut q = DMatrix::<f64>::identity(n, n);
        if unorm2 > 0.0 {
            q -= (&u * u.transpose()) * (2.0 / unorm2);
        }
        // Q e_0 = −sign·ψ; flip so the first column is ψ exactly up to rounding.
        q.column_mut(0).copy_from(psi);
        let mut weights = vec![0.0; n];
        weights[0] = 1.0;
        Self::from_spectrum(weights, q)
    }

    fn validated(entries: SymmetricMatrix, spectral: SpectralDecomposition) -> Result<Self> {
        let trace = entries.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotDensityMatrix(format!("trace {trace} != 1")));
        }
        let min = spectral.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotDensityMatrix(format!("negative eigenvalue {min}")));
        }
        Ok(Self { entries, spectral })
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn entries(&self) -> &SymmetricMatrix {
        &self.entries
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    /// Eigenvalues clamped at zero, ascending.
    pub fn weights(&self) -> Vec<f64> {
        self.spectral.eigenvalues().iter().map(|&p| p.max(0.0)).collect()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectral.eigenvalues()[0]
    }

    /// Rank one, within `1e-12`.
    pub fn is_pure(&self) -> bool {
        self.spectral.eigenvalues().iter().filter(|&&p| p > 1e-12).count() == 1
    }
}

/// Ground state `|ψ₀⟩⟨ψ₀|` of the dense Hamiltonian.
///
/// For `h > 0` the ground state lies in the even sector (it contains the
/// all-up state and is connected by negative off-diagonal bond terms); for
/// `h < 0` in the sector of the all-down state. At `h = 0` the two sectors are
/// exactly degenerate and an error is returned.
pub fn ground_state(params: &ModelParams) -> Result<DensityMatrix> {
    let decomp = spectrum(params)?;
    ground_from_spectrum(params, &decomp)
}

fn ground_sector(params: &ModelParams) -> Result<Parity> {
    let h = params.field();
    if h == 0.0 {
        return Err(Error::DegenerateGroundState { gap: 0.0 });
    }
    if h > 0.0 {
        Ok(Parity::Even)
    } else {
        Ok(Parity::of_state((1usize << params.size()) - 1))
    }
}

fn ground_from_spectrum(params: &ModelParams, decomp: &IsingSpectrum) -> Result<DensityMatrix> {
    let sector = ground_sector(params)?;
    let energies = decomp.energies();
    let idx = decomp.lowest_in(sector);
    let next = (idx + 1..energies.len())
        .find(|&i| decomp.parities()[i] == sector)
        .expect("sector has at least two levels for L >= 2");
    let gap = energies[next] - energies[idx];
    if gap < DEGENERACY_TOL {
        return Err(Error::DegenerateGroundState { gap });
    }

    let dim = energies.len();
    let mut weights = vec![0.0; dim];
    let mut vectors = DMatrix::zeros(dim, dim);
    // Ground state last (largest weight); the rest in order.
    for (col, i) in (0..dim).filter(|&i| i != idx).enumerate() {
        vectors.set_column(col, &decomp.eigenvectors().column(i));
    }
    vectors.set_column(dim - 1, &decomp.eigenvectors().column(idx));
    weights[dim - 1] = 1.0;
    let psi = decomp.eigenvectors().column(idx);
    let entries = SymmetricMatrix::from_upper(dim, |i, j| psi[i] * psi[j]);
    let spectral = SpectralDecomposition::new(weights, vectors)?;
    DensityMatrix::validated(entries, spectral)
}

/// Gibbs state `e^{−βH}/Z`, exponentiated after subtracting the ground energy.
pub fn thermal_state(params: &ModelParams) -> Result<DensityMatrix> {
    let beta = params
        .beta()
        .finite()
        .ok_or_else(|| invalid("thermal state needs a finite inverse temperature"))?;
    let decomp = spectrum(params)?;
    thermal_from_spectrum(beta, &decomp)
}

fn thermal_from_spectrum(beta: f64, decomp: &IsingSpectrum) -> Result<DensityMatrix> {
    let energies = decomp.energies();
    let e0 = energies[0];
    let boltzmann: Vec<f64> = energies.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z = crate::linalg::neumaier_sum(boltzmann.iter().copied());
    let weights: Vec<f64> = boltzmann.iter().map(|w| w / z).collect();

    let vecs = decomp.eigenvectors();
    let mut scaled = vecs.clone();
    for (j, &w) in weights.iter().enumerate() {
        scaled.column_mut(j).scale_mut(w);
    }
    let entries = SymmetricMatrix::symmetrize(&scaled * vecs.transpose())?;
    // Ascending weights are descending energies.
    let dim = weights.len();
    let rev_weights = weights.iter().rev().copied().collect();
    let rev_vecs = vecs.select_columns((0..dim).rev().collect::<Vec<_>>().iter());
    let spectral = SpectralDecomposition::new(rev_weights, rev_vecs)?;
    DensityMatrix::validated(entries, spectral)
}

/// Ground state for `β = ∞`, Gibbs state otherwise.
pub fn state(params: &ModelParams) -> Result<DensityMatrix> {
    let decomp = spectrum(params)?;
    match params.beta() {
        Beta::Infinite => ground_from_spectrum(params, &decomp),
        Beta::Finite(b) => thermal_from_spectrum(b, &decomp),
    }
}
