//! Dense complex matrices and the physical operator types built on them.
//!
//! Every type here validates its invariants on construction and is immutable
//! afterwards; operations return new values. Natural units (hbar = 1) are
//! used throughout, so eigenvalues of a Hamiltonian are angular frequencies.

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};

/// Entrywise tolerance for `A = A^dagger`.
pub const TOL_HERM: f64 = 1e-12;
/// Tolerance for `Tr(rho) = 1`.
pub const TOL_TRACE: f64 = 1e-10;
/// Smallest eigenvalue accepted for a density matrix is `-TOL_PSD`.
pub const TOL_PSD: f64 = 1e-9;
/// Entrywise tolerance for `P^2 = P`.
pub const TOL_IDEM: f64 = 1e-10;
/// Unitarity and reconstruction tolerance of an eigendecomposition, relative
/// to `max(1, max |H_ij|)`.
pub const TOL_DECOMP: f64 = 1e-10;

/// Square dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.data)
    }
}

impl ComplexMatrix {
    pub fn new(data: DMatrix<C64>) -> Result<Self> {
        if data.nrows() != data.ncols() || data.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: data.nrows(),
                cols: data.ncols(),
            });
        }
        Ok(Self { data })
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_slice(dim: usize, entries: &[C64]) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::EntryCount {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self {
            data: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            data: DMatrix::from_fn(dim, dim, f),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| C64::new(0.0, 0.0))
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            data: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            data: &self.data * factor,
        }
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        Self {
            data: &self.data * &other.data - &other.data * &self.data,
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Largest `|A_ij - conj(A_ji)|`, with the location of the offending entry.
    pub fn hermiticity_defect(&self) -> (f64, usize, usize) {
        let n = self.dim();
        let mut worst = (0.0, 0, 0);
        for i in 0..n {
            for j in i..n {
                let d = (self.data[(i, j)] - self.data[(j, i)].conj()).norm();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
        worst
    }

    /// `(A + A^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self {
            data: (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0),
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl AsRef<ComplexMatrix> for ComplexMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        self
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.data[idx]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data * &rhs.data,
        }
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

/// Hermitian operator: Hamiltonians, observables, clock variables.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let (deviation, row, col) = matrix.hermiticity_defect();
        if deviation > TOL_HERM {
            return Err(Error::NotHermitian { row, col, deviation });
        }
        Ok(Self { matrix })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self {
            matrix: ComplexMatrix::from_real_diagonal(diag),
        }
    }

    /// Two-level Hamiltonian `diag(0, omega)`.
    pub fn qubit(omega: f64) -> Self {
        Self::from_real_diagonal(&[0.0, omega])
    }

    pub fn pauli_x() -> Self {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        Self {
            matrix: ComplexMatrix::from_row_slice(2, &[o, l, l, o]).expect("2x2"),
        }
    }

    pub fn pauli_z() -> Self {
        Self::from_real_diagonal(&[1.0, -1.0])
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    /// `sum_k c_k A^k` with real coefficients; always Hermitian and commuting
    /// with `A`.
    pub fn polynomial(&self, coefficients: &[f64]) -> Self {
        let n = self.dim();
        let mut acc = ComplexMatrix::zeros(n);
        let mut power = ComplexMatrix::identity(n);
        for (k, &c) in coefficients.iter().enumerate() {
            if k > 0 {
                power = &power * &self.matrix;
            }
            acc = &acc + &power.scale(C64::new(c, 0.0));
        }
        Self {
            matrix: acc.hermitian_part(),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Entrywise max modulus of `[self, other]`.
    pub fn commutator_norm(&self, other: &HermitianOperator) -> Result<f64> {
        self.matrix.check_dim(&other.matrix)?;
        Ok(self.matrix.commutator(&other.matrix).max_abs())
    }

    /// `Tr(A rho)`, real for Hermitian `A` and `rho`.
    pub fn expectation(&self, rho: &DensityMatrix) -> Result<f64> {
        self.matrix.check_dim(rho.matrix())?;
        Ok((&self.matrix * rho.matrix()).trace().re)
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &HermitianOperator) -> Self {
        Self {
            matrix: ComplexMatrix {
                data: self.matrix.data.kronecker(&other.matrix.data),
            },
        }
    }
}

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let (deviation, row, col) = matrix.hermiticity_defect();
        if deviation > TOL_HERM {
            return Err(Error::NotHermitian { row, col, deviation });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TOL_TRACE || tr.im.abs() > TOL_TRACE {
            return Err(Error::TraceNotUnit { re: tr.re, im: tr.im });
        }
        let min = min_eigenvalue(&matrix);
        if min < -TOL_PSD {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { matrix })
    }

    /// Normalized projector onto `psi`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if psi.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(invalid("psi", "state vector must be non-zero"));
        }
        let unit: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&unit).hermitian_part())
    }

    pub fn from_diagonal(populations: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(populations))
    }

    /// Maximally mixed state `I / d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn purity(&self) -> f64 {
        // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
        self.matrix.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .data
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    m.data
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |acc, &x| acc.min(x))
}

/// Orthogonal projector onto the eigenspaces of an operator whose eigenvalues
/// fall in `[center - halfwidth, center + halfwidth]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    matrix: ComplexMatrix,
    center: f64,
    halfwidth: f64,
    /// Orthonormal basis of the range, one column per vector.
    range: DMatrix<C64>,
}

impl Projector {
    /// Validates an explicit projector matrix.
    pub fn from_matrix(matrix: ComplexMatrix, center: f64, halfwidth: f64) -> Result<Self> {
        let (deviation, row, col) = matrix.hermiticity_defect();
        if deviation > TOL_HERM {
            return Err(Error::NotHermitian { row, col, deviation });
        }
        let idem = (&(&matrix * &matrix) - &matrix).max_abs();
        if idem > TOL_IDEM {
            return Err(Error::NotIdempotent(idem));
        }
        let eig = SymmetricEigen::new(matrix.data.clone());
        let cols: Vec<usize> = (0..matrix.dim()).filter(|&k| eig.eigenvalues[k] > 0.5).collect();
        let range = eig.eigenvectors.select_columns(cols.iter());
        Ok(Self {
            matrix,
            center,
            halfwidth,
            range,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
            center: 0.0,
            halfwidth: f64::INFINITY,
            range: DMatrix::identity(dim, dim),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.center, self.halfwidth)
    }

    pub fn rank(&self) -> usize {
        self.range.ncols()
    }

    /// Orthonormal vectors spanning the range (as columns).
    pub fn range_basis(&self) -> &DMatrix<C64> {
        &self.range
    }
}

/// Spectral decomposition `H = V diag(omega) V^dagger` with ascending
/// eigenvalues.
#[derive(Clone, Debug)]
pub struct EnergyDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
    bohr: DMatrix<f64>,
}

impl EnergyDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `omega_nm = omega_n - omega_m`.
    pub fn bohr_frequencies(&self) -> &DMatrix<f64> {
        &self.bohr
    }

    pub fn bohr(&self, n: usize, m: usize) -> f64 {
        self.bohr[(n, m)]
    }

    /// Largest eigenvalue modulus.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |acc, w| acc.max(w.abs()))
    }

    /// `U(t) = exp(-iHt)`.
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        let v = &self.eigenvectors.data;
        let mut scaled = v.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= C64::from_polar(1.0, -self.eigenvalues[k] * t);
        }
        ComplexMatrix {
            data: scaled * v.adjoint(),
        }
    }

    /// `V^dagger A V`.
    pub fn to_eigenbasis(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let v = &self.eigenvectors.data;
        ComplexMatrix {
            data: v.adjoint() * &a.data * v,
        }
    }

    /// `V A V^dagger`.
    pub fn from_eigenbasis(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let v = &self.eigenvectors.data;
        ComplexMatrix {
            data: v * &a.data * v.adjoint(),
        }
    }

    /// Coordinates of the columns of `a` in the eigenbasis, `V^dagger a`.
    pub(crate) fn coordinates(&self, a: &DMatrix<C64>) -> DMatrix<C64> {
        self.eigenvectors.data.adjoint() * a
    }
}

/// Diagonalizes a Hermitian operator.
pub fn eigendecompose(h: &HermitianOperator) -> Result<EnergyDecomposition> {
    let n = h.dim();
    let eig = SymmetricEigen::new(h.matrix.data.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if eigenvalues.iter().any(|w| !w.is_finite()) {
        return Err(Error::Decomposition("non-finite eigenvalue".into()));
    }
    let vectors = eig.eigenvectors.select_columns(order.iter());

    let scale = h.matrix.max_abs().max(1.0);
    let unitarity = (vectors.adjoint() * &vectors - DMatrix::<C64>::identity(n, n))
        .iter()
        .fold(0.0_f64, |acc, z| acc.max(z.norm()));
    if unitarity > TOL_DECOMP {
        return Err(Error::Decomposition(format!(
            "eigenvectors deviate from unitarity by {unitarity:e}"
        )));
    }
    let mut scaled = vectors.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= C64::new(eigenvalues[k], 0.0);
    }
    let reconstruction = (scaled * vectors.adjoint() - &h.matrix.data)
        .iter()
        .fold(0.0_f64, |acc, z| acc.max(z.norm()));
    if reconstruction > TOL_DECOMP * scale {
        return Err(Error::Decomposition(format!("reconstruction error {reconstruction:e}")));
    }

    let bohr = DMatrix::from_fn(n, n, |i, j| eigenvalues[i] - eigenvalues[j]);
    Ok(EnergyDecomposition {
        eigenvalues,
        eigenvectors: ComplexMatrix { data: vectors },
        bohr,
    })
}

/// Projector onto the eigenspaces of `a` with eigenvalues in
/// `[center - halfwidth, center + halfwidth]`.
///
/// Numerically degenerate eigenvalues are grouped and tested through their
/// mean, so a degenerate eigenspace is either wholly inside or wholly outside.
pub fn build_projector(a: &HermitianOperator, center: f64, halfwidth: f64) -> Result<Projector> {
    if !(halfwidth > 0.0) || !center.is_finite() {
        return Err(invalid(
            "halfwidth",
            format!("need a finite center and halfwidth > 0, got ({center}, {halfwidth})"),
        ));
    }
    let dec = eigendecompose(a)?;
    let n = dec.dim();
    let mut selected = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n {
            let tol = 1e-10 * dec.eigenvalues[start].abs().max(1.0);
            if dec.eigenvalues[end] - dec.eigenvalues[end - 1] > tol {
                break;
            }
            end += 1;
        }
        let mean = dec.eigenvalues[start..end].iter().sum::<f64>() / (end - start) as f64;
        if (mean - center).abs() <= halfwidth {
            selected.extend(start..end);
        }
        start = end;
    }
    let range = dec.eigenvectors.data.select_columns(selected.iter());
    let matrix = ComplexMatrix {
        data: &range * range.adjoint(),
    }
    .hermitian_part();
    let idem = (&(&matrix * &matrix) - &matrix).max_abs();
    if idem > TOL_IDEM {
        return Err(Error::NotIdempotent(idem));
    }
    Ok(Projector {
        matrix,
        center,
        halfwidth,
        range,
    })
}

/// `U(t) rho U(t)^dagger` with `U(t) = exp(-iHt)`.
pub fn unitary_evolve(rho: &DensityMatrix, h: &HermitianOperator, t: f64) -> Result<DensityMatrix> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: rho.dim(),
        });
    }
    let dec = eigendecompose(h)?;
    Ok(evolve_with(&dec, rho, t))
}

/// Unitary evolution with a precomputed decomposition, carried out in the
/// eigenbasis so the output is exactly Hermitian.
pub(crate) fn evolve_with(dec: &EnergyDecomposition, rho: &DensityMatrix, t: f64) -> DensityMatrix {
    let mut tilde = dec.to_eigenbasis(rho.matrix()).data;
    let n = dec.dim();
    for i in 0..n {
        for j in 0..n {
            tilde[(i, j)] *= C64::from_polar(1.0, -dec.bohr(i, j) * t);
        }
    }
    let out = dec.from_eigenbasis(&ComplexMatrix { data: tilde }).hermitian_part();
    DensityMatrix { matrix: out }
}

impl DensityMatrix {
    /// Wraps a matrix produced by a trace- and positivity-preserving map,
    /// re-validating the invariants.
    pub(crate) fn from_evolved(matrix: ComplexMatrix) -> Result<Self> {
        Self::new(matrix.hermitian_part())
    }
}
