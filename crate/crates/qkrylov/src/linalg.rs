//! Exact dense complex linear algebra: the classical oracle layer and the
//! spectral backbone every quantum-simulation operation consumes.
//!
//! Everything here is plain `f64` arithmetic on dense storage. At desk scale
//! (n <= 1024) dense eigensolves are the honest oracle; sparse formats and
//! iterative eigensolvers are out of scope.

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex<f64>;

/// Entrywise tolerance for declaring a matrix Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// sigma_min below `SINGULAR_CUTOFF * sigma_max` marks a numerically singular
/// matrix; its condition number is reported as infinity.
pub const SINGULAR_CUTOFF: f64 = 1e-14;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

// ---------------------------------------------------------------------------
// Vector
// ---------------------------------------------------------------------------

/// Dense complex vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vector {
    entries: Vec<C64>,
}

impl Vector {
    pub fn new(entries: Vec<C64>) -> Self {
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: vec![C64::ZERO; dim],
        }
    }

    /// Computational basis vector |index> of the given dimension.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[index] = cr(1.0);
        v
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self {
            entries: values.iter().map(|&x| cr(x)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [C64] {
        &mut self.entries
    }

    pub fn get(&self, i: usize) -> C64 {
        self.entries[i]
    }

    pub fn set(&mut self, i: usize, v: C64) {
        self.entries[i] = v;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Sesquilinear inner product `<self|other>` (conjugate on `self`).
    pub fn inner(&self, other: &Self) -> C64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// self += s * other
    pub fn axpy(&mut self, s: C64, other: &Self) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += s * b;
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::ZeroMatrix);
        }
        Ok(self.scaled(cr(1.0 / n)))
    }

    /// Global-phase canonical form: the first entry with modulus above 1e-12
    /// is made real and positive.
    pub fn canonicalized(&self) -> Self {
        for z in &self.entries {
            if z.norm() > 1e-12 {
                let phase = z / z.norm();
                return self.scaled(phase.conj());
            }
        }
        self.clone()
    }

    /// min over global phases of ||self - e^{i phi} other||.
    pub fn dist_up_to_phase(&self, other: &Self) -> f64 {
        let overlap = self.inner(other).norm();
        (self.norm_sqr() + other.norm_sqr() - 2.0 * overlap).max(0.0).sqrt()
    }

    pub fn is_unit(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub(crate) fn to_nalgebra(&self) -> DVector<C64> {
        DVector::from_column_slice(&self.entries)
    }

    pub(crate) fn from_nalgebra(v: &DVector<C64>) -> Self {
        Self {
            entries: v.iter().copied().collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// ComplexMatrix
// ---------------------------------------------------------------------------

/// Dense complex matrix in row-major storage with a cached spectral
/// decomposition (the simulator's stand-in for Hamiltonian-simulation access).
#[derive(Debug, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
    hermitian: bool,
    #[serde(skip)]
    spectral: OnceLock<Arc<SpectralDecomposition>>,
}

impl Clone for ComplexMatrix {
    fn clone(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.clone(),
            hermitian: self.hermitian,
            spectral: self.spectral.clone(),
        }
    }
}

impl PartialEq for ComplexMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.entries == other.entries
    }
}

impl ComplexMatrix {
    /// Build from row-major entries; the Hermitian flag is detected
    /// automatically within [`HERMITIAN_TOL`].
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                left: entries.len(),
                right: rows * cols,
            });
        }
        let mut m = Self {
            rows,
            cols,
            entries,
            hermitian: false,
            spectral: OnceLock::new(),
        };
        m.hermitian = rows == cols && m.adjoint_deviation() <= HERMITIAN_TOL;
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self::new(rows, cols, entries).expect("sizes consistent by construction")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![C64::ZERO; rows * cols]).expect("sizes consistent")
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { cr(1.0) } else { C64::ZERO })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { cr(values[i]) } else { C64::ZERO })
    }

    pub fn diagonal_complex(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { C64::ZERO })
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

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    fn adjoint_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self::new(
            self.rows,
            self.cols,
            self.entries.iter().map(|z| z * s).collect(),
        )
        .expect("sizes unchanged")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                left: self.rows * 10_000 + self.cols,
                right: other.rows * 10_000 + other.cols,
            });
        }
        Self::new(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(cr(-1.0)))
    }

    pub fn mul_vec(&self, v: &Vector) -> Result<Vector> {
        if v.dim() != self.cols {
            return Err(Error::DimensionMismatch {
                left: self.cols,
                right: v.dim(),
            });
        }
        let mut out = Vector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = C64::ZERO;
            let row = &self.entries[i * self.cols..(i + 1) * self.cols];
            for (a, b) in row.iter().zip(v.entries()) {
                acc += a * b;
            }
            out.set(i, acc);
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                left: self.cols,
                right: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == C64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.entries[idx] += aik * other.get(k, j);
                }
            }
        }
        out.hermitian = out.is_square() && out.adjoint_deviation() <= HERMITIAN_TOL;
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Operator 2-norm distance, computed via SVD of the difference.
    pub fn operator_distance(&self, other: &Self) -> Result<f64> {
        let d = self.sub(other)?;
        let svd = d.to_nalgebra().svd(false, false);
        Ok(svd.singular_values.iter().copied().fold(0.0, f64::max))
    }

    /// The 2-block Hermitian dilation [[0, A], [A^dagger, 0]].
    pub fn hermitian_dilation(&self) -> ComplexMatrix {
        let (p, q) = (self.rows, self.cols);
        let n = p + q;
        let mut out = Self::zeros(n, n);
        for i in 0..p {
            for j in 0..q {
                let v = self.get(i, j);
                out.entries[i * n + (p + j)] = v;
                out.entries[(p + j) * n + i] = v.conj();
            }
        }
        out.hermitian = true;
        out
    }

    /// Cached spectral decomposition; only defined for Hermitian matrices.
    ///
    /// Ordering is deterministic: descending |lambda|, ties broken by sign
    /// (positive first); each eigenvector's first significant component is
    /// made real-positive.
    pub fn spectral_decompose(&self) -> Result<Arc<SpectralDecomposition>> {
        if !self.hermitian {
            return Err(Error::NotHermitian {
                deviation: if self.is_square() {
                    self.adjoint_deviation()
                } else {
                    f64::INFINITY
                },
            });
        }
        if let Some(sd) = self.spectral.get() {
            return Ok(sd.clone());
        }
        let sd = Arc::new(SpectralDecomposition::compute(self)?);
        let _ = self.spectral.set(sd.clone());
        Ok(self.spectral.get().expect("just set").clone())
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let svd = self.to_nalgebra().svd(false, false);
        let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
        s
    }

    /// sigma_max / sigma_min; +infinity when sigma_min < 1e-14 * sigma_max.
    pub fn condition_number(&self) -> Result<f64> {
        let s = self.singular_values();
        let smax = s[0];
        let smin = *s.last().expect("nonempty");
        if smax < 1e-300 {
            return Err(Error::ZeroMatrix);
        }
        if smin < SINGULAR_CUTOFF * smax {
            return Ok(f64::INFINITY);
        }
        Ok(smax / smin)
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

// ---------------------------------------------------------------------------
// SpectralDecomposition
// ---------------------------------------------------------------------------

/// Eigendecomposition of a Hermitian matrix with deterministic ordering and
/// phase convention, plus a copy of the source for reconstruction checks.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vector>,
    source: ComplexMatrix,
}

impl SpectralDecomposition {
    fn compute(a: &ComplexMatrix) -> Result<Self> {
        let n = a.rows();
        let na = a.to_nalgebra();
        let eig = nalgebra::SymmetricEigen::try_new(na, 1.0e-13, 10_000)
            .ok_or(Error::EigenFailed)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            let (li, lj) = (eig.eigenvalues[i], eig.eigenvalues[j]);
            lj.abs()
                .partial_cmp(&li.abs())
                .expect("finite eigenvalues")
                .then(lj.partial_cmp(&li).expect("finite eigenvalues"))
        });
        let mut eigenvalues = Vec::with_capacity(n);
        let mut eigenvectors = Vec::with_capacity(n);
        for &k in &order {
            eigenvalues.push(eig.eigenvalues[k]);
            let col = Vector::new(eig.eigenvectors.column(k).iter().copied().collect());
            eigenvectors.push(col.canonicalized());
        }
        // Within exactly degenerate groups, order by the index of the first
        // significant component so repeated runs list the same basis.
        let mut i = 0;
        while i < n {
            let mut j = i + 1;
            while j < n && (eigenvalues[j] - eigenvalues[i]).abs() <= 1e-13 {
                j += 1;
            }
            if j - i > 1 {
                let mut group: Vec<(usize, Vector)> = eigenvectors[i..j]
                    .iter()
                    .map(|v| {
                        let lead = v
                            .entries()
                            .iter()
                            .position(|z| z.norm() > 1e-9)
                            .unwrap_or(0);
                        (lead, v.clone())
                    })
                    .collect();
                group.sort_by_key(|(lead, _)| *lead);
                for (off, (_, v)) in group.into_iter().enumerate() {
                    eigenvectors[i + off] = v;
                }
            }
            i = j;
        }
        Ok(Self {
            eigenvalues,
            eigenvectors,
            source: a.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, j: usize) -> &Vector {
        &self.eigenvectors[j]
    }

    pub fn eigenvectors(&self) -> &[Vector] {
        &self.eigenvectors
    }

    pub fn source(&self) -> &ComplexMatrix {
        &self.source
    }

    /// Largest |lambda| (the spectral radius for Hermitian input).
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.first().map(|l| l.abs()).unwrap_or(0.0)
    }

    pub fn min_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().map(|l| l.abs()).unwrap_or(0.0)
    }

    /// Sum of lambda_j |u_j><u_j|, for reconstruction checks.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_fn(n, n, |i, j| {
            let mut acc = C64::ZERO;
            for (k, lam) in self.eigenvalues.iter().enumerate() {
                let u = &self.eigenvectors[k];
                acc += u.get(i) * u.get(j).conj() * cr(*lam);
            }
            acc
        })
    }

    /// Coefficients beta_j = <u_j|y> of a vector over the eigenbasis.
    pub fn expand(&self, y: &Vector) -> Result<Vec<C64>> {
        if y.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: y.dim(),
            });
        }
        Ok(self.eigenvectors.iter().map(|u| u.inner(y)).collect())
    }

    /// Sum of coeffs_j u_j back in the computational basis.
    pub fn synthesize(&self, coeffs: &[C64]) -> Vector {
        let mut out = Vector::zeros(self.dim());
        for (c, u) in coeffs.iter().zip(&self.eigenvectors) {
            out.axpy(*c, u);
        }
        out
    }

    /// f(A) y computed exactly through the decomposition.
    pub fn apply_function(&self, f: impl Fn(f64) -> f64, y: &Vector) -> Result<Vector> {
        let coeffs = self.expand(y)?;
        let weighted: Vec<C64> = coeffs
            .iter()
            .zip(&self.eigenvalues)
            .map(|(b, l)| b * cr(f(*l)))
            .collect();
        Ok(self.synthesize(&weighted))
    }

    /// Max deviation of the eigenvector Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let g = self.eigenvectors[i].inner(&self.eigenvectors[j]);
                let target = if i == j { cr(1.0) } else { C64::ZERO };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Sum of coeffs[l] A^l v evaluated by the Horner recurrence. This is the
/// classical oracle behind every coefficient-recursion check.
pub fn apply_matrix_polynomial(coeffs: &[C64], a: &ComplexMatrix, v: &Vector) -> Result<Vector> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            left: a.rows(),
            right: a.cols(),
        });
    }
    if v.dim() != a.cols() {
        return Err(Error::DimensionMismatch {
            left: a.cols(),
            right: v.dim(),
        });
    }
    if coeffs.is_empty() {
        return Ok(Vector::zeros(v.dim()));
    }
    let mut acc = v.scaled(coeffs[coeffs.len() - 1]);
    for l in (0..coeffs.len() - 1).rev() {
        acc = a.mul_vec(&acc)?;
        acc.axpy(coeffs[l], v);
    }
    Ok(acc)
}

/// Real-coefficient convenience wrapper around [`apply_matrix_polynomial`].
pub fn apply_matrix_polynomial_real(
    coeffs: &[f64],
    a: &ComplexMatrix,
    v: &Vector,
) -> Result<Vector> {
    let cc: Vec<C64> = coeffs.iter().map(|&x| cr(x)).collect();
    apply_matrix_polynomial(&cc, a, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let raw = ComplexMatrix::from_fn(n, n, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let h = raw.add(&raw.adjoint()).unwrap().scaled(cr(0.5));
        assert!(h.is_hermitian());
        h
    }

    #[test]
    fn dilation_of_identity_1x1() {
        let a = ComplexMatrix::identity(1);
        let d = a.hermitian_dilation();
        let sd = d.spectral_decompose().unwrap();
        let mut eigs = sd.eigenvalues().to_vec();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((eigs[0] + 1.0).abs() < 1e-12);
        assert!((eigs[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dilation_of_nilpotent_block() {
        let a = ComplexMatrix::new(2, 2, vec![C64::ZERO, cr(1.0), C64::ZERO, C64::ZERO]).unwrap();
        let d = a.hermitian_dilation();
        let sd = d.spectral_decompose().unwrap();
        // Oracle: direct eigensolve of the 4x4 dilation gives {1, -1, 0, 0}.
        let mut eigs = sd.eigenvalues().to_vec();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = [-1.0, 0.0, 0.0, 1.0];
        for (e, x) in eigs.iter().zip(expected) {
            assert!((e - x).abs() < 1e-10, "got {eigs:?}");
        }
    }

    #[test]
    fn dilation_spectrum_mirrors_hermitian_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_hermitian(5, &mut rng);
        let sd_a = a.spectral_decompose().unwrap();
        let sd_d = a.hermitian_dilation().spectral_decompose().unwrap();
        for lam in sd_a.eigenvalues() {
            for sign in [1.0, -1.0] {
                let target = sign * lam.abs();
                let hit = sd_d
                    .eigenvalues()
                    .iter()
                    .any(|l| (l - target).abs() < 1e-9);
                assert!(hit, "missing {target} in dilation spectrum");
            }
        }
    }

    #[test]
    fn spectral_decompose_identity() {
        let a = ComplexMatrix::identity(4);
        let sd = a.spectral_decompose().unwrap();
        for l in sd.eigenvalues() {
            assert!((l - 1.0).abs() < 1e-14);
        }
        for (j, u) in sd.eigenvectors().iter().enumerate() {
            let e = Vector::basis(4, j);
            assert!(u.dist_up_to_phase(&e) < 1e-12);
        }
    }

    #[test]
    fn spectral_decompose_diagonal_ordering() {
        let a = ComplexMatrix::diagonal(&[0.9, -0.5, 0.1]);
        let sd = a.spectral_decompose().unwrap();
        assert_eq!(sd.eigenvalues(), &[0.9, -0.5, 0.1]);
    }

    #[test]
    fn spectral_decompose_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let a = random_hermitian(8, &mut rng);
        let sd = a.spectral_decompose().unwrap();
        let rec = sd.reconstruct();
        let rel = rec.sub(&a).unwrap().frobenius_norm() / a.frobenius_norm();
        assert!(rel <= 1e-10, "residual {rel:.3e}");
        assert!(sd.orthonormality_defect() <= 1e-10);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::new(2, 2, vec![cr(0.0), cr(1.0), cr(0.0), cr(0.0)]).unwrap();
        assert!(matches!(
            a.spectral_decompose(),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn condition_number_basics() {
        assert!((ComplexMatrix::identity(3).condition_number().unwrap() - 1.0).abs() < 1e-12);
        let a = ComplexMatrix::diagonal(&[1.0, 0.25]);
        assert!((a.condition_number().unwrap() - 4.0).abs() < 1e-12);
        let z = ComplexMatrix::zeros(2, 2);
        assert!(matches!(z.condition_number(), Err(Error::ZeroMatrix)));
        let sing = ComplexMatrix::diagonal(&[1.0, 0.0]);
        assert!(sing.condition_number().unwrap().is_infinite());
    }

    #[test]
    fn condition_number_constructed_spectrum() {
        // Random SPD with spectrum forced into [1/kappa, 1], kappa = 20.
        let kappa = 20.0;
        let n = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let spectrum: Vec<f64> = (0..n)
            .map(|i| {
                if i == 0 {
                    1.0
                } else if i == n - 1 {
                    1.0 / kappa
                } else {
                    1.0 / kappa + rng.random::<f64>() * (1.0 - 1.0 / kappa)
                }
            })
            .collect();
        let raw = random_hermitian(n, &mut rng);
        let q = raw.spectral_decompose().unwrap();
        let mut a = ComplexMatrix::zeros(n, n);
        for (k, lam) in spectrum.iter().enumerate() {
            let u = q.eigenvector(k);
            for i in 0..n {
                for j in 0..n {
                    let idx = i * n + j;
                    a.entries[idx] += u.get(i) * u.get(j).conj() * cr(*lam);
                }
            }
        }
        let a = ComplexMatrix::new(n, n, a.entries).unwrap();
        assert!((a.condition_number().unwrap() - kappa).abs() < 1e-8);
    }

    #[test]
    fn polynomial_hand_example() {
        // 1 + 2 lambda + 3 lambda^2 at lambda = 1, 2 gives (6, 17).
        let a = ComplexMatrix::diagonal(&[1.0, 2.0]);
        let v = Vector::from_real(&[1.0, 1.0]);
        let out = apply_matrix_polynomial_real(&[1.0, 2.0, 3.0], &a, &v).unwrap();
        assert!((out.get(0) - cr(6.0)).norm() < 1e-12);
        assert!((out.get(1) - cr(17.0)).norm() < 1e-12);
    }

    #[test]
    fn polynomial_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_hermitian(4, &mut rng);
        let v = Vector::from_real(&[0.5, -0.25, 1.0, 0.0]);
        let id = apply_matrix_polynomial_real(&[1.0], &a, &v).unwrap();
        assert!(id.sub(&v).norm() < 1e-14);
        let av = apply_matrix_polynomial_real(&[0.0, 1.0], &a, &v).unwrap();
        assert!(av.sub(&a.mul_vec(&v).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn polynomial_dimension_mismatch() {
        let a = ComplexMatrix::identity(3);
        let v = Vector::zeros(2);
        assert!(matches!(
            apply_matrix_polynomial_real(&[1.0], &a, &v),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn horner_matches_naive_power_sum(seed in 0u64..1_000, n in 1usize..8, deg in 0usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_hermitian(n, &mut rng);
            let v = Vector::new((0..n).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect());
            let coeffs: Vec<C64> = (0..=deg).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            let horner = apply_matrix_polynomial(&coeffs, &a, &v).unwrap();
            // naive: accumulate A^l v by repeated multiplication
            let mut naive = Vector::zeros(n);
            let mut power = v.clone();
            for (l, cl) in coeffs.iter().enumerate() {
                if l > 0 {
                    power = a.mul_vec(&power).unwrap();
                }
                naive.axpy(*cl, &power);
            }
            prop_assert!(horner.sub(&naive).norm() <= 1e-10 * (1.0 + naive.norm()));
        }

        #[test]
        fn dilation_spectrum_symmetric_about_zero(seed in 0u64..1_000, p in 1usize..5, q in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = ComplexMatrix::from_fn(p, q, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            let sd = a.hermitian_dilation().spectral_decompose().unwrap();
            for lam in sd.eigenvalues() {
                let mirrored = sd.eigenvalues().iter().any(|l| (l + lam).abs() < 1e-10);
                prop_assert!(mirrored);
            }
        }

        #[test]
        fn reconstruction_is_tight(seed in 0u64..1_000, n in 1usize..9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_hermitian(n, &mut rng);
            let sd = a.spectral_decompose().unwrap();
            let rel = sd.reconstruct().sub(&a).unwrap().frobenius_norm() / a.frobenius_norm().max(1e-300);
            prop_assert!(rel <= 1e-10);
        }
    }
}
