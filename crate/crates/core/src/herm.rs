//! Dense complex Hermitian and skew-Hermitian algebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tolerances::{scale_of, Tolerances};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// A Hermitian matrix, exactly symmetrised at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    entries: CMatrix,
}

impl HermitianOperator {
    /// Checks `||A - A^dagger||_max <= tol_herm * max(||A||_F, 1)` and stores
    /// `(A + A^dagger) / 2`.
    pub fn new(entries: CMatrix) -> Result<Self> {
        Self::with_tolerance(entries, Tolerances::default().herm)
    }

    pub fn with_tolerance(entries: CMatrix, tol: f64) -> Result<Self> {
        check_square(&entries)?;
        let deviation = max_abs_diff(&entries, &entries.adjoint());
        if deviation > tol * scale_of(entries.norm()) {
            return Err(Error::NotHermitian { deviation });
        }
        let sym = (&entries + entries.adjoint()).scale(0.5);
        Ok(Self { entries: sym })
    }

    /// Builds from a real symmetric row-major table.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = C64::new(x, 0.0);
            }
        }
        Self::new(m)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let m = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Self { entries: m }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: CMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    /// Spectral norm, via the eigenvalues.
    pub fn spectral_norm(&self) -> Result<f64> {
        let sp = eig_hermitian(self)?;
        Ok(sp
            .eigenvalues
            .iter()
            .fold(0.0_f64, |acc, &x| acc.max(x.abs())))
    }

    /// `self + s * other`; stays Hermitian for real `s`.
    pub fn add_scaled(&self, other: &HermitianOperator, s: f64) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries + other.entries.map(|z| z * s),
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            entries: self.entries.map(|z| z * s),
        }
    }

    /// The skew-Hermitian generator `i H`.
    pub fn to_skew(&self) -> CMatrix {
        self.entries.map(|z| z * I)
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// `U^dagger H U` for unitary `U`.
    pub fn conjugated_by(&self, u: &CMatrix) -> Result<Self> {
        same_dim(self.dim(), u.nrows())?;
        let m = u.adjoint() * &self.entries * u;
        Self::new(m)
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors at one control value.
#[derive(Debug, Clone)]
pub struct SpectrumPoint {
    pub u: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors, in eigenvalue order.
    pub eigenvectors: CMatrix,
}

impl SpectrumPoint {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// The lowest `k` levels only; eigenvectors keep their full length.
    pub fn lowest(&self, k: usize) -> SpectrumPoint {
        let k = k.min(self.dim());
        SpectrumPoint {
            u: self.u.clone(),
            eigenvalues: self.eigenvalues[..k].to_vec(),
            eigenvectors: self.eigenvectors.columns(0, k).into_owned(),
        }
    }

    /// `lambda_{j+1} - lambda_j` with 1-based `j`.
    pub fn gap(&self, level: usize) -> Result<f64> {
        check_level(level, self.dim())?;
        Ok(self.eigenvalues[level] - self.eigenvalues[level - 1])
    }

    pub fn eigenvector(&self, index: usize) -> CVector {
        self.eigenvectors.column(index).into_owned()
    }

    /// Frobenius norm of the reconstructed operator, `sqrt(sum lambda^2)`.
    pub fn frobenius_norm(&self) -> f64 {
        self.eigenvalues.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> CMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(lam);
        }
        scaled * v.adjoint()
    }

    /// Size of the eigenvalue cluster containing the 1-based level `level`,
    /// neighbours joined while their gap is below `threshold`.
    pub fn cluster_size(&self, level: usize, threshold: f64) -> usize {
        let idx = level - 1;
        let ev = &self.eigenvalues;
        let mut lo = idx;
        while lo > 0 && ev[lo] - ev[lo - 1] < threshold {
            lo -= 1;
        }
        let mut hi = idx;
        while hi + 1 < ev.len() && ev[hi + 1] - ev[hi] < threshold {
            hi += 1;
        }
        hi - lo + 1
    }
}

/// A unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    entries: CMatrix,
}

impl UnitaryOperator {
    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    /// Wraps `entries` after checking `||U^dagger U - I||_F < tol`.
    pub fn new(entries: CMatrix, tol: f64) -> Result<Self> {
        check_square(&entries)?;
        let defect = unitarity_defect(&entries);
        if defect >= tol {
            return Err(Error::InvalidParams(format!(
                "matrix is not unitary (defect {defect:e})"
            )));
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_raw(entries: CMatrix) -> Self {
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    /// `||U^dagger U - I||_F`.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.entries)
    }

    /// `self * other` (apply `other` first).
    pub fn compose(&self, other: &UnitaryOperator) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries * &other.entries,
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    pub fn apply(&self, psi: &CVector) -> Result<CVector> {
        same_dim(self.dim(), psi.len())?;
        Ok(&self.entries * psi)
    }
}

pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - CMatrix::identity(n, n)).norm()
}

/// Eigendecomposition of a Hermitian operator.
///
/// Eigenvalues are ascending. Each eigenvector has its largest-modulus
/// component made real and positive (first such index on ties). Within a
/// degenerate cluster the vectors are an arbitrary orthonormal basis of the
/// eigenspace; use projectors there.
pub fn eig_hermitian(h: &HermitianOperator) -> Result<SpectrumPoint> {
    let n = h.dim();
    if n == 0 {
        return Ok(SpectrumPoint {
            u: Vec::new(),
            eigenvalues: Vec::new(),
            eigenvectors: CMatrix::zeros(0, 0),
        });
    }
    let eig = nalgebra::SymmetricEigen::try_new(h.matrix().clone(), f64::EPSILON, 1000 * n)
        .ok_or(Error::EigenFailure { dim: n })?;
    if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenFailure { dim: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let mut best = 0;
        let mut best_mod = -1.0;
        for (i, z) in col.iter().enumerate() {
            let m = z.norm();
            if m > best_mod * (1.0 + 1e-12) {
                best = i;
                best_mod = m;
            }
        }
        let pivot = col[best];
        let phase = if pivot.norm() > 0.0 {
            pivot.conj() / pivot.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        vectors.set_column(dst, &col.map(|z| z * phase));
    }
    Ok(SpectrumPoint {
        u: Vec::new(),
        eigenvalues,
        eigenvectors: vectors,
    })
}

/// Ascending eigenvalues only, skipping the eigenvector accumulation.
pub fn eigenvalues(h: &HermitianOperator) -> Result<Vec<f64>> {
    let n = h.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let m = h.matrix();
    // real symmetric input (every model here) takes the cheaper real solver
    let mut ev: Vec<f64> = if m.iter().all(|z| z.im == 0.0) {
        m.map(|z| z.re).symmetric_eigenvalues().iter().copied().collect()
    } else {
        m.symmetric_eigenvalues().iter().copied().collect()
    };
    if ev.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenFailure { dim: n });
    }
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// `AB - BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_square(a)?;
    same_dim(a.nrows(), b.nrows())?;
    same_dim(a.ncols(), b.ncols())?;
    Ok(a * b - b * a)
}

/// Real Hilbert-Schmidt inner product `Re tr(A^dagger B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    same_dim(a.nrows(), b.nrows())?;
    same_dim(a.ncols(), b.ncols())?;
    Ok(a.iter()
        .zip(b.iter())
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum())
}

/// `exp(-i t H)` through the eigendecomposition of `H`.
pub fn evolve(h: &HermitianOperator, t: f64) -> Result<UnitaryOperator> {
    let sp = eig_hermitian(h)?;
    Ok(evolve_from_spectrum(&sp, t))
}

pub(crate) fn evolve_from_spectrum(sp: &SpectrumPoint, t: f64) -> UnitaryOperator {
    let v = &sp.eigenvectors;
    let mut scaled = v.clone();
    for (j, &lam) in sp.eigenvalues.iter().enumerate() {
        let phase = C64::from_polar(1.0, -t * lam);
        for z in scaled.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    UnitaryOperator::from_raw(scaled * v.adjoint())
}

/// Max entrywise deviation of `a` from skew-Hermiticity.
pub fn skew_deviation(a: &CMatrix) -> f64 {
    max_abs_diff(a, &a.adjoint().map(|z| -z))
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

pub(crate) fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

pub(crate) fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub(crate) fn check_level(level: usize, dim: usize) -> Result<()> {
    if dim < 2 || level == 0 || level >= dim {
        return Err(Error::LevelOutOfRange { level, dim });
    }
    Ok(())
}

/// Block-diagonal `diag(a, b)`.
pub fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (n, m) = (a.nrows(), b.nrows());
    let mut out = CMatrix::zeros(n + m, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((n, n), (m, m)).copy_from(b);
    out
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Reconstruction {
    pub orthonormality: f64,
    pub residual: f64,
}

/// `||V^dagger V - I||_F` and `||H - V Lambda V^dagger||_F` for a decomposition.
pub fn reconstruction_error(h: &HermitianOperator, sp: &SpectrumPoint) -> Reconstruction {
    Reconstruction {
        orthonormality: unitarity_defect(&sp.eigenvectors),
        residual: (h.matrix() - sp.reconstruct()).norm(),
    }
}
