//! Real Lie algebras generated by skew-Hermitian matrices, and the
//! controllability verdicts derived from their dimension.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::herm::{
    block_diag, check_square, eig_hermitian, skew_deviation, CMatrix, HermitianOperator, C64,
};
use crate::system::ControlledHamiltonian;
use crate::tolerances::{scale_of, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "FULL_SU")]
    FullSu,
    #[serde(rename = "FULL_U")]
    FullU,
    #[serde(rename = "DEFICIENT")]
    Deficient(usize),
}

impl Verdict {
    pub fn is_full(self) -> bool {
        !matches!(self, Verdict::Deficient(_))
    }

    pub fn label(self) -> String {
        match self {
            Verdict::FullSu => "FULL_SU".into(),
            Verdict::FullU => "FULL_U".into(),
            Verdict::Deficient(d) => format!("DEFICIENT({d})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LieClosureResult {
    /// Matrix size `n` of the generators.
    pub n: usize,
    pub dim: usize,
    /// Orthonormal under `hs_inner`.
    pub basis: Vec<CMatrix>,
    pub generators_traceless: bool,
    pub verdict: Verdict,
    /// Smallest residual of an accepted candidate.
    pub min_accepted_residual: f64,
    /// Largest residual of a rejected candidate (0 if none was rejected).
    pub max_rejected_residual: f64,
    /// Some residual fell inside the unreliable band.
    pub unreliable: bool,
}

/// Isometric real coordinates of an `n x n` skew-Hermitian matrix:
/// `Im X_ii`, then `sqrt2 Re X_ij`, `sqrt2 Im X_ij` for `i < j`.
fn skew_coords(x: &CMatrix, out: &mut [f64]) {
    let n = x.nrows();
    let s2 = std::f64::consts::SQRT_2;
    let mut k = 0;
    for i in 0..n {
        out[k] = x[(i, i)].im;
        k += 1;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let z = x[(i, j)];
            out[k] = s2 * z.re;
            out[k + 1] = s2 * z.im;
            k += 2;
        }
    }
}

fn skew_from_coords(c: &[f64], n: usize) -> CMatrix {
    let s2 = std::f64::consts::SQRT_2;
    let mut x = CMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        x[(i, i)] = C64::new(0.0, c[k]);
        k += 1;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let z = C64::new(c[k] / s2, c[k + 1] / s2);
            x[(i, j)] = z;
            x[(j, i)] = -z.conj();
            k += 2;
        }
    }
    x
}

/// Row-major stack of orthonormal real vectors. Candidates arrive in blocks:
/// the block is projected against the stored rows with two passes of
/// classical Gram-Schmidt done as matrix products, then orthogonalised
/// within itself one row at a time.
struct OrthoBasis {
    len: usize,
    data: Vec<f64>,
    count: usize,
}

impl OrthoBasis {
    fn new(len: usize) -> Self {
        Self {
            len,
            data: Vec::new(),
            count: 0,
        }
    }

    fn row(&self, k: usize) -> &[f64] {
        &self.data[k * self.len..(k + 1) * self.len]
    }

    /// `block -= (block B^T) B` for the `rows x len` row-major `block`.
    fn project_block(&self, block: &mut [f64], rows: usize) {
        let (k, len) = (self.count, self.len);
        if k == 0 || rows == 0 {
            return;
        }
        let mut coef = vec![0.0; rows * k];
        // SAFETY: all slices hold exactly the extents passed with their strides.
        unsafe {
            // coef (rows x k) = block (rows x len) * B^T (len x k)
            matrixmultiply::dgemm(
                rows, len, k,
                1.0,
                block.as_ptr(), len as isize, 1,
                self.data.as_ptr(), 1, len as isize,
                0.0,
                coef.as_mut_ptr(), k as isize, 1,
            );
            // block (rows x len) -= coef (rows x k) * B (k x len)
            matrixmultiply::dgemm(
                rows, k, len,
                -1.0,
                coef.as_ptr(), k as isize, 1,
                self.data.as_ptr(), len as isize, 1,
                1.0,
                block.as_mut_ptr(), len as isize, 1,
            );
        }
    }

    fn project_rows(&self, from: usize, v: &mut [f64]) {
        for k in from..self.count {
            let c = dot(self.row(k), v);
            axpy(-c, self.row(k), v);
        }
    }

    /// Offers the rows of `block` in order; each accepted row (residual above
    /// `tol`) is normalised and appended. Stops accepting at `cap`. Returns
    /// the residual of every offered row and whether it was accepted.
    fn push_block(&mut self, block: &mut [f64], rows: usize, tol: f64, cap: usize) -> Vec<(f64, bool)> {
        self.project_block(block, rows);
        self.project_block(block, rows);
        let start = self.count;
        let mut out = Vec::with_capacity(rows);
        for v in block.chunks_exact_mut(self.len).take(rows) {
            if self.count >= cap {
                break;
            }
            self.project_rows(start, v);
            self.project_rows(start, v);
            let r = dot(v, v).sqrt();
            let accepted = r > tol;
            if accepted {
                v.iter_mut().for_each(|x| *x /= r);
                self.data.extend_from_slice(v);
                self.count += 1;
            }
            out.push((r, accepted));
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        let k = 4 * i;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..a.len() {
        s += a[k] * b[k];
    }
    s
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Nonzero entries of a generator; model couplings are mostly sparse.
struct SparseGen {
    n: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseGen {
    fn new(g: &CMatrix) -> Self {
        let n = g.nrows();
        let mut entries = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let z = g[(i, j)];
                if z != C64::new(0.0, 0.0) {
                    entries.push((i, j, z));
                }
            }
        }
        Self { n, entries }
    }

    /// `[g, b]`.
    fn bracket(&self, b: &CMatrix) -> CMatrix {
        let n = self.n;
        let mut c = CMatrix::zeros(n, n);
        for &(i, k, z) in &self.entries {
            // (g b)[i, :] += g_ik b[k, :]   and   (b g)[:, k] += b[:, i] g_ik
            for j in 0..n {
                c[(i, j)] += z * b[(k, j)];
            }
            for r in 0..n {
                c[(r, k)] -= b[(r, i)] * z;
            }
        }
        c
    }
}

/// Candidate rows offered to the basis per block.
const BLOCK_ROWS: usize = 96;

fn validate_generators(generators: &[CMatrix]) -> Result<usize> {
    let first = generators
        .first()
        .ok_or(Error::EmptyInput("generator list"))?;
    check_square(first)?;
    let n = first.nrows();
    for g in generators {
        check_square(g)?;
        if g.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.nrows(),
            });
        }
        let dev = skew_deviation(g);
        if dev > 1e-10 * scale_of(g.norm()) {
            return Err(Error::NotSkewHermitian { deviation: dev });
        }
    }
    Ok(n)
}

pub fn lie_closure(generators: &[CMatrix]) -> Result<LieClosureResult> {
    lie_closure_with(generators, &Tolerances::default())
}

/// Smallest real Lie algebra containing `generators`.
///
/// Generators are normalised to unit Frobenius norm. Each accepted basis
/// element is bracketed with every generator in breadth-first order; the
/// nested brackets `[g1, [g2, ... [gk-1, gk]]]` span the generated algebra,
/// so closing the span under `ad_g` is enough. A candidate joins the basis
/// when its residual after projection exceeds `tol.rank`. Stops early once
/// the dimension reaches `n^2` (or `n^2 - 1` for traceless generators).
pub fn lie_closure_with(generators: &[CMatrix], tol: &Tolerances) -> Result<LieClosureResult> {
    closure(generators, tol, true)
}

fn closure(generators: &[CMatrix], tol: &Tolerances, keep_basis: bool) -> Result<LieClosureResult> {
    let n = validate_generators(generators)?;
    let len = n * n;

    let gens: Vec<CMatrix> = generators
        .iter()
        .filter(|g| g.norm() > 0.0)
        .map(|g| g / C64::new(g.norm(), 0.0))
        .collect();
    let sparse: Vec<SparseGen> = gens.iter().map(SparseGen::new).collect();
    let traceless = generators
        .iter()
        .all(|g| g.trace().norm() <= 1e-10 * scale_of(g.norm()));
    let cap = if traceless { len - 1 } else { len };

    let mut basis = OrthoBasis::new(len);
    let mut min_acc = f64::INFINITY;
    let mut max_rej: f64 = 0.0;
    let mut unreliable = false;
    let mut record = |offers: Vec<(f64, bool)>| {
        for (r, accepted) in offers {
            if accepted {
                min_acc = min_acc.min(r);
            } else {
                max_rej = max_rej.max(r);
            }
            if r >= tol.rank_unreliable_lo && r <= tol.rank_unreliable_hi {
                unreliable = true;
            }
        }
    };

    let mut block = vec![0.0; len * gens.len().max(1)];
    for (g, row) in gens.iter().zip(block.chunks_exact_mut(len)) {
        skew_coords(g, row);
    }
    record(basis.push_block(&mut block, gens.len(), tol.rank, cap));

    let per_element = gens.len().max(1);
    let mut next = 0;
    while next < basis.count && basis.count < cap {
        let take = (BLOCK_ROWS / per_element).max(1).min(basis.count - next);
        let rows = take * per_element;
        block.resize(rows * len, 0.0);
        for t in 0..take {
            let b = skew_from_coords(basis.row(next + t), n);
            for (s, g) in sparse.iter().enumerate() {
                let row = (t * per_element + s) * len;
                skew_coords(&g.bracket(&b), &mut block[row..row + len]);
            }
        }
        record(basis.push_block(&mut block, rows, tol.rank, cap));
        next += take;
    }

    let dim = basis.count;
    let verdict = if dim == len {
        Verdict::FullU
    } else if traceless && dim == len - 1 {
        Verdict::FullSu
    } else {
        Verdict::Deficient(dim)
    };
    let mats = if keep_basis {
        (0..dim).map(|k| skew_from_coords(basis.row(k), n)).collect()
    } else {
        Vec::new()
    };
    Ok(LieClosureResult {
        n,
        dim,
        basis: mats,
        generators_traceless: traceless,
        verdict,
        min_accepted_residual: if dim > 0 { min_acc } else { 0.0 },
        max_rejected_residual: max_rej,
        unreliable,
    })
}

/// Rank-condition verdict for `model` with the listed controls frozen.
///
/// Generators are `i H0'` (drift with the frozen couplings folded in) and
/// `i H_l` for every remaining control. Only the dimension is kept: the
/// returned `basis` is empty (use [`lie_closure`] for the elements).
pub fn controllability_verdict(
    model: &ControlledHamiltonian,
    frozen: &[(usize, f64)],
) -> Result<LieClosureResult> {
    controllability_verdict_with(model, frozen, &Tolerances::default())
}

pub fn controllability_verdict_with(
    model: &ControlledHamiltonian,
    frozen: &[(usize, f64)],
    tol: &Tolerances,
) -> Result<LieClosureResult> {
    let reduced = model.freeze_many(frozen)?;
    let mut gens = vec![reduced.drift().to_skew()];
    gens.extend(reduced.couplings().iter().map(HermitianOperator::to_skew));
    closure(&gens, tol, false)
}

#[derive(Debug, Clone)]
pub struct SimultaneousResult {
    pub n: usize,
    pub dim: usize,
    pub full: bool,
    pub closure: LieClosureResult,
}

/// Simultaneous controllability of two systems driven by the same control:
/// closes `diag(i A_drift, i B_drift)` and `diag(i A_coupling, i B_coupling)`
/// and reports full iff the dimension is `2 (n^2 - 1)`.
pub fn simultaneous_verdict(
    pair_a: (&HermitianOperator, &HermitianOperator),
    pair_b: (&HermitianOperator, &HermitianOperator),
) -> Result<SimultaneousResult> {
    let n = pair_a.0.dim();
    for h in [pair_a.1, pair_b.0, pair_b.1] {
        if h.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: h.dim(),
            });
        }
    }
    for h in [pair_a.0, pair_a.1, pair_b.0, pair_b.1] {
        if h.trace().abs() > 1e-10 * scale_of(h.frobenius_norm()) {
            return Err(Error::InvalidParams(format!(
                "simultaneous verdict needs traceless Hamiltonians (trace {})",
                h.trace()
            )));
        }
    }
    let drift = block_diag(&pair_a.0.to_skew(), &pair_b.0.to_skew());
    let coupling = block_diag(&pair_a.1.to_skew(), &pair_b.1.to_skew());
    let closure = lie_closure(&[drift, coupling])?;
    let dim = closure.dim;
    Ok(SimultaneousResult {
        n,
        dim,
        full: dim == 2 * (n * n - 1),
        closure,
    })
}

#[derive(Debug, Clone)]
pub struct InvariantSubspaces {
    /// Complex dimension of the associative algebra generated by `1` and the generators.
    pub algebra_dim: usize,
    /// Complex dimension of the commutant (0 when not computed).
    pub commutant_dim: usize,
    /// Orthogonal projectors onto common invariant subspaces; empty when irreducible.
    pub projectors: Vec<CMatrix>,
}

/// Complex Gram-Schmidt over `C^(n^2)` (column-major vectorisation).
fn associative_closure_dim(gens: &[CMatrix], n: usize, tol: f64) -> usize {
    let len = n * n;
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let push = |basis: &mut Vec<Vec<C64>>, m: &CMatrix| -> bool {
        let mut v: Vec<C64> = m.iter().copied().collect();
        for _ in 0..2 {
            for b in basis.iter() {
                let c: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
        }
        let r = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if r > tol {
            v.iter_mut().for_each(|z| *z /= r);
            basis.push(v);
            true
        } else {
            false
        }
    };
    push(&mut basis, &CMatrix::identity(n, n));
    for g in gens {
        push(&mut basis, g);
    }
    let mut next = 0;
    while next < basis.len() && basis.len() < len {
        let b = CMatrix::from_column_slice(n, n, &basis[next]);
        for g in gens {
            push(&mut basis, &(g * &b));
            if basis.len() >= len {
                break;
            }
        }
        next += 1;
    }
    basis.len()
}

/// Common invariant subspaces of skew-Hermitian generators.
///
/// If the associative algebra they generate (with the identity) is all of
/// `M_n(C)` the action is irreducible and no projector is returned. Otherwise
/// a seeded random Hermitian element of the commutant is diagonalised and the
/// projectors onto its eigenspaces are returned, in ascending eigenvalue order.
pub fn invariant_subspace_probe(generators: &[CMatrix]) -> Result<InvariantSubspaces> {
    let n = validate_generators(generators)?;
    let tol = Tolerances::default();
    let gens: Vec<CMatrix> = generators
        .iter()
        .filter(|g| g.norm() > 0.0)
        .map(|g| g / C64::new(g.norm(), 0.0))
        .collect();
    let algebra_dim = associative_closure_dim(&gens, n, tol.rank);
    if algebra_dim == n * n {
        return Ok(InvariantSubspaces {
            algebra_dim,
            commutant_dim: 1,
            projectors: Vec::new(),
        });
    }

    // vec(gX - Xg) = (I (x) g - g^T (x) I) vec(X)
    let len = n * n;
    let id = CMatrix::identity(n, n);
    let mut stacked = CMatrix::zeros(len * gens.len().max(1), len);
    for (k, g) in gens.iter().enumerate() {
        let block = id.kronecker(g) - g.transpose().kronecker(&id);
        stacked.view_mut((k * len, 0), (len, len)).copy_from(&block);
    }
    let svd = stacked.svd(false, true);
    let v_t = svd.v_t.ok_or(Error::EigenFailure { dim: len })?;
    let smax = svd.singular_values.iter().fold(0.0_f64, |a, &b| a.max(b));
    let null: Vec<CMatrix> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol.rank * scale_of(smax))
        .map(|(k, _)| {
            let v: Vec<C64> = v_t.row(k).iter().map(|z| z.conj()).collect();
            CMatrix::from_column_slice(n, n, &v)
        })
        .collect();
    let commutant_dim = null.len();
    if commutant_dim <= 1 {
        return Ok(InvariantSubspaces {
            algebra_dim,
            commutant_dim,
            projectors: Vec::new(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x1d5e_ed00);
    for _ in 0..16 {
        let mut x = CMatrix::zeros(n, n);
        for b in &null {
            let c = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            x += b * c;
        }
        let herm = (&x + x.adjoint()) * C64::new(0.5, 0.0);
        let mean = herm.trace() / C64::new(n as f64, 0.0);
        let traceless = &herm - CMatrix::identity(n, n) * mean;
        if traceless.norm() < 1e-6 * scale_of(herm.norm()) {
            continue;
        }
        let sp = eig_hermitian(&HermitianOperator::new(herm)?)?;
        let spread = sp.eigenvalues[n - 1] - sp.eigenvalues[0];
        let mut projectors = Vec::new();
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && sp.eigenvalues[end] - sp.eigenvalues[end - 1] < 1e-6 * spread {
                end += 1;
            }
            let v = sp.eigenvectors.columns(start, end - start);
            projectors.push(&v * v.adjoint());
            start = end;
        }
        return Ok(InvariantSubspaces {
            algebra_dim,
            commutant_dim,
            projectors,
        });
    }
    Err(Error::EigenFailure { dim: n })
}

/// Rank of a projector (rounded trace).
pub fn projector_rank(p: &CMatrix) -> usize {
    p.trace().re.round() as usize
}

/// Real matrix of pairwise `hs_inner` products; used by tests and reports.
pub fn gram_matrix(basis: &[CMatrix]) -> DMatrix<f64> {
    let d = basis.len();
    DMatrix::from_fn(d, d, |i, j| {
        basis[i]
            .iter()
            .zip(basis[j].iter())
            .map(|(x, y)| x.re * y.re + x.im * y.im)
            .sum()
    })
}
