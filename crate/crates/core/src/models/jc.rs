//! Driven Jaynes-Cummings model on a truncated Fock space.
//!
//! `H(u1, u2) = w (a^dag a + 1/2) + (W/2) sz + u1 (a s+ + a^dag s-) + u2 (a^dag + a)`
//! with `u1` the coupling `g` and `u2` the drive amplitude. The basis is
//! interleaved: index `2n` is `|n> (x) e1`, index `2n + 1` is `|n> (x) e-1`,
//! for `n = 0..=N`. The ladder operators are cut at `N` (`a^dag |N> = 0`).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::herm::{eig_hermitian, evolve, CMatrix, HermitianOperator, C64};
use crate::system::{ControlRegion, ControlledHamiltonian};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JcParams {
    /// Oscillator frequency.
    pub omega: f64,
    /// Two-level splitting.
    #[serde(rename = "Omega")]
    pub big_omega: f64,
    /// Highest retained Fock level.
    #[serde(rename = "N_trunc")]
    pub n_trunc: usize,
}

impl JcParams {
    pub fn new(omega: f64, big_omega: f64, n_trunc: usize) -> Result<Self> {
        let p = Self {
            omega,
            big_omega,
            n_trunc,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.big_omega > 0.0) {
            return Err(Error::InvalidParams(format!(
                "omega and Omega must be positive, got ({}, {})",
                self.omega, self.big_omega
            )));
        }
        if self.n_trunc < 2 {
            return Err(Error::InvalidParams(format!(
                "N_trunc must be at least 2, got {}",
                self.n_trunc
            )));
        }
        Ok(())
    }

    /// Detuning `Omega - omega`.
    pub fn detuning(&self) -> f64 {
        self.big_omega - self.omega
    }

    pub fn dim(&self) -> usize {
        2 * (self.n_trunc + 1)
    }

    pub fn with_truncation(&self, n_trunc: usize) -> Self {
        Self { n_trunc, ..*self }
    }
}

/// Truncated annihilation operator on `|0>..|N>`.
fn annihilation(n_max: usize) -> CMatrix {
    let d = n_max + 1;
    let mut a = CMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

fn spin(m: [[f64; 2]; 2]) -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| C64::new(m[i][j], 0.0))
}

struct Ops {
    a: CMatrix,
    id_osc: CMatrix,
    id_spin: CMatrix,
    sz: CMatrix,
    sx: CMatrix,
    sp: CMatrix,
    sm: CMatrix,
}

impl Ops {
    fn new(n_max: usize) -> Self {
        let d = n_max + 1;
        Self {
            a: annihilation(n_max),
            id_osc: CMatrix::identity(d, d),
            id_spin: CMatrix::identity(2, 2),
            sz: spin([[1.0, 0.0], [0.0, -1.0]]),
            sx: spin([[0.0, 1.0], [1.0, 0.0]]),
            // s+ = |e1><e-1|, s- = |e-1><e1| with e1 first
            sp: spin([[0.0, 1.0], [0.0, 0.0]]),
            sm: spin([[0.0, 0.0], [1.0, 0.0]]),
        }
    }

    /// Oscillator operator (x) spin operator in the interleaved basis.
    fn kron(osc: &CMatrix, s: &CMatrix) -> CMatrix {
        osc.kronecker(s)
    }

    fn adag(&self) -> CMatrix {
        self.a.adjoint()
    }

    fn number(&self) -> CMatrix {
        self.adag() * &self.a
    }

    fn drift(&self, p: &JcParams) -> CMatrix {
        let half = C64::new(0.5, 0.0);
        let osc = (self.number() + &self.id_osc * half) * C64::new(p.omega, 0.0);
        Self::kron(&osc, &self.id_spin) + Self::kron(&self.id_osc, &(&self.sz * C64::new(p.big_omega / 2.0, 0.0)))
    }

    fn coupling(&self) -> CMatrix {
        Self::kron(&self.a, &self.sp) + Self::kron(&self.adag(), &self.sm)
    }

    fn drive(&self) -> CMatrix {
        Self::kron(&(&self.a + self.adag()), &self.id_spin)
    }

    fn spin_x(&self) -> CMatrix {
        Self::kron(&self.id_osc, &self.sx)
    }
}

/// Default half-widths of the control box: `g in (-4, 4)`, `u2 in (-2, 2)`.
pub const DEFAULT_BOUNDS: [(f64, f64); 2] = [(-4.0, 4.0), (-2.0, 2.0)];

/// Controls `(u1, u2) = (g, drive)`.
pub fn build_jc(p: &JcParams) -> Result<ControlledHamiltonian> {
    p.validate()?;
    let ops = Ops::new(p.n_trunc);
    ControlledHamiltonian::new(
        format!("jc[N={}]", p.n_trunc),
        HermitianOperator::new(ops.drift(p))?,
        vec![
            HermitianOperator::new(ops.coupling())?,
            HermitianOperator::new(ops.drive())?,
        ],
        ControlRegion::new(DEFAULT_BOUNDS.to_vec())?,
        vec!["g".into(), "u".into()],
    )
}

/// Branch sign `nu` of `E_{n,nu}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Nu {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Nu {
    pub fn factor(self) -> f64 {
        match self {
            Nu::Plus => 1.0,
            Nu::Minus => -1.0,
        }
    }
}

/// Label `(n, nu)` of an analytic branch; `n = -1` is the isolated level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Branch {
    pub n: i64,
    pub nu: Nu,
}

impl Branch {
    pub fn new(n: i64, nu: Nu) -> Self {
        Self { n, nu }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JcLevel {
    pub branch: Branch,
    pub energy: f64,
}

/// Label of the isolated level `|0> (x) e-1`, energy `-Delta/2`: with
/// `E_{-1,nu} = nu |Delta| / 2` this is `nu = -` for `Delta >= 0`.
pub fn isolated_branch(p: &JcParams) -> Branch {
    let nu = if p.detuning() >= 0.0 { Nu::Minus } else { Nu::Plus };
    Branch::new(-1, nu)
}

/// `E_{n,nu}(g) = w (n + 1) + nu sqrt(Delta^2 + 4 g^2 (n + 1)) / 2`.
pub fn branch_energy(b: Branch, g: f64, p: &JcParams) -> f64 {
    let d = p.detuning();
    let k = (b.n + 1) as f64;
    p.omega * k + b.nu.factor() * 0.5 * (d * d + 4.0 * g * g * k).sqrt()
}

fn is_valid_branch(b: Branch, p: &JcParams) -> bool {
    b.n >= 0 || b == isolated_branch(p)
}

/// Analytic eigenvalues of `H(g, 0)`: the isolated level, then `(n, +)`,
/// `(n, -)` for `n = 0..=n_max`.
pub fn jc_analytic_spectrum(g: f64, p: &JcParams, n_max: usize) -> Vec<JcLevel> {
    let mut out = Vec::with_capacity(2 * n_max + 3);
    let iso = isolated_branch(p);
    out.push(JcLevel {
        branch: iso,
        energy: -p.detuning() / 2.0,
    });
    for n in 0..=n_max as i64 {
        for nu in [Nu::Plus, Nu::Minus] {
            let b = Branch::new(n, nu);
            out.push(JcLevel {
                branch: b,
                energy: branch_energy(b, g, p),
            });
        }
    }
    out
}

/// Ascending analytic energies.
pub fn jc_sorted_energies(g: f64, p: &JcParams, n_max: usize) -> Vec<f64> {
    let mut e: Vec<f64> = jc_analytic_spectrum(g, p, n_max)
        .into_iter()
        .map(|l| l.energy)
        .collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Validation threshold for roots of the crossing quadratic.
pub const CROSSING_TOL: f64 = 1e-9;

/// Positive `g` where branches `a` and `b` cross.
///
/// With `x = g^2 / w^2`, a crossing requires
/// `x^2 - 2 (m + n + 2) x + (m - n)^2 - (Delta / w)^2 = 0`. The equation comes
/// from squaring, so each positive root is kept only if the two branch
/// energies agree within [`CROSSING_TOL`].
pub fn jc_intersection_g(a: Branch, b: Branch, p: &JcParams) -> Result<Vec<f64>> {
    if a == b {
        return Err(Error::InvalidParams("branches must differ".into()));
    }
    for br in [a, b] {
        if !is_valid_branch(br, p) {
            return Err(Error::InvalidParams(format!("invalid branch {br:?}")));
        }
    }
    let s = (a.n + b.n + 2) as f64;
    let k = (a.n - b.n) as f64;
    let d = p.detuning() / p.omega;
    let c = k * k - d * d;
    let disc = s * s - c;
    if disc < 0.0 {
        return Ok(Vec::new());
    }
    let sq = disc.sqrt();
    let q = s + sq;
    let mut roots = vec![q];
    if q != 0.0 {
        roots.push(c / q);
    } else {
        roots.push(s - sq);
    }
    let mut out: Vec<f64> = roots
        .into_iter()
        .filter(|&x| x > 0.0)
        .map(|x| p.omega * x.sqrt())
        .filter(|&g| (branch_energy(a, g, p) - branch_energy(b, g, p)).abs() < CROSSING_TOL)
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

/// 1-based sorted level index `j` such that a crossing at energy `e` involves
/// `lambda_j` and `lambda_{j+1}` of `H(g, 0)`.
pub fn crossing_level(g: f64, e: f64, p: &JcParams, n_max: usize) -> usize {
    let tol = 1e-7 * (1.0 + e.abs());
    1 + jc_sorted_energies(g, p, n_max)
        .iter()
        .filter(|&&x| x < e - tol)
        .count()
}

/// `H~(t1, t2) = w (a^dag a + 1/2) + (W/2) sz + t1 (a^dag s- + a s+) + t2 sx`.
pub fn h_tilde(p: &JcParams, t1: f64, t2: f64) -> Result<HermitianOperator> {
    let ops = Ops::new(p.n_trunc);
    let m = ops.drift(p) + ops.coupling() * C64::new(t1, 0.0) + ops.spin_x() * C64::new(t2, 0.0);
    HermitianOperator::new(m)
}

/// Truncated `D(delta) = exp(delta a^dag - delta a)`.
pub fn displacement(p: &JcParams, delta: f64) -> Result<CMatrix> {
    let ops = Ops::new(p.n_trunc);
    // exp(delta (a^dag - a)) = exp(-i K) with K = i delta (a^dag - a) Hermitian
    let gen = Ops::kron(&(ops.adag() - &ops.a), &ops.id_spin) * C64::new(0.0, delta);
    Ok(evolve(&HermitianOperator::new(gen)?, 1.0)?.into_matrix())
}

/// Residual of `H(u1, u2) = D^dag H~(u1, -u1 delta) D + (w delta^2 - 2 u2 delta)`
/// with `delta = u2 / w`, in Frobenius norm over the Fock levels `n < N/2`.
pub fn jc_displacement_check(u1: f64, u2: f64, p: &JcParams) -> Result<f64> {
    p.validate()?;
    let delta = u2 / p.omega;
    let n = p.n_trunc;
    if n < 4 || 4.0 * delta.abs() > (n as f64).sqrt() {
        return Err(Error::InvalidParams(format!(
            "truncation N={n} too small for displacement {delta}"
        )));
    }
    let model = build_jc(p)?;
    let h = model.hamiltonian_at_unchecked(&[u1, u2])?;
    let d = displacement(p, delta)?;
    let ht = h_tilde(p, u1, -u1 * delta)?;
    let shift = p.omega * delta * delta - 2.0 * u2 * delta;
    let dim = p.dim();
    let rhs = d.adjoint() * ht.matrix() * &d + CMatrix::identity(dim, dim) * C64::new(shift, 0.0);
    let keep = 2 * (n / 2);
    let diff = h.matrix().view((0, 0), (keep, keep)) - rhs.view((0, 0), (keep, keep));
    Ok(diff.norm())
}

/// Smallest nearest-neighbour gap among the lowest `k` levels of `H(u1, u2)`.
pub fn jc_nondegeneracy_probe(u1: f64, u2: f64, p: &JcParams, k: usize) -> Result<f64> {
    if k < 2 || k > p.n_trunc / 2 {
        return Err(Error::InvalidParams(format!(
            "level count {k} must lie in 2..={}",
            p.n_trunc / 2
        )));
    }
    let model = build_jc(p)?;
    let sp = eig_hermitian(&model.hamiltonian_at_unchecked(&[u1, u2])?)?;
    Ok(sp.eigenvalues[..k]
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::SQRT_2;

    fn fig3(n: usize) -> JcParams {
        JcParams::new(0.4, SQRT_2, n).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(JcParams::new(0.4, SQRT_2, 1).is_err());
        assert!(JcParams::new(-0.4, SQRT_2, 10).is_err());
        assert_eq!(fig3(10).dim(), 22);
    }

    #[test]
    fn drift_spectrum_is_tensor_product() {
        let p = fig3(12);
        let m = build_jc(&p).unwrap();
        let sp = eig_hermitian(m.drift()).unwrap();
        let mut expected: Vec<f64> = (0..=12)
            .flat_map(|n| {
                let base = 0.4 * (n as f64 + 0.5);
                [base + SQRT_2 / 2.0, base - SQRT_2 / 2.0]
            })
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in sp.eigenvalues.iter().zip(&expected) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn coupling_annihilates_ground_pair_state() {
        let m = build_jc(&fig3(6)).unwrap();
        let h1 = m.coupling(0).matrix();
        // |0> (x) e-1 is index 1
        assert!(h1.column(1).norm() == 0.0);
        for h in m.couplings() {
            assert!((h.matrix() - h.matrix().adjoint()).norm() < 1e-12);
        }
    }

    #[test]
    fn analytic_branches_at_zero_coupling() {
        let p = fig3(10);
        assert!(p.detuning() > 0.0);
        for n in 0..10_i64 {
            let plus = branch_energy(Branch::new(n, Nu::Plus), 0.0, &p);
            let minus = branch_energy(Branch::new(n, Nu::Minus), 0.0, &p);
            let e0 = |m: i64, s: f64| 0.4 * (m as f64 + 0.5) + s * SQRT_2 / 2.0;
            assert_abs_diff_eq!(plus, e0(n, 1.0), epsilon = 1e-13);
            assert_abs_diff_eq!(minus, e0(n + 1, -1.0), epsilon = 1e-13);
        }
        let iso = jc_analytic_spectrum(0.0, &p, 0)[0];
        assert_eq!(iso.branch, isolated_branch(&p));
        assert_abs_diff_eq!(iso.energy, 0.4 * 0.5 - SQRT_2 / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(branch_energy(iso.branch, 1.3, &p), iso.energy, epsilon = 1e-15);
    }

    #[test]
    fn fig3_branch_pair_crossing() {
        let p = fig3(60);
        let a = Branch::new(10, Nu::Plus);
        let b = Branch::new(15, Nu::Minus);
        // quadratic x^2 - 54 x + 25 - (Delta/w)^2 = 0
        let d2 = (p.detuning() / p.omega).powi(2);
        let disc: f64 = 27.0_f64.powi(2) - (25.0 - d2);
        let (x_lo, x_hi) = (27.0 - disc.sqrt(), 27.0 + disc.sqrt());
        // exact root is 0.346127..; the commonly quoted 0.34615 is a loose rounding
        assert_abs_diff_eq!(x_lo, 0.346127, epsilon = 1e-6);
        assert_abs_diff_eq!(x_lo, 0.34615, epsilon = 3e-5);
        assert_abs_diff_eq!(x_hi, 53.654, epsilon = 1e-3);
        // the large root is spurious
        let g_hi = 0.4 * x_hi.sqrt();
        assert!((branch_energy(a, g_hi, &p) - branch_energy(b, g_hi, &p)).abs() > 1.0);

        let roots = jc_intersection_g(a, b, &p).unwrap();
        assert_eq!(roots.len(), 1);
        assert_abs_diff_eq!(roots[0], 0.4 * x_lo.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(roots[0], 0.23534, epsilon = 1e-5);
        assert_abs_diff_eq!(branch_energy(a, roots[0], &p), 5.3309, epsilon = 1e-3);
    }

    #[test]
    fn increasing_branches_never_cross() {
        let p = fig3(30);
        for n in 0..8 {
            for m in (n + 1)..10 {
                let r = jc_intersection_g(Branch::new(n, Nu::Plus), Branch::new(m, Nu::Plus), &p).unwrap();
                assert!(r.is_empty(), "({n},+)/({m},+): {r:?}");
            }
        }
        let same = Branch::new(3, Nu::Minus);
        assert!(jc_intersection_g(same, same, &p).is_err());
    }

    #[test]
    fn displacement_identity_trivial_without_drive() {
        let p = fig3(20);
        assert!(jc_displacement_check(0.7, 0.0, &p).unwrap() < 1e-10);
    }

    #[test]
    fn rational_ratio_gives_exact_degeneracy() {
        // Omega = 2 omega: E0(n, 1) = E0(n + 2, -1)
        let p = JcParams::new(0.5, 1.0, 20).unwrap();
        let gap = jc_nondegeneracy_probe(0.0, 0.0, &p, 10).unwrap();
        assert!(gap < 1e-12);
    }
}
