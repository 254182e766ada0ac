//! Checks of the controllability hypotheses, gathered into JSON certificates.
//!
//! Every check records the thresholds it used and the numbers it looked at,
//! so a failing certificate says why it failed.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::herm::{eig_hermitian, eigenvalues, CMatrix, HermitianOperator, SpectrumPoint, C64};
use crate::lie::{controllability_verdict_with, Verdict};
use crate::models::enantio::{enantio_hamiltonian, h_w, EnantioParams, EnantioSign};
use crate::report::{num, nums, to_canonical_value};
use crate::scan::{Classification, IntersectionRecord};
use crate::system::ControlledHamiltonian;
use crate::tolerances::{scale_of, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Unreliable,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub location: Vec<Vec<f64>>,
    pub status: Status,
    pub witnesses: Value,
    pub tolerances: BTreeMap<String, f64>,
}

impl CheckResult {
    fn new(name: &str, location: Vec<Vec<f64>>, status: Status, witnesses: Value) -> Self {
        Self {
            name: name.into(),
            location,
            status,
            witnesses,
            tolerances: BTreeMap::new(),
        }
    }

    fn tol(mut self, key: &str, value: f64) -> Self {
        self.tolerances.insert(key.into(), value);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Passes iff every level in `levels` is joined to the next by some record
/// classified conical or weakly conical.
pub fn check_connectedness_levels(records: &[IntersectionRecord], levels: &[usize]) -> CheckResult {
    let mut connected = Vec::new();
    let mut missing = Vec::new();
    for &j in levels {
        if records.iter().any(|r| r.level == j && r.is_connecting()) {
            connected.push(j);
        } else {
            missing.push(j);
        }
    }
    let location = records
        .iter()
        .filter(|r| r.is_connecting() && levels.contains(&r.level))
        .map(|r| r.location.clone())
        .collect();
    let per_record: Vec<Value> = records
        .iter()
        .map(|r| {
            json!({
                "level": r.level,
                "location": nums(&r.location),
                "classification": r.classification,
                "multiplicity": r.multiplicity,
            })
        })
        .collect();
    CheckResult::new(
        "connectedness",
        location,
        Status::from_bool(missing.is_empty() && !levels.is_empty()),
        json!({
            "levels_checked": levels,
            "levels_connected": connected,
            "missing_levels": missing,
            "records": per_record,
        }),
    )
}

/// Connectedness of the whole spectrum of an `n`-level system.
pub fn check_connectedness(records: &[IntersectionRecord], n: usize) -> CheckResult {
    let levels: Vec<usize> = (1..n).collect();
    check_connectedness_levels(records, &levels)
}

fn spectrum_scale(point: &SpectrumPoint) -> f64 {
    scale_of(point.frobenius_norm())
}

/// `Some(failing check)` when two adjacent eigenvalues cluster.
fn simple_spectrum_guard(name: &str, point: &SpectrumPoint, tol: &Tolerances) -> Option<CheckResult> {
    let threshold = tol.cluster * spectrum_scale(point);
    let ev = &point.eigenvalues;
    let (mut level, mut mult) = (0, 1);
    for j in 1..=ev.len().saturating_sub(1) {
        let m = point.cluster_size(j, threshold);
        if m > mult {
            level = j;
            mult = m;
        }
    }
    (mult > 1).then(|| {
        CheckResult::new(
            name,
            vec![point.u.clone()],
            Status::Fail,
            json!({
                "degenerate": true,
                "level": level,
                "multiplicity": mult,
                "eigenvalues": nums(ev),
            }),
        )
        .tol("cluster", threshold)
    })
}

/// All eigenvalues separated by more than `tol.cluster * scale`.
pub fn check_simple_spectrum(point: &SpectrumPoint, tol: &Tolerances) -> CheckResult {
    let threshold = tol.cluster * spectrum_scale(point);
    simple_spectrum_guard("simple_spectrum", point, tol).unwrap_or_else(|| {
        let min_gap = point
            .eigenvalues
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        CheckResult::new(
            "simple_spectrum",
            vec![point.u.clone()],
            Status::Pass,
            json!({ "min_gap": num(min_gap), "eigenvalues": nums(&point.eigenvalues) }),
        )
        .tol("cluster", threshold)
    })
}

/// Non-resonance: the gaps `lambda_j - lambda_k` (`j > k`) are pairwise
/// distinct by more than `tol.nonresonance * scale`.
pub fn check_nonresonance(point: &SpectrumPoint, tol: &Tolerances) -> CheckResult {
    if let Some(fail) = simple_spectrum_guard("nonresonance", point, tol) {
        return fail;
    }
    let threshold = tol.nonresonance * spectrum_scale(point);
    let ev = &point.eigenvalues;
    let mut gaps: Vec<(f64, [usize; 2])> = Vec::new();
    for j in 0..ev.len() {
        for k in 0..j {
            gaps.push((ev[j] - ev[k], [j + 1, k + 1]));
        }
    }
    gaps.sort_by(|a, b| a.0.total_cmp(&b.0));
    let closest = gaps
        .windows(2)
        .map(|w| (w[1].0 - w[0].0, w[0].1, w[1].1))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    let witnesses = match closest {
        Some((d, p, q)) => json!({
            "min_gap_difference": num(d),
            "pairs": [p, q],
            "gaps": nums(&gaps.iter().map(|g| g.0).collect::<Vec<_>>()),
        }),
        None => json!({ "min_gap_difference": null, "pairs": [] }),
    };
    let ok = closest.is_none_or(|(d, _, _)| d > threshold);
    CheckResult::new("nonresonance", vec![point.u.clone()], Status::from_bool(ok), witnesses)
        .tol("nonresonance", threshold)
}

/// `|<phi_j, W phi_{j+1}>|` for every adjacent pair; passes iff all exceed
/// `tol.couple * ||W||_F`.
pub fn check_couplings(point: &SpectrumPoint, w: &HermitianOperator, tol: &Tolerances) -> Result<CheckResult> {
    if w.dim() != point.eigenvectors.nrows() {
        return Err(Error::DimensionMismatch {
            expected: point.eigenvectors.nrows(),
            found: w.dim(),
        });
    }
    if let Some(fail) = simple_spectrum_guard("couplings", point, tol) {
        return Ok(fail);
    }
    let threshold = tol.couple * w.frobenius_norm();
    let couplings = adjacent_couplings(point, w.matrix());
    let (min_level, min_value) = couplings
        .iter()
        .enumerate()
        .map(|(j, &c)| (j + 1, c))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, f64::INFINITY));
    let ok = couplings.iter().all(|&c| c > threshold);
    Ok(CheckResult::new(
        "couplings",
        vec![point.u.clone()],
        Status::from_bool(ok),
        json!({
            "couplings": nums(&couplings),
            "weakest_level": min_level,
            "weakest": num(min_value),
        }),
    )
    .tol("couple", threshold))
}

/// `|<phi_j, W phi_{j+1}>|`, `j = 1..n-1`.
pub fn adjacent_couplings(point: &SpectrumPoint, w: &CMatrix) -> Vec<f64> {
    let v = &point.eigenvectors;
    (0..point.dim().saturating_sub(1))
        .map(|j| {
            let wv = w * v.column(j + 1);
            v.column(j).dotc(&wv).norm()
        })
        .collect()
}

/// Uniform sample of the ball `|x - center| < radius` (rejection from the cube).
fn sample_ball(rng: &mut ChaCha8Rng, center: &[f64], radius: f64) -> Vec<f64> {
    loop {
        let d: Vec<f64> = center.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
        let r2: f64 = d.iter().map(|x| x * x).sum();
        if r2 < 1.0 {
            return center.iter().zip(d).map(|(c, x)| c + radius * x).collect();
        }
    }
}

/// Real-linear independence of the gap germs `u -> lambda_{j+1}(u) - lambda_j(u)`,
/// `j in levels`, on `samples` seeded points of a ball around `u_bar`.
///
/// Passes iff the smallest singular value of the column-normalised sample
/// matrix exceeds `tol.germ_singular`. Linear independence over the reals
/// implies independence over the rationals, so a pass certifies the
/// hypothesis; a failure is inconclusive.
pub fn germs_independence_proxy(
    model: &ControlledHamiltonian,
    u_bar: &[f64],
    levels: &[usize],
    radius: f64,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<CheckResult> {
    if levels.is_empty() {
        return Err(Error::EmptyInput("levels"));
    }
    for &j in levels {
        crate::herm::check_level(j, model.dim())?;
    }
    if samples < levels.len() {
        return Err(Error::InvalidParams(format!(
            "{samples} samples cannot separate {} germs",
            levels.len()
        )));
    }
    if !(radius > 0.0) || !model.region().contains_ball(u_bar, radius) {
        return Err(Error::ProbeOutsideRegion {
            center: u_bar.to_vec(),
            radius,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..samples).map(|_| sample_ball(&mut rng, u_bar, radius)).collect();
    let rows = points
        .par_iter()
        .map(|p| {
            let ev = eigenvalues(&model.hamiltonian_at_unchecked(p)?)?;
            Ok(levels.iter().map(|&j| ev[j] - ev[j - 1]).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut m = DMatrix::<f64>::from_fn(samples, levels.len(), |k, j| rows[k][j]);
    let mut norms = Vec::with_capacity(levels.len());
    for mut col in m.column_iter_mut() {
        let n = col.norm();
        norms.push(n);
        if n > 0.0 {
            col /= n;
        }
    }
    let sv = m.singular_values();
    let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let ok = smallest > tol.germ_singular;
    Ok(CheckResult::new(
        "germs_independence",
        vec![u_bar.to_vec()],
        Status::from_bool(ok),
        json!({
            "levels": levels,
            "samples": samples,
            "seed": seed,
            "radius": num(radius),
            "smallest_singular_value": num(smallest),
            "column_norms": nums(&norms),
            "inconclusive": !ok,
        }),
    )
    .tol("germ_singular", tol.germ_singular))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub values: Vec<f64>,
    pub verdict: Verdict,
    pub dim: usize,
    pub unreliable: bool,
    pub min_accepted_residual: f64,
    pub max_rejected_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    /// Frozen axes, original numbering.
    pub frozen_axes: Vec<usize>,
    pub entries: Vec<SweepEntry>,
    pub passes: usize,
    pub pass_fraction: f64,
    pub failing: Vec<Vec<f64>>,
}

impl SweepReport {
    /// Pass iff the pass fraction reaches `threshold`.
    pub fn to_check(&self, threshold: f64) -> CheckResult {
        let status = if self.pass_fraction >= threshold {
            if self.entries.iter().any(|e| e.unreliable) {
                Status::Unreliable
            } else {
                Status::Pass
            }
        } else {
            Status::Fail
        };
        let failing: Vec<Value> = self
            .entries
            .iter()
            .filter(|e| !e.verdict.is_full())
            .map(|e| {
                json!({
                    "values": nums(&e.values),
                    "verdict": e.verdict.label(),
                    "min_accepted_residual": num(e.min_accepted_residual),
                    "max_rejected_residual": num(e.max_rejected_residual),
                })
            })
            .collect();
        CheckResult::new(
            "controllability_sweep",
            Vec::new(),
            status,
            json!({
                "frozen_axes": self.frozen_axes,
                "samples": self.entries.len(),
                "passes": self.passes,
                "pass_fraction": num(self.pass_fraction),
                "unreliable": self.entries.iter().filter(|e| e.unreliable).count(),
                "failing": failing,
            }),
        )
        .tol("pass_fraction", threshold)
    }
}

/// Rank-condition verdicts with the `axes` frozen at each row of `values`.
pub fn sweep(
    model: &ControlledHamiltonian,
    axes: &[usize],
    values: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<SweepReport> {
    if values.is_empty() {
        return Err(Error::EmptyInput("sweep values"));
    }
    for v in values {
        if v.len() != axes.len() {
            return Err(Error::DimensionMismatch {
                expected: axes.len(),
                found: v.len(),
            });
        }
    }
    let entries = values
        .par_iter()
        .map(|v| {
            let frozen: Vec<(usize, f64)> = axes.iter().copied().zip(v.iter().copied()).collect();
            let r = controllability_verdict_with(model, &frozen, tol)?;
            Ok(SweepEntry {
                values: v.clone(),
                verdict: r.verdict,
                dim: r.dim,
                unreliable: r.unreliable,
                min_accepted_residual: r.min_accepted_residual,
                max_rejected_residual: r.max_rejected_residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let passes = entries.iter().filter(|e| e.verdict.is_full()).count();
    let failing = entries
        .iter()
        .filter(|e| !e.verdict.is_full())
        .map(|e| e.values.clone())
        .collect();
    Ok(SweepReport {
        frozen_axes: axes.to_vec(),
        pass_fraction: passes as f64 / entries.len() as f64,
        passes,
        entries,
        failing,
    })
}

/// Sweep with one axis frozen at each of `values`.
pub fn single_input_sweep(
    model: &ControlledHamiltonian,
    axis: usize,
    values: &[f64],
    tol: &Tolerances,
) -> Result<SweepReport> {
    let rows: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
    sweep(model, &[axis], &rows, tol)
}

/// `samples` seeded uniform points of the box `bounds`.
pub fn uniform_samples(bounds: &[(f64, f64)], samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| bounds.iter().map(|&(lo, hi)| rng.random_range(lo..hi)).collect())
        .collect()
}

/// Coefficients `a_0..a_d` (ascending) of the monic polynomial with the given roots.
pub fn monic_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (p, &a) in c.iter().enumerate() {
            next[p + 1] += a;
            next[p] -= r * a;
        }
        c = next;
    }
    c
}

/// `sum_p a_p ad^{2p}_{iH}(iW)`.
fn ad_polynomial(h: &CMatrix, w: &CMatrix, coeffs: &[f64]) -> CMatrix {
    let ih = h.map(|z| z * crate::herm::I);
    let mut x = w.map(|z| z * crate::herm::I);
    let mut acc = CMatrix::zeros(h.nrows(), h.ncols());
    for (p, &a) in coeffs.iter().enumerate() {
        if p > 0 {
            let once = &ih * &x - &x * &ih;
            x = &ih * &once - &once * &ih;
        }
        acc += x.map(|z| z * C64::new(a, 0.0));
    }
    acc
}

/// The enantiomer obstruction at control `z = (u, v, w)`.
///
/// With `H+` and `H-` the two enantiomers at `z`, checks
/// `lambda2+ - lambda1+ != 0`, `<phi1+, H_w phi2+> != 0` and
/// `lambda2+ - lambda1+ not in {lambda_k- - lambda_j-}`. As an algebraic witness it
/// builds the monic `P` with roots `{0, -(gaps of H-)^2}`: `P(ad^2_{iH-})`
/// annihilates everything, so `P(ad^2_{iH-})(iH_w)` must vanish while the same
/// combination for `H+` must not.
pub fn enantio_obstruction(z: [f64; 3], energies: [f64; 3], tol: &Tolerances) -> Result<CheckResult> {
    let sum: f64 = energies.iter().sum();
    if sum.abs() > 1e-12 * scale_of(energies.iter().map(|e| e.abs()).sum()) {
        return Err(Error::InvalidParams(format!("energies must sum to zero, got {sum:e}")));
    }
    let plus = EnantioParams::new(energies, EnantioSign::Plus)?;
    let hp = enantio_hamiltonian(&plus, z)?;
    let hm = enantio_hamiltonian(&plus.mirrored(), z)?;
    let w = h_w();
    let sp = eig_hermitian(&hp)?;
    let sm = eig_hermitian(&hm)?;
    let scale = scale_of(hp.frobenius_norm());
    let threshold = tol.spectral * scale;

    let gap_plus = sp.eigenvalues[1] - sp.eigenvalues[0];
    let coupling = adjacent_couplings(&sp, w.matrix())[0];
    let mut minus_gaps = Vec::new();
    for j in 0..3 {
        for k in (j + 1)..3 {
            minus_gaps.push(sm.eigenvalues[k] - sm.eigenvalues[j]);
        }
    }
    let separation = minus_gaps
        .iter()
        .map(|d| (gap_plus - d).abs())
        .fold(f64::INFINITY, f64::min);

    let mut roots = vec![0.0];
    roots.extend(minus_gaps.iter().map(|d| -d * d));
    let coeffs = monic_from_roots(&roots);
    let norm_minus = hm.spectral_norm()?;
    let witness_scale: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(p, a)| a.abs() * (2.0 * norm_minus).powi(2 * p as i32))
        .sum::<f64>()
        * w.frobenius_norm();
    let witness_tol = 1e-7 * witness_scale;
    let comb_plus = ad_polynomial(hp.matrix(), w.matrix(), &coeffs).norm();
    let comb_minus = ad_polynomial(hm.matrix(), w.matrix(), &coeffs).norm();

    let conditions = [
        gap_plus > threshold,
        coupling > threshold,
        separation > threshold,
        comb_minus < witness_tol,
        comb_plus > witness_tol,
    ];
    Ok(CheckResult::new(
        "enantio_obstruction",
        vec![z.to_vec()],
        Status::from_bool(conditions.iter().all(|&c| c)),
        json!({
            "gap_plus": num(gap_plus),
            "coupling_plus": num(coupling),
            "minus_gaps": nums(&minus_gaps),
            "gap_separation": num(separation),
            "polynomial_coefficients": nums(&coeffs),
            "ad_combination_plus": num(comb_plus),
            "ad_combination_minus": num(comb_minus),
            "conditions": {
                "gap_nonzero": conditions[0],
                "coupling_nonzero": conditions[1],
                "gap_not_in_mirror_gaps": conditions[2],
                "minus_combination_vanishes": conditions[3],
                "plus_combination_nonzero": conditions[4],
            },
        }),
    )
    .tol("spectral", threshold)
    .tol("ad_witness", witness_tol))
}

/// Simple spectrum, non-resonance and coupling checks at one control point,
/// with `coupling_axis` the control that drives the transitions. With
/// `lowest = Some(k)` only the sub-chain of the lowest `k` levels is checked,
/// as for truncated models whose top levels are artefacts of the cutoff.
pub fn point_checks(
    model: &ControlledHamiltonian,
    u: &[f64],
    coupling_axis: usize,
    lowest: Option<usize>,
    tol: &Tolerances,
) -> Result<Vec<CheckResult>> {
    if coupling_axis >= model.num_controls() {
        return Err(Error::InvalidParams(format!(
            "coupling axis {coupling_axis} out of range"
        )));
    }
    let full = model.spectrum_at(u)?;
    let sp = match lowest {
        Some(k) if k < 2 => {
            return Err(Error::InvalidParams(format!("a sub-chain needs at least 2 levels, got {k}")))
        }
        Some(k) => full.lowest(k),
        None => full,
    };
    Ok(vec![
        check_simple_spectrum(&sp, tol),
        check_nonresonance(&sp, tol),
        check_couplings(&sp, model.coupling(coupling_axis), tol)?,
    ])
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub status: Status,
    pub passed: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub model: String,
    pub timestamp: String,
    pub tolerances: Tolerances,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
}

impl Certificate {
    /// Summary passes iff every check passes.
    pub fn new(model: impl Into<String>, timestamp: impl Into<String>, tolerances: Tolerances, checks: Vec<CheckResult>) -> Self {
        let passed = checks.iter().filter(|c| c.passed()).count();
        let status = if checks.is_empty() {
            Status::Fail
        } else if passed == checks.len() {
            Status::Pass
        } else if checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else {
            Status::Unreliable
        };
        Self {
            model: model.into(),
            timestamp: timestamp.into(),
            tolerances,
            summary: Summary {
                status,
                passed,
                total: checks.len(),
            },
            checks,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.status == Status::Pass
    }

    pub fn to_json(&self) -> Value {
        to_canonical_value(self)
    }
}

/// Connecting records only: a helper for reports.
pub fn connecting(records: &[IntersectionRecord]) -> Vec<&IntersectionRecord> {
    records
        .iter()
        .filter(|r| {
            matches!(
                r.classification,
                Some(Classification::Conical | Classification::WeaklyConical)
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::build_counterexample;

    fn point(ev: &[f64]) -> SpectrumPoint {
        let mut sp = eig_hermitian(&HermitianOperator::diagonal(ev)).unwrap();
        sp.u = vec![0.0];
        sp
    }

    #[test]
    fn nonresonance_hand_cases() {
        let tol = Tolerances::default();
        assert!(check_nonresonance(&point(&[0.0, 1.0, 3.0, 7.0]), &tol).passed());
        let bad = check_nonresonance(&point(&[0.0, 1.0, 2.0, 3.0]), &tol);
        assert_eq!(bad.status, Status::Fail);
        assert_eq!(bad.witnesses["min_gap_difference"].as_f64(), Some(0.0));
        let degenerate = check_nonresonance(&point(&[0.0, 0.0, 3.0]), &tol);
        assert_eq!(degenerate.witnesses["multiplicity"], 2);
    }

    #[test]
    fn zero_coupling_fails() {
        let tol = Tolerances::default();
        let sp = point(&[0.0, 1.0, 3.0]);
        let c = check_couplings(&sp, &HermitianOperator::zeros(3), &tol).unwrap();
        assert_eq!(c.status, Status::Fail);
        let x = HermitianOperator::from_real_rows(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 1.0], &[0.0, 1.0, 0.0]]).unwrap();
        assert!(check_couplings(&sp, &x, &tol).unwrap().passed());
    }

    #[test]
    fn monic_expansion() {
        // (x - 1)(x + 2) x = x^3 + x^2 - 2x
        assert_eq!(monic_from_roots(&[1.0, -2.0, 0.0]), vec![0.0, -2.0, 1.0, 1.0]);
    }

    #[test]
    fn ad_polynomial_annihilates() {
        let h = HermitianOperator::diagonal(&[-1.0, 0.25, 0.75]);
        let w = h_w();
        let ev: [f64; 3] = [-1.0, 0.25, 0.75];
        let mut roots = vec![0.0];
        for j in 0..3 {
            for k in (j + 1)..3 {
                roots.push(-(ev[k] - ev[j]).powi(2));
            }
        }
        let c = monic_from_roots(&roots);
        assert!(ad_polynomial(h.matrix(), w.matrix(), &c).norm() < 1e-12);
    }

    #[test]
    fn counterexample_u2_sweep_is_deficient() {
        let m = build_counterexample();
        let r = single_input_sweep(&m, 1, &[0.0], &Tolerances::default()).unwrap();
        assert_eq!(r.pass_fraction, 0.0);
        assert!(!r.to_check(0.95).passed());
        assert!(single_input_sweep(&m, 1, &[], &Tolerances::default()).is_err());
    }

    #[test]
    fn certificate_summary() {
        let tol = Tolerances::default();
        let good = check_nonresonance(&point(&[0.0, 1.0, 3.0, 7.0]), &tol);
        let bad = check_nonresonance(&point(&[0.0, 1.0, 2.0, 3.0]), &tol);
        assert!(Certificate::new("m", "t", tol, vec![good.clone()]).passed());
        assert!(!Certificate::new("m", "t", tol, vec![good, bad]).passed());
        assert!(!Certificate::new("m", "t", tol, vec![]).passed());
    }
}
