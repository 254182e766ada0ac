//! Eigenvalue-surface scans over a two-dimensional control region, and the
//! search, isolation test and conical classification of level intersections.

use std::cell::Cell;
use std::f64::consts::TAU;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::herm::{check_level, eigenvalues};
use crate::report::fmt_f64;
use crate::system::ControlledHamiltonian;
use crate::tolerances::{scale_of, Tolerances};

pub use crate::system::ControlledHamiltonian as Model;

/// Cell-centred grid over a box inside the control region. Points are
/// `lo + (i + 1/2) (hi - lo) / count`, so they sit strictly inside the box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanGrid {
    pub bounds: [(f64, f64); 2],
    pub counts: [usize; 2],
}

impl ScanGrid {
    pub fn new(bounds: [(f64, f64); 2], counts: [usize; 2]) -> Result<Self> {
        for (axis, (&(lo, hi), &c)) in bounds.iter().zip(&counts).enumerate() {
            if !(lo < hi) {
                return Err(Error::InvalidParams(format!(
                    "grid axis {axis}: empty interval ({lo}, {hi})"
                )));
            }
            if c == 0 {
                return Err(Error::InvalidParams(format!("grid axis {axis}: zero samples")));
            }
        }
        Ok(Self { bounds, counts })
    }

    /// Grid spanning the whole (two-dimensional) control region.
    pub fn covering(model: &ControlledHamiltonian, counts: [usize; 2]) -> Result<Self> {
        let b = model.region().bounds();
        if b.len() != 2 {
            return Err(Error::InvalidParams(format!(
                "scans need two controls, model has {}",
                b.len()
            )));
        }
        Self::new([b[0], b[1]], counts)
    }

    pub fn len(&self) -> usize {
        self.counts[0] * self.counts[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> [f64; 2] {
        [0, 1].map(|a| (self.bounds[a].1 - self.bounds[a].0) / self.counts[a] as f64)
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        let (lo, _) = self.bounds[axis];
        lo + (i as f64 + 0.5) * self.spacing()[axis]
    }

    /// Row-major: `u1` index outer, `u2` index inner.
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let (i, j) = (flat / self.counts[1], flat % self.counts[1]);
        [self.coord(0, i), self.coord(1, j)]
    }

    fn check_inside(&self, model: &ControlledHamiltonian) -> Result<()> {
        let region = model.region().bounds();
        if region.len() != 2 {
            return Err(Error::InvalidParams(format!(
                "scans need two controls, model has {}",
                region.len()
            )));
        }
        for a in 0..2 {
            let (lo, hi) = self.bounds[a];
            if lo < region[a].0 || hi > region[a].1 {
                return Err(Error::OutsideRegion {
                    value: vec![lo, hi],
                });
            }
        }
        Ok(())
    }
}

/// Sorted eigenvalues at every grid point.
#[derive(Debug, Clone)]
pub struct EigenSurface {
    pub grid: ScanGrid,
    pub eigenvalues: Vec<Vec<f64>>,
}

impl EigenSurface {
    pub fn gaps(&self, level: usize) -> Result<GapSurface> {
        let dim = self.eigenvalues.first().map_or(0, Vec::len);
        check_level(level, dim)?;
        Ok(GapSurface {
            grid: self.grid.clone(),
            level,
            gaps: self
                .eigenvalues
                .iter()
                .map(|ev| ev[level] - ev[level - 1])
                .collect(),
        })
    }

    /// CSV with header `u1,u2,lambda_1..lambda_k`, preceded by `#` comment lines.
    pub fn write_csv<W: Write>(&self, mut w: W, header: &[String], k: usize) -> std::io::Result<()> {
        for line in header {
            writeln!(w, "# {line}")?;
        }
        let cols: Vec<String> = (1..=k).map(|j| format!("lambda_{j}")).collect();
        writeln!(w, "u1,u2,{}", cols.join(","))?;
        for (flat, ev) in self.eigenvalues.iter().enumerate() {
            let [a, b] = self.grid.point(flat);
            let vals: Vec<String> = ev.iter().take(k).map(|&x| fmt_f64(x)).collect();
            writeln!(w, "{},{},{}", fmt_f64(a), fmt_f64(b), vals.join(","))?;
        }
        Ok(())
    }
}

/// `lambda_{j+1} - lambda_j` over a grid.
#[derive(Debug, Clone)]
pub struct GapSurface {
    pub grid: ScanGrid,
    pub level: usize,
    pub gaps: Vec<f64>,
}

impl GapSurface {
    /// CSV with header `u1,u2,gap_<j>`, preceded by `#` comment lines.
    pub fn write_csv<W: Write>(&self, mut w: W, header: &[String]) -> std::io::Result<()> {
        for line in header {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "u1,u2,gap_{}", self.level)?;
        for (flat, &g) in self.gaps.iter().enumerate() {
            let [a, b] = self.grid.point(flat);
            writeln!(w, "{},{},{}", fmt_f64(a), fmt_f64(b), fmt_f64(g))?;
        }
        Ok(())
    }

    /// Grid points whose gap is no larger than at any of their eight
    /// neighbours, smallest gap first.
    pub fn local_minima(&self) -> Vec<[f64; 2]> {
        let [nx, ny] = self.grid.counts;
        let at = |i: usize, j: usize| self.gaps[i * ny + j];
        let mut found: Vec<(f64, usize)> = Vec::new();
        for i in 0..nx {
            for j in 0..ny {
                let g = at(i, j);
                let mut is_min = true;
                'nb: for di in -1i64..=1 {
                    for dj in -1i64..=1 {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let (ii, jj) = (i as i64 + di, j as i64 + dj);
                        if ii < 0 || jj < 0 || ii >= nx as i64 || jj >= ny as i64 {
                            continue;
                        }
                        if at(ii as usize, jj as usize) < g {
                            is_min = false;
                            break 'nb;
                        }
                    }
                }
                if is_min {
                    found.push((g, i * ny + j));
                }
            }
        }
        found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        found.into_iter().map(|(_, k)| self.grid.point(k)).collect()
    }
}

pub fn spectrum_at(model: &ControlledHamiltonian, u: &[f64]) -> Result<crate::herm::SpectrumPoint> {
    model.spectrum_at(u)
}

/// Eigenvalues of `H(u)` at every grid point (parallel, ordered).
pub fn scan_spectrum(model: &ControlledHamiltonian, grid: &ScanGrid) -> Result<EigenSurface> {
    grid.check_inside(model)?;
    let eigenvalues = (0..grid.len())
        .into_par_iter()
        .map(|k| eigenvalues(&model.hamiltonian_at_unchecked(&grid.point(k))?))
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenSurface {
        grid: grid.clone(),
        eigenvalues,
    })
}

/// Gap `lambda_{j+1} - lambda_j` at every grid point.
pub fn scan_gap_surface(model: &ControlledHamiltonian, grid: &ScanGrid, level: usize) -> Result<GapSurface> {
    check_level(level, model.dim())?;
    scan_spectrum(model, grid)?.gaps(level)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    Conical,
    WeaklyConical,
    HigherMultiplicity,
    NotIsolated,
    Unresolved,
}

/// One probed direction `eta` and the one-sided linear fits of the gap along it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionProbe {
    pub direction: [f64; 2],
    pub c_minus: f64,
    pub c_plus: f64,
    pub residual_minus: f64,
    pub residual_plus: f64,
    pub delta: f64,
    pub conical: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntersectionRecord {
    pub location: Vec<f64>,
    /// Intersection between `lambda_level` and `lambda_{level+1}` (1-based).
    pub level: usize,
    pub gap_at_location: f64,
    pub multiplicity: usize,
    pub classification: Option<Classification>,
    /// Directions that passed the conicality fit.
    pub conical_directions: Vec<DirectionProbe>,
    /// Number of directions probed during classification.
    pub directions_probed: usize,
    /// `max(||H(u)||_F, 1)` at the location; relative tolerances scale with it.
    pub scale: f64,
}

impl IntersectionRecord {
    pub fn is_connecting(&self) -> bool {
        matches!(
            self.classification,
            Some(Classification::Conical | Classification::WeaklyConical)
        )
    }
}

fn gap_at(model: &ControlledHamiltonian, u: &[f64], level: usize) -> Result<f64> {
    let ev = eigenvalues(&model.hamiltonian_at_unchecked(u)?)?;
    Ok(ev[level] - ev[level - 1])
}

fn scale_at(model: &ControlledHamiltonian, u: &[f64]) -> Result<f64> {
    Ok(scale_of(model.hamiltonian_at_unchecked(u)?.frobenius_norm()))
}

#[derive(Debug, Clone, Copy)]
pub struct LocateOptions {
    /// First pattern-search step, in control units.
    pub initial_step: f64,
    /// Stop once the step falls below this.
    pub min_step: f64,
    pub max_evals: usize,
}

impl Default for LocateOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.05,
            min_step: 1e-9,
            max_evals: 10_000,
        }
    }
}

pub fn locate_intersection(
    model: &ControlledHamiltonian,
    level: usize,
    seed: &[f64],
) -> Result<IntersectionRecord> {
    locate_intersection_with(model, level, seed, &LocateOptions::default(), &Tolerances::default())
}

/// Derivative-free search for a zero of `u -> lambda_{j+1}(u) - lambda_j(u)` from `seed`.
///
/// Cyclic coordinate search: along each axis in turn the gap is bracketed
/// with steps of `+-step` (doubling while it keeps decreasing) and the bracket
/// is shrunk by golden sections down to `min_step`. A cycle ends with the
/// same line search along its net displacement and a Newton step on the
/// squared gap, and the step for the next cycle is the distance moved in
/// the last one. Stops when a cycle moves less
/// than `min_step`, after `max_evals` evaluations, once the gap is at the
/// round-off floor `64 eps max(||H||_F, 1)`, or when ten cycles in a row fail
/// to halve it.
/// Succeeds iff the final gap is below `tol.intersect * max(||H(u)||_F, 1)`.
///
/// Settling one axis before moving along the next matters near crossings
/// that are exact only on a symmetry line: off that line the two levels can
/// stay closer than the tolerance along a whole curve, and a plain compass
/// poll drifts along it.
pub fn locate_intersection_with(
    model: &ControlledHamiltonian,
    level: usize,
    seed: &[f64],
    opts: &LocateOptions,
    tol: &Tolerances,
) -> Result<IntersectionRecord> {
    check_level(level, model.dim())?;
    model.ensure_inside(seed)?;
    let evals = Cell::new(0usize);
    let f = |u: &[f64]| -> Result<f64> {
        evals.set(evals.get() + 1);
        if model.region().contains(u) {
            gap_at(model, u, level)
        } else {
            Ok(f64::INFINITY)
        }
    };
    let mut x = seed.to_vec();
    let mut fx = f(&x)?;
    // below this the gap is round-off and further moves are noise
    let floor = 64.0 * f64::EPSILON * scale_at(model, seed)?;
    let mut step = opts.initial_step;
    let mut checkpoint = (0usize, fx);
    let mut cycle = 0usize;
    while evals.get() < opts.max_evals && fx > floor {
        cycle += 1;
        // ten cycles without halving the gap: a curved valley we will not
        // follow to its end within budget
        if cycle - checkpoint.0 >= 10 {
            if fx > 0.5 * checkpoint.1 {
                break;
            }
            checkpoint = (cycle, fx);
        }
        let before = x.clone();
        for axis in 0..x.len() {
            let mut e = vec![0.0; x.len()];
            e[axis] = 1.0;
            let (t, ft) = line_minimum(&f, &x, &e, fx, step, opts, &evals)?;
            x[axis] += t;
            fx = ft;
        }
        let moved = dist(&x, &before);
        if moved < opts.min_step {
            if step <= 4.0 * opts.min_step {
                break;
            }
            // nothing better at this resolution: look closer
            step = (1e-3 * step).max(4.0 * opts.min_step);
            continue;
        }
        // pattern move along the net displacement, which follows tilted valleys
        let d: Vec<f64> = x.iter().zip(&before).map(|(a, b)| (a - b) / moved).collect();
        let (t, ft) = line_minimum(&f, &x, &d, fx, moved, opts, &evals)?;
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += t * di;
        }
        fx = ft;
        if let Some((y, fy)) = quadratic_step(&f, &x, fx, moved.max(4.0 * opts.min_step))? {
            x = y;
            fx = fy;
        }
        step = moved.clamp(4.0 * opts.min_step, opts.initial_step);
    }
    let scale = scale_at(model, &x)?;
    let threshold = tol.intersect * scale;
    if !(fx < threshold) {
        return Err(Error::NoIntersectionFound {
            gap: fx,
            tol: threshold,
            location: x,
        });
    }
    let multiplicity = multiplicity_with(model, &x, level, tol)?;
    Ok(IntersectionRecord {
        location: x,
        level,
        gap_at_location: fx,
        multiplicity,
        classification: None,
        conical_directions: Vec::new(),
        directions_probed: 0,
        scale,
    })
}

pub fn multiplicity_at(model: &ControlledHamiltonian, u: &[f64], level: usize) -> Result<usize> {
    multiplicity_with(model, u, level, &Tolerances::default())
}

/// Size of the eigenvalue cluster containing `lambda_level(u)`, with
/// neighbours joined while their gap is below `tol.cluster * scale`.
pub fn multiplicity_with(
    model: &ControlledHamiltonian,
    u: &[f64],
    level: usize,
    tol: &Tolerances,
) -> Result<usize> {
    let h = model.hamiltonian_at(u)?;
    let ev = eigenvalues(&h)?;
    if level == 0 || level > ev.len() {
        return Err(Error::LevelOutOfRange {
            level,
            dim: ev.len(),
        });
    }
    let threshold = tol.cluster * scale_of(h.frobenius_norm());
    let idx = level - 1;
    let mut lo = idx;
    while lo > 0 && ev[lo] - ev[lo - 1] < threshold {
        lo -= 1;
    }
    let mut hi = idx;
    while hi + 1 < ev.len() && ev[hi + 1] - ev[hi] < threshold {
        hi += 1;
    }
    Ok(hi - lo + 1)
}

fn require_plane(model: &ControlledHamiltonian) -> Result<()> {
    if model.num_controls() != 2 {
        return Err(Error::InvalidParams(format!(
            "probe needs a two-control model, got {}",
            model.num_controls()
        )));
    }
    Ok(())
}

pub fn is_isolated(model: &ControlledHamiltonian, u: &[f64], level: usize, radius: f64) -> Result<bool> {
    is_isolated_with(model, u, level, radius, &Tolerances::default())
}

/// Samples `tol.ring_samples` points on rings of radius `r/4`, `r/2`, `r`
/// around `u`; isolated iff the gap exceeds `tol.intersect * scale` at all of them.
pub fn is_isolated_with(
    model: &ControlledHamiltonian,
    u: &[f64],
    level: usize,
    radius: f64,
    tol: &Tolerances,
) -> Result<bool> {
    require_plane(model)?;
    check_level(level, model.dim())?;
    if !(radius > 0.0) || !model.region().contains_ball(u, radius) {
        return Err(Error::ProbeOutsideRegion {
            center: u.to_vec(),
            radius,
        });
    }
    let threshold = tol.intersect * scale_at(model, u)?;
    let k = tol.ring_samples;
    let points: Vec<[f64; 2]> = [radius / 4.0, radius / 2.0, radius]
        .iter()
        .flat_map(|&r| {
            (0..k).map(move |i| {
                let phi = TAU * i as f64 / k as f64;
                [u[0] + r * phi.cos(), u[1] + r * phi.sin()]
            })
        })
        .collect();
    let gaps = points
        .par_iter()
        .map(|p| gap_at(model, p, level))
        .collect::<Result<Vec<_>>>()?;
    Ok(gaps.iter().all(|&g| g > threshold))
}

/// Least-squares slope of `y = c t` and its relative residual `||y - c t|| / ||y||`.
fn fit_through_origin(t: &[f64], y: &[f64]) -> (f64, f64) {
    let stt: f64 = t.iter().map(|x| x * x).sum();
    let sty: f64 = t.iter().zip(y).map(|(a, b)| a * b).sum();
    let c = sty / stt;
    let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let res = t
        .iter()
        .zip(y)
        .map(|(a, b)| (b - c * a).powi(2))
        .sum::<f64>()
        .sqrt();
    let rel = if ny > 0.0 { res / ny } else { 1.0 };
    (c, rel)
}

/// Probes `tol.directions` unit directions `eta_k = (cos 2 pi k/K, sin 2 pi k/K)`.
/// Along each, the gap at `u +- t eta` for `t in {d/8, d/4, d/2, d}` is fitted
/// by `c t` on each side; the direction is conical iff both slopes exceed
/// `tol.slope_floor * scale` and both relative residuals stay below `tol.fit_residual`.
pub fn probe_directions(
    model: &ControlledHamiltonian,
    record: &IntersectionRecord,
    tol: &Tolerances,
) -> Result<Vec<DirectionProbe>> {
    require_plane(model)?;
    let u = &record.location;
    let delta = tol.probe_radius;
    if !model.region().contains_ball(u, delta) {
        return Err(Error::ProbeOutsideRegion {
            center: u.clone(),
            radius: delta,
        });
    }
    let floor = tol.slope_floor * record.scale;
    let ts = [delta / 8.0, delta / 4.0, delta / 2.0, delta];
    let k = tol.directions;
    (0..k)
        .into_par_iter()
        .map(|i| {
            let phi = TAU * i as f64 / k as f64;
            let eta = [phi.cos(), phi.sin()];
            let side = |s: f64| -> Result<(f64, f64)> {
                let ys = ts
                    .iter()
                    .map(|&t| gap_at(model, &[u[0] + s * t * eta[0], u[1] + s * t * eta[1]], record.level))
                    .collect::<Result<Vec<_>>>()?;
                Ok(fit_through_origin(&ts, &ys))
            };
            let (c_minus, residual_minus) = side(-1.0)?;
            let (c_plus, residual_plus) = side(1.0)?;
            let conical = c_minus > floor
                && c_plus > floor
                && residual_minus < tol.fit_residual
                && residual_plus < tol.fit_residual;
            Ok(DirectionProbe {
                direction: eta,
                c_minus,
                c_plus,
                residual_minus,
                residual_plus,
                delta,
                conical,
            })
        })
        .collect()
}

pub fn classify_intersection(model: &ControlledHamiltonian, record: &IntersectionRecord) -> Result<IntersectionRecord> {
    classify_intersection_with(model, record, &Tolerances::default())
}

/// Fills in multiplicity, classification and conical directions.
///
/// Multiplicity above two gives `HIGHER_MULTIPLICITY`; failing the isolation
/// test at `tol.isolation_radius` gives `NOT_ISOLATED`; otherwise all probed
/// directions conical is `CONICAL`, some is `WEAKLY_CONICAL`, none is `UNRESOLVED`.
/// The conical verdict is sampled: it cannot certify uniform constants.
pub fn classify_intersection_with(
    model: &ControlledHamiltonian,
    record: &IntersectionRecord,
    tol: &Tolerances,
) -> Result<IntersectionRecord> {
    let threshold = tol.intersect * record.scale;
    if !(record.gap_at_location < threshold) {
        return Err(Error::InvalidParams(format!(
            "record gap {:e} is not below the intersection tolerance {threshold:e}",
            record.gap_at_location
        )));
    }
    let mut out = record.clone();
    out.multiplicity = multiplicity_with(model, &record.location, record.level, tol)?;
    out.conical_directions.clear();
    out.directions_probed = 0;
    if out.multiplicity > 2 {
        out.classification = Some(Classification::HigherMultiplicity);
        return Ok(out);
    }
    if !is_isolated_with(model, &record.location, record.level, tol.isolation_radius, tol)? {
        out.classification = Some(Classification::NotIsolated);
        return Ok(out);
    }
    let probes = probe_directions(model, &out, tol)?;
    out.directions_probed = probes.len();
    let passing: Vec<DirectionProbe> = probes.into_iter().filter(|p| p.conical).collect();
    out.classification = Some(if passing.len() == out.directions_probed && !passing.is_empty() {
        Classification::Conical
    } else if !passing.is_empty() {
        Classification::WeaklyConical
    } else {
        Classification::Unresolved
    });
    out.conical_directions = passing;
    Ok(out)
}

/// Conical directions of a record: empty unless the record is classified with
/// multiplicity two and at least one direction passed.
pub fn conical_directions(
    model: &ControlledHamiltonian,
    record: &IntersectionRecord,
) -> Result<Vec<DirectionProbe>> {
    match record.classification {
        Some(Classification::Conical | Classification::WeaklyConical) if record.multiplicity == 2 => {
            Ok(probe_directions(model, record, &Tolerances::default())?
                .into_iter()
                .filter(|p| p.conical)
                .collect())
        }
        _ => Ok(Vec::new()),
    }
}

/// Seeds every local minimum of each requested gap surface, runs the
/// pattern search from it and classifies what it finds. Duplicates (within
/// `1e-6` relative distance) are merged; seeds that do not converge to an
/// intersection are dropped.
pub fn find_intersections(
    model: &ControlledHamiltonian,
    grid: &ScanGrid,
    levels: &[usize],
    max_seeds_per_level: usize,
    tol: &Tolerances,
) -> Result<Vec<IntersectionRecord>> {
    let surface = scan_spectrum(model, grid)?;
    let spacing = grid.spacing();
    let opts = LocateOptions {
        initial_step: 0.5 * spacing[0].min(spacing[1]),
        ..LocateOptions::default()
    };
    let mut records: Vec<IntersectionRecord> = Vec::new();
    for &level in levels {
        let gaps = surface.gaps(level)?;
        for seed in gaps.local_minima().into_iter().take(max_seeds_per_level) {
            let rec = match locate_intersection_with(model, level, &seed, &opts, tol) {
                Ok(r) => r,
                Err(Error::NoIntersectionFound { .. }) => continue,
                Err(e) => return Err(e),
            };
            let dup = records.iter().any(|r| {
                r.level == level && dist(&r.location, &rec.location) < 1e-6 * (1.0 + norm(&rec.location))
            });
            if !dup {
                records.push(rec);
            }
        }
    }
    records
        .iter()
        .map(|r| classify_intersection_with(model, r, tol))
        .collect()
}

/// Best offset `t` along the unit vector `dir` from `x` and the gap there.
fn line_minimum<F>(
    f: &F,
    x: &[f64],
    dir: &[f64],
    fx: f64,
    step: f64,
    opts: &LocateOptions,
    evals: &Cell<usize>,
) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut best = (0.0, fx);
    let mut at = |t: f64| -> Result<f64> {
        let u: Vec<f64> = x.iter().zip(dir).map(|(xi, di)| xi + t * di).collect();
        let v = f(&u)?;
        if v < best.1 {
            best = (t, v);
        }
        Ok(v)
    };
    let fp = at(step)?;
    let fm = at(-step)?;
    let (mut a, mut b) = if fp >= fx && fm >= fx {
        (-step, step)
    } else {
        let dir = if fp < fm { 1.0 } else { -1.0 };
        let (mut prev, mut t, mut ft) = (0.0, dir * step, fp.min(fm));
        let mut bracket = None;
        for _ in 0..8 {
            let next = 2.0 * t;
            let fn_ = at(next)?;
            if fn_ < ft {
                prev = t;
                t = next;
                ft = fn_;
            } else {
                bracket = Some((prev, next));
                break;
            }
        }
        match bracket {
            Some((p, q)) => (p.min(q), p.max(q)),
            None => return Ok(best),
        }
    };
    const GOLD: f64 = 0.618_033_988_749_894_8;
    let mut c = b - GOLD * (b - a);
    let mut d = a + GOLD * (b - a);
    let mut fc = at(c)?;
    let mut fd = at(d)?;
    while b - a > opts.min_step && evals.get() < opts.max_evals {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLD * (b - a);
            fc = at(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLD * (b - a);
            fd = at(d)?;
        }
    }
    Ok(best)
}

/// Newton step on `F = gap^2`, which near a conical point is a positive
/// definite quadratic form. Gradient and Hessian come from central
/// differences with spacing `h`; the step is taken only if the Hessian is
/// positive definite, the step is at most `1000 h` long and the gap decreases.
fn quadratic_step<F>(f: &F, x: &[f64], fx: f64, h: f64) -> Result<Option<(Vec<f64>, f64)>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let d = x.len();
    let sq = |u: &[f64]| -> Result<f64> { f(u).map(|v| v * v) };
    let shifted = |pairs: &[(usize, f64)]| {
        let mut u = x.to_vec();
        for &(i, t) in pairs {
            u[i] += t;
        }
        u
    };
    let f0 = fx * fx;
    let mut grad = nalgebra::DVector::<f64>::zeros(d);
    let mut hess = nalgebra::DMatrix::<f64>::zeros(d, d);
    let mut plus = vec![0.0; d];
    for i in 0..d {
        let fp = sq(&shifted(&[(i, h)]))?;
        let fm = sq(&shifted(&[(i, -h)]))?;
        if !(fp.is_finite() && fm.is_finite()) {
            return Ok(None);
        }
        plus[i] = fp;
        grad[i] = (fp - fm) / (2.0 * h);
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let fij = sq(&shifted(&[(i, h), (j, h)]))?;
            if !fij.is_finite() {
                return Ok(None);
            }
            let v = (fij - plus[i] - plus[j] + f0) / (h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    let Some(chol) = hess.cholesky() else {
        return Ok(None);
    };
    let p = chol.solve(&(-grad));
    if !(p.norm() <= 1e3 * h) {
        return Ok(None);
    }
    let y: Vec<f64> = x.iter().zip(p.iter()).map(|(a, b)| a + b).collect();
    let fy = f(&y)?;
    Ok((fy < fx).then_some((y, fy)))
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}
