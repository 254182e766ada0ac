//! The subcommands. Each returns whether its checks passed.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use conicert::certify::{
    check_connectedness_levels, connecting, enantio_obstruction, germs_independence_proxy, point_checks, sweep,
    uniform_samples, CheckResult, Certificate,
};
use conicert::herm::CVector;
use conicert::propagate::{populations, step_propagators, PiecewiseControl};
use conicert::report::fmt_f64;
use conicert::scan::{find_intersections, scan_spectrum, IntersectionRecord, ScanGrid};
use conicert::{ControlledHamiltonian, UnitaryOperator, C64};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{csv_header, out_path, provenance, write_json, write_with};

/// Scan plane box: the JC scan defaults to the `u2 = 0` line.
fn plane_grid(cfg: &RunConfig, model: &ControlledHamiltonian) -> Result<ScanGrid, CliError> {
    if let Some([a, b]) = cfg.grid.bounds {
        return Ok(ScanGrid::new([(a[0], a[1]), (b[0], b[1])], cfg.grid.res)?);
    }
    let r = model.region().bounds();
    if cfg.model_name() == "jc" && cfg.grid.res[1] == 1 {
        return Ok(ScanGrid::new([r[0], (0.0, 0.0)], cfg.grid.res)?);
    }
    Ok(ScanGrid::new([r[0], r[1]], cfg.grid.res)?)
}

/// Gap levels scanned or searched: all of them for small models, else `1..=6`.
fn gap_levels(cfg: &RunConfig, n: usize) -> Vec<usize> {
    match &cfg.grid.levels {
        Some(l) => l.clone(),
        None if n <= 8 => (1..n).collect(),
        None => (1..=6).collect(),
    }
}

pub fn scan(cfg: &RunConfig) -> Result<bool, CliError> {
    let model = cfg.plane_model()?;
    let grid = plane_grid(cfg, &model)?;
    let surface = scan_spectrum(&model, &grid)?;
    let header = csv_header("scan", cfg);
    let k = cfg.grid.eigen_levels.unwrap_or(model.dim()).min(model.dim());
    let path = out_path(cfg, "eigen.csv")?;
    write_with(&path, |w| surface.write_csv(w, &header, k))?;
    for level in gap_levels(cfg, model.dim()) {
        let gaps = surface.gaps(level)?;
        let path = out_path(cfg, &format!("gap_{level}.csv"))?;
        write_with(&path, |w| gaps.write_csv(w, &header))?;
    }
    Ok(true)
}

fn search(cfg: &RunConfig, model: &ControlledHamiltonian, levels: &[usize]) -> Result<Vec<IntersectionRecord>, CliError> {
    let tol = &cfg.tolerances;
    let Some(seeds) = &cfg.grid.seeds else {
        let grid = plane_grid(cfg, model)?;
        return Ok(find_intersections(model, &grid, levels, cfg.grid.max_seeds, tol)?);
    };
    let mut records: Vec<IntersectionRecord> = Vec::new();
    for &level in levels {
        for s in seeds {
            let rec = match conicert::scan::locate_intersection_with(
                model,
                level,
                s,
                &conicert::scan::LocateOptions::default(),
                tol,
            ) {
                Ok(r) => r,
                Err(conicert::Error::NoIntersectionFound { .. }) => continue,
                Err(e) => return Err(e.into()),
            };
            let dup = records.iter().any(|r| {
                r.level == level
                    && r.location.iter().zip(&rec.location).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() < 1e-6
            });
            if !dup {
                records.push(conicert::scan::classify_intersection_with(model, &rec, tol)?);
            }
        }
    }
    Ok(records)
}

pub fn classify(cfg: &RunConfig) -> Result<bool, CliError> {
    let model = cfg.plane_model()?;
    let levels = gap_levels(cfg, model.dim());
    let records = search(cfg, &model, &levels)?;
    let mut doc = provenance("classify", cfg);
    doc.insert("levels".into(), json!(levels));
    doc.insert("records".into(), conicert::report::to_canonical_value(&records));
    let path = out_path(cfg, "classify.json")?;
    write_json(&path, &Value::Object(doc))?;
    Ok(true)
}

/// Default control point: seeded uniform in the region clipped to `[-3, 3]`,
/// and in `g > 0.1` for JC where `g = 0` decouples the levels.
fn certify_point(cfg: &RunConfig, model: &ControlledHamiltonian) -> Vec<f64> {
    if let Some(p) = &cfg.certify.point {
        return p.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    model
        .region()
        .bounds()
        .iter()
        .enumerate()
        .map(|(axis, &(lo, hi))| {
            let lo = if cfg.model_name() == "jc" && axis == 0 { 0.1 } else { lo.max(-3.0) };
            rng.random_range(lo..hi.min(3.0))
        })
        .collect()
}

/// Size of the checked sub-chain: the whole spectrum for small models, else 7.
fn chain_len(cfg: &RunConfig, n: usize) -> usize {
    cfg.certify.levels.unwrap_or(if n <= 8 { n } else { 7 }).min(n)
}

fn default_coupling_axis(cfg: &RunConfig, m: usize) -> usize {
    cfg.certify.coupling_axis.unwrap_or(match cfg.model_name() {
        "enantio" => 2,
        "counterexample" | "jc" => 1,
        _ => m - 1,
    })
}

fn connectedness_checks(cfg: &RunConfig, k: usize) -> Result<Vec<CheckResult>, CliError> {
    let plane = cfg.plane_model()?;
    let levels: Vec<usize> = (1..k).collect();
    let mut local = cfg.clone();
    // JC scans the whole region slowly; a small box around the low crossings is enough.
    if cfg.model_name() == "jc" && cfg.grid.bounds.is_none() {
        local.grid.bounds = Some([[0.0, 2.5], [-0.5, 0.5]]);
        local.grid.res = [50, 4];
        local.grid.max_seeds = local.grid.max_seeds.min(4);
    }
    let records = search(&local, &plane, &levels)?;
    let mut checks = vec![check_connectedness_levels(&records, &levels)];
    if cfg.certify.germs {
        let mut seen = Vec::new();
        for rec in connecting(&records) {
            if seen.contains(&rec.level) {
                continue;
            }
            seen.push(rec.level);
            let room = plane
                .region()
                .bounds()
                .iter()
                .zip(&rec.location)
                .map(|(&(lo, hi), &x)| (x - lo).min(hi - x))
                .fold(f64::INFINITY, f64::min);
            let radius = cfg.certify.germ_radius.min(0.5 * room);
            if !(radius > 0.0) {
                continue;
            }
            checks.push(germs_independence_proxy(
                &plane,
                &rec.location,
                &[rec.level],
                radius,
                cfg.certify.germ_samples,
                cfg.seed,
                &cfg.tolerances,
            )?);
        }
    }
    Ok(checks)
}

fn sweep_checks(cfg: &RunConfig, model: &ControlledHamiltonian) -> Result<Vec<CheckResult>, CliError> {
    let mut checks = Vec::new();
    for (i, group) in cfg.sweep.axes.iter().enumerate() {
        let axes = group.axes();
        if let Some(&bad) = axes.iter().find(|&&a| a >= model.num_controls()) {
            return Err(CliError::Config(format!("sweep axis {bad} out of range")));
        }
        let values = match (&cfg.sweep.values, &cfg.sweep.bounds) {
            (Some(v), _) => v.clone(),
            (None, Some(b)) => {
                if b.len() != axes.len() {
                    return Err(CliError::Config("sweep.bounds needs one interval per frozen axis".into()));
                }
                let b: Vec<(f64, f64)> = b.iter().map(|x| (x[0], x[1])).collect();
                uniform_samples(&b, cfg.sweep.samples, cfg.seed + i as u64)
            }
            (None, None) => {
                let r = model.region().bounds();
                let b: Vec<(f64, f64)> = axes.iter().map(|&a| r[a]).collect();
                uniform_samples(&b, cfg.sweep.samples, cfg.seed + i as u64)
            }
        };
        let report = sweep(model, &axes, &values, &cfg.tolerances)?;
        checks.push(report.to_check(cfg.certify.threshold));
    }
    Ok(checks)
}

fn write_certificate(cfg: &RunConfig, command: &str, checks: Vec<CheckResult>) -> Result<bool, CliError> {
    let cert = Certificate::new(cfg.model_name(), cfg.timestamp(), cfg.tolerances.clone(), checks);
    let mut doc = provenance(command, cfg);
    if let Value::Object(body) = cert.to_json() {
        doc.extend(body);
    }
    let path = out_path(cfg, "certificate.json")?;
    write_json(&path, &Value::Object(doc))?;
    Ok(cert.passed())
}

pub fn certify(cfg: &RunConfig) -> Result<bool, CliError> {
    let model = cfg.full_model()?;
    let n = model.dim();
    let k = chain_len(cfg, n);
    let point = certify_point(cfg, &model);
    let lowest = (k < n).then_some(k);
    let mut checks = point_checks(&model, &point, default_coupling_axis(cfg, model.num_controls()), lowest, &cfg.tolerances)?;
    if cfg.model_name() == "enantio" {
        let z: [f64; 3] = point
            .as_slice()
            .try_into()
            .map_err(|_| CliError::Config("enantio certify.point needs 3 entries".into()))?;
        checks.push(enantio_obstruction(z, cfg.energies(), &cfg.tolerances)?);
    }
    if cfg.certify.connectedness && k >= 2 {
        checks.extend(connectedness_checks(cfg, k)?);
    }
    checks.extend(sweep_checks(cfg, &model)?);
    write_certificate(cfg, "certify", checks)
}

/// Only the configured sweeps, written as a certificate.
pub fn sweep_only(cfg: &RunConfig) -> Result<bool, CliError> {
    if cfg.sweep.axes.is_empty() {
        return Err(CliError::Config("no sweep axes (config [sweep] axes or --freeze-axis)".into()));
    }
    let model = cfg.full_model()?;
    let checks = sweep_checks(cfg, &model)?;
    write_certificate(cfg, "sweep", checks)
}

/// Rows `t_start,t_end,u1,...`; intervals must be contiguous.
fn read_schedule(path: &Path, m: usize) -> Result<PiecewiseControl, CliError> {
    let csv_err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    let mut breakpoints: Vec<f64> = Vec::new();
    let mut values = Vec::new();
    for row in rdr.deserialize::<Vec<f64>>() {
        let row = row.map_err(csv_err)?;
        if row.len() != m + 2 {
            return Err(CliError::Config(format!(
                "{}: expected {} columns (t_start, t_end and {m} controls), found {}",
                path.display(),
                m + 2,
                row.len()
            )));
        }
        match breakpoints.last() {
            None => breakpoints.push(row[0]),
            Some(&t) if t != row[0] => {
                return Err(CliError::Config(format!(
                    "{}: interval starting at {} does not follow the previous end {t}",
                    path.display(),
                    row[0]
                )))
            }
            Some(_) => {}
        }
        breakpoints.push(row[1]);
        values.push(row[2..].to_vec());
    }
    Ok(PiecewiseControl::new(breakpoints, values)?)
}

fn basis_state(n: usize, k: usize) -> Result<CVector, CliError> {
    if k >= n {
        return Err(CliError::Config(format!("initial_state {k} out of range for dimension {n}")));
    }
    let mut psi = CVector::zeros(n);
    psi[k] = C64::new(1.0, 0.0);
    Ok(psi)
}

/// Accumulated propagators after each interval, identity first.
fn accumulate(model: &ControlledHamiltonian, ctrl: &PiecewiseControl) -> Result<Vec<UnitaryOperator>, CliError> {
    let mut acc = vec![UnitaryOperator::identity(model.dim())];
    for step in step_propagators(model, ctrl)? {
        let next = step.compose(acc.last().expect("nonempty"))?;
        acc.push(next);
    }
    Ok(acc)
}

pub fn propagate(cfg: &RunConfig) -> Result<bool, CliError> {
    let model = cfg.full_model()?;
    let path = cfg
        .propagate
        .schedule
        .as_ref()
        .ok_or_else(|| CliError::Config("no schedule (config [propagate] schedule or --schedule)".into()))?;
    let ctrl = read_schedule(path, model.num_controls())?;
    let psi0 = basis_state(model.dim(), cfg.propagate.initial_state)?;
    let mirror = match cfg.propagate.pair {
        Some(false) => None,
        Some(true) if cfg.model_name() != "enantio" => {
            return Err(CliError::Config("propagate.pair needs the enantio model".into()))
        }
        _ => cfg.mirror_model()?,
    };
    let acc = accumulate(&model, &ctrl)?;
    let acc_mirror = mirror.as_ref().map(|m| accumulate(m, &ctrl)).transpose()?;

    let n = model.dim();
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=n).map(|k| format!("p_{k}")));
    if acc_mirror.is_some() {
        cols.extend((1..=n).map(|k| format!("mirror_p_{k}")));
    }
    cols.push("fidelity".into());
    cols.push("unitarity".into());

    let mut worst: f64 = 0.0;
    let mut rows = Vec::with_capacity(acc.len());
    for (j, u) in acc.iter().enumerate() {
        let psi = u.apply(&psi0)?;
        let mut row = vec![ctrl.breakpoints()[j]];
        row.extend(populations(&psi));
        let mut defect = u.unitarity_defect();
        // Paired runs report the overlap of the two enantiomers, single runs the return probability.
        let fid = match &acc_mirror {
            Some(am) => {
                let phi = am[j].apply(&psi0)?;
                row.extend(populations(&phi));
                defect = defect.max(am[j].unitarity_defect());
                psi.dotc(&phi).norm_sqr()
            }
            None => psi0.dotc(&psi).norm_sqr(),
        };
        row.push(fid.min(1.0));
        row.push(defect);
        worst = worst.max(defect);
        rows.push(row);
    }

    let header = csv_header("propagate", cfg);
    let out = out_path(cfg, "trajectory.csv")?;
    write_with(&out, |w| {
        for line in &header {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "{}", cols.join(","))?;
        for row in &rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    })?;
    Ok(worst < 1e-9 * (ctrl.len().max(1) as f64))
}
