//! Run configuration: a TOML file, then command-line overrides, then defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use conicert::models::enantio::{build_enantio_plane, EnantioParams, EnantioSign};
use conicert::models::{build_counterexample, build_enantio, build_jc, JcParams};
use conicert::{ControlRegion, ControlledHamiltonian, HermitianOperator, Tolerances};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// `counterexample`, `enantio`, `jc` or `custom`.
    pub model: Option<String>,
    #[serde(rename = "E1")]
    pub e1: f64,
    #[serde(rename = "E2")]
    pub e2: f64,
    #[serde(rename = "E3")]
    pub e3: f64,
    pub sign: String,
    /// Fixed `v` of the enantio `(u, w)` plane.
    pub v_bar: f64,
    pub omega: f64,
    #[serde(rename = "Omega")]
    pub big_omega: f64,
    #[serde(rename = "N_trunc")]
    pub n_trunc: usize,
    /// Custom model: real symmetric drift, couplings and control box.
    pub drift: Option<Vec<Vec<f64>>>,
    pub couplings: Option<Vec<Vec<Vec<f64>>>>,
    pub bounds: Option<Vec<[f64; 2]>>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub timestamp: Option<String>,
    pub grid: GridConfig,
    pub certify: CertifyConfig,
    pub sweep: SweepConfig,
    pub propagate: PropagateConfig,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: None,
            e1: -1.5,
            e2: 0.5,
            e3: 1.0,
            sign: "+".into(),
            v_bar: 3.0,
            omega: 0.4,
            big_omega: std::f64::consts::SQRT_2,
            n_trunc: 60,
            drift: None,
            couplings: None,
            bounds: None,
            seed: 0,
            out_dir: PathBuf::from("out"),
            timestamp: None,
            grid: GridConfig::default(),
            certify: CertifyConfig::default(),
            sweep: SweepConfig::default(),
            propagate: PropagateConfig::default(),
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Box in the scan plane; defaults to the whole plane region.
    pub bounds: Option<[[f64; 2]; 2]>,
    pub res: [usize; 2],
    /// Gap levels `j` (between `lambda_j` and `lambda_j+1`) to scan and search.
    pub levels: Option<Vec<usize>>,
    /// Lowest eigenvalues written to `eigen.csv`.
    pub eigen_levels: Option<usize>,
    /// Local minima used as search seeds, per level.
    pub max_seeds: usize,
    /// Explicit seeds for `classify`, used for every level instead of grid minima.
    pub seeds: Option<Vec<[f64; 2]>>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            bounds: None,
            res: [200, 200],
            levels: None,
            eigen_levels: None,
            max_seeds: 8,
            seeds: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifyConfig {
    /// Control value for the point checks; seeded random when absent.
    pub point: Option<Vec<f64>>,
    pub coupling_axis: Option<usize>,
    /// Size `k` of the checked sub-chain of lowest levels.
    pub levels: Option<usize>,
    pub connectedness: bool,
    pub germs: bool,
    pub germ_radius: f64,
    pub germ_samples: usize,
    /// Minimal pass fraction of a sweep.
    pub threshold: f64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            point: None,
            coupling_axis: None,
            levels: None,
            connectedness: true,
            germs: true,
            germ_radius: 0.05,
            germ_samples: 50,
            threshold: 0.95,
        }
    }
}

/// One sweep: a single axis, or several frozen jointly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisGroup {
    One(usize),
    Many(Vec<usize>),
}

impl AxisGroup {
    pub fn axes(&self) -> Vec<usize> {
        match self {
            AxisGroup::One(a) => vec![*a],
            AxisGroup::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub axes: Vec<AxisGroup>,
    pub samples: usize,
    /// Sampling box per frozen axis; defaults to the control region.
    pub bounds: Option<Vec<[f64; 2]>>,
    /// Explicit frozen values, one row per sample; used for every group.
    pub values: Option<Vec<Vec<f64>>>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            axes: Vec::new(),
            samples: 100,
            bounds: None,
            values: None,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagateConfig {
    pub schedule: Option<PathBuf>,
    /// Basis index of the initial state.
    pub initial_state: usize,
    /// Also run the mirror enantiomer (enantio only; default on there).
    pub pair: Option<bool>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub model: Option<String>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub grid_res: Option<[usize; 2]>,
    pub levels: Option<Vec<usize>>,
    pub freeze_axes: Vec<AxisGroup>,
    pub samples: Option<usize>,
    pub schedule: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, over: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => RunConfig::default(),
        };
        if let Some(m) = &over.model {
            cfg.model = Some(m.clone());
        }
        if let Some(s) = over.seed {
            cfg.seed = s;
        }
        if let Some(d) = &over.out_dir {
            cfg.out_dir = d.clone();
        }
        if let Some(r) = over.grid_res {
            cfg.grid.res = r;
        }
        if let Some(l) = &over.levels {
            cfg.grid.levels = Some(l.clone());
        }
        if !over.freeze_axes.is_empty() {
            cfg.sweep.axes = over.freeze_axes.clone();
        }
        if let Some(n) = over.samples {
            cfg.sweep.samples = n;
        }
        if let Some(s) = &over.schedule {
            cfg.propagate.schedule = Some(s.clone());
        }
        if cfg.timestamp.is_none() {
            cfg.timestamp = std::env::var("SOURCE_DATE_EPOCH").ok();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn model_name(&self) -> &str {
        self.model.as_deref().unwrap_or_default()
    }

    fn validate(&self) -> Result<(), CliError> {
        match self.model.as_deref() {
            Some("counterexample" | "enantio" | "jc" | "custom") => {}
            Some(other) => {
                return Err(CliError::Config(format!(
                    "unknown model '{other}' (expected counterexample, enantio, jc or custom)"
                )))
            }
            None => return Err(CliError::Config("no model given (config key `model` or --model)".into())),
        }
        validate_tolerances(&self.tolerances)?;
        if self.grid.res.contains(&0) {
            return Err(CliError::Config("grid.res entries must be positive".into()));
        }
        if !(self.certify.threshold > 0.0 && self.certify.threshold <= 1.0) {
            return Err(CliError::Config("certify.threshold must lie in (0, 1]".into()));
        }
        if !(self.certify.germ_radius > 0.0) || self.certify.germ_samples == 0 {
            return Err(CliError::Config("certify.germ_radius and germ_samples must be positive".into()));
        }
        if self.sweep.samples == 0 {
            return Err(CliError::Config("sweep.samples must be positive".into()));
        }
        Ok(())
    }

    /// The configuration as run, with model keys that do not apply removed.
    pub fn resolved(&self) -> Value {
        let mut v = conicert::report::to_canonical_value(self);
        let keep: &[&str] = match self.model_name() {
            "enantio" => &["E1", "E2", "E3", "sign", "v_bar"],
            "jc" => &["omega", "Omega", "N_trunc"],
            "custom" => &["drift", "couplings", "bounds"],
            _ => &[],
        };
        if let Value::Object(map) = &mut v {
            for key in ["E1", "E2", "E3", "sign", "v_bar", "omega", "Omega", "N_trunc", "drift", "couplings", "bounds"] {
                if !keep.contains(&key) {
                    map.remove(key);
                }
            }
        }
        v
    }

    pub fn timestamp(&self) -> String {
        self.timestamp.clone().unwrap_or_else(|| "unset".into())
    }

    fn enantio_params(&self) -> Result<EnantioParams, CliError> {
        Ok(EnantioParams::new([self.e1, self.e2, self.e3], EnantioSign::parse(&self.sign)?)?)
    }

    pub fn energies(&self) -> [f64; 3] {
        [self.e1, self.e2, self.e3]
    }

    fn jc_params(&self) -> Result<JcParams, CliError> {
        Ok(JcParams::new(self.omega, self.big_omega, self.n_trunc)?)
    }

    /// The model with all its controls.
    pub fn full_model(&self) -> Result<ControlledHamiltonian, CliError> {
        Ok(match self.model_name() {
            "counterexample" => build_counterexample(),
            "enantio" => build_enantio(&self.enantio_params()?)?,
            "jc" => build_jc(&self.jc_params()?)?,
            _ => self.custom_model()?,
        })
    }

    /// Two-control model used for scans: the enantio `(u, w)` plane at `v_bar`.
    pub fn plane_model(&self) -> Result<ControlledHamiltonian, CliError> {
        let m = match self.model_name() {
            "enantio" => build_enantio_plane(&self.enantio_params()?, self.v_bar)?,
            _ => self.full_model()?,
        };
        if m.num_controls() != 2 {
            return Err(CliError::Config(format!(
                "scans need a two-control model, '{}' has {}",
                self.model_name(),
                m.num_controls()
            )));
        }
        Ok(m)
    }

    /// The mirror enantiomer, for paired propagation.
    pub fn mirror_model(&self) -> Result<Option<ControlledHamiltonian>, CliError> {
        if self.model_name() != "enantio" {
            return Ok(None);
        }
        Ok(Some(build_enantio(&self.enantio_params()?.mirrored())?))
    }

    fn custom_model(&self) -> Result<ControlledHamiltonian, CliError> {
        let missing = |k: &str| CliError::Config(format!("custom model needs `{k}`"));
        let matrix = |rows: &Vec<Vec<f64>>| -> Result<HermitianOperator, CliError> {
            let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
            Ok(HermitianOperator::from_real_rows(&refs)?)
        };
        let drift = matrix(self.drift.as_ref().ok_or_else(|| missing("drift"))?)?;
        let couplings = self
            .couplings
            .as_ref()
            .ok_or_else(|| missing("couplings"))?
            .iter()
            .map(matrix)
            .collect::<Result<Vec<_>, _>>()?;
        let bounds = self.bounds.as_ref().ok_or_else(|| missing("bounds"))?;
        let region = ControlRegion::new(bounds.iter().map(|b| (b[0], b[1])).collect())?;
        let labels = (1..=couplings.len()).map(|k| format!("u{k}")).collect();
        Ok(ControlledHamiltonian::new("custom", drift, couplings, region, labels)?)
    }
}

/// Relative thresholds must lie in `[1e-14, 1e-2]`; the fit residual,
/// radii and counts have their own ranges.
pub fn validate_tolerances(t: &Tolerances) -> Result<(), CliError> {
    let relative = [
        ("herm", t.herm),
        ("rank", t.rank),
        ("rank_unreliable_lo", t.rank_unreliable_lo),
        ("rank_unreliable_hi", t.rank_unreliable_hi),
        ("intersect", t.intersect),
        ("cluster", t.cluster),
        ("slope_floor", t.slope_floor),
        ("couple", t.couple),
        ("nonresonance", t.nonresonance),
        ("germ_singular", t.germ_singular),
        ("spectral", t.spectral),
    ];
    for (name, v) in relative {
        if !(1e-14..=1e-2).contains(&v) {
            return Err(CliError::Config(format!("tolerance {name} = {v:e} outside [1e-14, 1e-2]")));
        }
    }
    if t.rank_unreliable_lo > t.rank_unreliable_hi {
        return Err(CliError::Config("rank_unreliable_lo exceeds rank_unreliable_hi".into()));
    }
    if !(t.fit_residual > 0.0 && t.fit_residual < 1.0) {
        return Err(CliError::Config(format!("fit_residual = {} outside (0, 1)", t.fit_residual)));
    }
    if !(t.probe_radius > 0.0 && t.isolation_radius > 0.0) {
        return Err(CliError::Config("probe and isolation radii must be positive".into()));
    }
    if t.directions < 4 || t.ring_samples < 8 {
        return Err(CliError::Config("need at least 4 directions and 8 ring samples".into()));
    }
    Ok(())
}
