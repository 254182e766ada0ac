//! Controlled Hamiltonians `H(u) = H0 + sum_l u_l H_l` over an open box of controls.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::herm::{eig_hermitian, HermitianOperator, SpectrumPoint};

/// Axis-aligned open box `prod_l (lo_l, hi_l)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlRegion {
    bounds: Vec<(f64, f64)>,
}

impl ControlRegion {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        for (axis, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo < hi) || lo.is_nan() || hi.is_nan() {
                return Err(Error::InvalidParams(format!(
                    "control axis {axis}: interval ({lo}, {hi}) is empty"
                )));
            }
        }
        Ok(Self { bounds })
    }

    /// The same symmetric interval `(-r, r)` on every axis.
    pub fn symmetric(dim: usize, r: f64) -> Result<Self> {
        Self::new(vec![(-r, r); dim])
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.len() == self.bounds.len()
            && u.iter()
                .zip(&self.bounds)
                .all(|(&x, &(lo, hi))| lo < x && x < hi)
    }

    /// Whether the closed ball of `radius` around `center` lies in the box.
    pub fn contains_ball(&self, center: &[f64], radius: f64) -> bool {
        center.len() == self.bounds.len()
            && center
                .iter()
                .zip(&self.bounds)
                .all(|(&x, &(lo, hi))| lo < x - radius && x + radius < hi)
    }

    /// Projection onto all axes but `axis`.
    pub fn without_axis(&self, axis: usize) -> Self {
        let mut bounds = self.bounds.clone();
        bounds.remove(axis);
        Self { bounds }
    }
}

#[derive(Debug, Clone)]
pub struct ControlledHamiltonian {
    pub name: String,
    h0: HermitianOperator,
    couplings: Vec<HermitianOperator>,
    region: ControlRegion,
    labels: Vec<String>,
}

impl ControlledHamiltonian {
    pub fn new(
        name: impl Into<String>,
        h0: HermitianOperator,
        couplings: Vec<HermitianOperator>,
        region: ControlRegion,
        labels: Vec<String>,
    ) -> Result<Self> {
        let n = h0.dim();
        for h in &couplings {
            if h.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: h.dim(),
                });
            }
        }
        if region.dim() != couplings.len() {
            return Err(Error::DimensionMismatch {
                expected: couplings.len(),
                found: region.dim(),
            });
        }
        if labels.len() != couplings.len() {
            return Err(Error::DimensionMismatch {
                expected: couplings.len(),
                found: labels.len(),
            });
        }
        Ok(Self {
            name: name.into(),
            h0,
            couplings,
            region,
            labels,
        })
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    pub fn num_controls(&self) -> usize {
        self.couplings.len()
    }

    pub fn drift(&self) -> &HermitianOperator {
        &self.h0
    }

    pub fn couplings(&self) -> &[HermitianOperator] {
        &self.couplings
    }

    pub fn coupling(&self, axis: usize) -> &HermitianOperator {
        &self.couplings[axis]
    }

    pub fn region(&self) -> &ControlRegion {
        &self.region
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `H(u)`, without a region check.
    pub fn hamiltonian_at_unchecked(&self, u: &[f64]) -> Result<HermitianOperator> {
        if u.len() != self.couplings.len() {
            return Err(Error::DimensionMismatch {
                expected: self.couplings.len(),
                found: u.len(),
            });
        }
        let mut m = self.h0.matrix().clone();
        for (x, h) in u.iter().zip(&self.couplings) {
            if *x != 0.0 {
                m += h.matrix().map(|z| z * *x);
            }
        }
        // sums of Hermitian matrices with real weights stay Hermitian
        HermitianOperator::with_tolerance(m, 1e-10)
    }

    pub fn hamiltonian_at(&self, u: &[f64]) -> Result<HermitianOperator> {
        self.ensure_inside(u)?;
        self.hamiltonian_at_unchecked(u)
    }

    pub fn ensure_inside(&self, u: &[f64]) -> Result<()> {
        if !self.region.contains(u) {
            return Err(Error::OutsideRegion { value: u.to_vec() });
        }
        Ok(())
    }

    /// Spectrum of `H(u)`; `u` must lie in the region.
    pub fn spectrum_at(&self, u: &[f64]) -> Result<SpectrumPoint> {
        let h = self.hamiltonian_at(u)?;
        let mut sp = eig_hermitian(&h)?;
        sp.u = u.to_vec();
        Ok(sp)
    }

    /// Freezes control `axis` at `value`: the drift becomes `H0 + value H_axis`.
    pub fn freeze(&self, axis: usize, value: f64) -> Result<Self> {
        if axis >= self.num_controls() {
            return Err(Error::InvalidParams(format!(
                "axis {axis} out of range for {} controls",
                self.num_controls()
            )));
        }
        let (lo, hi) = self.region.bounds()[axis];
        if !(lo < value && value < hi) {
            return Err(Error::OutsideRegion {
                value: vec![value],
            });
        }
        let h0 = self.h0.add_scaled(&self.couplings[axis], value)?;
        let mut couplings = self.couplings.clone();
        couplings.remove(axis);
        let mut labels = self.labels.clone();
        let label = labels.remove(axis);
        Ok(Self {
            name: format!("{}[{label}={value}]", self.name),
            h0,
            couplings,
            region: self.region.without_axis(axis),
            labels,
        })
    }

    /// Freezes several axes at once; `frozen` holds `(axis, value)` in the
    /// original axis numbering.
    pub fn freeze_many(&self, frozen: &[(usize, f64)]) -> Result<Self> {
        let mut sorted = frozen.to_vec();
        sorted.sort_by(|a, b| b.0.cmp(&a.0));
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidParams(format!("axis {} frozen twice", w[0].0)));
            }
        }
        let mut model = self.clone();
        // highest axis first so lower indices stay valid
        for (axis, value) in sorted {
            model = model.freeze(axis, value)?;
        }
        Ok(model)
    }

    /// Same model with a different control region.
    pub fn with_region(&self, region: ControlRegion) -> Result<Self> {
        Self::new(
            self.name.clone(),
            self.h0.clone(),
            self.couplings.clone(),
            region,
            self.labels.clone(),
        )
    }

    /// `-H(u)` for every `u`.
    pub fn negated(&self) -> Self {
        Self {
            name: format!("-{}", self.name),
            h0: self.h0.scaled(-1.0),
            couplings: self.couplings.iter().map(|h| h.scaled(-1.0)).collect(),
            region: self.region.clone(),
            labels: self.labels.clone(),
        }
    }
}
