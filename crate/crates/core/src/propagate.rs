//! Propagators and states under piecewise-constant controls.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::herm::{eig_hermitian, evolve_from_spectrum, CVector, UnitaryOperator};
use crate::system::ControlledHamiltonian;

/// `u(t) = values[j]` on `(breakpoints[j], breakpoints[j+1])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseControl {
    breakpoints: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl PiecewiseControl {
    /// Breakpoints must start at 0 and increase strictly; one value per interval.
    pub fn new(breakpoints: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if breakpoints.first() != Some(&0.0) {
            return Err(Error::InvalidControl("breakpoints must start at t = 0".into()));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidControl(format!(
                "breakpoints must increase strictly ({} then {})",
                w[0], w[1]
            )));
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidControl(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len().saturating_sub(1),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| v.len() != values[0].len()) {
            return Err(Error::InvalidControl(format!(
                "control values have mixed lengths ({} and {})",
                values[0].len(),
                v.len()
            )));
        }
        Ok(Self { breakpoints, values })
    }

    /// Consecutive `(duration, value)` intervals.
    pub fn from_durations(intervals: &[(f64, Vec<f64>)]) -> Result<Self> {
        let mut t = 0.0;
        let mut breakpoints = vec![0.0];
        for (d, _) in intervals {
            t += d;
            breakpoints.push(t);
        }
        Self::new(breakpoints, intervals.iter().map(|(_, v)| v.clone()).collect())
    }

    /// The zero-length schedule: no intervals.
    pub fn empty() -> Self {
        Self {
            breakpoints: vec![0.0],
            values: Vec::new(),
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn duration(&self, j: usize) -> f64 {
        self.breakpoints[j + 1] - self.breakpoints[j]
    }

    /// Same intervals in reverse order.
    pub fn reversed(&self) -> Self {
        let intervals: Vec<(f64, Vec<f64>)> = (0..self.len())
            .rev()
            .map(|j| (self.duration(j), self.values[j].clone()))
            .collect();
        Self::from_durations(&intervals).expect("reversal keeps durations positive")
    }

    fn check(&self, model: &ControlledHamiltonian) -> Result<()> {
        for v in &self.values {
            model.ensure_inside(v)?;
        }
        Ok(())
    }
}

/// One unitary per interval, `exp(-i dt_j H(u_j))`.
pub fn step_propagators(model: &ControlledHamiltonian, ctrl: &PiecewiseControl) -> Result<Vec<UnitaryOperator>> {
    ctrl.check(model)?;
    (0..ctrl.len())
        .map(|j| {
            let sp = eig_hermitian(&model.hamiltonian_at(&ctrl.values[j])?)?;
            Ok(evolve_from_spectrum(&sp, ctrl.duration(j)))
        })
        .collect()
}

/// `U_L ... U_2 U_1`: later intervals act on the left.
pub fn propagator(model: &ControlledHamiltonian, ctrl: &PiecewiseControl) -> Result<UnitaryOperator> {
    let mut u = UnitaryOperator::identity(model.dim());
    for step in step_propagators(model, ctrl)? {
        u = step.compose(&u)?;
    }
    Ok(u)
}

fn check_unit(psi: &CVector) -> Result<()> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnitVector { norm });
    }
    Ok(())
}

/// State at the final time.
pub fn propagate_state(model: &ControlledHamiltonian, ctrl: &PiecewiseControl, psi0: &CVector) -> Result<CVector> {
    Ok(trajectory(model, ctrl, psi0)?.pop().expect("trajectory holds psi0"))
}

/// States at every breakpoint, starting with `psi0`.
pub fn trajectory(model: &ControlledHamiltonian, ctrl: &PiecewiseControl, psi0: &CVector) -> Result<Vec<CVector>> {
    check_unit(psi0)?;
    if psi0.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: psi0.len(),
        });
    }
    let mut states = vec![psi0.clone()];
    for step in step_propagators(model, ctrl)? {
        let next = step.apply(states.last().expect("nonempty"))?;
        states.push(next);
    }
    Ok(states)
}

/// `|<psi, phi>|^2` of two unit vectors.
pub fn fidelity(psi: &CVector, phi: &CVector) -> Result<f64> {
    check_unit(psi)?;
    check_unit(phi)?;
    if psi.len() != phi.len() {
        return Err(Error::DimensionMismatch {
            expected: psi.len(),
            found: phi.len(),
        });
    }
    Ok(psi.dotc(phi).norm_sqr().min(1.0))
}

/// `|psi_k|^2` for every basis state.
pub fn populations(psi: &CVector) -> Vec<f64> {
    psi.iter().map(|z| z.norm_sqr()).collect()
}
