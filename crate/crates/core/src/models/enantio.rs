//! Three-level enantio-selective excitation model.
//!
//! `H+(u, v, w) = H0 + u H_u + v H_v + w H_w` and `H-` flips the sign of the
//! `H_u` coefficient, with `H0 = diag(E1, E2, E3)` traceless and each coupling
//! driving a single transition: `H_u` on (1,2), `H_v` on (1,3), `H_w` on (2,3).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::herm::{eig_hermitian, CMatrix, HermitianOperator, C64};
use crate::system::{ControlRegion, ControlledHamiltonian};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EnantioSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl EnantioSign {
    pub fn factor(self) -> f64 {
        match self {
            EnantioSign::Plus => 1.0,
            EnantioSign::Minus => -1.0,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "plus" | "+1" => Ok(EnantioSign::Plus),
            "-" | "minus" | "-1" => Ok(EnantioSign::Minus),
            other => Err(Error::InvalidParams(format!("unknown enantiomer sign {other:?}"))),
        }
    }

    pub fn mirror(self) -> Self {
        match self {
            EnantioSign::Plus => EnantioSign::Minus,
            EnantioSign::Minus => EnantioSign::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnantioParams {
    pub energies: [f64; 3],
    pub sign: EnantioSign,
}

impl EnantioParams {
    pub fn new(energies: [f64; 3], sign: EnantioSign) -> Result<Self> {
        let p = Self { energies, sign };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let [e1, e2, e3] = self.energies;
        if !(e1 < e2 && e2 < e3) {
            return Err(Error::InvalidParams(format!(
                "energies must satisfy E1 < E2 < E3, got ({e1}, {e2}, {e3})"
            )));
        }
        let scale = e1.abs().max(e2.abs()).max(e3.abs()).max(1.0);
        if (e1 + e2 + e3).abs() > 1e-12 * scale {
            return Err(Error::InvalidParams(format!(
                "energies must sum to zero, got {}",
                e1 + e2 + e3
            )));
        }
        Ok(())
    }

    pub fn mirrored(&self) -> Self {
        Self {
            energies: self.energies,
            sign: self.sign.mirror(),
        }
    }
}

fn single_pair(i: usize, j: usize) -> HermitianOperator {
    let mut m = CMatrix::zeros(3, 3);
    m[(i, j)] = C64::new(1.0, 0.0);
    m[(j, i)] = C64::new(1.0, 0.0);
    HermitianOperator::new(m).expect("symmetric")
}

pub fn h_u() -> HermitianOperator {
    single_pair(0, 1)
}

pub fn h_v() -> HermitianOperator {
    single_pair(0, 2)
}

pub fn h_w() -> HermitianOperator {
    single_pair(1, 2)
}

/// Default half-width of the control box for each of `u, v, w`.
pub const DEFAULT_RANGE: f64 = 10.0;

/// Controls `(u, v, w)` on `(-10, 10)^3`.
pub fn build_enantio(p: &EnantioParams) -> Result<ControlledHamiltonian> {
    p.validate()?;
    let name = match p.sign {
        EnantioSign::Plus => "enantio+",
        EnantioSign::Minus => "enantio-",
    };
    ControlledHamiltonian::new(
        name,
        HermitianOperator::diagonal(&p.energies),
        vec![h_u().scaled(p.sign.factor()), h_v(), h_w()],
        ControlRegion::symmetric(3, DEFAULT_RANGE)?,
        vec!["u".into(), "v".into(), "w".into()],
    )
}

/// The `(u, w)` plane at fixed `v = v_bar`.
pub fn build_enantio_plane(p: &EnantioParams, v_bar: f64) -> Result<ControlledHamiltonian> {
    build_enantio(p)?.freeze(1, v_bar)
}

/// `H(z)` for either enantiomer, without region restriction.
pub fn enantio_hamiltonian(p: &EnantioParams, z: [f64; 3]) -> Result<HermitianOperator> {
    build_enantio(p)?.hamiltonian_at_unchecked(&z)
}

#[derive(Debug, Clone)]
pub struct EnantioRotation {
    pub theta: f64,
    /// Eigenvalues of the `(1,3)` block `[[E1, v], [v, E3]]`, ascending.
    pub e1_tilde: f64,
    pub e3_tilde: f64,
    /// Real rotation in the `(1,3)` plane by `theta / 2`.
    pub rotation: CMatrix,
    /// `|(P H(0, v, 0) P^T)_{13}|`, which the rotation must annihilate.
    pub offdiag_residual: f64,
}

pub fn enantio_rotation(v_bar: f64, energies: [f64; 3]) -> Result<EnantioRotation> {
    let [e1, _, e3] = energies;
    if !(e1 < e3) {
        return Err(Error::InvalidParams("need E1 < E3".into()));
    }
    let theta = (2.0 * v_bar / (e3 - e1)).atan();
    let (s, c) = (theta / 2.0).sin_cos();
    let r = |x: f64| C64::new(x, 0.0);
    let z = r(0.0);
    let rotation = CMatrix::from_row_slice(3, 3, &[r(c), z, r(-s), z, r(1.0), z, r(s), z, r(c)]);

    let block = HermitianOperator::from_real_rows(&[&[e1, v_bar], &[v_bar, e3]])?;
    let ev = eig_hermitian(&block)?.eigenvalues;

    let mut h = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(
        energies.iter().map(|&e| r(e)).collect(),
    ));
    h[(0, 2)] = r(v_bar);
    h[(2, 0)] = r(v_bar);
    let rotated = &rotation * h * rotation.transpose();
    Ok(EnantioRotation {
        theta,
        e1_tilde: ev[0],
        e3_tilde: ev[1],
        rotation,
        offdiag_residual: rotated[(0, 2)].norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictedLocus {
    /// Intersection between `lambda_level` and `lambda_{level+1}`.
    pub level: usize,
    /// `(u, w)` at fixed `v_bar`.
    pub location: [f64; 2],
}

/// Closed-form conical intersection points of `H+(u, v_bar, w)` in the `(u, w)` plane.
///
/// In rotated coordinates `(u~, w~)` the points `u~ = +-sqrt((E3~-E1~)(E3~-E2))`,
/// `w~ = 0` make `E3~` a double eigenvalue on top of the spectrum, hence a
/// crossing of levels 2 and 3. The points `u~ = 0`, `w~ = +-sqrt((E3~-E1~)(E2-E1~))`
/// make `E1~` double at the bottom: levels 1 and 2. Loci are returned level 1
/// first, each pair as `(+, -)`.
pub fn enantio_intersections(v_bar: f64, energies: [f64; 3]) -> Result<Vec<PredictedLocus>> {
    let rot = enantio_rotation(v_bar, energies)?;
    let e2 = energies[1];
    let (et1, et3) = (rot.e1_tilde, rot.e3_tilde);
    let rad_top = (et3 - et1) * (et3 - e2);
    let rad_bottom = (et3 - et1) * (e2 - et1);
    if !(rad_top > 0.0 && rad_bottom > 0.0) {
        return Err(Error::InvalidParams(format!(
            "rotated energies do not bracket E2: ({et1}, {e2}, {et3})"
        )));
    }
    let (s, c) = (rot.theta / 2.0).sin_cos();
    let r_bottom = rad_bottom.sqrt();
    let r_top = rad_top.sqrt();
    Ok(vec![
        PredictedLocus {
            level: 1,
            location: [r_bottom * s, r_bottom * c],
        },
        PredictedLocus {
            level: 1,
            location: [-r_bottom * s, -r_bottom * c],
        },
        PredictedLocus {
            level: 2,
            location: [r_top * c, -r_top * s],
        },
        PredictedLocus {
            level: 2,
            location: [-r_top * c, r_top * s],
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const FIG_E: [f64; 3] = [-1.5, 0.5, 1.0];

    #[test]
    fn params_validation() {
        assert!(EnantioParams::new([-1.5, 0.5, 1.0], EnantioSign::Plus).is_ok());
        assert!(EnantioParams::new([-1.0, 0.5, 1.0], EnantioSign::Plus).is_err());
        assert!(EnantioParams::new([0.5, -1.5, 1.0], EnantioSign::Plus).is_err());
    }

    #[test]
    fn enantiomers_differ_by_twice_h_u() {
        let p = EnantioParams::new(FIG_E, EnantioSign::Plus).unwrap();
        let z = [0.3, -0.7, 1.1];
        let hp = enantio_hamiltonian(&p, z).unwrap();
        let hm = enantio_hamiltonian(&p.mirrored(), z).unwrap();
        let diff = hp.matrix() - hm.matrix();
        assert!((diff - h_u().matrix() * C64::new(0.6, 0.0)).norm() < 1e-15);
        let origin = enantio_hamiltonian(&p, [0.0; 3]).unwrap();
        assert_eq!(origin.matrix(), HermitianOperator::diagonal(&FIG_E).matrix());
    }

    #[test]
    fn generators_traceless() {
        let p = EnantioParams::new(FIG_E, EnantioSign::Plus).unwrap();
        let m = build_enantio(&p).unwrap();
        assert!(m.drift().trace().abs() < 1e-15);
        assert!(m.couplings().iter().all(|h| h.trace() == 0.0));
    }

    #[test]
    fn rotation_values() {
        let r0 = enantio_rotation(0.0, FIG_E).unwrap();
        assert_eq!(r0.theta, 0.0);
        assert_abs_diff_eq!(r0.e1_tilde, -1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(r0.e3_tilde, 1.0, epsilon = 1e-14);
        assert!((r0.rotation.clone() - CMatrix::identity(3, 3)).norm() < 1e-15);

        let r = enantio_rotation(3.0, FIG_E).unwrap();
        assert_abs_diff_eq!(r.theta, 2.4_f64.atan(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.theta, 1.17601, epsilon = 1e-5);
        assert_abs_diff_eq!(r.e1_tilde, -3.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.e3_tilde, 3.0, epsilon = 1e-12);
        assert!(r.offdiag_residual < 1e-10);

        let rn = enantio_rotation(-3.0, FIG_E).unwrap();
        assert_abs_diff_eq!(rn.theta, -r.theta, epsilon = 1e-15);
        assert_abs_diff_eq!(rn.e1_tilde, r.e1_tilde, epsilon = 1e-12);
        assert_abs_diff_eq!(rn.e3_tilde, r.e3_tilde, epsilon = 1e-12);
    }

    #[test]
    fn loci_values() {
        let loci = enantio_intersections(3.0, FIG_E).unwrap();
        let top = loci.iter().find(|l| l.level == 2).unwrap().location;
        assert_abs_diff_eq!(top[0], 3.35410, epsilon = 1e-5);
        assert_abs_diff_eq!(top[1], -2.23607, epsilon = 1e-5);
        let bottom = loci.iter().find(|l| l.level == 1).unwrap().location;
        assert_abs_diff_eq!(bottom[0], 2.82843, epsilon = 1e-5);
        assert_abs_diff_eq!(bottom[1], 4.24264, epsilon = 1e-5);

        let axis = enantio_intersections(0.0, FIG_E).unwrap();
        let [e1, e2, e3] = FIG_E;
        let l1 = axis.iter().find(|l| l.level == 1).unwrap().location;
        assert_abs_diff_eq!(l1[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(l1[1], ((e3 - e1) * (e2 - e1)).sqrt(), epsilon = 1e-12);
        let l2 = axis.iter().find(|l| l.level == 2).unwrap().location;
        assert_abs_diff_eq!(l2[0], ((e3 - e1) * (e3 - e2)).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(l2[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn predicted_loci_are_degenerate() {
        let p = EnantioParams::new(FIG_E, EnantioSign::Plus).unwrap();
        let plane = build_enantio_plane(&p, 3.0).unwrap();
        for locus in enantio_intersections(3.0, FIG_E).unwrap() {
            let sp = plane.spectrum_at(&locus.location).unwrap();
            assert!(sp.gap(locus.level).unwrap() < 1e-8, "{locus:?}");
            let other = if locus.level == 1 { 2 } else { 1 };
            assert!(sp.gap(other).unwrap() > 1.0);
        }
    }
}
