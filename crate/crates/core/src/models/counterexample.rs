//! Four-level system that is controllable with both inputs. Freezing `u1` at
//! any value leaves a 7-dimensional algebra. Freezing `u2` does so only at
//! `u2 = 0`, where `span{e1, e3}` and `span{e2, e4}` are invariant under `H0` and `H1`.

use crate::herm::HermitianOperator;
use crate::system::{ControlRegion, ControlledHamiltonian};

pub fn build_counterexample() -> ControlledHamiltonian {
    let h0 = HermitianOperator::diagonal(&[1.0, 2.0, 3.0, 6.0]);
    let h1 = HermitianOperator::from_real_rows(&[
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 0.0, 0.0, 2.0],
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 2.0, 0.0, 0.0],
    ])
    .expect("symmetric by construction");
    let h2 = HermitianOperator::from_real_rows(&[
        &[0.0, 1.0, 0.0, 0.0],
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
    .expect("symmetric by construction");
    ControlledHamiltonian::new(
        "counterexample",
        h0,
        vec![h1, h2],
        ControlRegion::symmetric(2, 10.0).expect("nonempty"),
        vec!["u1".into(), "u2".into()],
    )
    .expect("consistent dimensions")
}
