//! The three systems studied here, with their analytic oracles.

pub mod counterexample;
pub mod enantio;
pub mod jc;

pub use counterexample::build_counterexample;
pub use enantio::{build_enantio, EnantioParams, EnantioSign};
pub use jc::{build_jc, JcParams};
