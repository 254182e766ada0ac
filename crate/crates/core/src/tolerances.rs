//! Default numerical thresholds, gathered in one record so every report can
//! embed exactly what it used.

use serde::{Deserialize, Serialize};

/// Thresholds used across the crate. Entries marked "relative" are multiplied
/// by the Frobenius norm of the operator at hand (floored at 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute Hermiticity slack at construction (relative).
    pub herm: f64,
    /// Bracket residual below which a Lie candidate is rejected.
    pub rank: f64,
    /// Residual band flagged as unreliable: `[rank_unreliable_lo, rank_unreliable_hi]`.
    pub rank_unreliable_lo: f64,
    pub rank_unreliable_hi: f64,
    /// Gap below which two adjacent levels are considered intersecting (relative).
    pub intersect: f64,
    /// Eigenvalue clustering threshold (relative).
    pub cluster: f64,
    /// Minimum one-sided slope of a conical direction (relative).
    pub slope_floor: f64,
    /// Maximum relative residual of the one-sided linear fit.
    pub fit_residual: f64,
    /// Minimal coupling `|<phi_j, W phi_j+1>|`, relative to `||W||_F`.
    pub couple: f64,
    /// Minimal separation of distinct spectral gaps (relative).
    pub nonresonance: f64,
    /// Smallest singular value of the normalised germ matrix.
    pub germ_singular: f64,
    /// Probe radius for conical-direction fits (control units).
    pub probe_radius: f64,
    /// Ring radius used by the isolation test during classification.
    pub isolation_radius: f64,
    /// Number of probe directions on the unit circle.
    pub directions: usize,
    /// Samples per ring in the isolation test.
    pub ring_samples: usize,
    /// Generic check threshold for spectral identities (relative).
    pub spectral: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-12,
            rank: 1e-8,
            rank_unreliable_lo: 1e-10,
            rank_unreliable_hi: 1e-6,
            intersect: 1e-7,
            cluster: 1e-6,
            slope_floor: 1e-4,
            fit_residual: 0.1,
            couple: 1e-8,
            nonresonance: 1e-8,
            germ_singular: 1e-6,
            probe_radius: 1e-3,
            isolation_radius: 0.1,
            directions: 32,
            ring_samples: 64,
            spectral: 1e-8,
        }
    }
}

/// Scale used for relative tolerances: `max(||H||_F, 1)`.
pub fn scale_of(frobenius: f64) -> f64 {
    frobenius.max(1.0)
}
