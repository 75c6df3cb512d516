//! Numerical tolerances shared by every module.
//!
//! All thresholds live in one record so that a run can be reproduced (and
//! swept) from a single config snapshot.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed deviation of total probability mass from 1.
    pub mass: f64,
    /// Target residual |psi(z) - y| when inverting psi.
    pub inversion: f64,
    /// Relative offset below 1/max_support used as the right end of the
    /// psi-inversion bracket.
    pub bracket_margin: f64,
    /// Relative singular-value cutoff for rank and nullspace decisions.
    pub rank: f64,
    /// Residual allowed when checking that a subspace is invariant.
    pub invariance: f64,
    /// Singular-value gap ratio below which a rank decision is flagged as
    /// borderline.
    pub gap_flag_ratio: f64,
    /// Exact algebraic identities of the matrix model.
    pub identity: f64,
    /// Atom detection threshold for spectra, relative to the matrix norm.
    pub zero_threshold_rel: f64,
    /// Log-determinant regularization, relative to the squared matrix norm.
    pub epsilon_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            mass: 1e-12,
            inversion: 1e-12,
            bracket_margin: 1e-9,
            rank: 1e-9,
            invariance: 1e-9,
            gap_flag_ratio: 10.0,
            identity: 1e-10,
            zero_threshold_rel: 1e-8,
            epsilon_rel: 1e-6,
        }
    }
}
