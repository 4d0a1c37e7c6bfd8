//! Every numerical default in one place. `pi-entangle defaults` prints the
//! serialized form of [`MeasureOptions::default`] and the default campaign
//! configuration.

use serde::{Deserialize, Serialize};

/// Random restarts for convex-roof minimization (restart 0 is the
/// eigen-ensemble).
pub const ROOF_RESTARTS: usize = 20;
pub const ROOF_MAX_ITERS: usize = 5000;
/// Minimum improvement over [`ROOF_PATIENCE`] iterations before stopping.
pub const ROOF_TOL: f64 = 1e-7;
pub const ROOF_PATIENCE: usize = 50;

pub const REE_RESTARTS: usize = 10;
/// Alternating sweeps per restart.
pub const REE_MAX_ITERS: usize = 1500;
pub const REE_TOL: f64 = 1e-10;

/// Basis-search restarts (restart 0 is the identity basis).
pub const BASIS_RESTARTS: usize = 50;
pub const BASIS_MAX_ITERS: usize = 400;
pub const BASIS_TOL: f64 = 1e-10;
pub const BASIS_PATIENCE: usize = 40;

/// Violation tolerance when both sides of the inequality are exact.
pub const TOL_VIOLATION_EXACT: f64 = 1e-8;
/// Violation tolerance when either side comes out of an optimizer.
pub const TOL_VIOLATION_OPTIMIZED: f64 = 5e-3;
/// Restart multiplier when a suspected violation is re-checked.
pub const RERUN_RESTART_FACTOR: usize = 5;

/// Optimizer settings for measures that need one (convex roofs, REE).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureOptions {
    pub roof_restarts: usize,
    pub roof_max_iters: usize,
    pub roof_tol: f64,
    /// Ensemble size `m`; `None` means `min(r², r + 4)` for rank `r`.
    pub ensemble_size: Option<usize>,
    pub ree_restarts: usize,
    pub ree_max_iters: usize,
    pub ree_tol: f64,
    /// Product-ensemble size `k`; `None` means `(d_a·d_b)²`.
    pub ree_members: Option<usize>,
    pub seed: u64,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self {
            roof_restarts: ROOF_RESTARTS,
            roof_max_iters: ROOF_MAX_ITERS,
            roof_tol: ROOF_TOL,
            ensemble_size: None,
            ree_restarts: REE_RESTARTS,
            ree_max_iters: REE_MAX_ITERS,
            ree_tol: REE_TOL,
            ree_members: None,
            seed: 0,
        }
    }
}

impl MeasureOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Multiplies both restart counts.
    pub fn scaled_restarts(mut self, factor: usize) -> Self {
        self.roof_restarts *= factor;
        self.ree_restarts *= factor;
        self
    }
}
