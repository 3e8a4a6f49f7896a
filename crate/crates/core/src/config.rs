use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Every numeric control used by descent, tangent solves and exploration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Initial line-search step.
    pub step_init: f64,
    /// Descent stops once the direction norm falls to this value.
    pub stationarity_tol: f64,
    pub max_iters: usize,
    /// Activation threshold for region constraints, in cosine units.
    pub active_eps: f64,
    pub armijo_c: f64,
    pub backtrack_factor: f64,
    pub fw_tol: f64,
    pub fw_max_iters: usize,
    pub krylov_tol: f64,
    pub krylov_max_iters: usize,
    /// Step length along a unit tangent direction.
    pub expand_step: f64,
    /// Minimum objective-space spacing between points of one region.
    pub novelty_delta: f64,
    /// Maximum number of points kept per region.
    pub region_budget: usize,
    /// Number of subregions.
    pub k: usize,
    pub master_seed: u64,
    /// Start every region from the balance point instead of a fresh draw.
    pub warm_start: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            step_init: 1.0,
            stationarity_tol: 1e-6,
            max_iters: 5000,
            active_eps: 1e-3,
            armijo_c: 1e-4,
            backtrack_factor: 0.5,
            fw_tol: 1e-9,
            fw_max_iters: 500,
            krylov_tol: 1e-6,
            krylov_max_iters: 50,
            expand_step: 0.1,
            novelty_delta: 1e-3,
            region_budget: 20,
            k: 5,
            master_seed: 0,
            warm_start: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("step_init", self.step_init),
            ("stationarity_tol", self.stationarity_tol),
            ("active_eps", self.active_eps),
            ("fw_tol", self.fw_tol),
            ("krylov_tol", self.krylov_tol),
            ("expand_step", self.expand_step),
            ("novelty_delta", self.novelty_delta),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {value}")));
            }
        }
        for (name, value) in [("armijo_c", self.armijo_c), ("backtrack_factor", self.backtrack_factor)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidConfig(format!("{name} must lie in (0, 1), got {value}")));
            }
        }
        let counts = [
            ("max_iters", self.max_iters),
            ("fw_max_iters", self.fw_max_iters),
            ("krylov_max_iters", self.krylov_max_iters),
            ("region_budget", self.region_budget),
            ("k", self.k),
        ];
        for (name, value) in counts {
            if value == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}
