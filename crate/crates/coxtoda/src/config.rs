//! Run configuration: tolerances, step size, trial counts and the RNG seed.

use serde::{Deserialize, Serialize};

pub const SEED_ENV: &str = "COXTODA_SEED";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub n_min: usize,
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
    /// Moment solver vs RK4, sup-norm.
    pub tol_flow: f64,
    /// Drift of `F_j` along a flow.
    pub tol_conservation: f64,
    /// Centered-difference ODE residuals.
    pub tol_residual: f64,
    pub tol_det: f64,
    pub tol_charpoly: f64,
    pub dt: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            n_min: 2,
            n_max: 4,
            trials: 20,
            seed: 0x5eed_c0de,
            tol_flow: 1e-6,
            tol_conservation: 1e-8,
            tol_residual: 1e-5,
            tol_det: 1e-10,
            tol_charpoly: 1e-9,
            dt: 1e-3,
        }
    }
}

impl Config {
    /// Defaults with the seed taken from `COXTODA_SEED` when it parses.
    pub fn from_env() -> Self {
        let mut c = Config::default();
        if let Some(s) = std::env::var(SEED_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            c.seed = s;
        }
        c
    }

    pub fn validate(&self) -> crate::Result<()> {
        let tols = [self.tol_flow, self.tol_conservation, self.tol_residual, self.tol_det, self.tol_charpoly, self.dt];
        if tols.iter().any(|t| !(*t > 0.0)) {
            return Err(crate::CoxError::Argument("tolerances and dt must be positive".into()));
        }
        if self.n_min < 2 || self.n_min > self.n_max {
            return Err(crate::CoxError::Argument("need 2 ≤ n_min ≤ n_max".into()));
        }
        Ok(())
    }
}
