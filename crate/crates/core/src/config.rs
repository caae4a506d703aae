use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("tolerance `{0}` must be positive and finite")]
    Tolerance(&'static str),
    #[error("epsilon0 must be positive and finite")]
    Epsilon0,
}

/// Shared numerical settings. Every randomized sweep draws from a single
/// generator seeded by `seed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    pub jobs: usize,
    pub tol_incircle: f64,
    pub tol_quad: f64,
    pub fd_step: f64,
    pub epsilon0: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            jobs: 1,
            tol_incircle: 1e-10,
            tol_quad: 1e-12,
            fd_step: 1e-5,
            epsilon0: 0.25,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.tol_incircle) {
            return Err(ConfigError::Tolerance("tol_incircle"));
        }
        if !pos(self.tol_quad) {
            return Err(ConfigError::Tolerance("tol_quad"));
        }
        if !pos(self.fd_step) {
            return Err(ConfigError::Tolerance("fd_step"));
        }
        if !pos(self.epsilon0) {
            return Err(ConfigError::Epsilon0);
        }
        Ok(())
    }

    pub fn rng(&self) -> rand_chacha::ChaCha8Rng {
        use rand::SeedableRng;
        rand_chacha::ChaCha8Rng::seed_from_u64(self.seed)
    }
}
