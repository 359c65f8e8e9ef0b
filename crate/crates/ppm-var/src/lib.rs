//! Bayesian Value-at-Risk engine built on Normal product partition models.
//!
//! Two Gibbs samplers cluster either the mean vector or the variance vector
//! of a Normal returns model under a product partition prior. Each
//! post-burn-in sweep yields a closed-form VaR draw; ergodic means and
//! central credible intervals summarise the posterior. On top of the
//! samplers sit a decision-theoretic outlier search, a maximum-likelihood
//! Normal baseline with bootstrap intervals, rolling-window coverage
//! backtesting, and a small CLI for running jobs against CSV inputs.

mod clusters;

pub mod backtest;
pub mod config;
pub mod error;
pub mod gibbs_mean;
pub mod gibbs_variance;
pub mod jobs;
pub mod outliers;
pub mod partition;
pub mod report;
pub mod rng;
pub mod series;
pub mod var;

pub use clusters::MixtureDiagnostics;
pub use error::{Error, Result};

/// Chain length settings shared by every sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McmcSettings {
    /// Total sweeps, including burn-in.
    pub sweeps: usize,
    /// Leading sweeps discarded before storing draws.
    pub burn_in: usize,
    pub seed: u64,
}

impl McmcSettings {
    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 {
            return Err(Error::usage("sweeps must be >= 1"));
        }
        if self.burn_in >= self.sweeps {
            return Err(Error::usage(format!(
                "burn-in {} must be below the sweep count {}",
                self.burn_in, self.sweeps
            )));
        }
        Ok(())
    }
}
