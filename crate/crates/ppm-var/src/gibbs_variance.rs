//! Gibbs sampler for the Normal returns model with a common unknown mean
//! and a partition structure on the variance vector.
//!
//! One sweep samples the common mean from its Normal full conditional,
//! updates each variance component from a mixture of point masses at the
//! other current values and a fresh Inverse-Gamma draw, and then redraws
//! every cluster's common variance.

use statrs::function::gamma::ln_gamma;

use crate::clusters::{sample_from_log_weights, ClusterSet, MixtureDiagnostics};
use crate::error::{Error, Result};
use crate::gibbs_mean::validate_returns;
use crate::partition::Partition;
use crate::rng::{draw_inverse_gamma, draw_normal, InverseGammaParams, RngState};
use crate::McmcSettings;

/// Hyperparameters of the variance-clustering model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarHyperParams {
    /// Prior mean of the common location.
    pub m: f64,
    /// Inverse-Gamma shape of the variance prior; must exceed 1.
    pub nu0: f64,
    /// Inverse-Gamma scale of the variance prior.
    pub lambda0: f64,
    /// Cohesion constant.
    pub c: f64,
}

impl Default for VarHyperParams {
    fn default() -> Self {
        VarHyperParams {
            m: 0.0,
            nu0: 2.01,
            lambda0: 0.0101,
            c: 1.0,
        }
    }
}

impl VarHyperParams {
    pub fn validate(&self) -> Result<()> {
        if !self.m.is_finite() {
            return Err(Error::domain("prior mean m must be finite"));
        }
        if !(self.nu0.is_finite() && self.nu0 > 1.0) {
            return Err(Error::domain("nu0 must be > 1"));
        }
        if !(self.lambda0.is_finite() && self.lambda0 > 0.0) {
            return Err(Error::domain("lambda0 must be > 0"));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::domain("cohesion constant c must be > 0"));
        }
        Ok(())
    }

    /// Prior variance of the common mean, `lambda0 / (T (nu0 - 1))`,
    /// recomputed from the active series length.
    pub fn mu_prior_variance(&self, t_len: usize) -> f64 {
        self.lambda0 / (t_len as f64 * (self.nu0 - 1.0))
    }
}

/// Current state of the variance-model chain.
#[derive(Debug, Clone, PartialEq)]
pub struct VarState {
    pub mu: f64,
    pub sigma_sq: Vec<f64>,
}

impl VarState {
    /// Symmetric start: common mean at the sample mean, every variance at
    /// the sample variance (trivial partition).
    pub fn init(y: &[f64], h: &VarHyperParams) -> Result<Self> {
        h.validate()?;
        validate_returns(y)?;
        let t = y.len() as f64;
        let mean = y.iter().sum::<f64>() / t;
        let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / t;
        let sigma_sq = if var > 0.0 {
            var
        } else {
            h.lambda0 / (h.nu0 - 1.0)
        };
        Ok(VarState {
            mu: mean,
            sigma_sq: vec![sigma_sq; y.len()],
        })
    }
}

/// One stored post-burn-in sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct VarSweepRecord {
    pub mu: f64,
    pub sigma_sq: Vec<f64>,
    pub partition: Partition,
}

/// Post-burn-in draws of the variance-model chain.
#[derive(Debug, Clone, PartialEq)]
pub struct VarDraws {
    pub records: Vec<VarSweepRecord>,
    pub total_sweeps: usize,
    pub burn_in: usize,
    pub diagnostics: MixtureDiagnostics,
}

impl VarDraws {
    pub fn stored(&self) -> usize {
        self.records.len()
    }

    pub fn partitions(&self) -> impl Iterator<Item = &Partition> {
        self.records.iter().map(|r| &r.partition)
    }
}

/// Normal full conditional of the common mean given the variance clusters.
pub(crate) fn mu_posterior(clusters: &ClusterSet, t_len: usize, h: &VarHyperParams) -> (f64, f64) {
    let kappa = h.mu_prior_variance(t_len);
    let mut weighted_sum = 0.0;
    let mut weighted_count = 0.0;
    for e in clusters.entries() {
        weighted_sum += e.sum_y / e.value;
        weighted_count += e.count as f64 / e.value;
    }
    let denom = 1.0 + kappa * weighted_count;
    ((h.m + kappa * weighted_sum) / denom, kappa / denom)
}

/// Constant part of the fresh-draw log weight; depends only on the
/// hyperparameters.
pub(crate) fn fresh_log_weight_const(h: &VarHyperParams) -> f64 {
    h.c.ln() + ln_gamma(h.nu0 + 0.5) - ln_gamma(h.nu0)
        + (h.nu0 + 0.5) * 2.0f64.ln()
        + h.nu0 * h.lambda0.ln()
}

/// Log mixture weights for one variance update: one entry per existing
/// cluster followed by the fresh-draw weight, plus the fresh Inverse-Gamma
/// parameters.
pub(crate) fn var_mixture_log_weights(
    y_t: f64,
    mu: f64,
    h: &VarHyperParams,
    clusters: &ClusterSet,
    fresh_const: f64,
) -> (Vec<f64>, InverseGammaParams) {
    let r_sq = (y_t - mu) * (y_t - mu);
    let mut lw = Vec::with_capacity(clusters.len() + 1);
    for e in clusters.entries() {
        lw.push((e.count as f64).ln() - 0.5 * e.value.ln() - r_sq / (2.0 * e.value));
    }
    lw.push(fresh_const - (h.nu0 + 0.5) * (r_sq + 2.0 * h.lambda0).ln());
    (
        lw,
        InverseGammaParams {
            shape: h.nu0 + 0.5,
            scale: h.lambda0 + r_sq / 2.0,
        },
    )
}

/// Inverse-Gamma full conditional of one cluster's common variance.
pub(crate) fn cluster_variance_posterior(
    count: usize,
    residual_sq_sum: f64,
    h: &VarHyperParams,
) -> InverseGammaParams {
    InverseGammaParams {
        shape: h.nu0 + count as f64 / 2.0,
        scale: h.lambda0 + residual_sq_sum / 2.0,
    }
}

/// Draws the common mean from its full conditional.
pub fn step_mu(state: &VarState, y: &[f64], h: &VarHyperParams, rng: &mut RngState) -> Result<f64> {
    h.validate()?;
    if state.sigma_sq.len() != y.len() {
        return Err(Error::usage("state and series lengths differ"));
    }
    let clusters = ClusterSet::from_values(&state.sigma_sq, y);
    let (mean, var) = mu_posterior(&clusters, y.len(), h);
    Ok(draw_normal(mean, var.sqrt(), rng))
}

/// Updates one variance component from its point-mass/fresh-draw mixture
/// and writes the sampled value back into the state.
pub fn step_sigma2_t(
    t: usize,
    state: &mut VarState,
    y: &[f64],
    h: &VarHyperParams,
    rng: &mut RngState,
) -> Result<f64> {
    h.validate()?;
    if state.sigma_sq.len() != y.len() || t >= y.len() {
        return Err(Error::usage("index out of range for state"));
    }
    let mut clusters = ClusterSet::from_values(&state.sigma_sq, y);
    let mut diag = MixtureDiagnostics::new();
    let fresh_const = fresh_log_weight_const(h);
    let value = update_sigma2_index(
        t,
        &mut state.sigma_sq,
        y,
        state.mu,
        h,
        &mut clusters,
        fresh_const,
        rng,
        &mut diag,
    );
    Ok(value)
}

#[allow(clippy::too_many_arguments)]
fn update_sigma2_index(
    t: usize,
    sigma_sq: &mut [f64],
    y: &[f64],
    mu: f64,
    h: &VarHyperParams,
    clusters: &mut ClusterSet,
    fresh_const: f64,
    rng: &mut RngState,
    diag: &mut MixtureDiagnostics,
) -> f64 {
    clusters.remove_member(sigma_sq[t], y[t]);
    let (lw, fresh) = var_mixture_log_weights(y[t], mu, h, clusters, fresh_const);
    let choice = sample_from_log_weights(&lw, rng, diag);
    let value = if choice < clusters.len() {
        diag.copies += 1;
        clusters.entries()[choice].value
    } else {
        diag.fresh_draws += 1;
        draw_inverse_gamma(fresh.shape, fresh.scale, rng)
    };
    clusters.add_member(value, y[t]);
    sigma_sq[t] = value;
    value
}

/// Redraws every cluster's common variance from its Inverse-Gamma full
/// conditional, leaving the partition unchanged.
pub fn resample_cluster_variances(
    state: &mut VarState,
    y: &[f64],
    h: &VarHyperParams,
    rng: &mut RngState,
) -> Result<()> {
    h.validate()?;
    if state.sigma_sq.len() != y.len() {
        return Err(Error::usage("state and series lengths differ"));
    }
    let mut clusters = ClusterSet::from_values(&state.sigma_sq, y);
    resample_values(&mut state.sigma_sq, y, state.mu, h, &mut clusters, rng);
    Ok(())
}

fn resample_values(
    sigma_sq: &mut [f64],
    y: &[f64],
    mu: f64,
    h: &VarHyperParams,
    clusters: &mut ClusterSet,
    rng: &mut RngState,
) {
    let olds: Vec<f64> = clusters.entries().iter().map(|e| e.value).collect();
    let news: Vec<f64> = clusters
        .entries()
        .iter()
        .map(|e| {
            let p = cluster_variance_posterior(e.count, e.residual_sq_sum(mu), h);
            draw_inverse_gamma(p.shape, p.scale, rng)
        })
        .collect();
    for v in sigma_sq.iter_mut() {
        let pos = olds.iter().position(|o| o == v).expect("state value tracked");
        *v = news[pos];
    }
    *clusters = ClusterSet::from_values(sigma_sq, y);
}

struct VarChain<'a> {
    y: &'a [f64],
    h: &'a VarHyperParams,
    mu: f64,
    sigma_sq: Vec<f64>,
    clusters: ClusterSet,
    fresh_const: f64,
    rng: RngState,
    diag: MixtureDiagnostics,
}

impl<'a> VarChain<'a> {
    fn init(y: &'a [f64], h: &'a VarHyperParams, seed: u64) -> Result<Self> {
        let state = VarState::init(y, h)?;
        let clusters = ClusterSet::from_values(&state.sigma_sq, y);
        Ok(VarChain {
            y,
            h,
            mu: state.mu,
            sigma_sq: state.sigma_sq,
            clusters,
            fresh_const: fresh_log_weight_const(h),
            rng: RngState::new(seed),
            diag: MixtureDiagnostics::new(),
        })
    }

    fn sweep(&mut self) {
        let (mean, var) = mu_posterior(&self.clusters, self.y.len(), self.h);
        self.mu = draw_normal(mean, var.sqrt(), &mut self.rng);
        for t in 0..self.y.len() {
            update_sigma2_index(
                t,
                &mut self.sigma_sq,
                self.y,
                self.mu,
                self.h,
                &mut self.clusters,
                self.fresh_const,
                &mut self.rng,
                &mut self.diag,
            );
        }
        resample_values(
            &mut self.sigma_sq,
            self.y,
            self.mu,
            self.h,
            &mut self.clusters,
            &mut self.rng,
        );
    }

    fn check(&self, sweep: usize) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(Error::numeric(
                format!("sigma2-ppm sweep {sweep}"),
                format!("mu = {}", self.mu),
            ));
        }
        for e in self.clusters.entries() {
            if !(e.value.is_finite() && e.value > 0.0) {
                return Err(Error::numeric(
                    format!("sigma2-ppm sweep {sweep}"),
                    format!("sigma_sq = {}", e.value),
                ));
            }
        }
        Ok(())
    }
}

/// Runs the sampler, keeping every post-burn-in sweep.
pub fn run_chain(y: &[f64], h: &VarHyperParams, mcmc: &McmcSettings) -> Result<VarDraws> {
    mcmc.validate()?;
    let mut records = Vec::with_capacity(mcmc.sweeps - mcmc.burn_in);
    let diag = run_chain_with(y, h, mcmc, |chain| {
        records.push(VarSweepRecord {
            mu: chain.mu,
            sigma_sq: chain.sigma_sq.to_vec(),
            partition: chain.clusters.partition(chain.sigma_sq),
        });
    })?;
    Ok(VarDraws {
        records,
        total_sweeps: mcmc.sweeps,
        burn_in: mcmc.burn_in,
        diagnostics: diag,
    })
}

/// Lightweight per-sweep view handed to streaming consumers.
pub(crate) struct VarSweepView<'a> {
    pub mu: f64,
    pub sigma_sq: &'a [f64],
    pub clusters: &'a ClusterSet,
}

pub(crate) fn run_chain_with<F>(
    y: &[f64],
    h: &VarHyperParams,
    mcmc: &McmcSettings,
    mut on_sweep: F,
) -> Result<MixtureDiagnostics>
where
    F: FnMut(&VarSweepView),
{
    mcmc.validate()?;
    let mut chain = VarChain::init(y, h, mcmc.seed)?;
    for sweep in 0..mcmc.sweeps {
        chain.sweep();
        chain.check(sweep)?;
        if sweep >= mcmc.burn_in {
            on_sweep(&VarSweepView {
                mu: chain.mu,
                sigma_sq: &chain.sigma_sq,
                clusters: &chain.clusters,
            });
        }
    }
    Ok(chain.diag)
}
