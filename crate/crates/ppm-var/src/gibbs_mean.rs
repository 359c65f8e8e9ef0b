//! Gibbs sampler for the Normal returns model with a partition structure on
//! the mean vector, its hierarchical extension that places a Gamma hyperprior
//! on the Inverse-Gamma scale, and the fixed-partition conditional sampler
//! used by the outlier search.
//!
//! One sweep updates, in order: the common variance from its Inverse-Gamma
//! full conditional (split into two sub-steps in the hierarchical variant),
//! each mean component from a mixture of point masses at the other current
//! values and a fresh conjugate Normal draw, and finally one fresh draw of
//! every cluster's common value to keep the chain from sticking.

use crate::clusters::{sample_from_log_weights, ClusterSet, MixtureDiagnostics};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::rng::{
    draw_gamma, draw_inverse_gamma, draw_normal, GammaParams, InverseGammaParams, RngState,
};
use crate::McmcSettings;

/// Hyperparameters of the mean-clustering model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanHyperParams {
    /// Prior mean of the cluster values.
    pub m: f64,
    /// Prior variance scale of the cluster values (multiplies sigma^2).
    pub tau0_sq: f64,
    /// Inverse-Gamma shape of the variance prior; must exceed 1.
    pub nu0: f64,
    /// Inverse-Gamma scale of the variance prior.
    pub lambda0: f64,
    /// Cohesion constant controlling the prior appetite for new clusters.
    pub c: f64,
    /// When set, lambda0 gets a Gamma(eta, phi) hyperprior and is resampled
    /// each sweep; `lambda0` then only seeds the chain.
    pub hierarchical: bool,
    pub eta: f64,
    pub phi: f64,
}

impl Default for MeanHyperParams {
    fn default() -> Self {
        MeanHyperParams {
            m: 0.0,
            tau0_sq: 1.0e3,
            nu0: 2.01,
            lambda0: 0.0101,
            c: 1.0,
            hierarchical: false,
            // Neutral hyperprior centered on the default lambda0.
            eta: 1.01,
            phi: 0.01,
        }
    }
}

impl MeanHyperParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.m.is_finite()) {
            return Err(Error::domain("prior mean m must be finite"));
        }
        if !(self.tau0_sq.is_finite() && self.tau0_sq > 0.0) {
            return Err(Error::domain("tau0_sq must be > 0"));
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
        if self.hierarchical {
            if !(self.eta.is_finite() && self.eta > 0.0) {
                return Err(Error::domain("eta must be > 0"));
            }
            if !(self.phi.is_finite() && self.phi > 0.0) {
                return Err(Error::domain("phi must be > 0"));
            }
        }
        Ok(())
    }
}

/// Current state of the mean-model chain.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanState {
    pub mu: Vec<f64>,
    pub sigma_sq: f64,
    /// Current Inverse-Gamma scale; equals the prior value unless the
    /// hierarchical variant resamples it.
    pub lambda0_cur: f64,
}

impl MeanState {
    /// Neutral start: every mean at the sample mean (trivial partition),
    /// variance at the sample variance, lambda0 at its prior value.
    pub fn init(y: &[f64], h: &MeanHyperParams) -> Result<Self> {
        h.validate()?;
        validate_returns(y)?;
        let t = y.len() as f64;
        let mean = y.iter().sum::<f64>() / t;
        let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / t;
        let sigma_sq = if var > 0.0 {
            var
        } else {
            // Constant series: fall back to the prior expectation.
            h.lambda0 / (h.nu0 - 1.0)
        };
        Ok(MeanState {
            mu: vec![mean; y.len()],
            sigma_sq,
            lambda0_cur: h.lambda0,
        })
    }
}

/// One stored post-burn-in sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanSweepRecord {
    pub mu: Vec<f64>,
    pub sigma_sq: f64,
    /// Sampled lambda0, present only for the hierarchical variant.
    pub lambda0: Option<f64>,
    pub partition: Partition,
}

/// Post-burn-in draws of the mean-model chain.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanDraws {
    pub records: Vec<MeanSweepRecord>,
    pub total_sweeps: usize,
    pub burn_in: usize,
    pub diagnostics: MixtureDiagnostics,
}

impl MeanDraws {
    pub fn stored(&self) -> usize {
        self.records.len()
    }

    /// Ergodic mean of the mean vector, one entry per time index.
    pub fn posterior_mean_mu(&self) -> Vec<f64> {
        let t = self.records[0].mu.len();
        let mut out = vec![0.0; t];
        for r in &self.records {
            for (o, &v) in out.iter_mut().zip(&r.mu) {
                *o += v;
            }
        }
        let l = self.records.len() as f64;
        out.iter_mut().for_each(|o| *o /= l);
        out
    }

    /// Ergodic mean of the common variance.
    pub fn posterior_mean_sigma_sq(&self) -> f64 {
        self.records.iter().map(|r| r.sigma_sq).sum::<f64>() / self.records.len() as f64
    }

    pub fn partitions(&self) -> impl Iterator<Item = &Partition> {
        self.records.iter().map(|r| &r.partition)
    }
}

/// Ergodic means returned by the fixed-partition conditional chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalMeans {
    pub mu: Vec<f64>,
    pub sigma_sq: f64,
}

pub(crate) fn validate_returns(y: &[f64]) -> Result<()> {
    if y.len() < 2 {
        return Err(Error::usage(format!(
            "need at least 2 returns, got {}",
            y.len()
        )));
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::domain(format!("return {i} is not finite")));
    }
    Ok(())
}

/// Inverse-Gamma full conditional of the common variance given the current
/// mean vector, decomposed over clusters.
pub(crate) fn sigma2_posterior(
    clusters: &ClusterSet,
    t_len: usize,
    h: &MeanHyperParams,
    lambda0_cur: f64,
) -> InverseGammaParams {
    let mut cluster_penalty = 0.0;
    let mut residual = 0.0;
    for e in clusters.entries() {
        let d = e.value - h.m;
        cluster_penalty += d * d;
        residual += e.residual_sq_sum(e.value);
    }
    InverseGammaParams {
        shape: h.nu0 + t_len as f64 / 2.0 + clusters.len() as f64 / 2.0,
        scale: lambda0_cur + cluster_penalty / (2.0 * h.tau0_sq) + 0.5 * residual,
    }
}

/// Log mixture weights for one mean update: one entry per existing cluster
/// (size-weighted point mass) followed by the fresh-draw weight, plus the
/// fresh draw's Normal parameters.
pub(crate) fn mean_mixture_log_weights(
    y_t: f64,
    sigma_sq: f64,
    h: &MeanHyperParams,
    clusters: &ClusterSet,
) -> (Vec<f64>, f64, f64) {
    let mut lw = Vec::with_capacity(clusters.len() + 1);
    for e in clusters.entries() {
        let d = y_t - e.value;
        lw.push((e.count as f64).ln() - d * d / (2.0 * sigma_sq));
    }
    let dm = y_t - h.m;
    lw.push(
        h.c.ln() - 0.5 * (1.0 + h.tau0_sq).ln()
            - dm * dm / (2.0 * sigma_sq * (1.0 + h.tau0_sq)),
    );
    let fresh_mean = (y_t * h.tau0_sq + h.m) / (1.0 + h.tau0_sq);
    let fresh_var = sigma_sq * h.tau0_sq / (1.0 + h.tau0_sq);
    (lw, fresh_mean, fresh_var)
}

/// Normal posterior of one cluster's common value.
pub(crate) fn cluster_mean_posterior(
    count: usize,
    sum_y: f64,
    sigma_sq: f64,
    h: &MeanHyperParams,
) -> (f64, f64) {
    let denom = count as f64 + 1.0 / h.tau0_sq;
    ((sum_y + h.m / h.tau0_sq) / denom, sigma_sq / denom)
}

/// Gamma full conditional of lambda0 in the hierarchical variant.
pub(crate) fn lambda0_posterior(sigma_sq: f64, h: &MeanHyperParams) -> GammaParams {
    GammaParams {
        shape: h.nu0 + h.eta,
        scale: sigma_sq * h.phi / (sigma_sq + h.phi),
    }
}

/// Draws the common variance from its full conditional.
pub fn step_sigma2(
    state: &MeanState,
    y: &[f64],
    h: &MeanHyperParams,
    rng: &mut RngState,
) -> Result<f64> {
    h.validate()?;
    if state.mu.len() != y.len() {
        return Err(Error::usage("state and series lengths differ"));
    }
    let clusters = ClusterSet::from_values(&state.mu, y);
    let p = sigma2_posterior(&clusters, y.len(), h, state.lambda0_cur);
    crate::rng::sample_inverse_gamma(p, rng)
}

/// Updates one mean component from its point-mass/fresh-draw mixture and
/// writes the sampled value back into the state.
pub fn step_mu_t(
    t: usize,
    state: &mut MeanState,
    y: &[f64],
    h: &MeanHyperParams,
    rng: &mut RngState,
) -> Result<f64> {
    h.validate()?;
    if state.mu.len() != y.len() || t >= y.len() {
        return Err(Error::usage("index out of range for state"));
    }
    let mut clusters = ClusterSet::from_values(&state.mu, y);
    let mut diag = MixtureDiagnostics::new();
    let value = update_mu_index(
        t,
        &mut state.mu,
        y,
        state.sigma_sq,
        h,
        &mut clusters,
        rng,
        &mut diag,
    );
    Ok(value)
}

/// Shared mixture update; assumes `clusters` matches `mu`.
#[allow(clippy::too_many_arguments)]
fn update_mu_index(
    t: usize,
    mu: &mut [f64],
    y: &[f64],
    sigma_sq: f64,
    h: &MeanHyperParams,
    clusters: &mut ClusterSet,
    rng: &mut RngState,
    diag: &mut MixtureDiagnostics,
) -> f64 {
    clusters.remove_member(mu[t], y[t]);
    let (lw, fresh_mean, fresh_var) = mean_mixture_log_weights(y[t], sigma_sq, h, clusters);
    let choice = sample_from_log_weights(&lw, rng, diag);
    let value = if choice < clusters.len() {
        diag.copies += 1;
        let v = clusters.entries()[choice].value;
        debug_assert!(mu.iter().enumerate().any(|(j, &m)| j != t && m == v));
        v
    } else {
        diag.fresh_draws += 1;
        draw_normal(fresh_mean, fresh_var.sqrt(), rng)
    };
    clusters.add_member(value, y[t]);
    mu[t] = value;
    value
}

/// Redraws every cluster's common value from its Normal full conditional,
/// leaving the partition unchanged.
pub fn resample_cluster_means(
    state: &mut MeanState,
    y: &[f64],
    h: &MeanHyperParams,
    rng: &mut RngState,
) -> Result<()> {
    h.validate()?;
    if state.mu.len() != y.len() {
        return Err(Error::usage("state and series lengths differ"));
    }
    let mut clusters = ClusterSet::from_values(&state.mu, y);
    resample_values(&mut state.mu, y, state.sigma_sq, h, &mut clusters, rng);
    Ok(())
}

fn resample_values(
    mu: &mut [f64],
    y: &[f64],
    sigma_sq: f64,
    h: &MeanHyperParams,
    clusters: &mut ClusterSet,
    rng: &mut RngState,
) {
    let olds: Vec<f64> = clusters.entries().iter().map(|e| e.value).collect();
    let news: Vec<f64> = clusters
        .entries()
        .iter()
        .map(|e| {
            let (mean, var) = cluster_mean_posterior(e.count, e.sum_y, sigma_sq, h);
            draw_normal(mean, var.sqrt(), rng)
        })
        .collect();
    for v in mu.iter_mut() {
        let pos = olds.iter().position(|o| o == v).expect("state value tracked");
        *v = news[pos];
    }
    // Rebuilding also merges the probability-zero event of two clusters
    // drawing the same value.
    *clusters = ClusterSet::from_values(mu, y);
}

/// Draws lambda0 from its Gamma full conditional (hierarchical variant).
pub fn step_lambda0(state: &MeanState, h: &MeanHyperParams, rng: &mut RngState) -> Result<f64> {
    h.validate()?;
    if !h.hierarchical {
        return Err(Error::usage("step_lambda0 requires the hierarchical variant"));
    }
    crate::rng::sample_gamma(lambda0_posterior(state.sigma_sq, h), rng)
}

struct MeanChain<'a> {
    y: &'a [f64],
    h: &'a MeanHyperParams,
    mu: Vec<f64>,
    sigma_sq: f64,
    lambda0: f64,
    clusters: ClusterSet,
    rng: RngState,
    diag: MixtureDiagnostics,
}

impl<'a> MeanChain<'a> {
    fn init(y: &'a [f64], h: &'a MeanHyperParams, seed: u64) -> Result<Self> {
        let state = MeanState::init(y, h)?;
        let clusters = ClusterSet::from_values(&state.mu, y);
        Ok(MeanChain {
            y,
            h,
            mu: state.mu,
            sigma_sq: state.sigma_sq,
            lambda0: state.lambda0_cur,
            clusters,
            rng: RngState::new(seed),
            diag: MixtureDiagnostics::new(),
        })
    }

    fn sweep(&mut self) {
        if self.h.hierarchical {
            let p = lambda0_posterior(self.sigma_sq, self.h);
            self.lambda0 = draw_gamma(p.shape, p.scale, &mut self.rng);
        }
        let p = sigma2_posterior(&self.clusters, self.y.len(), self.h, self.lambda0);
        self.sigma_sq = draw_inverse_gamma(p.shape, p.scale, &mut self.rng);
        for t in 0..self.y.len() {
            update_mu_index(
                t,
                &mut self.mu,
                self.y,
                self.sigma_sq,
                self.h,
                &mut self.clusters,
                &mut self.rng,
                &mut self.diag,
            );
        }
        resample_values(
            &mut self.mu,
            self.y,
            self.sigma_sq,
            self.h,
            &mut self.clusters,
            &mut self.rng,
        );
    }

    fn check(&self, sweep: usize) -> Result<()> {
        if !(self.sigma_sq.is_finite() && self.sigma_sq > 0.0) {
            return Err(Error::numeric(
                format!("mu-ppm sweep {sweep}"),
                format!("sigma_sq = {}", self.sigma_sq),
            ));
        }
        if !(self.lambda0.is_finite() && self.lambda0 > 0.0) {
            return Err(Error::numeric(
                format!("mu-ppm sweep {sweep}"),
                format!("lambda0 = {}", self.lambda0),
            ));
        }
        Ok(())
    }
}

/// Runs the sampler, keeping every post-burn-in sweep.
pub fn run_chain(y: &[f64], h: &MeanHyperParams, mcmc: &McmcSettings) -> Result<MeanDraws> {
    mcmc.validate()?;
    let mut records = Vec::with_capacity(mcmc.sweeps - mcmc.burn_in);
    let diag = run_chain_with(y, h, mcmc, |chain| {
        records.push(MeanSweepRecord {
            mu: chain.mu.to_vec(),
            sigma_sq: chain.sigma_sq,
            lambda0: h.hierarchical.then_some(chain.lambda0),
            partition: chain.clusters.partition(chain.mu),
        });
    })?;
    Ok(MeanDraws {
        records,
        total_sweeps: mcmc.sweeps,
        burn_in: mcmc.burn_in,
        diagnostics: diag,
    })
}

/// Lightweight per-sweep view handed to streaming consumers.
pub(crate) struct MeanSweepView<'a> {
    pub mu: &'a [f64],
    pub sigma_sq: f64,
    pub lambda0: f64,
    pub clusters: &'a ClusterSet,
}

/// Runs the sampler, invoking `on_sweep` for every post-burn-in sweep
/// without storing anything.
pub(crate) fn run_chain_with<F>(
    y: &[f64],
    h: &MeanHyperParams,
    mcmc: &McmcSettings,
    mut on_sweep: F,
) -> Result<MixtureDiagnostics>
where
    F: FnMut(&MeanSweepView),
{
    mcmc.validate()?;
    let mut chain = MeanChain::init(y, h, mcmc.seed)?;
    for sweep in 0..mcmc.sweeps {
        chain.sweep();
        chain.check(sweep)?;
        if sweep >= mcmc.burn_in {
            on_sweep(&MeanSweepView {
                mu: &chain.mu,
                sigma_sq: chain.sigma_sq,
                lambda0: chain.lambda0,
                clusters: &chain.clusters,
            });
        }
    }
    Ok(chain.diag)
}

/// Runs the conditional sampler under a fixed partition, alternating the
/// variance and cluster-value updates while skipping the mixture step, and
/// returns the ergodic means.
pub fn run_conditional_chain(
    y: &[f64],
    h: &MeanHyperParams,
    fixed: &Partition,
    mcmc: &McmcSettings,
) -> Result<ConditionalMeans> {
    mcmc.validate()?;
    h.validate()?;
    validate_returns(y)?;
    if fixed.n_items() != y.len() {
        return Err(Error::usage(format!(
            "partition covers {} items but series has {}",
            fixed.n_items(),
            y.len()
        )));
    }

    let t_len = y.len();
    let k = fixed.len();
    let mut count = vec![0usize; k];
    let mut sum_y = vec![0.0; k];
    let mut sum_y_sq = vec![0.0; k];
    let mut cluster_of = vec![0usize; t_len];
    for (d, members) in fixed.clusters().iter().enumerate() {
        count[d] = members.len();
        for &i in members {
            sum_y[d] += y[i];
            sum_y_sq[d] += y[i] * y[i];
            cluster_of[i] = d;
        }
    }

    let init = MeanState::init(y, h)?;
    let mut values = vec![init.mu[0]; k];
    let mut sigma_sq = init.sigma_sq;
    let mut lambda0 = init.lambda0_cur;
    let mut rng = RngState::new(mcmc.seed);

    let mut value_sums = vec![0.0; k];
    let mut sigma_sum = 0.0;
    for sweep in 0..mcmc.sweeps {
        if h.hierarchical {
            let p = lambda0_posterior(sigma_sq, h);
            lambda0 = draw_gamma(p.shape, p.scale, &mut rng);
        }
        let mut cluster_penalty = 0.0;
        let mut residual = 0.0;
        for d in 0..k {
            let dv = values[d] - h.m;
            cluster_penalty += dv * dv;
            residual += sum_y_sq[d] - 2.0 * values[d] * sum_y[d]
                + count[d] as f64 * values[d] * values[d];
        }
        let p = InverseGammaParams {
            shape: h.nu0 + t_len as f64 / 2.0 + k as f64 / 2.0,
            scale: lambda0 + cluster_penalty / (2.0 * h.tau0_sq) + 0.5 * residual,
        };
        sigma_sq = draw_inverse_gamma(p.shape, p.scale, &mut rng);
        if !(sigma_sq.is_finite() && sigma_sq > 0.0) {
            return Err(Error::numeric(
                format!("conditional mu-ppm sweep {sweep}"),
                format!("sigma_sq = {sigma_sq}"),
            ));
        }
        for d in 0..k {
            let (mean, var) = cluster_mean_posterior(count[d], sum_y[d], sigma_sq, h);
            values[d] = draw_normal(mean, var.sqrt(), &mut rng);
        }
        if sweep >= mcmc.burn_in {
            for d in 0..k {
                value_sums[d] += values[d];
            }
            sigma_sum += sigma_sq;
        }
    }

    let stored = (mcmc.sweeps - mcmc.burn_in) as f64;
    let mu = cluster_of
        .iter()
        .map(|&d| value_sums[d] / stored)
        .collect();
    Ok(ConditionalMeans {
        mu,
        sigma_sq: sigma_sum / stored,
    })
}
