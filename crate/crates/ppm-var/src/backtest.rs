//! Rolling-window exception generation and coverage tests.
//!
//! At stage J the model sees the `window` returns starting at J, produces a
//! VaR forecast, and an exception is recorded when the next realized return
//! falls strictly below the negated forecast. The exception sequence feeds
//! the unconditional-coverage likelihood ratio and the combined test that
//! adds first-order serial independence.
//!
//! The independence statistic pools with n/N, the full-sample exception
//! rate, rather than the transition-sample rate; pooling that way keeps the
//! statistic nonnegative too, since n/N is suboptimal against the
//! two-parameter transition likelihood.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gibbs_mean::{self, MeanHyperParams};
use crate::gibbs_variance::{self, VarHyperParams};
use crate::rng::normal_quantile_factor;
use crate::var::var_from_parts;
use crate::McmcSettings;

/// Chi-square 5% critical value with one degree of freedom.
pub const UC_CRITICAL_5PCT: f64 = 3.84;
/// Chi-square 5% critical value with two degrees of freedom.
pub const CC_CRITICAL_5PCT: f64 = 5.99;

/// Exception indicator sequence produced by a backtest.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceptionSequence {
    pub indicators: Vec<bool>,
    pub alpha: f64,
}

impl ExceptionSequence {
    pub fn new(indicators: Vec<bool>, alpha: f64) -> Result<Self> {
        if indicators.is_empty() {
            return Err(Error::usage("exception sequence must be non-empty"));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain("alpha must lie in (0, 1)"));
        }
        Ok(ExceptionSequence { indicators, alpha })
    }

    pub fn len(&self) -> usize {
        self.indicators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indicators.is_empty()
    }

    /// Number of exceptions.
    pub fn n(&self) -> usize {
        self.indicators.iter().filter(|&&b| b).count()
    }
}

/// `x * ln(y)` with the convention that a zero count contributes nothing.
fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// Unconditional-coverage likelihood ratio for `n` exceptions out of
/// `n_total` observations at level `alpha`.
pub fn kupiec_uc(n: usize, n_total: usize, alpha: f64) -> Result<f64> {
    if n_total == 0 || n > n_total {
        return Err(Error::usage(format!("invalid counts n={n}, N={n_total}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain("alpha must lie in (0, 1)"));
    }
    let (n, total) = (n as f64, n_total as f64);
    let rate = n / total;
    let null = xlogy(total - n, 1.0 - alpha) + xlogy(n, alpha);
    let fitted = xlogy(total - n, 1.0 - rate) + xlogy(n, rate);
    Ok(-2.0 * null + 2.0 * fitted)
}

/// Independence and conditional-coverage likelihood ratios.
///
/// Transition counts come from consecutive indicator pairs; a conditioning
/// state that never occurs contributes zero to the log-likelihood.
pub fn christoffersen_cc(seq: &ExceptionSequence) -> Result<(f64, f64)> {
    if seq.len() < 2 {
        return Err(Error::usage("independence test needs at least 2 observations"));
    }
    let (mut n00, mut n01, mut n10, mut n11) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for w in seq.indicators.windows(2) {
        match (w[0], w[1]) {
            (false, false) => n00 += 1.0,
            (false, true) => n01 += 1.0,
            (true, false) => n10 += 1.0,
            (true, true) => n11 += 1.0,
        }
    }
    let n = seq.n() as f64;
    let total = seq.len() as f64;
    let pooled = n / total;

    let restricted = xlogy(n00 + n10, 1.0 - pooled) + xlogy(n01 + n11, pooled);
    let mut full = 0.0;
    if n00 + n01 > 0.0 {
        let pi0 = n01 / (n00 + n01);
        full += xlogy(n00, 1.0 - pi0) + xlogy(n01, pi0);
    }
    if n10 + n11 > 0.0 {
        let pi1 = n11 / (n10 + n11);
        full += xlogy(n10, 1.0 - pi1) + xlogy(n11, pi1);
    }
    let lr_ind = -2.0 * restricted + 2.0 * full;
    let lr_uc = kupiec_uc(seq.n(), seq.len(), seq.alpha)?;
    Ok((lr_ind, lr_uc + lr_ind))
}

/// Per-stage outcome of a rolling backtest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageRecord {
    pub var: f64,
    pub realized: f64,
    pub exception: bool,
}

/// Aggregated rolling-backtest results.
#[derive(Debug, Clone, PartialEq)]
pub struct BacktestReport {
    pub alpha: f64,
    pub window: usize,
    /// Number of exceptions.
    pub n: usize,
    /// Number of stages.
    pub n_stages: usize,
    pub lr_uc: f64,
    pub lr_ind: f64,
    pub lr_cc: f64,
    /// Rejection at the 5% level of the unconditional-coverage test.
    pub reject_uc: bool,
    /// Rejection at the 5% level of the conditional-coverage test.
    pub reject_cc: bool,
    pub stages: Vec<StageRecord>,
    /// Chain lengths used per stage, when an MCMC model produced the VaRs.
    pub mcmc: Option<McmcSettings>,
}

impl BacktestReport {
    pub fn exception_sequence(&self) -> ExceptionSequence {
        ExceptionSequence {
            indicators: self.stages.iter().map(|s| s.exception).collect(),
            alpha: self.alpha,
        }
    }
}

/// Which sampler produces the per-stage VaR forecasts.
#[derive(Debug, Clone, PartialEq)]
pub enum BacktestModel {
    MuPpm(MeanHyperParams),
    Sigma2Ppm(VarHyperParams),
}

/// Generic rolling harness: `forecast(stage, window_returns)` supplies the
/// VaR for each stage; stages run in parallel and are assembled in stage
/// order.
pub fn rolling_backtest_with<F>(
    y: &[f64],
    window: usize,
    alpha: f64,
    forecast: F,
) -> Result<BacktestReport>
where
    F: Fn(usize, &[f64]) -> Result<f64> + Sync,
{
    if window < 1 {
        return Err(Error::usage("window must be >= 1"));
    }
    if y.len() < window + 1 {
        return Err(Error::usage(format!(
            "need at least window + 1 = {} returns, got {}",
            window + 1,
            y.len()
        )));
    }
    let n_stages = y.len() - window;
    let stages: Vec<StageRecord> = (0..n_stages)
        .into_par_iter()
        .map(|j| {
            let var = forecast(j, &y[j..j + window]).map_err(|e| match e {
                Error::Numeric { context, msg } => {
                    Error::numeric(format!("stage {j}: {context}"), msg)
                }
                other => other,
            })?;
            let realized = y[j + window];
            Ok(StageRecord {
                var,
                realized,
                // Strict inequality: touching the threshold is no exception.
                exception: realized < -var,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let indicators: Vec<bool> = stages.iter().map(|s| s.exception).collect();
    let seq = ExceptionSequence::new(indicators, alpha)?;
    let lr_uc = kupiec_uc(seq.n(), seq.len(), alpha)?;
    let (lr_ind, lr_cc) = if seq.len() >= 2 {
        christoffersen_cc(&seq)?
    } else {
        (0.0, lr_uc)
    };
    Ok(BacktestReport {
        alpha,
        window,
        n: seq.n(),
        n_stages,
        lr_uc,
        lr_ind,
        lr_cc,
        reject_uc: lr_uc > UC_CRITICAL_5PCT,
        reject_cc: lr_cc > CC_CRITICAL_5PCT,
        stages,
        mcmc: None,
    })
}

/// Rolling backtest with per-stage Gibbs chains, sharing each stage's chain
/// across all requested alphas. Stage J runs on an independent stream
/// seeded `mcmc.seed + J`.
pub fn rolling_backtest_multi(
    y: &[f64],
    model: &BacktestModel,
    window: usize,
    alphas: &[f64],
    mcmc: &McmcSettings,
) -> Result<Vec<BacktestReport>> {
    if alphas.is_empty() {
        return Err(Error::usage("need at least one alpha"));
    }
    mcmc.validate()?;
    let factors: Vec<f64> = alphas
        .iter()
        .map(|&a| normal_quantile_factor(a))
        .collect::<Result<_>>()?;
    if window < 2 {
        return Err(Error::usage("window must be >= 2 for the samplers"));
    }
    if y.len() < window + 1 {
        return Err(Error::usage(format!(
            "need at least window + 1 = {} returns, got {}",
            window + 1,
            y.len()
        )));
    }

    let n_stages = y.len() - window;
    // Per stage: the ergodic VaR estimate for every alpha.
    let per_stage: Vec<Vec<f64>> = (0..n_stages)
        .into_par_iter()
        .map(|j| {
            let slice = &y[j..j + window];
            let stage_mcmc = McmcSettings {
                seed: mcmc.seed.wrapping_add(j as u64),
                ..*mcmc
            };
            let mut sums = vec![0.0f64; factors.len()];
            let mut stored = 0usize;
            match model {
                BacktestModel::MuPpm(h) => {
                    gibbs_mean::run_chain_with(slice, h, &stage_mcmc, |view| {
                        let t = view.mu.len() as f64;
                        let weighted: f64 = view
                            .clusters
                            .entries()
                            .iter()
                            .map(|e| e.count as f64 / t * e.value)
                            .sum();
                        let sigma = view.sigma_sq.sqrt();
                        for (s, &f) in sums.iter_mut().zip(&factors) {
                            *s += var_from_parts(weighted, sigma, f);
                        }
                        stored += 1;
                    })
                    .map_err(|e| stage_error(j, e))?;
                }
                BacktestModel::Sigma2Ppm(h) => {
                    gibbs_variance::run_chain_with(slice, h, &stage_mcmc, |view| {
                        let t = view.sigma_sq.len() as f64;
                        let weighted_sd: f64 = view
                            .clusters
                            .entries()
                            .iter()
                            .map(|e| e.count as f64 / t * e.value.sqrt())
                            .sum();
                        for (s, &f) in sums.iter_mut().zip(&factors) {
                            *s += var_from_parts(view.mu, weighted_sd, f);
                        }
                        stored += 1;
                    })
                    .map_err(|e| stage_error(j, e))?;
                }
            }
            Ok(sums.into_iter().map(|s| s / stored as f64).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;

    alphas
        .iter()
        .enumerate()
        .map(|(ai, &alpha)| {
            let mut report =
                rolling_backtest_with(y, window, alpha, |j, _| Ok(per_stage[j][ai]))?;
            report.mcmc = Some(*mcmc);
            Ok(report)
        })
        .collect()
}

fn stage_error(stage: usize, e: Error) -> Error {
    match e {
        Error::Numeric { context, msg } => Error::numeric(format!("stage {stage}: {context}"), msg),
        other => other,
    }
}

/// Single-alpha convenience wrapper around [`rolling_backtest_multi`].
pub fn rolling_backtest(
    y: &[f64],
    model: &BacktestModel,
    window: usize,
    alpha: f64,
    mcmc: &McmcSettings,
) -> Result<BacktestReport> {
    Ok(rolling_backtest_multi(y, model, window, &[alpha], mcmc)?
        .pop()
        .expect("one report per alpha"))
}
