//! Value-at-Risk computation: the closed-form Gaussian expression, per-draw
//! VaR for both partition models, ergodic estimates with credible intervals,
//! a maximum-likelihood Normal baseline with bootstrap intervals, multi-day
//! aggregation and the regulatory capital formula.
//!
//! VaR values are positive loss magnitudes normalised by the spot price;
//! reports express them in decimal units.

use crate::error::{Error, Result};
use crate::gibbs_mean::{MeanDraws, MeanSweepRecord};
use crate::gibbs_variance::{VarDraws, VarSweepRecord};
use crate::partition::{cluster_stats, ClusterStats};
use crate::rng::{normal_quantile_factor, RngState};
use crate::series::{ReturnSeries, SeriesSource};

/// Which estimator produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelTag {
    MuPpm,
    Sigma2Ppm,
    MlNormal,
}

impl ModelTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelTag::MuPpm => "mu-ppm",
            ModelTag::Sigma2Ppm => "sigma2-ppm",
            ModelTag::MlNormal => "ml-normal",
        }
    }
}

/// Point estimate, central credible interval and the underlying draws for
/// one (model, alpha) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct VaRReport {
    pub alpha: f64,
    pub model: ModelTag,
    /// Ergodic VaR estimate, decimal units.
    pub point: f64,
    pub interval_lo: f64,
    pub interval_hi: f64,
    /// Per-sweep VaR draws (bootstrap statistics for the ML baseline).
    pub draws: Vec<f64>,
    pub horizon_days: usize,
    pub cluster_stats: ClusterStats,
}

/// Shared final arithmetic so that every VaR expression reduces to the
/// Gaussian form through the identical floating-point path.
#[inline]
pub(crate) fn var_from_parts(mu: f64, sigma: f64, factor: f64) -> f64 {
    -mu + sigma * factor
}

/// Closed-form Gaussian VaR, `-mu + sigma * z(alpha)`.
pub fn gaussian_var(mu: f64, sigma: f64, alpha: f64) -> Result<f64> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::domain(format!("sigma must be >= 0, got {sigma}")));
    }
    let factor = normal_quantile_factor(alpha)?;
    Ok(var_from_parts(mu, sigma, factor))
}

pub(crate) fn mean_model_draw(record: &MeanSweepRecord, factor: f64) -> f64 {
    let t = record.mu.len() as f64;
    let mut weighted_mu = 0.0;
    for cluster in record.partition.clusters() {
        weighted_mu += cluster.len() as f64 / t * record.mu[cluster[0]];
    }
    var_from_parts(weighted_mu, record.sigma_sq.sqrt(), factor)
}

/// Per-sweep VaR under the mean-clustering model: the cluster-size-weighted
/// mean is subtracted from the common-sigma quantile term.
pub fn var_draw_mean_model(record: &MeanSweepRecord, alpha: f64) -> Result<f64> {
    let factor = normal_quantile_factor(alpha)?;
    Ok(mean_model_draw(record, factor))
}

pub(crate) fn variance_model_draw(record: &VarSweepRecord, factor: f64) -> f64 {
    let t = record.sigma_sq.len() as f64;
    let mut weighted_sd = 0.0;
    for cluster in record.partition.clusters() {
        // Standard deviations, not variances, are averaged.
        weighted_sd += cluster.len() as f64 / t * record.sigma_sq[cluster[0]].sqrt();
    }
    var_from_parts(record.mu, weighted_sd, factor)
}

/// Per-sweep VaR under the variance-clustering model: per-cluster standard
/// deviations are size-weighted before scaling the quantile factor.
pub fn var_draw_variance_model(record: &VarSweepRecord, alpha: f64) -> Result<f64> {
    let factor = normal_quantile_factor(alpha)?;
    Ok(variance_model_draw(record, factor))
}

/// Linear-interpolation empirical quantile of pre-sorted data.
pub(crate) fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = p * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Ergodic point estimate and central credible interval of a VaR draw
/// sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarEstimate {
    pub point: f64,
    pub interval_lo: f64,
    pub interval_hi: f64,
}

/// Arithmetic mean of the per-draw VaR values plus the central
/// `interval_mass` empirical quantile band.
pub fn var_estimate(draws: &[f64], interval_mass: f64) -> Result<VarEstimate> {
    if draws.len() < 100 {
        return Err(Error::usage(format!(
            "need at least 100 draws for a VaR estimate, got {}",
            draws.len()
        )));
    }
    if !(interval_mass > 0.0 && interval_mass < 1.0) {
        return Err(Error::domain("interval mass must lie in (0, 1)"));
    }
    let point = draws.iter().sum::<f64>() / draws.len() as f64;
    let mut sorted = draws.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite draws"));
    let lo = empirical_quantile(&sorted, (1.0 - interval_mass) / 2.0);
    let hi = empirical_quantile(&sorted, (1.0 + interval_mass) / 2.0);
    Ok(VarEstimate {
        point,
        interval_lo: lo,
        interval_hi: hi,
    })
}

/// Assembles the full report for a mean-model chain at one alpha.
pub fn mean_model_report(
    draws: &MeanDraws,
    alpha: f64,
    interval_mass: f64,
    horizon_days: usize,
) -> Result<VaRReport> {
    let factor = normal_quantile_factor(alpha)?;
    let per_draw: Vec<f64> = draws.records.iter().map(|r| mean_model_draw(r, factor)).collect();
    let est = var_estimate(&per_draw, interval_mass)?;
    Ok(VaRReport {
        alpha,
        model: ModelTag::MuPpm,
        point: est.point,
        interval_lo: est.interval_lo,
        interval_hi: est.interval_hi,
        draws: per_draw,
        horizon_days,
        cluster_stats: cluster_stats(draws.partitions())?,
    })
}

/// Assembles the full report for a variance-model chain at one alpha.
pub fn variance_model_report(
    draws: &VarDraws,
    alpha: f64,
    interval_mass: f64,
    horizon_days: usize,
) -> Result<VaRReport> {
    let factor = normal_quantile_factor(alpha)?;
    let per_draw: Vec<f64> = draws
        .records
        .iter()
        .map(|r| variance_model_draw(r, factor))
        .collect();
    let est = var_estimate(&per_draw, interval_mass)?;
    Ok(VaRReport {
        alpha,
        model: ModelTag::Sigma2Ppm,
        point: est.point,
        interval_lo: est.interval_lo,
        interval_hi: est.interval_hi,
        draws: per_draw,
        horizon_days,
        cluster_stats: cluster_stats(draws.partitions())?,
    })
}

/// Maximum-likelihood Normal VaR with a bootstrap interval: the point uses
/// the ML standard deviation (1/T normalisation); the interval is the
/// central 68% band of the statistic over resampled series.
pub fn ml_normal_var(
    y: &[f64],
    alpha: f64,
    bootstrap_reps: usize,
    rng: &mut RngState,
) -> Result<VaRReport> {
    crate::gibbs_mean::validate_returns(y)?;
    if bootstrap_reps == 0 {
        return Err(Error::usage("bootstrap_reps must be >= 1"));
    }
    let factor = normal_quantile_factor(alpha)?;
    let stat = |data: &[f64]| {
        let n = data.len() as f64;
        let mean = data.iter().sum::<f64>() / n;
        let var = data.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        var_from_parts(mean, var.sqrt(), factor)
    };
    let point = stat(y);

    let t = y.len();
    let mut stats = Vec::with_capacity(bootstrap_reps);
    let mut resample = vec![0.0; t];
    for _ in 0..bootstrap_reps {
        for slot in resample.iter_mut() {
            let idx = (rng.next_uniform() * t as f64) as usize;
            *slot = y[idx.min(t - 1)];
        }
        stats.push(stat(&resample));
    }
    let mut sorted = stats.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
    let lo = empirical_quantile(&sorted, 0.16);
    let hi = empirical_quantile(&sorted, 0.84);

    Ok(VaRReport {
        alpha,
        model: ModelTag::MlNormal,
        point,
        interval_lo: lo,
        interval_hi: hi,
        draws: stats,
        horizon_days: 1,
        cluster_stats: ClusterStats {
            mean_cluster_count: 1.0,
            largest_cluster_weight: 1.0,
        },
    })
}

/// Non-overlapping block sums of `h` consecutive log returns, aligned so the
/// most recent observation ends the last block; leftover oldest returns are
/// dropped.
pub fn aggregate_blocks(y: &[f64], h: usize) -> Result<Vec<f64>> {
    if h < 1 {
        return Err(Error::domain("aggregation horizon must be >= 1"));
    }
    if y.len() < h {
        return Err(Error::usage(format!(
            "series of length {} is shorter than horizon {h}",
            y.len()
        )));
    }
    let blocks = y.len() / h;
    let start = y.len() - blocks * h;
    Ok((0..blocks)
        .map(|b| y[start + b * h..start + (b + 1) * h].iter().sum())
        .collect())
}

/// Aggregates a return series to an `h`-day horizon, carrying block-end
/// dates through when present.
pub fn aggregate_returns(series: &ReturnSeries, h: usize) -> Result<ReturnSeries> {
    let returns = aggregate_blocks(&series.returns, h)?;
    let blocks = returns.len();
    let start = series.returns.len() - blocks * h;
    let dates = series.dates.as_ref().map(|dates| {
        (0..blocks)
            .map(|b| dates[start + (b + 1) * h - 1].clone())
            .collect()
    });
    Ok(ReturnSeries {
        returns,
        dates,
        source: SeriesSource::Returns,
    })
}

/// Market risk capital: `max(h/60 * sum of the 60 lagged 10-day VaR values,
/// current value)`. The slice is ordered oldest first with the current value
/// last; when longer than 61 entries, only the most recent 61 are used.
pub fn mrc(var_history_10d: &[f64], h_mult: f64) -> Result<f64> {
    if !(3.0..=4.0).contains(&h_mult) {
        return Err(Error::domain(format!(
            "penalty multiplier must lie in [3, 4], got {h_mult}"
        )));
    }
    if var_history_10d.len() < 61 {
        return Err(Error::usage(format!(
            "need 60 lagged values plus the current one, got {}",
            var_history_10d.len()
        )));
    }
    let recent = &var_history_10d[var_history_10d.len() - 61..];
    let current = recent[60];
    let lag_sum: f64 = recent[..60].iter().sum();
    Ok((h_mult / 60.0 * lag_sum).max(current))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Partition;

    fn mean_record(mu: Vec<f64>, sigma_sq: f64) -> MeanSweepRecord {
        let partition = Partition::from_values(&mu, 0.0);
        MeanSweepRecord {
            mu,
            sigma_sq,
            lambda0: None,
            partition,
        }
    }

    fn var_record(mu: f64, sigma_sq: Vec<f64>) -> VarSweepRecord {
        let partition = Partition::from_values(&sigma_sq, 0.0);
        VarSweepRecord {
            mu,
            sigma_sq,
            partition,
        }
    }

    #[test]
    fn gaussian_var_known_values() {
        assert_eq!(gaussian_var(0.0, 0.0, 0.01).unwrap(), 0.0);
        assert_eq!(gaussian_var(0.002, 1.5, 0.5).unwrap(), -0.002);
        let v = gaussian_var(0.001, 0.02, 0.01).unwrap();
        assert!((v - 0.04553).abs() < 1e-5, "v={v}");
        assert!(gaussian_var(0.0, -1.0, 0.01).is_err());
        assert!(gaussian_var(0.0, 1.0, 0.7).is_err());
    }

    #[test]
    fn mean_model_trivial_partition_reduces_exactly() {
        for seed in 0..100u64 {
            let mut rng = RngState::new(seed);
            let mu = rng.next_uniform() * 0.01 - 0.005;
            let s2 = rng.next_uniform() * 1.0e-3 + 1.0e-6;
            let alpha = 0.01 + rng.next_uniform() * 0.4;
            let record = mean_record(vec![mu; 10], s2);
            let direct = gaussian_var(mu, s2.sqrt(), alpha).unwrap();
            assert_eq!(var_draw_mean_model(&record, alpha).unwrap(), direct);
        }
    }

    #[test]
    fn mean_model_weights_clusters_by_size() {
        let x = 0.07;
        let mut mu = vec![0.0; 10];
        mu[9] = x;
        let record = mean_record(mu, 1.0e-4);
        let factor = normal_quantile_factor(0.01).unwrap();
        let expected = var_from_parts(x / 10.0, 1.0e-4f64.sqrt(), factor);
        assert!((var_draw_mean_model(&record, 0.01).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn mean_model_matches_unweighted_sum_oracle() {
        let mut rng = RngState::new(10);
        for _ in 0..50 {
            let t = 12;
            let mut mu: Vec<f64> = (0..t).map(|_| (rng.next_uniform() * 4.0).floor() * 0.01).collect();
            mu[0] = 0.05;
            let record = mean_record(mu.clone(), 2.0e-4);
            let factor = normal_quantile_factor(0.05).unwrap();
            let brute = var_from_parts(
                mu.iter().sum::<f64>() / t as f64,
                2.0e-4f64.sqrt(),
                factor,
            );
            let got = var_draw_mean_model(&record, 0.05).unwrap();
            assert!((got - brute).abs() < 1e-12, "got={got} brute={brute}");
        }
    }

    #[test]
    fn variance_model_trivial_partition_reduces_exactly() {
        for seed in 0..100u64 {
            let mut rng = RngState::new(1000 + seed);
            let mu = rng.next_uniform() * 0.01 - 0.005;
            let s2 = rng.next_uniform() * 1.0e-3 + 1.0e-6;
            let alpha = 0.01 + rng.next_uniform() * 0.4;
            let record = var_record(mu, vec![s2; 7]);
            let direct = gaussian_var(mu, s2.sqrt(), alpha).unwrap();
            assert_eq!(var_draw_variance_model(&record, alpha).unwrap(), direct);
        }
    }

    #[test]
    fn variance_model_averages_standard_deviations() {
        let record = var_record(0.0, vec![1.0, 4.0]);
        let factor = normal_quantile_factor(0.05).unwrap();
        let expected = var_from_parts(0.0, 1.5, factor);
        assert!((var_draw_variance_model(&record, 0.05).unwrap() - expected).abs() < 1e-15);

        // Brute-force oracle over per-index standard deviations.
        let sig = vec![1.0, 1.0, 4.0, 9.0, 4.0];
        let record = var_record(0.01, sig.clone());
        let avg_sd = sig.iter().map(|v| v.sqrt()).sum::<f64>() / sig.len() as f64;
        let oracle = -0.01 + avg_sd * factor;
        assert!((var_draw_variance_model(&record, 0.05).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn var_estimate_known_values() {
        let constant = vec![0.25; 150];
        let est = var_estimate(&constant, 0.68).unwrap();
        assert_eq!(est.point, 0.25);
        assert_eq!(est.interval_lo, est.interval_hi);

        let ramp: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let est = var_estimate(&ramp, 0.68).unwrap();
        assert!((est.point - 50.5).abs() < 1e-12);
        assert!(est.interval_lo <= est.point && est.point <= est.interval_hi);

        assert!(var_estimate(&ramp[..99], 0.68).is_err());
    }

    #[test]
    fn var_estimate_monotone_in_alpha() {
        let mut rng = RngState::new(77);
        let mu: Vec<f64> = (0..30).map(|_| rng.next_uniform() * 0.01).collect();
        let records: Vec<MeanSweepRecord> = (0..150)
            .map(|k| mean_record(mu.clone(), 1.0e-4 + 1.0e-6 * k as f64))
            .collect();
        let at = |alpha: f64| {
            let d: Vec<f64> = records
                .iter()
                .map(|r| var_draw_mean_model(r, alpha).unwrap())
                .collect();
            var_estimate(&d, 0.68).unwrap().point
        };
        assert!(at(0.01) >= at(0.05));
    }

    #[test]
    fn ml_normal_var_known_cases() {
        let mut rng = RngState::new(5);
        // An exactly representable constant keeps the ML residuals at zero.
        let constant = vec![0.25; 20];
        let rep = ml_normal_var(&constant, 0.01, 200, &mut rng).unwrap();
        assert_eq!(rep.point, -0.25);
        assert_eq!(rep.interval_lo, rep.interval_hi);

        let two = [-1.0, 1.0];
        let rep = ml_normal_var(&two, 0.01, 10, &mut rng).unwrap();
        let z = normal_quantile_factor(0.01).unwrap();
        assert!((rep.point - z).abs() < 1e-15);
    }

    #[test]
    fn ml_normal_var_scales_exactly_with_powers_of_two() {
        let mut rng = RngState::new(9);
        let y: Vec<f64> = (0..200).map(|_| rng.next_uniform() * 0.04 - 0.02).collect();
        for k in [2.0, 0.5, 8.0] {
            let scaled: Vec<f64> = y.iter().map(|v| v * k).collect();
            let a = ml_normal_var(&y, 0.05, 50, &mut RngState::new(1)).unwrap();
            let b = ml_normal_var(&scaled, 0.05, 50, &mut RngState::new(1)).unwrap();
            assert_eq!(b.point, k * a.point, "k={k}");
            assert_eq!(b.interval_lo, k * a.interval_lo);
        }
        // General scaling holds to rounding error.
        let k = 3.0;
        let scaled: Vec<f64> = y.iter().map(|v| v * k).collect();
        let a = ml_normal_var(&y, 0.05, 50, &mut RngState::new(1)).unwrap();
        let b = ml_normal_var(&scaled, 0.05, 50, &mut RngState::new(1)).unwrap();
        assert!(((b.point - k * a.point) / b.point).abs() < 1e-14);
    }

    #[test]
    fn ml_normal_var_covers_generator_truth() {
        let mut rng = RngState::new(2024);
        let y: Vec<f64> = (0..1000)
            .map(|_| crate::rng::draw_normal(0.0, 0.02, &mut rng))
            .collect();
        let rep = ml_normal_var(&y, 0.01, 1000, &mut rng).unwrap();
        let analytic = 0.02 * normal_quantile_factor(0.01).unwrap();
        assert!((rep.point - 0.04653).abs() < 0.004, "point={}", rep.point);
        assert!(rep.interval_lo <= analytic && analytic <= rep.interval_hi);
    }

    #[test]
    fn aggregation_blocks_align_to_most_recent() {
        assert_eq!(aggregate_blocks(&[1.0, 2.0, 3.0], 1).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(aggregate_blocks(&[1.0, 2.0, 3.0, 4.0], 2).unwrap(), vec![3.0, 7.0]);
        let y: Vec<f64> = (1..=25).map(|i| i as f64).collect();
        let agg = aggregate_blocks(&y, 10).unwrap();
        assert_eq!(agg.len(), 2);
        // Oldest five observations dropped.
        assert_eq!(agg[0], (6..=15).sum::<i32>() as f64);
        assert!(aggregate_blocks(&[1.0], 0).is_err());
    }

    #[test]
    fn aggregation_carries_block_end_dates() {
        let series = ReturnSeries {
            returns: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            dates: Some((1..=5).map(|d| format!("2020-01-0{d}")).collect()),
            source: SeriesSource::Returns,
        };
        let agg = aggregate_returns(&series, 2).unwrap();
        assert_eq!(agg.returns, vec![0.5, 0.9]);
        assert_eq!(
            agg.dates.unwrap(),
            vec!["2020-01-03".to_string(), "2020-01-05".to_string()]
        );
    }

    #[test]
    fn mrc_known_cases() {
        let constant = vec![0.05; 61];
        assert!((mrc(&constant, 3.0).unwrap() - 0.15).abs() < 1e-15);

        let mut spike = vec![0.0; 61];
        spike[60] = 0.07;
        assert_eq!(mrc(&spike, 3.5).unwrap(), 0.07);

        let mut rng = RngState::new(3);
        let hist: Vec<f64> = (0..61).map(|_| rng.next_uniform() * 0.1).collect();
        let expected = (3.3 / 60.0 * hist[..60].iter().sum::<f64>()).max(hist[60]);
        assert_eq!(mrc(&hist, 3.3).unwrap(), expected);

        assert!(mrc(&vec![0.1; 60], 3.0).is_err());
        assert!(mrc(&constant, 2.5).is_err());
    }
}
