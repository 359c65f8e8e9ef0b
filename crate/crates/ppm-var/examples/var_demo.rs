//! Library walkthrough: simulate returns with a handful of shocks, estimate
//! VaR under both partition models and the ML baseline, then locate the
//! shocked days with the decision-theoretic partition search.
//!
//! Run with: cargo run --release --example var_demo

use ppm_var::gibbs_mean::{run_chain as run_mean_chain, MeanHyperParams};
use ppm_var::gibbs_variance::{run_chain as run_var_chain, VarHyperParams};
use ppm_var::outliers::{detect_outliers, ScoreParams};
use ppm_var::partition::cluster_stats;
use ppm_var::rng::{sample_normal, RngState};
use ppm_var::var::{mean_model_report, ml_normal_var, variance_model_report};
use ppm_var::McmcSettings;

fn main() -> ppm_var::Result<()> {
    // Two years of daily returns with 1% volatility and three upward shocks.
    let t = 500;
    let sigma_sq = 1.0e-4;
    let shocked = [60usize, 250, 440];
    let mut rng = RngState::new(11);
    let mut y: Vec<f64> = (0..t)
        .map(|_| sample_normal(0.0, sigma_sq, &mut rng))
        .collect::<ppm_var::Result<_>>()?;
    for &i in &shocked {
        y[i] += 0.08;
    }

    let mcmc = McmcSettings {
        sweeps: 5000,
        burn_in: 500,
        seed: 7,
    };

    // Prior scale matched to the return scale via lambda0 = a(a+1), nu0 = 2+a.
    let a = 1.0e-4;
    let mean_h = MeanHyperParams {
        lambda0: a * (a + 1.0),
        nu0: 2.0 + a,
        ..MeanHyperParams::default()
    };
    let var_h = VarHyperParams {
        lambda0: a * (a + 1.0),
        nu0: 2.0 + a,
        ..VarHyperParams::default()
    };

    println!("model        alpha   VaR        68% interval");
    let mean_draws = run_mean_chain(&y, &mean_h, &mcmc)?;
    let var_draws = run_var_chain(&y, &var_h, &mcmc)?;
    for alpha in [0.01, 0.05] {
        let rep = mean_model_report(&mean_draws, alpha, 0.68, 1)?;
        println!(
            "mu-ppm       {alpha:<5}  {:.6}   [{:.6}, {:.6}]",
            rep.point, rep.interval_lo, rep.interval_hi
        );
        let rep = variance_model_report(&var_draws, alpha, 0.68, 1)?;
        println!(
            "sigma2-ppm   {alpha:<5}  {:.6}   [{:.6}, {:.6}]",
            rep.point, rep.interval_lo, rep.interval_hi
        );
        let rep = ml_normal_var(&y, alpha, 1000, &mut RngState::new(3))?;
        println!(
            "ml-normal    {alpha:<5}  {:.6}   [{:.6}, {:.6}]",
            rep.point, rep.interval_lo, rep.interval_hi
        );
    }

    let stats = cluster_stats(mean_draws.partitions())?;
    println!(
        "\nmean clusters {:.2}, largest-cluster weight {:.3}",
        stats.mean_cluster_count, stats.largest_cluster_weight
    );

    // Score weights sized for decimal-unit returns; see the README.
    let score = ScoreParams {
        k1: 0.99998,
        k2: 1.0e-5,
    };
    let conditional = McmcSettings {
        sweeps: 2000,
        burn_in: 200,
        seed: 17,
    };
    let result = detect_outliers(&y, &mean_h, &score, &mcmc, &conditional, 10)?;
    println!(
        "outliers {:?} (planted {:?}), best partition {}",
        result.outlier_indices,
        shocked,
        result.describe()
    );
    Ok(())
}
