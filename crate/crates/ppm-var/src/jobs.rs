//! Job orchestration: estimate, backtest, outliers, sensitivity and
//! aggregate commands, each writing a report document plus tabular exports
//! into an output directory.
//!
//! Every file is written whole under a unique name and reruns with the same
//! configuration and seed produce byte-identical output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::backtest::{rolling_backtest_multi, BacktestModel, BacktestReport};
use crate::config::{a_parameterization, serialize_config, ModelKind, RunConfig};
use crate::error::{Error, Result};
use crate::gibbs_mean::{self, MeanHyperParams};
use crate::gibbs_variance::{self, VarHyperParams};
use crate::outliers::{detect_outliers, stability_over_c};
use crate::partition::Partition;
use crate::report::{csv_row, export_histogram, fmt_f64, ReportDoc};
use crate::rng::{normal_quantile_factor, RngState};
use crate::series::ReturnSeries;
use crate::var::{
    aggregate_returns, mean_model_report, ml_normal_var, var_estimate, var_from_parts,
    variance_model_report, VaRReport,
};
use crate::McmcSettings;

/// The five CLI commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JobCommand {
    Estimate,
    Backtest,
    Outliers,
    Sensitivity,
    Aggregate,
}

impl JobCommand {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "estimate" => Ok(JobCommand::Estimate),
            "backtest" => Ok(JobCommand::Backtest),
            "outliers" => Ok(JobCommand::Outliers),
            "sensitivity" => Ok(JobCommand::Sensitivity),
            "aggregate" => Ok(JobCommand::Aggregate),
            other => Err(Error::usage(format!("unknown command '{other}'"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            JobCommand::Estimate => "estimate",
            JobCommand::Backtest => "backtest",
            JobCommand::Outliers => "outliers",
            JobCommand::Sensitivity => "sensitivity",
            JobCommand::Aggregate => "aggregate",
        }
    }
}

/// Files written by a job plus a human-readable summary for stdout.
#[derive(Debug, Clone)]
pub struct JobOutput {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

fn write_file(out_dir: &Path, name: &str, content: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    let path = out_dir.join(name);
    std::fs::write(&path, content)
        .map_err(|e| Error::data(path.display().to_string(), None, e.to_string()))?;
    files.push(path);
    Ok(())
}

fn job_header(doc: &mut ReportDoc, cfg: &RunConfig, command: JobCommand, input: &str, t: usize) {
    doc.section("job")
        .kv("command", command.as_str())
        .kv("input", input)
        .kv("returns", t.to_string())
        .kv("seed", cfg.mcmc.seed.to_string());
}

fn provenance(doc: &mut ReportDoc, cfg: &RunConfig) {
    doc.section("provenance:config");
    doc.raw(&serialize_config(cfg));
}

fn alpha_label(alpha: f64) -> String {
    format!("{alpha}")
}

/// Applies the configured horizon: above one day the series is aggregated
/// into non-overlapping block sums first.
fn working_series(cfg: &RunConfig, series: &ReturnSeries) -> Result<ReturnSeries> {
    if cfg.run.horizon_days > 1 {
        aggregate_returns(series, cfg.run.horizon_days)
    } else {
        Ok(series.clone())
    }
}

fn report_section(doc: &mut ReportDoc, rep: &VaRReport) {
    doc.section(&format!(
        "estimate:{}:alpha={}",
        rep.model.as_str(),
        alpha_label(rep.alpha)
    ));
    doc.kv_f64("var", rep.point)
        .kv_f64("var_pct", 100.0 * rep.point)
        .kv_f64("interval_lo", rep.interval_lo)
        .kv_f64("interval_hi", rep.interval_hi)
        .kv("draws", rep.draws.len().to_string())
        .kv("horizon_days", rep.horizon_days.to_string())
        .kv_f64("mean_cluster_count", rep.cluster_stats.mean_cluster_count)
        .kv_f64("largest_cluster_weight", rep.cluster_stats.largest_cluster_weight);
}

fn partition_frequency_section<'a, I>(doc: &mut ReportDoc, model: &str, partitions: I, total: usize)
where
    I: IntoIterator<Item = &'a Partition>,
{
    let mut counts: BTreeMap<&'a Partition, usize> = BTreeMap::new();
    for p in partitions {
        *counts.entry(p).or_insert(0) += 1;
    }
    let mut rows: Vec<(usize, &Partition)> = counts.into_iter().map(|(p, c)| (c, p)).collect();
    rows.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    doc.section(&format!("partition-frequency:{model}"));
    doc.kv("distinct_partitions", rows.len().to_string());
    for (rank, (count, p)) in rows.iter().take(10).enumerate() {
        doc.kv(
            &format!("rank_{rank}"),
            format!("{} {}", fmt_f64(*count as f64 / total as f64), p.display()),
        );
    }
}

fn estimate_job(
    cfg: &RunConfig,
    series: &ReturnSeries,
    input: &str,
    out_dir: &Path,
) -> Result<JobOutput> {
    let work = working_series(cfg, series)?;
    let y = &work.returns;
    let horizon = cfg.run.horizon_days;
    let mass = cfg.run.interval_mass;

    let mut doc = ReportDoc::new();
    job_header(&mut doc, cfg, JobCommand::Estimate, input, y.len());
    let mut files = Vec::new();
    let mut summary = String::new();

    let mut emit = |doc: &mut ReportDoc, rep: &VaRReport, files: &mut Vec<PathBuf>| -> Result<()> {
        report_section(doc, rep);
        let hist = export_histogram(&rep.draws, cfg.run.histogram_bins)?;
        write_file(
            out_dir,
            &format!("hist_{}_a{}.csv", rep.model.as_str(), alpha_label(rep.alpha)),
            &hist.to_csv(),
            files,
        )?;
        summary.push_str(&format!(
            "{} alpha={}: VaR = {:.6} [{:.6}, {:.6}]\n",
            rep.model.as_str(),
            alpha_label(rep.alpha),
            rep.point,
            rep.interval_lo,
            rep.interval_hi
        ));
        Ok(())
    };

    if matches!(cfg.model, ModelKind::All | ModelKind::MuPpm) {
        let mcmc = cfg.mcmc.main();
        let draws = gibbs_mean::run_chain(y, &cfg.mean, &mcmc)?;
        // At multi-day horizons the one-day estimate rides along so the
        // horizon ratio can be read against the square-root-of-time rule.
        let daily = if horizon > 1 {
            let daily_mcmc = McmcSettings {
                seed: cfg.mcmc.seed.wrapping_add(3),
                ..cfg.mcmc.main()
            };
            let daily_draws = gibbs_mean::run_chain(&series.returns, &cfg.mean, &daily_mcmc)?;
            Some(
                cfg.run
                    .alphas
                    .iter()
                    .map(|&alpha| Ok(mean_model_report(&daily_draws, alpha, mass, 1)?.point))
                    .collect::<Result<Vec<f64>>>()?,
            )
        } else {
            None
        };
        for (k, &alpha) in cfg.run.alphas.iter().enumerate() {
            let rep = mean_model_report(&draws, alpha, mass, horizon)?;
            emit(&mut doc, &rep, &mut files)?;
            if let Some(points) = &daily {
                doc.kv_f64("var_1d", points[k])
                    .kv_f64("horizon_ratio", rep.point / points[k])
                    .kv_f64("sqrt_horizon", (horizon as f64).sqrt());
            }
        }
        partition_frequency_section(&mut doc, "mu-ppm", draws.partitions(), draws.stored());
        doc.section("diagnostics:mu-ppm")
            .kv("mixture_updates", draws.diagnostics.updates.to_string())
            .kv("copies", draws.diagnostics.copies.to_string())
            .kv("fresh_draws", draws.diagnostics.fresh_draws.to_string())
            .kv_f64("max_weight_sum_error", draws.diagnostics.max_weight_sum_error);
    }

    if matches!(cfg.model, ModelKind::All | ModelKind::Sigma2Ppm) {
        let mcmc = McmcSettings {
            seed: cfg.mcmc.seed.wrapping_add(1),
            ..cfg.mcmc.main()
        };
        let draws = gibbs_variance::run_chain(y, &cfg.variance, &mcmc)?;
        let daily = if horizon > 1 {
            let daily_mcmc = McmcSettings {
                seed: cfg.mcmc.seed.wrapping_add(4),
                ..cfg.mcmc.main()
            };
            let daily_draws =
                gibbs_variance::run_chain(&series.returns, &cfg.variance, &daily_mcmc)?;
            Some(
                cfg.run
                    .alphas
                    .iter()
                    .map(|&alpha| Ok(variance_model_report(&daily_draws, alpha, mass, 1)?.point))
                    .collect::<Result<Vec<f64>>>()?,
            )
        } else {
            None
        };
        for (k, &alpha) in cfg.run.alphas.iter().enumerate() {
            let rep = variance_model_report(&draws, alpha, mass, horizon)?;
            emit(&mut doc, &rep, &mut files)?;
            if let Some(points) = &daily {
                doc.kv_f64("var_1d", points[k])
                    .kv_f64("horizon_ratio", rep.point / points[k])
                    .kv_f64("sqrt_horizon", (horizon as f64).sqrt());
            }
        }
        partition_frequency_section(&mut doc, "sigma2-ppm", draws.partitions(), draws.stored());
        doc.section("diagnostics:sigma2-ppm")
            .kv("mixture_updates", draws.diagnostics.updates.to_string())
            .kv("copies", draws.diagnostics.copies.to_string())
            .kv("fresh_draws", draws.diagnostics.fresh_draws.to_string())
            .kv_f64("max_weight_sum_error", draws.diagnostics.max_weight_sum_error);
    }

    if matches!(cfg.model, ModelKind::All | ModelKind::MlNormal) {
        let mut rng = RngState::new(cfg.mcmc.seed.wrapping_add(2));
        for &alpha in &cfg.run.alphas {
            let mut rep = ml_normal_var(y, alpha, cfg.run.bootstrap_reps, &mut rng)?;
            rep.horizon_days = horizon;
            emit(&mut doc, &rep, &mut files)?;
        }
    }

    provenance(&mut doc, cfg);
    write_file(out_dir, "report_estimate.txt", &doc.finish(), &mut files)?;
    Ok(JobOutput { files, summary })
}

fn backtest_section(doc: &mut ReportDoc, model: &str, rep: &BacktestReport) {
    doc.section(&format!("backtest:{model}:alpha={}", alpha_label(rep.alpha)));
    doc.kv("exceptions", rep.n.to_string())
        .kv("stages", rep.n_stages.to_string())
        .kv("window", rep.window.to_string())
        .kv_f64("lr_uc", rep.lr_uc)
        .kv_f64("lr_ind", rep.lr_ind)
        .kv_f64("lr_cc", rep.lr_cc)
        .kv("reject_uc_5pct", rep.reject_uc.to_string())
        .kv("reject_cc_5pct", rep.reject_cc.to_string());
    if let Some(mcmc) = rep.mcmc {
        doc.kv("stage_sweeps", mcmc.sweeps.to_string())
            .kv("stage_burn_in", mcmc.burn_in.to_string());
    }
}

fn backtest_stage_csv(rep: &BacktestReport) -> String {
    let mut s = String::from("stage,var,realized,exception\n");
    for (j, stage) in rep.stages.iter().enumerate() {
        s.push_str(&csv_row(&[
            j.to_string(),
            fmt_f64(stage.var),
            fmt_f64(stage.realized),
            (stage.exception as u8).to_string(),
        ]));
        s.push('\n');
    }
    s
}

fn backtest_job(
    cfg: &RunConfig,
    series: &ReturnSeries,
    input: &str,
    out_dir: &Path,
) -> Result<JobOutput> {
    let work = working_series(cfg, series)?;
    let y = &work.returns;

    let models: Vec<(&str, BacktestModel)> = match cfg.model {
        ModelKind::MuPpm => vec![("mu-ppm", BacktestModel::MuPpm(cfg.mean))],
        ModelKind::Sigma2Ppm => vec![("sigma2-ppm", BacktestModel::Sigma2Ppm(cfg.variance))],
        ModelKind::All => vec![
            ("mu-ppm", BacktestModel::MuPpm(cfg.mean)),
            ("sigma2-ppm", BacktestModel::Sigma2Ppm(cfg.variance)),
        ],
        ModelKind::MlNormal => {
            return Err(Error::usage("backtest requires a PPM model selection"))
        }
    };

    let mut doc = ReportDoc::new();
    job_header(&mut doc, cfg, JobCommand::Backtest, input, y.len());
    let mut files = Vec::new();
    let mut summary = String::new();

    for (name, model) in &models {
        let reports =
            rolling_backtest_multi(y, model, cfg.run.window, &cfg.run.alphas, &cfg.mcmc.backtest())?;
        for rep in &reports {
            backtest_section(&mut doc, name, rep);
            write_file(
                out_dir,
                &format!("backtest_stages_{name}_a{}.csv", alpha_label(rep.alpha)),
                &backtest_stage_csv(rep),
                &mut files,
            )?;
            summary.push_str(&format!(
                "{name} alpha={}: {} exceptions in {} stages, LR_UC = {:.3} ({}), LR_CC = {:.3} ({})\n",
                alpha_label(rep.alpha),
                rep.n,
                rep.n_stages,
                rep.lr_uc,
                if rep.reject_uc { "reject" } else { "accept" },
                rep.lr_cc,
                if rep.reject_cc { "reject" } else { "accept" },
            ));
        }
    }

    provenance(&mut doc, cfg);
    write_file(out_dir, "report_backtest.txt", &doc.finish(), &mut files)?;
    Ok(JobOutput { files, summary })
}

fn outliers_job(
    cfg: &RunConfig,
    series: &ReturnSeries,
    input: &str,
    out_dir: &Path,
) -> Result<JobOutput> {
    let work = working_series(cfg, series)?;
    let y = &work.returns;

    let result = detect_outliers(
        y,
        &cfg.mean,
        &cfg.score,
        &cfg.mcmc.main(),
        &cfg.mcmc.conditional(),
        cfg.run.tail_k,
    )?;

    let mut doc = ReportDoc::new();
    job_header(&mut doc, cfg, JobCommand::Outliers, input, y.len());
    doc.section("outliers")
        .kv("best_partition", result.best_partition.display())
        .kv("clusters", result.best_partition.len().to_string())
        .kv_f64("score", result.score)
        .kv("candidates", result.candidates.len().to_string())
        .kv(
            "outlier_indices",
            if result.outlier_indices.is_empty() {
                "none".to_string()
            } else {
                result
                    .outlier_indices
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(";")
            },
        );
    if let Some(dates) = &work.dates {
        let flagged: Vec<String> = result
            .outlier_indices
            .iter()
            .map(|&i| dates[i].clone())
            .collect();
        if !flagged.is_empty() {
            doc.kv("outlier_dates", flagged.join(";"));
        }
    }

    let mut files = Vec::new();
    let mut table = String::from("rank,score,clusters,partition\n");
    let mut ranked: Vec<_> = result.candidates.iter().collect();
    ranked.sort_by(|a, b| a.score.partial_cmp(&b.score).unwrap());
    for (rank, cand) in ranked.iter().enumerate() {
        table.push_str(&format!(
            "{rank},{},{},\"{}\"\n",
            fmt_f64(cand.score),
            cand.partition.len(),
            cand.partition.display()
        ));
    }
    write_file(out_dir, "outlier_candidates.csv", &table, &mut files)?;

    let mut summary = format!(
        "best partition {} (score {:.6}); outliers: {:?}\n",
        result.describe(),
        result.score,
        result.outlier_indices
    );

    if cfg.run.outlier_stability {
        let rows = stability_over_c(
            y,
            &cfg.mean,
            &cfg.score,
            &cfg.mcmc.main(),
            &cfg.mcmc.conditional(),
            cfg.run.tail_k,
            &cfg.grids.c_grid,
        )?;
        let mut table = String::from("c,flagged_count,flagged,score\n");
        for row in &rows {
            table.push_str(&format!(
                "{},{},\"{}\",{}\n",
                fmt_f64(row.c),
                row.flagged.len(),
                row.flagged
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
                fmt_f64(row.score)
            ));
        }
        write_file(out_dir, "outlier_stability.csv", &table, &mut files)?;
        summary.push_str(&format!("stability table over {} cohesion values written\n", rows.len()));
    }

    provenance(&mut doc, cfg);
    write_file(out_dir, "report_outliers.txt", &doc.finish(), &mut files)?;
    Ok(JobOutput { files, summary })
}

/// Streaming per-draw VaR collection for the mean model, one vector per
/// quantile factor.
fn mean_var_draws(
    y: &[f64],
    h: &MeanHyperParams,
    mcmc: &McmcSettings,
    factors: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let mut per_alpha = vec![Vec::new(); factors.len()];
    gibbs_mean::run_chain_with(y, h, mcmc, |view| {
        let t = view.mu.len() as f64;
        let weighted: f64 = view
            .clusters
            .entries()
            .iter()
            .map(|e| e.count as f64 / t * e.value)
            .sum();
        let sigma = view.sigma_sq.sqrt();
        for (k, &f) in factors.iter().enumerate() {
            per_alpha[k].push(var_from_parts(weighted, sigma, f));
        }
    })?;
    Ok(per_alpha)
}

fn variance_var_draws(
    y: &[f64],
    h: &VarHyperParams,
    mcmc: &McmcSettings,
    factors: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let mut per_alpha = vec![Vec::new(); factors.len()];
    gibbs_variance::run_chain_with(y, h, mcmc, |view| {
        let t = view.sigma_sq.len() as f64;
        let weighted_sd: f64 = view
            .clusters
            .entries()
            .iter()
            .map(|e| e.count as f64 / t * e.value.sqrt())
            .sum();
        for (k, &f) in factors.iter().enumerate() {
            per_alpha[k].push(var_from_parts(view.mu, weighted_sd, f));
        }
    })?;
    Ok(per_alpha)
}

fn sensitivity_job(
    cfg: &RunConfig,
    series: &ReturnSeries,
    input: &str,
    out_dir: &Path,
) -> Result<JobOutput> {
    let work = working_series(cfg, series)?;
    let y = &work.returns;
    let factors: Vec<f64> = cfg
        .run
        .alphas
        .iter()
        .map(|&a| normal_quantile_factor(a))
        .collect::<Result<_>>()?;
    let mass = cfg.run.interval_mass;

    // Cohesion sweep for the mean model.
    let mut c_table = String::from("c,model,alpha,var,interval_lo,interval_hi\n");
    for (i, &c) in cfg.grids.c_grid.iter().enumerate() {
        let h = MeanHyperParams { c, ..cfg.mean };
        let mcmc = McmcSettings {
            seed: cfg.mcmc.seed.wrapping_add(i as u64),
            ..cfg.mcmc.main()
        };
        let per_alpha = mean_var_draws(y, &h, &mcmc, &factors)?;
        for (k, draws) in per_alpha.iter().enumerate() {
            let est = var_estimate(draws, mass)?;
            c_table.push_str(&csv_row(&[
                fmt_f64(c),
                "mu-ppm".to_string(),
                alpha_label(cfg.run.alphas[k]),
                fmt_f64(est.point),
                fmt_f64(est.interval_lo),
                fmt_f64(est.interval_hi),
            ]));
            c_table.push('\n');
        }
    }

    // Prior-scale sweep for both models.
    let mut a_table = String::from("a,lambda0,nu0,model,alpha,var,interval_lo,interval_hi\n");
    for (i, &a) in cfg.grids.a_grid.iter().enumerate() {
        let (lambda0, nu0) = a_parameterization(a)?;
        let base = 1000 + 2 * i as u64;

        let mean_h = MeanHyperParams {
            lambda0,
            nu0,
            ..cfg.mean
        };
        let mcmc = McmcSettings {
            seed: cfg.mcmc.seed.wrapping_add(base),
            ..cfg.mcmc.main()
        };
        let per_alpha = mean_var_draws(y, &mean_h, &mcmc, &factors)?;
        for (k, draws) in per_alpha.iter().enumerate() {
            let est = var_estimate(draws, mass)?;
            a_table.push_str(&csv_row(&[
                fmt_f64(a),
                fmt_f64(lambda0),
                fmt_f64(nu0),
                "mu-ppm".to_string(),
                alpha_label(cfg.run.alphas[k]),
                fmt_f64(est.point),
                fmt_f64(est.interval_lo),
                fmt_f64(est.interval_hi),
            ]));
            a_table.push('\n');
        }

        let var_h = VarHyperParams {
            lambda0,
            nu0,
            ..cfg.variance
        };
        let mcmc = McmcSettings {
            seed: cfg.mcmc.seed.wrapping_add(base + 1),
            ..cfg.mcmc.main()
        };
        let per_alpha = variance_var_draws(y, &var_h, &mcmc, &factors)?;
        for (k, draws) in per_alpha.iter().enumerate() {
            let est = var_estimate(draws, mass)?;
            a_table.push_str(&csv_row(&[
                fmt_f64(a),
                fmt_f64(lambda0),
                fmt_f64(nu0),
                "sigma2-ppm".to_string(),
                alpha_label(cfg.run.alphas[k]),
                fmt_f64(est.point),
                fmt_f64(est.interval_lo),
                fmt_f64(est.interval_hi),
            ]));
            a_table.push('\n');
        }
    }

    let mut files = Vec::new();
    write_file(out_dir, "sensitivity_c.csv", &c_table, &mut files)?;
    write_file(out_dir, "sensitivity_a.csv", &a_table, &mut files)?;

    let mut doc = ReportDoc::new();
    job_header(&mut doc, cfg, JobCommand::Sensitivity, input, y.len());
    doc.section("sensitivity")
        .kv("c_grid_points", cfg.grids.c_grid.len().to_string())
        .kv("a_grid_points", cfg.grids.a_grid.len().to_string())
        .kv("alphas", cfg.run.alphas.len().to_string());
    provenance(&mut doc, cfg);
    write_file(out_dir, "report_sensitivity.txt", &doc.finish(), &mut files)?;

    let summary = format!(
        "sensitivity tables written: {} cohesion rows, {} prior-scale rows\n",
        cfg.grids.c_grid.len() * cfg.run.alphas.len(),
        cfg.grids.a_grid.len() * cfg.run.alphas.len() * 2
    );
    Ok(JobOutput { files, summary })
}

fn aggregate_job(
    cfg: &RunConfig,
    series: &ReturnSeries,
    _input: &str,
    out_dir: &Path,
) -> Result<JobOutput> {
    let agg = aggregate_returns(series, cfg.run.horizon_days)?;
    let mut csv = String::new();
    match &agg.dates {
        Some(dates) => {
            csv.push_str("date,return\n");
            for (d, r) in dates.iter().zip(&agg.returns) {
                csv.push_str(&format!("{d},{}\n", fmt_f64(*r)));
            }
        }
        None => {
            csv.push_str("return\n");
            for r in &agg.returns {
                csv.push_str(&fmt_f64(*r));
                csv.push('\n');
            }
        }
    }
    let mut files = Vec::new();
    write_file(out_dir, "aggregated_returns.csv", &csv, &mut files)?;
    let summary = format!(
        "aggregated {} returns into {} blocks of {} days\n",
        series.len(),
        agg.len(),
        cfg.run.horizon_days
    );
    Ok(JobOutput { files, summary })
}

/// Runs one job against a loaded series, writing results under `out_dir`.
pub fn run_job(
    cfg: &RunConfig,
    command: JobCommand,
    series: &ReturnSeries,
    input_label: &str,
    out_dir: &Path,
) -> Result<JobOutput> {
    cfg.mean.validate()?;
    cfg.variance.validate()?;
    cfg.score.validate()?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Error::data(out_dir.display().to_string(), None, e.to_string()))?;
    match command {
        JobCommand::Estimate => estimate_job(cfg, series, input_label, out_dir),
        JobCommand::Backtest => backtest_job(cfg, series, input_label, out_dir),
        JobCommand::Outliers => outliers_job(cfg, series, input_label, out_dir),
        JobCommand::Sensitivity => sensitivity_job(cfg, series, input_label, out_dir),
        JobCommand::Aggregate => aggregate_job(cfg, series, input_label, out_dir),
    }
}
