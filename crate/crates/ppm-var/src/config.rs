//! Run configuration: defaults, the line-oriented `key = value` file format
//! with one section per subsystem, and the scale reparameterization of the
//! variance prior.
//!
//! Serialization prints floats with 17 significant digits so a serialized
//! configuration reruns bit-identically.

use std::path::Path;

use crate::error::{Error, Result};
use crate::gibbs_mean::MeanHyperParams;
use crate::gibbs_variance::VarHyperParams;
use crate::outliers::ScoreParams;
use crate::report::fmt_f64;
use crate::series::ColumnNames;
use crate::McmcSettings;

/// Which estimators a job runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    All,
    MuPpm,
    Sigma2Ppm,
    MlNormal,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::All => "all",
            ModelKind::MuPpm => "mu-ppm",
            ModelKind::Sigma2Ppm => "sigma2-ppm",
            ModelKind::MlNormal => "ml-normal",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(ModelKind::All),
            "mu-ppm" => Ok(ModelKind::MuPpm),
            "sigma2-ppm" => Ok(ModelKind::Sigma2Ppm),
            "ml-normal" => Ok(ModelKind::MlNormal),
            other => Err(Error::usage(format!("unknown model kind '{other}'"))),
        }
    }
}

/// Chain lengths and seeds for the three chain roles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McmcConfig {
    pub sweeps: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Lengths for the fixed-partition conditional chains of the outlier
    /// search; those mix almost immediately.
    pub conditional_sweeps: usize,
    pub conditional_burn_in: usize,
    /// Lengths for the per-stage chains of the rolling backtest.
    pub backtest_sweeps: usize,
    pub backtest_burn_in: usize,
}

impl McmcConfig {
    pub fn main(&self) -> McmcSettings {
        McmcSettings {
            sweeps: self.sweeps,
            burn_in: self.burn_in,
            seed: self.seed,
        }
    }

    /// Conditional chains run on a seed stream offset from the main seed.
    pub fn conditional(&self) -> McmcSettings {
        McmcSettings {
            sweeps: self.conditional_sweeps,
            burn_in: self.conditional_burn_in,
            seed: self.seed.wrapping_add(1_000_003),
        }
    }

    pub fn backtest(&self) -> McmcSettings {
        McmcSettings {
            sweeps: self.backtest_sweeps,
            burn_in: self.backtest_burn_in,
            seed: self.seed.wrapping_add(2_000_003),
        }
    }
}

/// Job-level knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub alphas: Vec<f64>,
    pub horizon_days: usize,
    pub window: usize,
    pub bootstrap_reps: usize,
    pub tail_k: usize,
    pub histogram_bins: usize,
    pub outlier_stability: bool,
    pub interval_mass: f64,
}

/// Sensitivity grids.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSettings {
    pub c_grid: Vec<f64>,
    pub a_grid: Vec<f64>,
}

/// Complete configuration of a job run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub mean: MeanHyperParams,
    pub variance: VarHyperParams,
    pub score: ScoreParams,
    pub mcmc: McmcConfig,
    pub run: RunSettings,
    pub grids: GridSettings,
    pub input: ColumnNames,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelKind::All,
            mean: MeanHyperParams::default(),
            variance: VarHyperParams::default(),
            score: ScoreParams::default(),
            mcmc: McmcConfig {
                sweeps: 10_000,
                burn_in: 1000,
                seed: 12345,
                conditional_sweeps: 2000,
                conditional_burn_in: 200,
                backtest_sweeps: 4000,
                backtest_burn_in: 400,
            },
            run: RunSettings {
                alphas: vec![0.01, 0.05],
                horizon_days: 1,
                window: 745,
                bootstrap_reps: 1000,
                tail_k: 30,
                histogram_bins: 50,
                outlier_stability: false,
                interval_mass: 0.68,
            },
            grids: GridSettings {
                c_grid: vec![0.1, 0.5, 1.0, 5.0, 10.0, 50.0],
                a_grid: vec![0.0001, 0.001, 0.01, 0.1, 1.0],
            },
            input: ColumnNames::default(),
        }
    }
}

/// Variance-prior scale reparameterization: `lambda0 = a (a + 1)` and
/// `nu0 = 2 + a` give the prior for sigma^2 expectation and variance both
/// equal to `a`.
pub fn a_parameterization(a: f64) -> Result<(f64, f64)> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::domain(format!("a must be > 0, got {a}")));
    }
    Ok((a * (a + 1.0), 2.0 + a))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse()
        .map_err(|_| Error::usage(format!("cannot parse '{v}' as a number for {key}")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| Error::usage(format!("cannot parse '{v}' as an integer for {key}")))
}

fn parse_u64(key: &str, v: &str) -> Result<u64> {
    v.parse()
        .map_err(|_| Error::usage(format!("cannot parse '{v}' as a seed for {key}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::usage(format!("expected true/false for {key}, got '{v}'"))),
    }
}

fn parse_list_f64(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(|item| parse_f64(key, item.trim()))
        .collect()
}

/// Parses a configuration document; unspecified keys keep their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::usage(format!("config line {}: expected 'key = value'", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        let qualified = format!("{section}.{key}");
        match qualified.as_str() {
            "model.kind" => cfg.model = ModelKind::parse(value)?,

            "mean.m" => cfg.mean.m = parse_f64(&qualified, value)?,
            "mean.tau0_sq" => cfg.mean.tau0_sq = parse_f64(&qualified, value)?,
            "mean.nu0" => cfg.mean.nu0 = parse_f64(&qualified, value)?,
            "mean.lambda0" => cfg.mean.lambda0 = parse_f64(&qualified, value)?,
            "mean.c" => cfg.mean.c = parse_f64(&qualified, value)?,
            "mean.hierarchical" => cfg.mean.hierarchical = parse_bool(&qualified, value)?,
            "mean.eta" => cfg.mean.eta = parse_f64(&qualified, value)?,
            "mean.phi" => cfg.mean.phi = parse_f64(&qualified, value)?,

            "variance.m" => cfg.variance.m = parse_f64(&qualified, value)?,
            "variance.nu0" => cfg.variance.nu0 = parse_f64(&qualified, value)?,
            "variance.lambda0" => cfg.variance.lambda0 = parse_f64(&qualified, value)?,
            "variance.c" => cfg.variance.c = parse_f64(&qualified, value)?,

            "score.k1" => cfg.score.k1 = parse_f64(&qualified, value)?,
            "score.k2" => cfg.score.k2 = parse_f64(&qualified, value)?,

            "mcmc.sweeps" => cfg.mcmc.sweeps = parse_usize(&qualified, value)?,
            "mcmc.burn_in" => cfg.mcmc.burn_in = parse_usize(&qualified, value)?,
            "mcmc.seed" => cfg.mcmc.seed = parse_u64(&qualified, value)?,
            "mcmc.conditional_sweeps" => {
                cfg.mcmc.conditional_sweeps = parse_usize(&qualified, value)?
            }
            "mcmc.conditional_burn_in" => {
                cfg.mcmc.conditional_burn_in = parse_usize(&qualified, value)?
            }
            "mcmc.backtest_sweeps" => cfg.mcmc.backtest_sweeps = parse_usize(&qualified, value)?,
            "mcmc.backtest_burn_in" => {
                cfg.mcmc.backtest_burn_in = parse_usize(&qualified, value)?
            }

            "run.alphas" => cfg.run.alphas = parse_list_f64(&qualified, value)?,
            "run.horizon_days" => cfg.run.horizon_days = parse_usize(&qualified, value)?,
            "run.window" => cfg.run.window = parse_usize(&qualified, value)?,
            "run.bootstrap_reps" => cfg.run.bootstrap_reps = parse_usize(&qualified, value)?,
            "run.tail_k" => cfg.run.tail_k = parse_usize(&qualified, value)?,
            "run.histogram_bins" => cfg.run.histogram_bins = parse_usize(&qualified, value)?,
            "run.outlier_stability" => {
                cfg.run.outlier_stability = parse_bool(&qualified, value)?
            }
            "run.interval_mass" => cfg.run.interval_mass = parse_f64(&qualified, value)?,

            "grids.c_grid" => cfg.grids.c_grid = parse_list_f64(&qualified, value)?,
            "grids.a_grid" => cfg.grids.a_grid = parse_list_f64(&qualified, value)?,

            "input.date_column" => cfg.input.date = value.to_string(),
            "input.price_column" => cfg.input.price = value.to_string(),
            "input.return_column" => cfg.input.ret = value.to_string(),

            other => return Err(Error::usage(format!("unknown config key '{other}'"))),
        }
    }
    Ok(cfg)
}

fn push_kv(out: &mut String, key: &str, value: impl AsRef<str>) {
    out.push_str(key);
    out.push_str(" = ");
    out.push_str(value.as_ref());
    out.push('\n');
}

fn list_f64(values: &[f64]) -> String {
    values.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(",")
}

/// Serializes a configuration with stable key ordering.
pub fn serialize_config(cfg: &RunConfig) -> String {
    let mut s = String::new();
    s.push_str("[model]\n");
    push_kv(&mut s, "kind", cfg.model.as_str());

    s.push_str("\n[mean]\n");
    push_kv(&mut s, "m", fmt_f64(cfg.mean.m));
    push_kv(&mut s, "tau0_sq", fmt_f64(cfg.mean.tau0_sq));
    push_kv(&mut s, "nu0", fmt_f64(cfg.mean.nu0));
    push_kv(&mut s, "lambda0", fmt_f64(cfg.mean.lambda0));
    push_kv(&mut s, "c", fmt_f64(cfg.mean.c));
    push_kv(&mut s, "hierarchical", cfg.mean.hierarchical.to_string());
    push_kv(&mut s, "eta", fmt_f64(cfg.mean.eta));
    push_kv(&mut s, "phi", fmt_f64(cfg.mean.phi));

    s.push_str("\n[variance]\n");
    push_kv(&mut s, "m", fmt_f64(cfg.variance.m));
    push_kv(&mut s, "nu0", fmt_f64(cfg.variance.nu0));
    push_kv(&mut s, "lambda0", fmt_f64(cfg.variance.lambda0));
    push_kv(&mut s, "c", fmt_f64(cfg.variance.c));

    s.push_str("\n[score]\n");
    push_kv(&mut s, "k1", fmt_f64(cfg.score.k1));
    push_kv(&mut s, "k2", fmt_f64(cfg.score.k2));

    s.push_str("\n[mcmc]\n");
    push_kv(&mut s, "sweeps", cfg.mcmc.sweeps.to_string());
    push_kv(&mut s, "burn_in", cfg.mcmc.burn_in.to_string());
    push_kv(&mut s, "seed", cfg.mcmc.seed.to_string());
    push_kv(&mut s, "conditional_sweeps", cfg.mcmc.conditional_sweeps.to_string());
    push_kv(&mut s, "conditional_burn_in", cfg.mcmc.conditional_burn_in.to_string());
    push_kv(&mut s, "backtest_sweeps", cfg.mcmc.backtest_sweeps.to_string());
    push_kv(&mut s, "backtest_burn_in", cfg.mcmc.backtest_burn_in.to_string());

    s.push_str("\n[run]\n");
    push_kv(&mut s, "alphas", list_f64(&cfg.run.alphas));
    push_kv(&mut s, "horizon_days", cfg.run.horizon_days.to_string());
    push_kv(&mut s, "window", cfg.run.window.to_string());
    push_kv(&mut s, "bootstrap_reps", cfg.run.bootstrap_reps.to_string());
    push_kv(&mut s, "tail_k", cfg.run.tail_k.to_string());
    push_kv(&mut s, "histogram_bins", cfg.run.histogram_bins.to_string());
    push_kv(&mut s, "outlier_stability", cfg.run.outlier_stability.to_string());
    push_kv(&mut s, "interval_mass", fmt_f64(cfg.run.interval_mass));

    s.push_str("\n[grids]\n");
    push_kv(&mut s, "c_grid", list_f64(&cfg.grids.c_grid));
    push_kv(&mut s, "a_grid", list_f64(&cfg.grids.a_grid));

    s.push_str("\n[input]\n");
    push_kv(&mut s, "date_column", &cfg.input.date);
    push_kv(&mut s, "price_column", &cfg.input.price);
    push_kv(&mut s, "return_column", &cfg.input.ret);
    s
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::data(path.display().to_string(), None, e.to_string()))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_hyperparameters_are_the_documented_literals() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.mean.m, 0.0);
        assert_eq!(cfg.mean.tau0_sq, 1.0e3);
        assert_eq!(cfg.mean.lambda0, 0.0101);
        assert_eq!(cfg.mean.nu0, 2.01);
        assert_eq!(cfg.mean.c, 1.0);
        assert_eq!(cfg.variance.m, 0.0);
        assert_eq!(cfg.variance.lambda0, 0.0101);
        assert_eq!(cfg.variance.nu0, 2.01);
        assert_eq!(cfg.variance.c, 1.0);
        assert_eq!(cfg.score.k1, 0.996);
        assert_eq!(cfg.score.k2, 0.002);
        assert_eq!(cfg.mcmc.sweeps, 10_000);
        assert_eq!(cfg.mcmc.burn_in, 1000);
        assert_eq!(cfg.run.alphas, vec![0.01, 0.05]);
        assert_eq!(cfg.grids.c_grid, vec![0.1, 0.5, 1.0, 5.0, 10.0, 50.0]);
        assert_eq!(cfg.grids.a_grid, vec![0.0001, 0.001, 0.01, 0.1, 1.0]);
    }

    #[test]
    fn a_parameterization_known_values() {
        let (lambda0, nu0) = a_parameterization(0.01).unwrap();
        assert!((lambda0 - 0.0101).abs() < 1e-15);
        assert!((nu0 - 2.01).abs() < 1e-15);
        assert_eq!(a_parameterization(1.0).unwrap(), (2.0, 3.0));
        assert!(a_parameterization(0.0).is_err());

        // Implied prior mean and variance both equal a.
        for a in [0.0001, 0.001, 0.01, 0.1, 1.0] {
            let (l, n) = a_parameterization(a).unwrap();
            let mean = l / (n - 1.0);
            let var = l * l / ((n - 1.0) * (n - 1.0) * (n - 2.0));
            assert!((mean - a).abs() < 1e-12 * a.max(1.0));
            assert!((var - a).abs() < 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn config_round_trips() {
        let cfg = RunConfig::default();
        assert_eq!(parse_config(&serialize_config(&cfg)).unwrap(), cfg);

        let mut modified = cfg.clone();
        modified.model = ModelKind::Sigma2Ppm;
        modified.mean.hierarchical = true;
        modified.mean.lambda0 = 2.5e-4;
        modified.mcmc.seed = 777;
        modified.run.alphas = vec![0.025];
        modified.grids.c_grid = vec![0.25, 4.0];
        modified.input.price = "Close".to_string();
        assert_eq!(parse_config(&serialize_config(&modified)).unwrap(), modified);
    }

    #[test]
    fn parser_rejects_unknown_keys() {
        assert!(parse_config("[mean]\nbogus = 1\n").is_err());
        assert!(parse_config("[nope]\nm = 1\n").is_err());
        assert!(parse_config("[mean]\nm or something\n").is_err());
    }

    #[test]
    fn parser_accepts_comments_and_partial_files() {
        let cfg = parse_config("# comment\n[mcmc]\nseed = 9\n").unwrap();
        assert_eq!(cfg.mcmc.seed, 9);
        assert_eq!(cfg.mcmc.sweeps, 10_000);
    }
}
