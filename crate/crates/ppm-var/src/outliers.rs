//! Decision-theoretic outlier identification on top of the mean-clustering
//! sampler.
//!
//! Candidate partitions with at most three clusters are generated from
//! threshold pairs over the sorted unique posterior means: a left tail, a
//! central block and a right tail, plus the two-cluster variant that merges
//! both tails. Each candidate is scored with a fixed-partition conditional
//! chain; the minimiser wins and its smaller clusters are the outliers.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gibbs_mean::{run_chain, run_conditional_chain, MeanHyperParams};
use crate::partition::Partition;
use crate::McmcSettings;

/// Cost-complexity weights of the score function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreParams {
    pub k1: f64,
    pub k2: f64,
}

impl Default for ScoreParams {
    fn default() -> Self {
        ScoreParams {
            k1: 0.996,
            k2: 0.002,
        }
    }
}

impl ScoreParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.k1.is_finite() && self.k1 >= 0.0 && self.k2.is_finite() && self.k2 >= 0.0) {
            return Err(Error::domain("k1 and k2 must be nonnegative"));
        }
        if self.k1 + self.k2 > 1.0 {
            return Err(Error::domain("k1 + k2 must not exceed 1"));
        }
        Ok(())
    }

    /// Weight of the cluster-count penalty, `1 - k1 - k2`.
    pub fn complexity_weight(&self) -> f64 {
        1.0 - self.k1 - self.k2
    }
}

/// One scored candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateScore {
    pub partition: Partition,
    pub score: f64,
}

/// Outcome of the partition search.
#[derive(Debug, Clone, PartialEq)]
pub struct OutlierResult {
    pub best_partition: Partition,
    pub score: f64,
    /// Indices in every cluster of non-maximal cardinality, ascending.
    pub outlier_indices: Vec<usize>,
    /// Full per-candidate score table in canonical partition order.
    pub candidates: Vec<CandidateScore>,
}

impl OutlierResult {
    /// Compact one-line description of the winning partition.
    pub fn describe(&self) -> String {
        if self.best_partition.is_trivial() {
            format!("trivial ({} points)", self.best_partition.n_items())
        } else {
            let sizes: Vec<usize> =
                self.best_partition.clusters().iter().map(Vec::len).collect();
            format!("{} clusters of sizes {sizes:?}", self.best_partition.len())
        }
    }
}

/// Score of a candidate partition: squared estimation distances for the
/// mean vector and the variance plus a penalty per cluster.
pub fn score(
    rho: &Partition,
    mu_b: &[f64],
    sigma2_b: f64,
    mu_rho: &[f64],
    sigma2_rho: f64,
    p: &ScoreParams,
) -> Result<f64> {
    p.validate()?;
    if mu_b.len() != mu_rho.len() || mu_b.len() != rho.n_items() {
        return Err(Error::usage("mean vectors and partition sizes must agree"));
    }
    let t = mu_b.len() as f64;
    let mean_term: f64 = mu_b
        .iter()
        .zip(mu_rho)
        .map(|(b, r)| (b - r) * (b - r))
        .sum();
    let var_diff = sigma2_b - sigma2_rho;
    Ok(p.k1 / t * mean_term + p.k2 * var_diff * var_diff + p.complexity_weight() * rho.len() as f64)
}

/// Groups the sorted posterior means into unique values, chaining entries
/// whose gap is at most 1e-12, and returns per-index group labels together
/// with the group count.
fn unique_groups(mu_b: &[f64]) -> (Vec<usize>, usize) {
    let mut order: Vec<usize> = (0..mu_b.len()).collect();
    order.sort_by(|&a, &b| mu_b[a].partial_cmp(&mu_b[b]).expect("finite posterior means"));
    let mut group_of = vec![0usize; mu_b.len()];
    let mut group = 0usize;
    for (k, &idx) in order.iter().enumerate() {
        if k > 0 && mu_b[idx] - mu_b[order[k - 1]] > 1e-12 {
            group += 1;
        }
        group_of[idx] = group;
    }
    (group_of, group + 1)
}

/// Candidate partitions generated from threshold pairs restricted to the
/// `tail_k` smallest and largest unique posterior means. Each genuine
/// three-cluster candidate also contributes its tails-merged two-cluster
/// form; the trivial partition is always present; duplicates collapse via
/// the canonical form.
pub fn candidate_partitions(mu_b: &[f64], tail_k: usize) -> Result<Vec<Partition>> {
    if mu_b.is_empty() {
        return Err(Error::usage("posterior mean vector is empty"));
    }
    if tail_k == 0 {
        return Err(Error::usage("tail_k must be >= 1"));
    }
    if let Some(i) = mu_b.iter().position(|v| !v.is_finite()) {
        return Err(Error::numeric("candidate_partitions", format!("mean {i} not finite")));
    }
    let t = mu_b.len();
    let (group_of, groups) = unique_groups(mu_b);
    let k = tail_k.min(groups);

    let mut set: BTreeSet<Partition> = BTreeSet::new();
    set.insert(Partition::trivial(t));
    for i in 0..k {
        for j in (groups - k)..groups {
            if i > j {
                continue;
            }
            let mut s1 = Vec::new();
            let mut s2 = Vec::new();
            let mut s3 = Vec::new();
            for (idx, &g) in group_of.iter().enumerate() {
                if g < i {
                    s1.push(idx);
                } else if g <= j {
                    s2.push(idx);
                } else {
                    s3.push(idx);
                }
            }
            let clusters: Vec<Vec<usize>> = [s1.clone(), s2.clone(), s3.clone()]
                .into_iter()
                .filter(|c| !c.is_empty())
                .collect();
            if !clusters.is_empty() {
                set.insert(Partition::new(clusters, t)?);
            }
            if !s1.is_empty() && !s3.is_empty() {
                let mut merged = s1;
                merged.extend(s3);
                set.insert(Partition::new(vec![merged, s2], t)?);
            }
        }
    }
    Ok(set.into_iter().collect())
}

/// Runs the full chain for the reference estimates, scores every candidate
/// with a fixed-partition conditional chain, and returns the minimiser.
/// Ties break toward fewer clusters, then canonical order.
pub fn detect_outliers(
    y: &[f64],
    h: &MeanHyperParams,
    p: &ScoreParams,
    mcmc_full: &McmcSettings,
    mcmc_conditional: &McmcSettings,
    tail_k: usize,
) -> Result<OutlierResult> {
    p.validate()?;
    let draws = run_chain(y, h, mcmc_full)?;
    let mu_b = draws.posterior_mean_mu();
    let sigma2_b = draws.posterior_mean_sigma_sq();
    drop(draws);

    let partitions = candidate_partitions(&mu_b, tail_k)?;
    let scored: Vec<CandidateScore> = partitions
        .into_par_iter()
        .enumerate()
        .map(|(idx, partition)| {
            let mcmc = McmcSettings {
                seed: mcmc_conditional.seed.wrapping_add(idx as u64),
                ..*mcmc_conditional
            };
            let est = run_conditional_chain(y, h, &partition, &mcmc)?;
            let s = score(&partition, &mu_b, sigma2_b, &est.mu, est.sigma_sq, p)?;
            if !s.is_finite() {
                return Err(Error::numeric(
                    "detect_outliers",
                    format!("non-finite score for {}", partition.display()),
                ));
            }
            Ok(CandidateScore { partition, score: s })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best = 0usize;
    for (idx, cand) in scored.iter().enumerate().skip(1) {
        let cur = &scored[best];
        let better = cand.score < cur.score
            || (cand.score == cur.score && cand.partition.len() < cur.partition.len());
        if better {
            best = idx;
        }
    }
    let winner = scored[best].clone();
    Ok(OutlierResult {
        outlier_indices: winner.partition.non_maximal_indices(),
        best_partition: winner.partition,
        score: winner.score,
        candidates: scored,
    })
}

/// One row of the cohesion-stability table.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRow {
    pub c: f64,
    pub flagged: Vec<usize>,
    pub score: f64,
}

/// Reruns the detector across a grid of cohesion constants and reports the
/// flagged index sets for comparison.
#[allow(clippy::too_many_arguments)]
pub fn stability_over_c(
    y: &[f64],
    h: &MeanHyperParams,
    p: &ScoreParams,
    mcmc_full: &McmcSettings,
    mcmc_conditional: &McmcSettings,
    tail_k: usize,
    c_grid: &[f64],
) -> Result<Vec<StabilityRow>> {
    c_grid
        .iter()
        .map(|&c| {
            let hc = MeanHyperParams { c, ..*h };
            let result = detect_outliers(y, &hc, p, mcmc_full, mcmc_conditional, tail_k)?;
            Ok(StabilityRow {
                c,
                flagged: result.outlier_indices,
                score: result.score,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{draw_normal, RngState};

    fn planted_series(seed: u64, t: usize, sigma: f64, outliers: &[usize], shift: f64) -> Vec<f64> {
        let mut rng = RngState::new(seed);
        let mut y: Vec<f64> = (0..t).map(|_| draw_normal(0.0, sigma, &mut rng)).collect();
        for &i in outliers {
            y[i] += shift;
        }
        y
    }

    /// Score weights matched to decimal-unit returns: the cluster penalty
    /// must sit between the fit gain of a genuine outlier cluster and the
    /// noise-level gains on null data.
    fn decimal_scale_score() -> ScoreParams {
        ScoreParams {
            k1: 0.99998,
            k2: 1.0e-5,
        }
    }

    fn fast_full() -> McmcSettings {
        McmcSettings {
            sweeps: 1200,
            burn_in: 150,
            seed: 1,
        }
    }

    fn fast_conditional() -> McmcSettings {
        McmcSettings {
            sweeps: 700,
            burn_in: 70,
            seed: 2,
        }
    }

    #[test]
    fn score_known_cases() {
        let t = 5;
        let mu = vec![0.1; t];
        let trivial = Partition::trivial(t);
        // Exactly representable weights make k1 + k2 = 1 hold bit-for-bit.
        let exact = ScoreParams { k1: 0.75, k2: 0.25 };
        assert_eq!(score(&trivial, &mu, 0.5, &mu, 0.5, &exact).unwrap(), 0.0);

        let pure_penalty = ScoreParams { k1: 0.0, k2: 0.0 };
        let split = Partition::new(vec![vec![0, 1], vec![2, 3, 4]], t).unwrap();
        assert_eq!(score(&split, &mu, 0.5, &mu, 0.5, &pure_penalty).unwrap(), 2.0);

        // Cluster label order is immaterial: both orderings canonicalize to
        // the same partition and the same score.
        let relabeled = Partition::new(vec![vec![2, 3, 4], vec![0, 1]], t).unwrap();
        assert_eq!(relabeled, split);
        assert_eq!(
            score(&relabeled, &mu, 0.5, &mu, 0.5, &pure_penalty).unwrap(),
            score(&split, &mu, 0.5, &mu, 0.5, &pure_penalty).unwrap()
        );
    }

    #[test]
    fn score_matches_term_by_term_recomputation() {
        let mut rng = RngState::new(44);
        for _ in 0..20 {
            let t = 7;
            let mu_b: Vec<f64> = (0..t).map(|_| rng.next_uniform()).collect();
            let mu_r: Vec<f64> = (0..t).map(|_| rng.next_uniform()).collect();
            let s_b = rng.next_uniform();
            let s_r = rng.next_uniform();
            let p = ScoreParams { k1: 0.7, k2: 0.2 };
            let rho = Partition::new(vec![vec![0, 1, 2], vec![3, 4], vec![5, 6]], t).unwrap();
            let got = score(&rho, &mu_b, s_b, &mu_r, s_r, &p).unwrap();
            let mut hand = 0.0;
            for i in 0..t {
                hand += 0.7 / t as f64 * (mu_b[i] - mu_r[i]).powi(2);
            }
            hand += 0.2 * (s_b - s_r).powi(2);
            hand += (1.0 - 0.7 - 0.2) * 3.0;
            assert!((got - hand).abs() < 1e-14);
        }
    }

    #[test]
    fn score_validates_inputs() {
        let p = ScoreParams { k1: 0.9, k2: 0.2 };
        assert!(p.validate().is_err());
        let ok = ScoreParams::default();
        assert!(ok.validate().is_ok());
        let rho = Partition::trivial(3);
        assert!(score(&rho, &[0.0; 3], 0.1, &[0.0; 2], 0.1, &ok).is_err());
    }

    #[test]
    fn candidates_for_constant_means_is_trivial_only() {
        let cands = candidate_partitions(&[0.5; 8], 4).unwrap();
        assert_eq!(cands, vec![Partition::trivial(8)]);
    }

    #[test]
    fn candidates_enumerate_threshold_pairs_exactly() {
        let cands = candidate_partitions(&[1.0, 2.0, 3.0], 3).unwrap();
        let expect: BTreeSet<Partition> = [
            Partition::trivial(3),
            Partition::new(vec![vec![0], vec![1, 2]], 3).unwrap(),
            Partition::new(vec![vec![0, 1], vec![2]], 3).unwrap(),
            Partition::singletons(3),
            Partition::new(vec![vec![0, 2], vec![1]], 3).unwrap(),
        ]
        .into_iter()
        .collect();
        assert_eq!(cands.iter().cloned().collect::<BTreeSet<_>>(), expect);
        assert_eq!(cands.len(), 5);
    }

    #[test]
    fn candidates_have_cardinality_at_most_three() {
        let mut rng = RngState::new(17);
        for _ in 0..25 {
            let mu: Vec<f64> = (0..20).map(|_| rng.next_uniform()).collect();
            for cands in [
                candidate_partitions(&mu, 3).unwrap(),
                candidate_partitions(&mu, 20).unwrap(),
            ] {
                assert!(cands.iter().all(|p| (1..=3).contains(&p.len())));
                // Canonical dedup: no two equal partitions.
                let set: BTreeSet<_> = cands.iter().cloned().collect();
                assert_eq!(set.len(), cands.len());
            }
        }
    }

    #[test]
    fn full_tail_reproduces_unrestricted_search() {
        let mu = [0.4, 0.1, 0.9, 0.3];
        let full = candidate_partitions(&mu, 4).unwrap();
        let huge = candidate_partitions(&mu, 1000).unwrap();
        assert_eq!(full, huge);
    }

    #[test]
    fn detector_flags_planted_outliers() {
        let planted = [5usize, 40, 66];
        let y = planted_series(8, 80, 0.01, &planted, 0.1);
        let result = detect_outliers(
            &y,
            &MeanHyperParams::default(),
            &decimal_scale_score(),
            &fast_full(),
            &fast_conditional(),
            6,
        )
        .unwrap();
        assert_eq!(result.outlier_indices, planted.to_vec());
        assert_eq!(result.best_partition.len(), 2);
        // Self-consistency: reported score attains the table minimum.
        let min = result
            .candidates
            .iter()
            .map(|c| c.score)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(result.score, min);
    }

    #[test]
    fn detector_keeps_null_data_trivial() {
        let mut failures = 0;
        for seed in 0..5u64 {
            let y = planted_series(100 + seed, 80, 0.01, &[], 0.0);
            let mcmc_full = McmcSettings {
                seed: 10 + seed,
                ..fast_full()
            };
            let result = detect_outliers(
                &y,
                &MeanHyperParams::default(),
                &decimal_scale_score(),
                &mcmc_full,
                &fast_conditional(),
                6,
            )
            .unwrap();
            if !result.best_partition.is_trivial() {
                failures += 1;
            }
        }
        assert!(failures <= 1, "{failures} of 5 null runs flagged outliers");
    }

    #[test]
    fn tail_k_one_never_flags_interior_points() {
        let planted = [70usize];
        let y = planted_series(55, 80, 0.01, &planted, 0.12);
        let result = detect_outliers(
            &y,
            &MeanHyperParams::default(),
            &decimal_scale_score(),
            &fast_full(),
            &fast_conditional(),
            1,
        )
        .unwrap();
        assert!(
            result.outlier_indices.is_empty() || result.outlier_indices == planted.to_vec(),
            "unexpected flags {:?}",
            result.outlier_indices
        );
    }

    #[test]
    fn flagged_count_is_nondecreasing_in_cohesion() {
        let planted = [10usize, 30, 50];
        let y = planted_series(21, 60, 0.01, &planted, 0.1);
        let rows = stability_over_c(
            &y,
            &MeanHyperParams::default(),
            &decimal_scale_score(),
            &fast_full(),
            &fast_conditional(),
            6,
            &[0.1, 1.0, 10.0, 50.0],
        )
        .unwrap();
        assert_eq!(rows.len(), 4);
        for pair in rows.windows(2) {
            assert!(
                pair[1].flagged.len() + 1 >= pair[0].flagged.len(),
                "flag counts decreased: {:?}",
                rows.iter().map(|r| r.flagged.len()).collect::<Vec<_>>()
            );
        }
    }
}
