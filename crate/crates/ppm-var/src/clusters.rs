//! Internal bookkeeping for the mixture updates of the Gibbs samplers.
//!
//! Tracks the distinct parameter values currently present in a state vector
//! together with membership counts and per-cluster data sums, so one sweep
//! of mixture updates costs O(T * |rho|) instead of O(T^2). Values are
//! compared bit-exactly, matching the Dirac point masses of the updates.

use crate::partition::Partition;
use crate::rng::RngState;

#[derive(Debug, Clone, Copy)]
pub(crate) struct ClusterEntry {
    pub value: f64,
    pub count: usize,
    pub sum_y: f64,
    pub sum_y_sq: f64,
}

impl ClusterEntry {
    /// Sum of squared residuals of the member data around `center`,
    /// expanded as `sum y^2 - 2 center sum y + n center^2`.
    pub fn residual_sq_sum(&self, center: f64) -> f64 {
        self.sum_y_sq - 2.0 * center * self.sum_y + self.count as f64 * center * center
    }
}

#[derive(Debug, Clone)]
pub(crate) struct ClusterSet {
    entries: Vec<ClusterEntry>,
}

impl ClusterSet {
    /// Builds the set from a state vector, accumulating data sums from `y`.
    /// Entries appear in order of first appearance.
    pub fn from_values(values: &[f64], y: &[f64]) -> Self {
        let mut entries: Vec<ClusterEntry> = Vec::new();
        for (t, &v) in values.iter().enumerate() {
            match entries.iter_mut().find(|e| e.value == v) {
                Some(e) => {
                    e.count += 1;
                    e.sum_y += y[t];
                    e.sum_y_sq += y[t] * y[t];
                }
                None => entries.push(ClusterEntry {
                    value: v,
                    count: 1,
                    sum_y: y[t],
                    sum_y_sq: y[t] * y[t],
                }),
            }
        }
        ClusterSet { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[ClusterEntry] {
        &self.entries
    }

    pub fn position_of(&self, value: f64) -> Option<usize> {
        self.entries.iter().position(|e| e.value == value)
    }

    /// Removes one member holding `value`, dropping the entry if it empties.
    pub fn remove_member(&mut self, value: f64, y_t: f64) {
        let pos = self
            .position_of(value)
            .expect("value must be present in the cluster set");
        if self.entries[pos].count == 1 {
            self.entries.remove(pos);
        } else {
            self.entries[pos].count -= 1;
            self.entries[pos].sum_y -= y_t;
            self.entries[pos].sum_y_sq -= y_t * y_t;
        }
    }

    /// Adds one member holding `value`, merging into an existing entry on a
    /// bit-exact match.
    pub fn add_member(&mut self, value: f64, y_t: f64) {
        match self.entries.iter_mut().find(|e| e.value == value) {
            Some(e) => {
                e.count += 1;
                e.sum_y += y_t;
                e.sum_y_sq += y_t * y_t;
            }
            None => self.entries.push(ClusterEntry {
                value,
                count: 1,
                sum_y: y_t,
                sum_y_sq: y_t * y_t,
            }),
        }
    }

    /// Canonical partition implied by the current state vector.
    pub fn partition(&self, values: &[f64]) -> Partition {
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); self.entries.len()];
        for (t, &v) in values.iter().enumerate() {
            let pos = self.position_of(v).expect("state value missing from cluster set");
            members[pos].push(t);
        }
        Partition::new(members, values.len()).expect("cluster set covers all indices")
    }
}

/// Counters recorded while running mixture updates; cheap enough to keep on
/// in every build and useful as mixing diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MixtureDiagnostics {
    /// Total number of mixture updates performed.
    pub updates: u64,
    /// Updates resolved by copying an existing cluster value.
    pub copies: u64,
    /// Updates resolved by a fresh draw from the base distribution.
    pub fresh_draws: u64,
    /// Largest observed |sum of normalized weights - 1|.
    pub max_weight_sum_error: f64,
    /// Smallest normalized weight observed (nonnegativity witness).
    pub min_weight: f64,
}

impl MixtureDiagnostics {
    pub(crate) fn new() -> Self {
        MixtureDiagnostics {
            min_weight: f64::INFINITY,
            ..Default::default()
        }
    }
}

/// Normalizes log weights with max-subtraction and draws one index.
/// Returns the chosen index. Records weight-sum error and minimum weight.
pub(crate) fn sample_from_log_weights(
    log_weights: &[f64],
    rng: &mut RngState,
    diag: &mut MixtureDiagnostics,
) -> usize {
    debug_assert!(!log_weights.is_empty());
    let max = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    debug_assert!(max.is_finite(), "all mixture weights underflowed");
    let mut probs: Vec<f64> = log_weights.iter().map(|lw| (lw - max).exp()).collect();
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }

    let sum: f64 = probs.iter().sum();
    diag.updates += 1;
    diag.max_weight_sum_error = diag.max_weight_sum_error.max((sum - 1.0).abs());
    for &p in &probs {
        diag.min_weight = diag.min_weight.min(p);
        debug_assert!(p >= 0.0 && p.is_finite());
    }
    debug_assert!((sum - 1.0).abs() <= 1e-12, "weight sum off by {}", (sum - 1.0).abs());

    let u = rng.next_uniform();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}
