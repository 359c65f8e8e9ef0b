//! Partition representation, cohesion weights and cluster summaries.
//!
//! A [`Partition`] groups the time indices `0..T` into disjoint non-empty
//! clusters. The prior weight of a partition is the product of per-cluster
//! cohesions `c * (|S| - 1)!`, kept in log space; the normalising constant
//! over all partitions is never needed and never computed.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Grouping of `0..n_items` into disjoint, non-empty clusters.
///
/// Canonical form: members of each cluster sorted ascending, clusters
/// ordered by their smallest member. Equality and ordering compare the
/// canonical forms, which makes partitions usable as frequency-table keys.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    clusters: Vec<Vec<usize>>,
    n_items: usize,
}

impl Partition {
    /// Builds a partition from explicit clusters, validating that they are
    /// disjoint, non-empty and cover `0..n_items`.
    pub fn new(clusters: Vec<Vec<usize>>, n_items: usize) -> Result<Self> {
        let mut seen = vec![false; n_items];
        let mut covered = 0usize;
        for cluster in &clusters {
            if cluster.is_empty() {
                return Err(Error::usage("partition clusters must be non-empty"));
            }
            for &i in cluster {
                if i >= n_items {
                    return Err(Error::usage(format!(
                        "index {i} out of range for {n_items} items"
                    )));
                }
                if seen[i] {
                    return Err(Error::usage(format!("index {i} appears in two clusters")));
                }
                seen[i] = true;
                covered += 1;
            }
        }
        if covered != n_items {
            return Err(Error::usage(format!(
                "clusters cover {covered} of {n_items} items"
            )));
        }
        let mut clusters = clusters;
        for cluster in &mut clusters {
            cluster.sort_unstable();
        }
        clusters.sort_unstable_by_key(|c| c[0]);
        Ok(Partition { clusters, n_items })
    }

    /// Single-cluster partition of `0..n`.
    pub fn trivial(n: usize) -> Partition {
        Partition {
            clusters: vec![(0..n).collect()],
            n_items: n,
        }
    }

    /// All-singletons partition of `0..n`.
    pub fn singletons(n: usize) -> Partition {
        Partition {
            clusters: (0..n).map(|i| vec![i]).collect(),
            n_items: n,
        }
    }

    /// Groups indices by their value. With `tol = 0` two indices share a
    /// cluster exactly when their values are bit-equal; with `tol > 0` an
    /// index joins the first cluster whose representative (the value of its
    /// earliest member) lies within `tol`.
    pub fn from_values(values: &[f64], tol: f64) -> Partition {
        let mut reps: Vec<f64> = Vec::new();
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            let hit = reps.iter().position(|&r| {
                if tol == 0.0 {
                    r == v
                } else {
                    (r - v).abs() <= tol
                }
            });
            match hit {
                Some(k) => clusters[k].push(i),
                None => {
                    reps.push(v);
                    clusters.push(vec![i]);
                }
            }
        }
        // Scanning in index order already yields the canonical ordering.
        Partition {
            clusters,
            n_items: values.len(),
        }
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    /// Number of clusters, `|rho|`.
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.clusters.len() == 1
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn largest_cluster_size(&self) -> usize {
        self.clusters.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Indices belonging to every cluster of non-maximal size, ascending.
    pub fn non_maximal_indices(&self) -> Vec<usize> {
        let max = self.largest_cluster_size();
        let mut out: Vec<usize> = self
            .clusters
            .iter()
            .filter(|c| c.len() < max)
            .flatten()
            .copied()
            .collect();
        out.sort_unstable();
        out
    }

    /// Compact display such as `{0,1,4}{2}{3}`.
    pub fn display(&self) -> String {
        let mut s = String::new();
        for cluster in &self.clusters {
            s.push('{');
            for (k, i) in cluster.iter().enumerate() {
                if k > 0 {
                    s.push(',');
                }
                s.push_str(&i.to_string());
            }
            s.push('}');
        }
        s
    }
}

/// Posterior summaries of a sequence of sampled partitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterStats {
    /// Mean number of clusters across draws.
    pub mean_cluster_count: f64,
    /// Mean relative weight of the largest cluster across draws.
    pub largest_cluster_weight: f64,
}

/// Cohesion `c * (size - 1)!`, evaluated in log space for large clusters.
pub fn cohesion(c: f64, cluster_size: usize) -> Result<f64> {
    if cluster_size == 0 {
        return Err(Error::domain("cluster size must be >= 1"));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::domain(format!("cohesion constant must be > 0, got {c}")));
    }
    if cluster_size <= 21 {
        let mut f = 1.0f64;
        for k in 2..cluster_size {
            f *= k as f64;
        }
        Ok(c * f)
    } else {
        Ok(log_cohesion(c, cluster_size).exp())
    }
}

/// `ln c + ln (size - 1)!` via the log-gamma function.
pub fn log_cohesion(c: f64, cluster_size: usize) -> f64 {
    c.ln() + ln_gamma(cluster_size as f64)
}

/// Unnormalised log prior weight of a partition: the sum of log cohesions
/// over its clusters.
pub fn log_prior_weight(p: &Partition, c: f64) -> f64 {
    p.clusters().iter().map(|s| log_cohesion(c, s.len())).sum()
}

/// Mean cluster count and mean largest-cluster weight over a draw sequence.
pub fn cluster_stats<'a, I>(partitions: I) -> Result<ClusterStats>
where
    I: IntoIterator<Item = &'a Partition>,
{
    let mut n = 0usize;
    let mut count_sum = 0.0;
    let mut weight_sum = 0.0;
    for p in partitions {
        n += 1;
        count_sum += p.len() as f64;
        weight_sum += p.largest_cluster_size() as f64 / p.n_items() as f64;
    }
    if n == 0 {
        return Err(Error::usage("cluster_stats requires at least one partition"));
    }
    Ok(ClusterStats {
        mean_cluster_count: count_sum / n as f64,
        largest_cluster_weight: weight_sum / n as f64,
    })
}

/// Number of set partitions of `t` elements, exact for `t <= 25`, via the
/// recursion `B(T+1) = sum_k C(T,k) B(k)` with `B(0) = 1`.
pub fn bell_number(t: usize) -> Result<u64> {
    if t > 25 {
        return Err(Error::domain(format!(
            "bell_number supports t <= 25 in exact integer arithmetic, got {t}"
        )));
    }
    let mut bell: Vec<u128> = vec![1];
    for n in 0..t {
        // binomials C(n, k) built incrementally per row
        let mut binom: u128 = 1;
        let mut next: u128 = 0;
        for (k, b) in bell.iter().enumerate() {
            if k > 0 {
                binom = binom * (n as u128 - k as u128 + 1) / k as u128;
            }
            next += binom * b;
        }
        bell.push(next);
    }
    Ok(bell[t] as u64)
}
