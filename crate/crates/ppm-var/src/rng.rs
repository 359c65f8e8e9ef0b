//! Seedable random sampling primitives and the Gaussian quantile factor.
//!
//! Every stochastic routine in the crate draws through [`RngState`], a
//! counter-based generator with an explicit 64-bit seed, so that a run is
//! reproducible bit-for-bit given the same seed and build.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Deterministic generator state. Cloning forks the stream.
#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        RngState {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Seed this state was created with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream for a parallel consumer, seeded as
    /// `base_seed + stream_index`.
    pub fn stream(&self, index: u64) -> RngState {
        RngState::new(self.seed.wrapping_add(index))
    }

    /// Uniform draw in `[0, 1)`.
    pub fn next_uniform(&mut self) -> f64 {
        // 53 random mantissa bits, same construction rand uses for f64.
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

/// Shape/scale parameters of a Gamma distribution with mean `shape * scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    pub shape: f64,
    pub scale: f64,
}

impl GammaParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0) {
            return Err(Error::domain(format!("gamma shape must be > 0, got {shape}")));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::domain(format!("gamma scale must be > 0, got {scale}")));
        }
        Ok(GammaParams { shape, scale })
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }
}

/// Shape/scale parameters of an Inverse-Gamma distribution.
///
/// The mean `scale / (shape - 1)` exists for `shape > 1` and the variance
/// `scale^2 / ((shape - 1)^2 (shape - 2))` for `shape > 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseGammaParams {
    pub shape: f64,
    pub scale: f64,
}

impl InverseGammaParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0) {
            return Err(Error::domain(format!(
                "inverse-gamma shape must be > 0, got {shape}"
            )));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::domain(format!(
                "inverse-gamma scale must be > 0, got {scale}"
            )));
        }
        Ok(InverseGammaParams { shape, scale })
    }

    /// Analytic mean, defined for `shape > 1`.
    pub fn mean(&self) -> Option<f64> {
        (self.shape > 1.0).then(|| self.scale / (self.shape - 1.0))
    }

    /// Analytic variance, defined for `shape > 2`.
    pub fn variance(&self) -> Option<f64> {
        (self.shape > 2.0).then(|| {
            let d = self.shape - 1.0;
            self.scale * self.scale / (d * d * (self.shape - 2.0))
        })
    }
}

/// Upper-tail standard Normal quantile: the `z` with `P(Z > z) = alpha`,
/// equivalently `sqrt(2) * erfc_inv(2 alpha)`.
///
/// Accepts `alpha` in `(0, 0.5]`; `alpha = 0.5` returns exactly 0.
pub fn normal_quantile_factor(alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::domain(format!(
            "tail probability must lie in (0, 0.5], got {alpha}"
        )));
    }
    if alpha == 0.5 {
        return Ok(0.0);
    }
    // Rational approximation for the lower-tail quantile at p = alpha,
    // then one Newton step against an accurate erfc-based CDF.
    let z = -acklam_inverse_cdf(alpha);
    let q = 0.5 * erfc(z / std::f64::consts::SQRT_2);
    let pdf = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    Ok(z + (q - alpha) / pdf)
}

/// Acklam's rational approximation to the standard Normal inverse CDF.
/// Absolute error below 1.2e-9 over (0, 1); refined by the caller.
fn acklam_inverse_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        // Callers only reach this branch with p <= 0.5.
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Draw from `N(mean, variance)`. A zero variance returns `mean` exactly.
pub fn sample_normal(mean: f64, variance: f64, rng: &mut RngState) -> Result<f64> {
    if !(variance.is_finite() && variance >= 0.0) {
        return Err(Error::domain(format!(
            "normal variance must be >= 0, got {variance}"
        )));
    }
    if variance == 0.0 {
        return Ok(mean);
    }
    Ok(draw_normal(mean, variance.sqrt(), rng))
}

/// Internal Normal draw; `sd` must already be validated.
pub(crate) fn draw_normal(mean: f64, sd: f64, rng: &mut RngState) -> f64 {
    Normal::new(mean, sd).expect("validated normal parameters").sample(rng)
}

/// Draw from a Gamma distribution in shape/scale form.
pub fn sample_gamma(p: GammaParams, rng: &mut RngState) -> Result<f64> {
    GammaParams::new(p.shape, p.scale)?;
    Ok(draw_gamma(p.shape, p.scale, rng))
}

pub(crate) fn draw_gamma(shape: f64, scale: f64, rng: &mut RngState) -> f64 {
    Gamma::new(shape, scale).expect("validated gamma parameters").sample(rng)
}

/// Draw from an Inverse-Gamma distribution as `scale / G` with
/// `G ~ Gamma(shape, 1)`.
pub fn sample_inverse_gamma(p: InverseGammaParams, rng: &mut RngState) -> Result<f64> {
    InverseGammaParams::new(p.shape, p.scale)?;
    Ok(draw_inverse_gamma(p.shape, p.scale, rng))
}

pub(crate) fn draw_inverse_gamma(shape: f64, scale: f64, rng: &mut RngState) -> f64 {
    // A unit-scale Gamma draw underflowing to zero is possible only for
    // tiny shapes; retry rather than emit an infinite variate.
    for _ in 0..128 {
        let g = draw_gamma(shape, 1.0, rng);
        if g > 0.0 {
            return scale / g;
        }
    }
    f64::INFINITY
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent upper-tail oracle: power series for small arguments,
    // Lentz continued fraction for the tail, inverted by bisection.
    fn erfc_oracle(x: f64) -> f64 {
        if x < 0.0 {
            return 2.0 - erfc_oracle(-x);
        }
        if x < 2.5 {
            // erf(x) = 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))
            let mut term = x;
            let mut sum = x;
            for n in 1..200 {
                term *= -x * x / n as f64;
                sum += term / (2 * n + 1) as f64;
                if term.abs() < 1e-18 {
                    break;
                }
            }
            1.0 - sum * 2.0 / std::f64::consts::PI.sqrt()
        } else {
            // erfc(x) = exp(-x^2) / (x sqrt(pi)) * K, K via modified Lentz.
            let mut f = 1e-30_f64;
            let mut c = f;
            let mut d = 0.0_f64;
            for n in 1..300 {
                let a = if n == 1 { 1.0 } else { (n - 1) as f64 / (2.0 * x * x) };
                let b = 1.0;
                d = b + a * d;
                if d.abs() < 1e-300 {
                    d = 1e-300;
                }
                c = b + a / c;
                if c.abs() < 1e-300 {
                    c = 1e-300;
                }
                d = 1.0 / d;
                let delta = c * d;
                f *= delta;
                if (delta - 1.0).abs() < 1e-17 {
                    break;
                }
            }
            (-x * x).exp() / (x * std::f64::consts::PI.sqrt()) * f
        }
    }

    fn upper_tail_oracle(z: f64) -> f64 {
        0.5 * erfc_oracle(z / std::f64::consts::SQRT_2)
    }

    fn quantile_oracle(alpha: f64) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, 10.0_f64);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if upper_tail_oracle(mid) > alpha {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn quantile_factor_matches_bisection_oracle() {
        for &(alpha, frozen) in &[(0.01, 2.3263478740408408), (0.05, 1.6448536269514722)] {
            let z = normal_quantile_factor(alpha).unwrap();
            assert!((z - quantile_oracle(alpha)).abs() < 1e-6, "alpha={alpha} z={z}");
            assert!((z - frozen).abs() < 1e-10, "alpha={alpha} z={z}");
        }
        // Newton refinement holds across the admissible range.
        for k in 1..500 {
            let alpha = k as f64 * 1.0e-3;
            let z = normal_quantile_factor(alpha).unwrap();
            let tail = 0.5 * erfc(z / std::f64::consts::SQRT_2);
            assert!((tail - alpha).abs() < 1e-12 * alpha.max(1e-3), "alpha={alpha}");
        }
    }

    #[test]
    fn quantile_factor_at_half_is_zero() {
        assert_eq!(normal_quantile_factor(0.5).unwrap(), 0.0);
    }

    #[test]
    fn quantile_factor_is_strictly_decreasing() {
        let mut prev = f64::INFINITY;
        for k in 0..100 {
            let alpha = 0.001 + (0.499 - 0.001) * k as f64 / 99.0;
            let z = normal_quantile_factor(alpha).unwrap();
            assert!(z < prev, "not decreasing at alpha={alpha}");
            prev = z;
        }
    }

    #[test]
    fn quantile_factor_rejects_out_of_range() {
        for bad in [0.0, -0.1, 0.6, 1.0, f64::NAN] {
            assert!(normal_quantile_factor(bad).is_err(), "alpha={bad}");
        }
    }

    #[test]
    fn normal_zero_variance_is_degenerate() {
        let mut rng = RngState::new(7);
        assert_eq!(sample_normal(5.0, 0.0, &mut rng).unwrap(), 5.0);
        assert!(sample_normal(0.0, -1.0, &mut rng).is_err());
    }

    #[test]
    fn normal_moments_match() {
        let mut rng = RngState::new(11);
        let n = 100_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| sample_normal(0.0, 4.0, &mut rng).unwrap())
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        // CLT bound 3 sigma / sqrt(n) on the mean; moment bound on the variance.
        assert!(mean.abs() < 3.0 * 2.0 / (n as f64).sqrt() * 2.0, "mean={mean}");
        assert!((var - 4.0).abs() < 0.12, "var={var}");
    }

    #[test]
    fn gamma_exponential_special_case() {
        let theta = 0.37;
        let mut rng = RngState::new(23);
        let n = 100_000;
        let p = GammaParams::new(1.0, theta).unwrap();
        let mean = (0..n).map(|_| sample_gamma(p, &mut rng).unwrap()).sum::<f64>() / n as f64;
        assert!((mean - theta).abs() < 3.0 * theta / (n as f64).sqrt());
    }

    #[test]
    fn gamma_moments_match() {
        let mut rng = RngState::new(29);
        let n = 100_000;
        let p = GammaParams::new(3.0, 2.0).unwrap();
        assert_eq!(p.mean(), 6.0);
        let mean = (0..n).map(|_| sample_gamma(p, &mut rng).unwrap()).sum::<f64>() / n as f64;
        assert!((mean - 6.0).abs() < 0.04, "mean={mean}");
    }

    #[test]
    fn gamma_rejects_invalid_params() {
        assert!(GammaParams::new(0.0, 1.0).is_err());
        assert!(GammaParams::new(1.0, -2.0).is_err());
        assert!(GammaParams::new(2.01 + 0.01, 123.0).is_ok());
    }

    #[test]
    fn inverse_gamma_analytic_moments() {
        let p = InverseGammaParams::new(3.0, 4.0).unwrap();
        assert_eq!(p.mean(), Some(2.0));
        assert_eq!(p.variance(), Some(4.0));
        let diffuse = InverseGammaParams::new(2.01, 0.0101).unwrap();
        assert!((diffuse.mean().unwrap() - 0.01).abs() < 1e-12);
        assert!((diffuse.variance().unwrap() - 0.01).abs() < 1e-12);
        assert_eq!(InverseGammaParams::new(0.5, 1.0).unwrap().mean(), None);
    }

    #[test]
    fn inverse_gamma_monte_carlo_moments() {
        // The diffuse prior shape 2.01 has a finite variance but an infinite
        // fourth moment, so only its mean is testable by simulation; the
        // sample variance of any feasible draw count captures a vanishing
        // share of the second moment.
        let p = InverseGammaParams::new(2.01, 0.0101).unwrap();
        let mut rng = RngState::new(31);
        let n = 1_000_000;
        let mean = (0..n)
            .map(|_| sample_inverse_gamma(p, &mut rng).unwrap())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.01).abs() < 5e-4, "mean={mean}");

        let p2 = InverseGammaParams::new(3.0, 4.0).unwrap();
        let m = 200_000;
        let mean2 = (0..m).map(|_| sample_inverse_gamma(p2, &mut rng).unwrap()).sum::<f64>()
            / m as f64;
        let se = (p2.variance().unwrap() / m as f64).sqrt();
        assert!((mean2 - 2.0).abs() < 4.0 * se, "mean={mean2}");

        // All moments needed for variance checks exist at shape 6.
        let p3 = InverseGammaParams::new(6.0, 4.0).unwrap();
        let draws: Vec<f64> = (0..m).map(|_| sample_inverse_gamma(p3, &mut rng).unwrap()).collect();
        let mean3 = draws.iter().sum::<f64>() / m as f64;
        let var3 = draws.iter().map(|x| (x - mean3) * (x - mean3)).sum::<f64>() / m as f64;
        let m4 = draws.iter().map(|x| (x - mean3).powi(4)).sum::<f64>() / m as f64;
        let se_mean = (p3.variance().unwrap() / m as f64).sqrt();
        assert!((mean3 - p3.mean().unwrap()).abs() < 4.0 * se_mean, "mean={mean3}");
        let se_var = ((m4 - var3 * var3) / m as f64).sqrt();
        assert!(
            (var3 - p3.variance().unwrap()).abs() < 4.0 * se_var,
            "var={var3} expected={}",
            p3.variance().unwrap()
        );
    }

    #[test]
    fn sampler_moments_at_one_million_draws() {
        // Mean and variance of each sampler within 4 standard errors at
        // n = 1e6; standard errors of the variance use the plug-in fourth
        // moment, which exists for every case tested here.
        let n = 1_000_000usize;
        let check = |draws: &[f64], mean: f64, var: f64, tag: &str| {
            let m = draws.iter().sum::<f64>() / draws.len() as f64;
            let v = draws.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / draws.len() as f64;
            let m4 = draws.iter().map(|x| (x - m).powi(4)).sum::<f64>() / draws.len() as f64;
            let se_mean = (var / draws.len() as f64).sqrt();
            let se_var = ((m4 - v * v) / draws.len() as f64).sqrt();
            assert!((m - mean).abs() < 4.0 * se_mean, "{tag} mean {m} vs {mean}");
            assert!((v - var).abs() < 4.0 * se_var, "{tag} var {v} vs {var}");
        };

        let mut rng = RngState::new(77);
        let normal: Vec<f64> = (0..n)
            .map(|_| sample_normal(0.3, 2.5, &mut rng).unwrap())
            .collect();
        check(&normal, 0.3, 2.5, "normal");

        let g = GammaParams::new(3.0, 2.0).unwrap();
        let gamma: Vec<f64> = (0..n).map(|_| sample_gamma(g, &mut rng).unwrap()).collect();
        // Gamma variance = shape * scale^2.
        check(&gamma, 6.0, 12.0, "gamma");

        let ig = InverseGammaParams::new(6.0, 4.0).unwrap();
        let inv: Vec<f64> = (0..n)
            .map(|_| sample_inverse_gamma(ig, &mut rng).unwrap())
            .collect();
        check(&inv, ig.mean().unwrap(), ig.variance().unwrap(), "inverse-gamma");
    }

    #[test]
    fn same_seed_gives_identical_streams() {
        let mut a = RngState::new(99);
        let mut b = RngState::new(99);
        for _ in 0..1000 {
            assert_eq!(a.next_uniform(), b.next_uniform());
        }
        let g = GammaParams::new(2.5, 1.5).unwrap();
        let ig = InverseGammaParams::new(2.5, 1.5).unwrap();
        for _ in 0..100 {
            assert_eq!(sample_normal(1.0, 2.0, &mut a).unwrap(), sample_normal(1.0, 2.0, &mut b).unwrap());
            assert_eq!(sample_gamma(g, &mut a).unwrap(), sample_gamma(g, &mut b).unwrap());
            assert_eq!(sample_inverse_gamma(ig, &mut a).unwrap(), sample_inverse_gamma(ig, &mut b).unwrap());
        }
    }

    #[test]
    fn streams_are_independent_of_parent_state() {
        let base = RngState::new(5);
        assert_eq!(base.stream(3).seed(), 8);
        let mut s1 = base.stream(1);
        let mut s1_again = RngState::new(6);
        assert_eq!(s1.next_uniform(), s1_again.next_uniform());
    }
}
