//! GUE sampling and fluctuation estimates.
//!
//! Samples Hermitian matrices with the `1/sqrt(n)` normalization (spectrum
//! converging to the semicircular law on (-2, 2)), estimates the variance of
//! the linear statistic `Tr phi(X)` across independent draws, and compares it
//! with the kernel-variance limit. Sampling is reproducible: a counter-based
//! generator is split into one stream per sample index, and every reduction
//! runs pairwise in index order, so the result does not depend on the thread
//! count.

use crate::error::{Error, Result};
use crate::ops::omega_variance;
use crate::series::ChebSeries;
use crate::util::pairwise_sum;
use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

/// Eigenvalues of one GUE draw.
#[derive(Clone, Debug)]
pub struct GueSample {
    pub n: usize,
    /// Sorted ascending.
    pub eigenvalues: Vec<f64>,
}

/// Variance estimate of `Tr phi(X)` with its jackknife error bar.
#[derive(Clone, Debug, Serialize)]
pub struct FluctuationEstimate {
    pub function: String,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub mean_trace: f64,
    pub variance: f64,
    /// Jackknife standard error of the variance estimate.
    pub std_error: f64,
    /// Kernel-variance limit of the fluctuation.
    pub limit: f64,
    pub z_score: f64,
}

fn sample_stream(n: usize, seed: u64, stream: u64) -> Result<GueSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let diag_sd = (1.0 / n as f64).sqrt();
    let off_sd = (1.0 / (2.0 * n as f64)).sqrt();
    let mut m = DMatrix::<Complex<f64>>::zeros(n, n);
    for i in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        m[(i, i)] = Complex::new(d * diag_sd, 0.0);
        for j in i + 1..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = Complex::new(re * off_sd, im * off_sd);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    let eig = m
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or(Error::Eigensolver(n))?;
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("real eigenvalues"));
    Ok(GueSample { n, eigenvalues })
}

/// One GUE draw, deterministic in the seed.
pub fn sample_gue(n: usize, seed: u64) -> Result<GueSample> {
    if n == 0 {
        return Err(Error::Invalid("matrix size must be positive".into()));
    }
    sample_stream(n, seed, 0)
}

impl GueSample {
    /// Empirical moment `(1/n) sum lambda_i^k`.
    pub fn empirical_moment(&self, k: u32) -> f64 {
        let terms: Vec<f64> = self
            .eigenvalues
            .iter()
            .map(|&l| l.powi(k as i32))
            .collect();
        pairwise_sum(&terms) / self.n as f64
    }

    /// `Tr phi(X)` summed in eigenvalue order.
    pub fn trace_of(&self, phi: &ChebSeries) -> f64 {
        let terms: Vec<f64> = self.eigenvalues.iter().map(|&l| phi.evaluate(l)).collect();
        pairwise_sum(&terms)
    }
}

/// Unbiased variance of `Tr phi(X)` over independent draws with a jackknife
/// standard error, compared against the kernel-variance limit.
pub fn estimate_fluctuation(
    phi: &ChebSeries,
    name: &str,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<FluctuationEstimate> {
    if samples < 8 {
        return Err(Error::Invalid(format!(
            "need at least 8 samples for an error bar, got {samples}"
        )));
    }
    // one stream per sample index; indices start at 1 so that the plain
    // sampler (stream 0) stays distinct
    let traces: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|idx| sample_stream(n, seed, idx as u64 + 1).map(|s| s.trace_of(phi)))
        .collect::<Result<Vec<f64>>>()?;

    let m = samples as f64;
    let mean = pairwise_sum(&traces) / m;
    let centered_sq: Vec<f64> = traces.iter().map(|&t| (t - mean) * (t - mean)).collect();
    let ss = pairwise_sum(&centered_sq);
    let variance = ss / (m - 1.0);

    // leave-one-out variances from the sufficient statistics
    let s1 = pairwise_sum(&traces);
    let s2 = pairwise_sum(&traces.iter().map(|&t| t * t).collect::<Vec<_>>());
    let loo: Vec<f64> = traces
        .iter()
        .map(|&t| {
            let mean_i = (s1 - t) / (m - 1.0);
            ((s2 - t * t) - (m - 1.0) * mean_i * mean_i) / (m - 2.0)
        })
        .collect();
    let loo_mean = pairwise_sum(&loo) / m;
    let loo_sq: Vec<f64> = loo
        .iter()
        .map(|&v| (v - loo_mean) * (v - loo_mean))
        .collect();
    let std_error = ((m - 1.0) / m * pairwise_sum(&loo_sq)).sqrt();

    let limit = omega_variance(phi);
    let z_score = if std_error > 0.0 {
        (variance - limit) / std_error
    } else {
        f64::INFINITY
    };
    Ok(FluctuationEstimate {
        function: name.to_string(),
        n,
        samples,
        seed,
        mean_trace: mean,
        variance,
        std_error,
        limit,
        z_score,
    })
}
