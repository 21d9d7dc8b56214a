//! Empirical CCDFs, maximum-likelihood power-law tail fits, and Bayesian
//! comparison of scaling exponents via random-walk Metropolis-Hastings.
//!
//! The fit is the continuous maximum-likelihood form: for observations
//! `x >= x_min`,
//!
//! ```text
//! theta_hat = 1 + n / sum(ln(x_i / x_min))
//! sigma_hat = (theta_hat - 1) / sqrt(n)
//! ```
//!
//! The posterior of an exponent combines the power-law likelihood with a
//! Normal prior located at the ML estimate; differences of two exponents
//! are summarised by the shortest interval holding 90% of the paired draws.

use std::io::{BufReader, Read, Write};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::seed::substream;
use crate::{Error, Result};

/// Default Metropolis-Hastings chain length.
pub const DEFAULT_MCMC_ITERATIONS: usize = 50_000;
/// Default number of leading iterations discarded as burn-in.
pub const DEFAULT_MCMC_BURN_IN: usize = 5_000;
/// Minimum observations at or above x_min for a fit.
pub const MIN_TAIL: usize = 10;
/// Acceptance rate targeted while the proposal step adapts during burn-in.
const TARGET_ACCEPTANCE: f64 = 0.35;
const ADAPT_BATCH: usize = 100;

/// Maximum-likelihood power-law tail fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub x_min: f64,
    pub theta_hat: f64,
    pub sigma_hat: f64,
    pub n_tail: usize,
}

/// How to pick the lower cutoff of the tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XminChoice {
    Fixed(f64),
    /// Scan the distinct data values and keep the cutoff minimising the
    /// Kolmogorov-Smirnov distance between tail data and fitted CDF.
    Auto,
}

/// Post-burn-in draws of one exponent's posterior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorDraws {
    pub draws: Vec<f64>,
    pub iterations: usize,
    pub burn_in: usize,
    pub acceptance_rate: f64,
    pub seed: u64,
}

impl PosteriorDraws {
    /// True when the post-adaptation acceptance rate left the healthy band.
    pub fn acceptance_flagged(&self) -> bool {
        !(0.05..=0.95).contains(&self.acceptance_rate)
    }

    pub fn mean(&self) -> f64 {
        self.draws.iter().sum::<f64>() / self.draws.len() as f64
    }

    pub fn sd(&self) -> f64 {
        let m = self.mean();
        let var = self.draws.iter().map(|d| (d - m) * (d - m)).sum::<f64>()
            / (self.draws.len() as f64 - 1.0);
        var.sqrt()
    }
}

/// Shortest interval containing `mass` of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HdiReport {
    pub lower: f64,
    pub upper: f64,
    pub mass: f64,
    pub contains_zero: bool,
}

/// One point of an empirical CCDF table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CcdfPoint {
    pub x: f64,
    pub ccdf: f64,
}

/// Empirical CCDF with the `>=` convention: the value at `x` is the
/// fraction of observations greater than or equal to `x`, so the sample
/// minimum maps to 1.
pub fn ccdf(values: &[f64]) -> Result<Vec<CcdfPoint>> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(&bad) = values.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::NonPositiveValue { value: bad });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut out = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        out.push(CcdfPoint {
            x,
            ccdf: (sorted.len() - i) as f64 / n,
        });
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        i = j;
    }
    Ok(out)
}

/// Write a CCDF table as CSV (`x,ccdf`).
pub fn write_ccdf_csv<W: Write>(points: &[CcdfPoint], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x", "ccdf"])?;
    for p in points {
        w.write_record(&[p.x.to_string(), p.ccdf.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Fit a power-law tail by maximum likelihood.
pub fn fit_powerlaw(values: &[f64], x_min: XminChoice) -> Result<PowerLawFit> {
    match x_min {
        XminChoice::Fixed(xm) => fit_with_min_tail(values, xm, MIN_TAIL),
        XminChoice::Auto => fit_auto(values),
    }
}

/// Fit with an explicit tail-size floor. The public entry point uses
/// [`MIN_TAIL`]; tests exercise smaller tails directly.
pub(crate) fn fit_with_min_tail(values: &[f64], x_min: f64, min_tail: usize) -> Result<PowerLawFit> {
    if !(x_min > 0.0) {
        return Err(Error::NonPositiveValue { value: x_min });
    }
    if let Some(&bad) = values.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::NonPositiveValue { value: bad });
    }
    let mut n = 0usize;
    let mut log_sum = 0.0f64;
    for &v in values {
        if v >= x_min {
            n += 1;
            log_sum += (v / x_min).ln();
        }
    }
    if n < min_tail {
        return Err(Error::InsufficientTail { needed: min_tail, got: n });
    }
    if log_sum <= 0.0 {
        return Err(Error::DegenerateTail);
    }
    let theta_hat = 1.0 + n as f64 / log_sum;
    let sigma_hat = (theta_hat - 1.0) / (n as f64).sqrt();
    Ok(PowerLawFit { x_min, theta_hat, sigma_hat, n_tail: n })
}

fn fit_auto(values: &[f64]) -> Result<PowerLawFit> {
    if let Some(&bad) = values.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::NonPositiveValue { value: bad });
    }
    if values.len() < MIN_TAIL {
        return Err(Error::InsufficientTail { needed: MIN_TAIL, got: values.len() });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();

    // Suffix sums of ln(x) give the tail log-sum for any cutoff in O(1).
    let mut suffix_ln = vec![0.0f64; n + 1];
    for i in (0..n).rev() {
        suffix_ln[i] = suffix_ln[i + 1] + sorted[i].ln();
    }

    let mut best: Option<(f64, PowerLawFit)> = None;
    let mut i = 0;
    while i < n {
        let x_min = sorted[i];
        let n_tail = n - i;
        if n_tail < MIN_TAIL {
            break;
        }
        let log_sum = suffix_ln[i] - n_tail as f64 * x_min.ln();
        if log_sum > 0.0 {
            let theta = 1.0 + n_tail as f64 / log_sum;
            let ks = ks_distance(&sorted[i..], x_min, theta);
            let fit = PowerLawFit {
                x_min,
                theta_hat: theta,
                sigma_hat: (theta - 1.0) / (n_tail as f64).sqrt(),
                n_tail,
            };
            // Strict improvement keeps the smallest x_min on ties.
            if best.is_none_or(|(d, _)| ks < d) {
                best = Some((ks, fit));
            }
        }
        // Advance past duplicates of this candidate.
        let mut j = i + 1;
        while j < n && sorted[j] == x_min {
            j += 1;
        }
        i = j;
    }
    best.map(|(_, fit)| fit).ok_or(Error::DegenerateTail)
}

/// Kolmogorov-Smirnov distance between a sorted tail and the fitted CDF
/// `F(x) = 1 - (x / x_min)^(1 - theta)`.
fn ks_distance(sorted_tail: &[f64], x_min: f64, theta: f64) -> f64 {
    let m = sorted_tail.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted_tail.iter().enumerate() {
        let fitted = 1.0 - (x / x_min).powf(1.0 - theta);
        let hi = (i + 1) as f64 / m - fitted;
        let lo = fitted - i as f64 / m;
        d = d.max(hi.abs()).max(lo.abs());
    }
    d
}

/// Log of the unnormalised posterior: power-law likelihood times a Normal
/// prior located at the ML estimate, with variance equal to the ML
/// standard error.
fn log_posterior(theta: f64, n: f64, log_sum: f64, prior_mean: f64, prior_var: f64) -> f64 {
    if theta <= 1.0 {
        return f64::NEG_INFINITY;
    }
    let d = theta - prior_mean;
    n * (theta - 1.0).ln() - theta * log_sum - d * d / (2.0 * prior_var)
}

/// Sample the posterior of a tail exponent by random-walk
/// Metropolis-Hastings.
///
/// The proposal step starts at `sigma_hat`, adapts in batches during
/// burn-in towards a moderate acceptance rate, and stays frozen afterwards.
/// Identical `(values, fit, iterations, burn_in, seed)` give bit-identical
/// draws.
pub fn posterior_exponent(
    values: &[f64],
    fit: &PowerLawFit,
    iterations: usize,
    burn_in: usize,
    seed: u64,
) -> Result<PosteriorDraws> {
    if iterations <= burn_in {
        return Err(Error::InvalidConfig(format!(
            "iterations ({iterations}) must exceed burn_in ({burn_in})"
        )));
    }
    let mut n = 0usize;
    let mut log_sum = 0.0f64;
    for &v in values {
        if v >= fit.x_min {
            n += 1;
            log_sum += (v / fit.x_min).ln();
        }
    }
    if n != fit.n_tail {
        return Err(Error::InvalidConfig(format!(
            "fit has n_tail {} but sample has {} observations >= x_min",
            fit.n_tail, n
        )));
    }
    if !(fit.sigma_hat > 0.0) || !fit.sigma_hat.is_finite() {
        return Err(Error::InvalidConfig("degenerate proposal scale".into()));
    }

    let nf = n as f64;
    let prior_mean = fit.theta_hat;
    let prior_var = fit.sigma_hat;
    let mut current = fit.theta_hat;
    let mut current_lp = log_posterior(current, nf, log_sum, prior_mean, prior_var);
    if !current_lp.is_finite() {
        return Err(Error::NonFinite { context: "log-likelihood at the ML estimate" });
    }

    let mut rng = substream(seed, "mh-chain", 0);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut step = fit.sigma_hat;
    let mut draws = Vec::with_capacity(iterations - burn_in);
    let mut accepted_kept = 0usize;
    let mut batch_accepted = 0usize;

    for iter in 0..iterations {
        let proposal = current + step * normal.sample(&mut rng);
        let proposal_lp = log_posterior(proposal, nf, log_sum, prior_mean, prior_var);
        let log_u: f64 = rng.random::<f64>().ln();
        let accept = proposal_lp - current_lp > log_u;
        if accept {
            current = proposal;
            current_lp = proposal_lp;
        }

        if iter < burn_in {
            if accept {
                batch_accepted += 1;
            }
            if (iter + 1) % ADAPT_BATCH == 0 {
                let rate = batch_accepted as f64 / ADAPT_BATCH as f64;
                step = (step * (rate - TARGET_ACCEPTANCE).exp()).clamp(1e-12, 1e6);
                batch_accepted = 0;
            }
        } else {
            if accept {
                accepted_kept += 1;
            }
            draws.push(current);
        }
    }

    Ok(PosteriorDraws {
        draws,
        iterations,
        burn_in,
        acceptance_rate: accepted_kept as f64 / (iterations - burn_in) as f64,
        seed,
    })
}

/// Shortest window over the sorted draws containing `ceil(mass * n)` of
/// them.
pub fn hdi(draws: &[f64], mass: f64) -> Result<HdiReport> {
    if draws.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(0.0 < mass && mass < 1.0) {
        return Err(Error::InvalidConfig(format!("mass must lie in (0,1), got {mass}")));
    }
    let mut sorted = draws.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let window = ((mass * n as f64).ceil() as usize).clamp(1, n);
    let mut best_start = 0;
    let mut best_width = f64::INFINITY;
    for start in 0..=(n - window) {
        let width = sorted[start + window - 1] - sorted[start];
        if width < best_width {
            best_width = width;
            best_start = start;
        }
    }
    let lower = sorted[best_start];
    let upper = sorted[best_start + window - 1];
    Ok(HdiReport {
        lower,
        upper,
        mass,
        contains_zero: lower <= 0.0 && 0.0 <= upper,
    })
}

/// Distribution of the difference between two exponents: element-wise
/// differences of independently drawn chains, summarised by their HDI.
pub fn exponent_difference(a: &PosteriorDraws, b: &PosteriorDraws, mass: f64) -> Result<HdiReport> {
    let len = a.draws.len().min(b.draws.len());
    if a.draws.len() < 100 || b.draws.len() < 100 {
        return Err(Error::TooFewValues {
            needed: 100,
            got: a.draws.len().min(b.draws.len()),
        });
    }
    let diffs: Vec<f64> = a.draws[..len]
        .iter()
        .zip(&b.draws[..len])
        .map(|(x, y)| x - y)
        .collect();
    hdi(&diffs, mass)
}

/// Dump a chain as CSV (`iteration,theta`); iteration numbering continues
/// from the end of burn-in.
pub fn write_chain_csv<W: Write>(draws: &PosteriorDraws, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["iteration", "theta"])?;
    for (i, d) in draws.draws.iter().enumerate() {
        w.write_record(&[(draws.burn_in + i).to_string(), d.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Read back the `theta` column of a chain dump.
pub fn read_chain_csv<R: Read>(reader: R) -> Result<Vec<f64>> {
    let mut rdr = csv::Reader::from_reader(BufReader::new(reader));
    let headers = rdr.headers()?.clone();
    let Some(idx) = headers.iter().position(|h| h == "theta") else {
        return Err(Error::InvalidConfig("chain csv lacks a theta column".into()));
    };
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let field = record.get(idx).unwrap_or("");
        out.push(field.parse::<f64>().map_err(|_| {
            Error::InvalidConfig(format!("non-numeric theta value {field:?}"))
        })?);
    }
    Ok(out)
}
