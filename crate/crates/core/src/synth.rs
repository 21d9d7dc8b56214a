//! Seeded synthetic comment-event datasets with known ground truth.
//!
//! Each user gets a latent polarization drawn from a three-part mixture
//! (two Beta wings plus a uniform middle band), a comment budget drawn from
//! a power law, and an optional initial switching phase during which the
//! two narratives are picked by fair coin. The generator closes the loop
//! for every other module: its latent parameters are the oracles the
//! analysis results are checked against.

use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Beta, Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::ingest::{Category, CommentEvent, Dataset, ItemStats, Platform};
use crate::polarization::PolarityLabel;
use crate::seed::substream;
use crate::{Error, Result};

/// Mixture weights over the three latent-user components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureWeights {
    pub science: f64,
    pub middle: f64,
    pub conspiracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n_users: usize,
    pub platform: Platform,
    pub mixture: MixtureWeights,
    /// Beta shape parameters of the polarized wings: the science wing is
    /// `Beta(a, b)` (mass near zero), the conspiracy wing its reflection
    /// `Beta(b, a)`.
    pub beta_a: f64,
    pub beta_b: f64,
    /// Number of initial comments drawn by fair coin before the latent
    /// preference takes over.
    pub switching_length: usize,
    /// Power-law parameters of per-user comment counts.
    pub activity_theta: f64,
    pub activity_xmin: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n_users: 1000,
            platform: Platform::Facebook,
            mixture: MixtureWeights { science: 0.45, middle: 0.10, conspiracy: 0.45 },
            beta_a: 0.5,
            beta_b: 8.0,
            switching_length: 0,
            activity_theta: 2.2,
            // Comment budgets are ceil'd continuous draws; a cutoff below 1
            // leaves most users with one or two comments, the regime real
            // comment logs live in.
            activity_xmin: 0.3,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    fn validate(&self) -> Result<()> {
        let w = &self.mixture;
        if self.n_users == 0 {
            return Err(Error::InvalidConfig("n_users must be positive".into()));
        }
        if w.science < 0.0 || w.middle < 0.0 || w.conspiracy < 0.0 {
            return Err(Error::InvalidConfig("mixture weights must be non-negative".into()));
        }
        if ((w.science + w.middle + w.conspiracy) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig("mixture weights must sum to 1".into()));
        }
        if !(self.beta_a > 0.0 && self.beta_b > 0.0) {
            return Err(Error::InvalidConfig("beta parameters must be positive".into()));
        }
        if !(self.activity_theta > 1.0) {
            return Err(Error::InvalidConfig("activity_theta must exceed 1".into()));
        }
        if !(self.activity_xmin > 0.0) {
            return Err(Error::InvalidConfig("activity_xmin must be positive".into()));
        }
        Ok(())
    }
}

/// Latent truth for one generated user.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundTruth {
    pub user_id: String,
    /// Latent long-run conspiracy preference.
    pub rho_star: f64,
    /// The 0.05 / 0.95 rule applied to `rho_star`.
    pub label: PolarityLabel,
    pub n_comments: usize,
    pub switching_length: usize,
}

/// Inverse-CDF sample of a continuous power law with density
/// `(theta-1)/x_min * (x/x_min)^(-theta)` for `x >= x_min`.
pub fn sample_powerlaw<R: Rng>(rng: &mut R, x_min: f64, theta: f64) -> f64 {
    let u: f64 = rng.random();
    x_min * (1.0 - u).powf(-1.0 / (theta - 1.0))
}

fn sample_rho_star(cfg: &GeneratorConfig, rng: &mut ChaCha12Rng) -> f64 {
    let pick: f64 = rng.random();
    if pick < cfg.mixture.science {
        Beta::new(cfg.beta_a, cfg.beta_b).expect("valid beta").sample(rng)
    } else if pick < cfg.mixture.science + cfg.mixture.middle {
        0.3 + 0.4 * rng.random::<f64>()
    } else {
        Beta::new(cfg.beta_b, cfg.beta_a).expect("valid beta").sample(rng)
    }
}

/// Generate a dataset plus the latent truth per user.
pub fn generate(config: &GeneratorConfig) -> Result<(Dataset, BTreeMap<String, GroundTruth>)> {
    config.validate()?;

    // Deterministic per-category item pools shared by all users. Ids carry
    // the platform so exports from both platforms can be concatenated.
    let pool_size = (config.n_users / 10).clamp(10, 5000);
    let prefix = match config.platform {
        Platform::Facebook => "fb",
        Platform::Youtube => "yt",
    };
    let item_id = |cat: Category, idx: usize| match cat {
        Category::Science => format!("{prefix}-sci-{idx:05}"),
        Category::Conspiracy => format!("{prefix}-con-{idx:05}"),
    };

    let per_user: Vec<(Vec<CommentEvent>, GroundTruth)> = (0..config.n_users)
        .into_par_iter()
        .map(|u| {
            let mut rng = substream(config.seed, "synth-user", u as u64);
            let rho_star = sample_rho_star(config, &mut rng);
            let n_comments = sample_powerlaw(&mut rng, config.activity_xmin, config.activity_theta)
                .ceil() as usize;
            let user_id = format!("{prefix}-u{u:06}");
            let mut events = Vec::with_capacity(n_comments);
            for k in 0..n_comments {
                let p = if k < config.switching_length { 0.5 } else { rho_star };
                let cat = if rng.random::<f64>() < p {
                    Category::Conspiracy
                } else {
                    Category::Science
                };
                let idx = rng.random_range(0..pool_size);
                events.push(CommentEvent {
                    user: user_id.clone(),
                    platform: config.platform,
                    item: item_id(cat, idx),
                    category: cat,
                    ts: k as u64,
                });
            }
            let truth = GroundTruth {
                user_id,
                rho_star,
                label: PolarityLabel::from_rho(rho_star),
                n_comments,
                switching_length: config.switching_length.min(n_comments),
            };
            (events, truth)
        })
        .collect();

    let mut events = Vec::new();
    let mut truths = BTreeMap::new();
    for (user_events, truth) in per_user {
        events.extend(user_events);
        truths.insert(truth.user_id.clone(), truth);
    }
    Ok((Dataset::from_events(events), truths))
}

/// Linked Facebook/YouTube item pairs whose action counts share a latent
/// popularity with cross-platform correlation controlled by `coupling`
/// (0 = independent platforms, 1 = identical latent popularity).
///
/// Pair count comes from `config.n_users`; categories alternate by index.
pub fn generate_item_stats(
    config: &GeneratorConfig,
    coupling: f64,
    seed: u64,
) -> Result<(Vec<ItemStats>, Vec<ItemStats>)> {
    if !(0.0..=1.0).contains(&coupling) {
        return Err(Error::InvalidConfig(format!(
            "coupling must lie in [0,1], got {coupling}"
        )));
    }
    config.validate()?;
    let n_pairs = config.n_users;
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let jitter = Normal::new(0.0, 0.1).expect("jitter normal");
    let ortho = (1.0 - coupling * coupling).sqrt();

    let pairs: Vec<(ItemStats, ItemStats)> = (0..n_pairs)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, "synth-item", k as u64);
            let shared = normal.sample(&mut rng);
            let fb_own = normal.sample(&mut rng);
            let yt_own = normal.sample(&mut rng);
            let log_fb = coupling * shared + ortho * fb_own;
            let log_yt = coupling * shared + ortho * yt_own;
            let category = if k % 2 == 0 { Category::Science } else { Category::Conspiracy };
            let item = format!("vid-{k:06}");

            let mut count = |scale: f64, exponent: f64, log_pop: f64| -> u64 {
                (scale * (exponent * log_pop + jitter.sample(&mut rng)).exp()).round() as u64
            };
            let fb = ItemStats {
                item_id: item.clone(),
                platform: Platform::Facebook,
                category,
                comments: count(30.0, 0.9, log_fb),
                likes: count(100.0, 1.0, log_fb),
                shares: count(50.0, 1.1, log_fb),
                views: 0,
            };
            let yt = ItemStats {
                item_id: item,
                platform: Platform::Youtube,
                category,
                comments: count(80.0, 0.9, log_yt),
                likes: count(200.0, 1.0, log_yt),
                shares: 0,
                views: count(1000.0, 1.1, log_yt),
            };
            (fb, yt)
        })
        .collect();

    Ok(pairs.into_iter().unzip())
}

/// Write ground truth as `ground_truth.csv`
/// (`user_id,rho_star,class,N_u,L`).
pub fn write_ground_truth_csv<W: Write>(
    truths: &BTreeMap<String, GroundTruth>,
    writer: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["user_id", "rho_star", "class", "N_u", "L"])?;
    for t in truths.values() {
        w.write_record(&[
            t.user_id.clone(),
            t.rho_star.to_string(),
            t.label.to_string(),
            t.n_comments.to_string(),
            t.switching_length.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
