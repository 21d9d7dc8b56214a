//! Spearman rank-correlation matrices over per-item action counts, and the
//! Mantel permutation test comparing two such matrices.
//!
//! Cross-platform cells pair a Facebook post with the YouTube video it
//! links through a shared `item_id`; items without a counterpart drop out
//! of those cells. The Mantel statistic correlates the upper-triangle
//! off-diagonal entries, with significance from random simultaneous
//! row-and-column permutations.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ingest::{ItemStats, Platform};
use crate::seed::substream;
use crate::{Error, Result};

/// Default number of Monte-Carlo permutation replicates.
pub const DEFAULT_MANTEL_REPLICATES: usize = 10_000;

/// One of the per-item action counts the correlation matrices range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionKind {
    FbLikes,
    FbComments,
    FbShares,
    YtViews,
    YtLikes,
    YtComments,
}

impl ActionKind {
    pub const ALL: [ActionKind; 6] = [
        ActionKind::FbLikes,
        ActionKind::FbComments,
        ActionKind::FbShares,
        ActionKind::YtViews,
        ActionKind::YtLikes,
        ActionKind::YtComments,
    ];

    pub fn platform(self) -> Platform {
        match self {
            ActionKind::FbLikes | ActionKind::FbComments | ActionKind::FbShares => {
                Platform::Facebook
            }
            ActionKind::YtViews | ActionKind::YtLikes | ActionKind::YtComments => {
                Platform::Youtube
            }
        }
    }

    fn value(self, item: &ItemStats) -> Option<f64> {
        if item.platform != self.platform() {
            return None;
        }
        Some(match self {
            ActionKind::FbLikes | ActionKind::YtLikes => item.likes as f64,
            ActionKind::FbComments | ActionKind::YtComments => item.comments as f64,
            ActionKind::FbShares => item.shares as f64,
            ActionKind::YtViews => item.views as f64,
        })
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ActionKind::FbLikes => "fb_likes",
            ActionKind::FbComments => "fb_comments",
            ActionKind::FbShares => "fb_shares",
            ActionKind::YtViews => "yt_views",
            ActionKind::YtLikes => "yt_likes",
            ActionKind::YtComments => "yt_comments",
        };
        write!(f, "{name}")
    }
}

impl FromStr for ActionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fb_likes" => Ok(ActionKind::FbLikes),
            "fb_comments" => Ok(ActionKind::FbComments),
            "fb_shares" => Ok(ActionKind::FbShares),
            "yt_views" => Ok(ActionKind::YtViews),
            "yt_likes" => Ok(ActionKind::YtLikes),
            "yt_comments" => Ok(ActionKind::YtComments),
            other => Err(Error::UnknownAction { name: other.to_string() }),
        }
    }
}

/// Labelled symmetric correlation matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }
}

/// Mantel test outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MantelResult {
    pub r: f64,
    pub p_value: f64,
    pub replicates: usize,
    pub seed: u64,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantInput);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Average ranks, ties sharing the mean of their rank span (1-based).
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with tie-averaged ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 3 {
        return Err(Error::TooFewValues { needed: 3, got: x.len() });
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Pairwise Spearman correlations of `actions` over `items`.
///
/// Same-platform cells use every item of that platform; cross-platform
/// cells use only item ids present on both platforms.
pub fn correlation_matrix(items: &[ItemStats], actions: &[ActionKind]) -> Result<CorrelationMatrix> {
    if actions.is_empty() {
        return Err(Error::EmptyInput);
    }
    // Index items once; cross-platform cells join on the shared item id.
    let by_platform = |p: Platform| -> std::collections::BTreeMap<&str, &ItemStats> {
        items
            .iter()
            .filter(|it| it.platform == p)
            .map(|it| (it.item_id.as_str(), it))
            .collect()
    };
    let fb = by_platform(Platform::Facebook);
    let yt = by_platform(Platform::Youtube);
    let of = |p: Platform| if p == Platform::Facebook { &fb } else { &yt };

    let dim = actions.len();
    let mut values = vec![vec![0.0; dim]; dim];
    for (i, &ai) in actions.iter().enumerate() {
        values[i][i] = 1.0;
        for (j, &aj) in actions.iter().enumerate().skip(i + 1) {
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            if ai.platform() == aj.platform() {
                for item in of(ai.platform()).values() {
                    xs.push(ai.value(item).unwrap());
                    ys.push(aj.value(item).unwrap());
                }
            } else {
                for (id, item) in of(ai.platform()) {
                    if let Some(partner) = of(aj.platform()).get(id) {
                        xs.push(ai.value(item).unwrap());
                        ys.push(aj.value(partner).unwrap());
                    }
                }
            }
            if xs.len() < 3 {
                return Err(Error::TooFewValues { needed: 3, got: xs.len() });
            }
            let rho = spearman(&xs, &ys)?;
            values[i][j] = rho;
            values[j][i] = rho;
        }
    }
    Ok(CorrelationMatrix {
        labels: actions.iter().map(|a| a.to_string()).collect(),
        values,
    })
}

fn upper_triangle(m: &CorrelationMatrix) -> Vec<f64> {
    let d = m.dim();
    let mut out = Vec::with_capacity(d * (d - 1) / 2);
    for i in 0..d {
        for j in (i + 1)..d {
            out.push(m.values[i][j]);
        }
    }
    out
}

fn upper_triangle_permuted(m: &CorrelationMatrix, perm: &[usize]) -> Vec<f64> {
    let d = m.dim();
    let mut out = Vec::with_capacity(d * (d - 1) / 2);
    for i in 0..d {
        for j in (i + 1)..d {
            out.push(m.values[perm[i]][perm[j]]);
        }
    }
    out
}

/// Mantel permutation test between two correlation matrices with matching
/// labels.
///
/// The statistic is the Pearson correlation of the upper-triangle
/// off-diagonal entries; the null distribution applies the same random
/// row-and-column permutation to `b`. The p-value uses the add-one
/// estimator `(1 + #{r_perm >= r_obs}) / (replicates + 1)`.
pub fn mantel_test(
    a: &CorrelationMatrix,
    b: &CorrelationMatrix,
    replicates: usize,
    seed: u64,
) -> Result<MantelResult> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    if a.labels != b.labels {
        return Err(Error::InvalidConfig("matrix labels differ".into()));
    }
    if a.dim() < 3 {
        return Err(Error::TooFewValues { needed: 3, got: a.dim() });
    }
    if replicates < 99 {
        return Err(Error::InvalidConfig(format!(
            "need at least 99 replicates, got {replicates}"
        )));
    }

    let flat_a = upper_triangle(a);
    let r_obs = pearson(&flat_a, &upper_triangle(b))?;

    let dim = a.dim();
    let exceed: usize = (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let mut rng = substream(seed, "mantel-perm", rep as u64);
            let mut perm: Vec<usize> = (0..dim).collect();
            perm.shuffle(&mut rng);
            let flat_perm = upper_triangle_permuted(b, &perm);
            match pearson(&flat_a, &flat_perm) {
                Ok(r_perm) => usize::from(r_perm >= r_obs),
                // A permutation collapsing b to constant entries cannot beat
                // any observed correlation.
                Err(_) => 0,
            }
        })
        .sum();

    Ok(MantelResult {
        r: r_obs,
        p_value: (1 + exceed) as f64 / (replicates + 1) as f64,
        replicates,
        seed,
    })
}

/// Write a matrix as CSV: header row of labels, then one row per matrix row.
pub fn write_matrix_csv<W: Write>(matrix: &CorrelationMatrix, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(&matrix.labels)?;
    for row in &matrix.values {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Read a matrix written by [`write_matrix_csv`].
pub fn read_matrix_csv<R: Read>(reader: R) -> Result<CorrelationMatrix> {
    let mut rdr = csv::Reader::from_reader(reader);
    let labels: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let row: Vec<f64> = record
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::InvalidConfig(format!("non-numeric matrix entry {f:?}")))
            })
            .collect::<Result<_>>()?;
        if row.len() != labels.len() {
            return Err(Error::DimensionMismatch { left: row.len(), right: labels.len() });
        }
        values.push(row);
    }
    if values.len() != labels.len() {
        return Err(Error::DimensionMismatch { left: values.len(), right: labels.len() });
    }
    Ok(CorrelationMatrix { labels, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn spearman_monotone_is_one() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((spearman(&[1.0, 2.0, 3.0], &[30.0, 20.0, 10.0]).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn spearman_tied_ranks_hand_oracle() {
        // rank x = (1, 2.5, 2.5, 4), rank y = (1, 3, 2, 4)
        let r = spearman(&[1.0, 2.0, 2.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        let expected = {
            let rx = [1.0, 2.5, 2.5, 4.0];
            let ry = [1.0, 3.0, 2.0, 4.0];
            pearson(&rx, &ry).unwrap()
        };
        assert_eq!(r, expected);
        assert!((r - 0.9f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn spearman_errors() {
        assert!(matches!(
            spearman(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            spearman(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::TooFewValues { .. })
        ));
        assert!(matches!(
            spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::ConstantInput)
        ));
    }

    #[test]
    fn spearman_symmetric_and_monotone_invariant() {
        let mut rng = crate::seed::substream(31, "spearman-prop", 0);
        for _ in 0..50 {
            let n = rng.random_range(3..40);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(0..15) as f64).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let Ok(r) = spearman(&x, &y) else { continue };
            assert!((r - spearman(&y, &x).unwrap()).abs() < 1e-12);
            // Strictly increasing transform of x leaves ranks unchanged.
            let tx: Vec<f64> = x.iter().map(|v| (v + 1.0).powi(3) + 0.5 * v).collect();
            assert!((r - spearman(&tx, &y).unwrap()).abs() < 1e-12);
        }
    }

    fn toy_items(n: usize) -> Vec<ItemStats> {
        use crate::ingest::Category;
        (0..n)
            .flat_map(|k| {
                let id = format!("v{k}");
                [
                    ItemStats {
                        item_id: id.clone(),
                        platform: Platform::Facebook,
                        category: Category::Science,
                        comments: (k * 2) as u64,
                        likes: (k * 10) as u64,
                        shares: (k * 3) as u64,
                        views: 0,
                    },
                    ItemStats {
                        item_id: id,
                        platform: Platform::Youtube,
                        category: Category::Science,
                        comments: (k * 5) as u64,
                        likes: (k * 7) as u64,
                        shares: 0,
                        views: (k * 100) as u64,
                    },
                ]
            })
            .collect()
    }

    #[test]
    fn matrix_rank_aligned_actions() {
        let items = toy_items(10);
        let m = correlation_matrix(&items, &[ActionKind::FbLikes, ActionKind::FbComments]).unwrap();
        assert_eq!(m.values[0][1], 1.0);
        assert_eq!(m.values[0][0], 1.0);
        assert_eq!(m.labels, vec!["fb_likes", "fb_comments"]);
    }

    #[test]
    fn matrix_full_action_set_is_symmetric_unit_diagonal() {
        let cfg = crate::synth::GeneratorConfig { n_users: 200, ..Default::default() };
        let (fb, yt) = crate::synth::generate_item_stats(&cfg, 0.5, 9).unwrap();
        let items: Vec<ItemStats> = fb.into_iter().chain(yt).collect();
        let m = correlation_matrix(&items, &ActionKind::ALL).unwrap();
        for i in 0..m.dim() {
            assert_eq!(m.values[i][i], 1.0);
            for j in 0..m.dim() {
                assert!((m.values[i][j] - m.values[j][i]).abs() < 1e-12);
                assert!(m.values[i][j].abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn matrix_independent_actions_near_zero() {
        let cfg = crate::synth::GeneratorConfig { n_users: 10_000, ..Default::default() };
        let (fb, yt) = crate::synth::generate_item_stats(&cfg, 0.0, 12).unwrap();
        let items: Vec<ItemStats> = fb.into_iter().chain(yt).collect();
        let m = correlation_matrix(&items, &[ActionKind::FbLikes, ActionKind::YtViews]).unwrap();
        assert!(m.values[0][1].abs() < 0.05, "cross corr {}", m.values[0][1]);
    }

    #[test]
    fn matrix_rejects_insufficient_items() {
        let items = toy_items(2);
        assert!(matches!(
            correlation_matrix(&items, &[ActionKind::FbLikes, ActionKind::FbComments]),
            Err(Error::TooFewValues { .. })
        ));
    }

    fn random_symmetric(dim: usize, seed: u64) -> CorrelationMatrix {
        let mut rng = crate::seed::substream(seed, "random-matrix", 0);
        let mut values = vec![vec![0.0; dim]; dim];
        for i in 0..dim {
            values[i][i] = 1.0;
            for j in (i + 1)..dim {
                let v: f64 = rng.random_range(-1.0..1.0);
                values[i][j] = v;
                values[j][i] = v;
            }
        }
        CorrelationMatrix {
            labels: (0..dim).map(|i| format!("a{i}")).collect(),
            values,
        }
    }

    #[test]
    fn mantel_identical_matrices() {
        let a = random_symmetric(12, 400);
        let res = mantel_test(&a, &a, 999, 5).unwrap();
        assert_eq!(res.r, 1.0);
        assert!(res.p_value <= 1.01 / 1000.0, "p = {}", res.p_value);
    }

    #[test]
    fn mantel_dim3_matches_exact_enumeration() {
        // All 6 permutations of a 3x3 matrix, identity included.
        for trial in 0..10 {
            let a = random_symmetric(3, 500 + trial);
            let b = random_symmetric(3, 600 + trial);
            let flat_a = upper_triangle(&a);
            let r_obs = pearson(&flat_a, &upper_triangle(&b)).unwrap();
            let perms: [[usize; 3]; 6] = [
                [0, 1, 2],
                [0, 2, 1],
                [1, 0, 2],
                [1, 2, 0],
                [2, 0, 1],
                [2, 1, 0],
            ];
            let hits = perms
                .iter()
                .filter(|p| {
                    let flat = upper_triangle_permuted(&b, &p[..]);
                    pearson(&flat_a, &flat).map(|r| r >= r_obs).unwrap_or(false)
                })
                .count();
            let exact = hits as f64 / 6.0;
            let mc = mantel_test(&a, &b, 10_000, 7 + trial).unwrap();
            assert!(
                (mc.p_value - exact).abs() < 0.02,
                "trial {trial}: mc {} vs exact {exact}",
                mc.p_value
            );
        }
    }

    #[test]
    fn mantel_null_calibration() {
        // Independent matrices: rejection at alpha should not exceed
        // alpha by more than sampling slack.
        let runs = 200;
        let p_values: Vec<f64> = (0..runs)
            .map(|k| {
                let a = random_symmetric(6, 1000 + k);
                let b = random_symmetric(6, 5000 + k);
                mantel_test(&a, &b, 199, k).unwrap().p_value
            })
            .collect();
        for alpha in [0.05, 0.10] {
            let rate = p_values.iter().filter(|&&p| p <= alpha).count() as f64 / runs as f64;
            assert!(rate <= alpha + 0.04, "rejection rate {rate} at alpha {alpha}");
        }
    }

    #[test]
    fn mantel_rejects_mismatches() {
        let a = random_symmetric(4, 1);
        let b = random_symmetric(5, 2);
        assert!(matches!(
            mantel_test(&a, &b, 999, 0),
            Err(Error::DimensionMismatch { .. })
        ));
        let c = random_symmetric(4, 3);
        assert!(matches!(
            mantel_test(&a, &c, 98, 0),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn matrix_csv_round_trip() {
        let m = random_symmetric(5, 77);
        let mut buf = Vec::new();
        write_matrix_csv(&m, &mut buf).unwrap();
        let back = read_matrix_csv(buf.as_slice()).unwrap();
        assert_eq!(m, back);
    }
}
