//! Per-user polarization scores, trajectories, class labels, population
//! densities, and the bimodality coefficient.
//!
//! A user's polarization is the fraction of their comments left on
//! conspiracy items: 0 means a pure science commenter, 1 a pure conspiracy
//! commenter. Users past the 0.05 / 0.95 thresholds count as polarized.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::ingest::{Category, Dataset, Platform};
use crate::{Error, Result};

/// Threshold below which a user counts as polarized towards science.
pub const SCIENCE_THRESHOLD: f64 = 0.05;
/// Threshold above which a user counts as polarized towards conspiracy.
pub const CONSPIRACY_THRESHOLD: f64 = 0.95;
/// Critical bimodality-coefficient value; a uniform distribution sits here.
pub const BC_CRIT: f64 = 5.0 / 9.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarityLabel {
    SciencePolarized,
    NotPolarized,
    ConspiracyPolarized,
}

impl PolarityLabel {
    /// Strict inequalities: exactly 0.05 or 0.95 is not polarized.
    pub fn from_rho(rho: f64) -> PolarityLabel {
        if rho > CONSPIRACY_THRESHOLD {
            PolarityLabel::ConspiracyPolarized
        } else if rho < SCIENCE_THRESHOLD {
            PolarityLabel::SciencePolarized
        } else {
            PolarityLabel::NotPolarized
        }
    }

    /// Stable class index used by the classifier: science 0, middle 1,
    /// conspiracy 2.
    pub fn class_index(self) -> usize {
        match self {
            PolarityLabel::SciencePolarized => 0,
            PolarityLabel::NotPolarized => 1,
            PolarityLabel::ConspiracyPolarized => 2,
        }
    }

    pub fn from_class_index(idx: usize) -> Option<PolarityLabel> {
        match idx {
            0 => Some(PolarityLabel::SciencePolarized),
            1 => Some(PolarityLabel::NotPolarized),
            2 => Some(PolarityLabel::ConspiracyPolarized),
            _ => None,
        }
    }
}

impl fmt::Display for PolarityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolarityLabel::SciencePolarized => write!(f, "science_polarized"),
            PolarityLabel::NotPolarized => write!(f, "not_polarized"),
            PolarityLabel::ConspiracyPolarized => write!(f, "conspiracy_polarized"),
        }
    }
}

/// Per-user aggregate: comment counts, final polarization, the full
/// polarization trajectory, and the class label.
#[derive(Debug, Clone, PartialEq)]
pub struct UserRecord {
    pub user_id: String,
    pub platform: Platform,
    /// Comments on science items.
    pub science_count: u64,
    /// Comments on conspiracy items.
    pub conspiracy_count: u64,
    /// conspiracy_count / (science_count + conspiracy_count).
    pub rho: f64,
    /// Polarization after each successive comment; last entry equals `rho`.
    pub trajectory: Vec<f64>,
    pub label: PolarityLabel,
}

/// Output of [`user_polarization`]: included records plus how many users
/// fell below the comment floor.
#[derive(Debug, Clone)]
pub struct PolarizationOutcome {
    pub records: Vec<UserRecord>,
    pub excluded: usize,
}

/// Score every user with at least `min_comments` comments.
pub fn user_polarization(dataset: &Dataset, min_comments: u64) -> Result<PolarizationOutcome> {
    if min_comments < 1 {
        return Err(Error::InvalidConfig("min_comments must be at least 1".into()));
    }
    let mut records = Vec::new();
    let mut excluded = 0usize;
    for (user_id, indices) in &dataset.users {
        if (indices.len() as u64) < min_comments {
            excluded += 1;
            continue;
        }
        let mut conspiracy = 0u64;
        let mut trajectory = Vec::with_capacity(indices.len());
        for (k, &idx) in indices.iter().enumerate() {
            if dataset.events[idx].category == Category::Conspiracy {
                conspiracy += 1;
            }
            trajectory.push(conspiracy as f64 / (k + 1) as f64);
        }
        let total = indices.len() as u64;
        let rho = conspiracy as f64 / total as f64;
        records.push(UserRecord {
            user_id: user_id.clone(),
            platform: dataset.events[indices[0]].platform,
            science_count: total - conspiracy,
            conspiracy_count: conspiracy,
            rho,
            trajectory,
            label: PolarityLabel::from_rho(rho),
        });
    }
    Ok(PolarizationOutcome { records, excluded })
}

/// One histogram bin of the polarization density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityBin {
    pub center: f64,
    pub density: f64,
}

/// Histogram density of `rho` over [0, 1]; bin densities integrate to one.
pub fn polarization_density(records: &[UserRecord], bins: usize) -> Result<Vec<DensityBin>> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bins < 2 {
        return Err(Error::InvalidConfig("need at least 2 bins".into()));
    }
    let width = 1.0 / bins as f64;
    let mut counts = vec![0usize; bins];
    for r in records {
        let mut b = (r.rho * bins as f64).floor() as usize;
        if b >= bins {
            b = bins - 1; // rho == 1.0 lands in the last bin
        }
        counts[b] += 1;
    }
    let n = records.len() as f64;
    Ok(counts
        .iter()
        .enumerate()
        .map(|(i, &c)| DensityBin {
            center: (i as f64 + 0.5) * width,
            density: c as f64 / (n * width),
        })
        .collect())
}

/// Bimodality coefficient of a sample, with bias-corrected moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BimodalityReport {
    pub bc: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub n: usize,
    pub is_bimodal: bool,
}

/// Bimodality coefficient:
///
/// `bc = (skewness^2 + 1) / (excess_kurtosis + 3 (n-1)^2 / ((n-2)(n-3)))`
///
/// where skewness and excess kurtosis carry the standard small-sample bias
/// corrections. Values above [`BC_CRIT`] indicate bimodality.
pub fn bimodality_coefficient(values: &[f64]) -> Result<BimodalityReport> {
    let n = values.len();
    if n < 4 {
        return Err(Error::TooFewValues { needed: 4, got: n });
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    if m2 <= 0.0 {
        return Err(Error::ConstantInput);
    }

    let g1 = m3 / m2.powf(1.5);
    let g2 = m4 / (m2 * m2) - 3.0;
    let skewness = g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0);
    let excess_kurtosis = ((nf + 1.0) * g2 + 6.0) * (nf - 1.0) / ((nf - 2.0) * (nf - 3.0));
    let denom_term = 3.0 * (nf - 1.0) * (nf - 1.0) / ((nf - 2.0) * (nf - 3.0));
    let bc = (skewness * skewness + 1.0) / (excess_kurtosis + denom_term);

    Ok(BimodalityReport {
        bc,
        skewness,
        excess_kurtosis,
        n,
        is_bimodal: bc > BC_CRIT,
    })
}

/// Fraction of records labelled polarized (either side).
pub fn polarized_fraction(records: &[UserRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let polarized = records
        .iter()
        .filter(|r| r.label != PolarityLabel::NotPolarized)
        .count();
    Ok(polarized as f64 / records.len() as f64)
}

/// Write records as `users.csv` (`user_id,platform,s,c,rho,label`).
pub fn write_users_csv<W: Write>(records: &[UserRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["user_id", "platform", "s", "c", "rho", "label"])?;
    for r in records {
        w.write_record(&[
            r.user_id.clone(),
            r.platform.to_string(),
            r.science_count.to_string(),
            r.conspiracy_count.to_string(),
            r.rho.to_string(),
            r.label.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Read a `users.csv` written by [`write_users_csv`]. Trajectories are not
/// stored in the CSV, so the records come back with empty ones.
pub fn read_users_csv<R: std::io::Read>(reader: R) -> Result<Vec<UserRecord>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let get = |i: usize| record.get(i).unwrap_or("");
        let science: u64 = get(2)
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad s value {:?}", get(2))))?;
        let conspiracy: u64 = get(3)
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad c value {:?}", get(3))))?;
        if science + conspiracy == 0 {
            return Err(Error::InvalidConfig(format!(
                "user {:?} has no comments",
                get(0)
            )));
        }
        let rho = conspiracy as f64 / (science + conspiracy) as f64;
        out.push(UserRecord {
            user_id: get(0).to_string(),
            platform: get(1).parse()?,
            science_count: science,
            conspiracy_count: conspiracy,
            rho,
            trajectory: Vec::new(),
            label: PolarityLabel::from_rho(rho),
        });
    }
    Ok(out)
}

/// Write a density table as `density.csv` (`bin_center,density`).
pub fn write_density_csv<W: Write>(bins: &[DensityBin], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["bin_center", "density"])?;
    for b in bins {
        w.write_record(&[b.center.to_string(), b.density.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::CommentEvent;
    use rand::Rng;

    fn event(user: &str, category: Category, ts: u64) -> CommentEvent {
        CommentEvent {
            user: user.into(),
            platform: Platform::Facebook,
            item: format!("i{ts}"),
            category,
            ts,
        }
    }

    fn dataset_for(sequences: &[(&str, &[Category])]) -> Dataset {
        let mut events = Vec::new();
        for (user, cats) in sequences {
            for (k, &cat) in cats.iter().enumerate() {
                events.push(event(user, cat, k as u64));
            }
        }
        Dataset::from_events(events)
    }

    /// Test-only record with a fabricated but invariant-respecting rho.
    pub(crate) fn record_with_counts(science: u64, conspiracy: u64) -> UserRecord {
        let total = science + conspiracy;
        let rho = conspiracy as f64 / total as f64;
        UserRecord {
            user_id: format!("u_{science}_{conspiracy}"),
            platform: Platform::Facebook,
            science_count: science,
            conspiracy_count: conspiracy,
            rho,
            trajectory: vec![rho],
            label: PolarityLabel::from_rho(rho),
        }
    }

    #[test]
    fn pure_science_user() {
        let ds = dataset_for(&[("u1", &[Category::Science; 5])]);
        let out = user_polarization(&ds, 1).unwrap();
        assert_eq!(out.records.len(), 1);
        let r = &out.records[0];
        assert_eq!(r.rho, 0.0);
        assert_eq!(r.label, PolarityLabel::SciencePolarized);
        assert_eq!(r.science_count, 5);
    }

    #[test]
    fn pure_conspiracy_user() {
        let ds = dataset_for(&[("u1", &[Category::Conspiracy; 7])]);
        let out = user_polarization(&ds, 1).unwrap();
        let r = &out.records[0];
        assert_eq!(r.rho, 1.0);
        assert_eq!(r.label, PolarityLabel::ConspiracyPolarized);
    }

    #[test]
    fn trajectory_of_mixed_sequence() {
        use Category::{Conspiracy as C, Science as S};
        let ds = dataset_for(&[("u1", &[C, S, C, C])]);
        let out = user_polarization(&ds, 1).unwrap();
        let r = &out.records[0];
        assert_eq!(r.trajectory, vec![1.0, 0.5, 2.0 / 3.0, 0.75]);
        assert_eq!(r.rho, 0.75);
        assert_eq!(r.label, PolarityLabel::NotPolarized);
    }

    #[test]
    fn min_comments_excludes_and_counts() {
        use Category::Science as S;
        let ds = dataset_for(&[("u1", &[S; 3]), ("u2", &[S; 1])]);
        let out = user_polarization(&ds, 2).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.excluded, 1);
    }

    #[test]
    fn mirror_symmetry() {
        use Category::{Conspiracy as C, Science as S};
        let seq = [C, S, S, C, C, S, C];
        let mirrored: Vec<Category> = seq
            .iter()
            .map(|c| match c {
                Category::Science => C,
                Category::Conspiracy => S,
            })
            .collect();
        let a = user_polarization(&dataset_for(&[("u", &seq)]), 1).unwrap();
        let b = user_polarization(&dataset_for(&[("u", &mirrored)]), 1).unwrap();
        let (ra, rb) = (&a.records[0], &b.records[0]);
        assert!((ra.rho - (1.0 - rb.rho)).abs() < 1e-15);
        for (x, y) in ra.trajectory.iter().zip(&rb.trajectory) {
            assert!((x - (1.0 - y)).abs() < 1e-15);
        }
    }

    #[test]
    fn trajectory_prefix_consistent_on_random_users() {
        let mut rng = crate::seed::substream(11, "prefix-test", 0);
        for u in 0..1000 {
            let len = rng.random_range(1..40);
            let cats: Vec<Category> = (0..len)
                .map(|_| {
                    if rng.random::<f64>() < 0.5 {
                        Category::Conspiracy
                    } else {
                        Category::Science
                    }
                })
                .collect();
            let ds = dataset_for(&[(&format!("u{u}"), &cats[..])]);
            let rec = &user_polarization(&ds, 1).unwrap().records[0];
            for k in 1..=len {
                let scratch = cats[..k]
                    .iter()
                    .filter(|&&c| c == Category::Conspiracy)
                    .count() as f64
                    / k as f64;
                assert!((rec.trajectory[k - 1] - scratch).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn density_point_mass_at_zero() {
        let records: Vec<UserRecord> = (0..50).map(|_| record_with_counts(5, 0)).collect();
        let bins = polarization_density(&records, 10).unwrap();
        assert!((bins[0].density - 10.0).abs() < 1e-12);
        for b in &bins[1..] {
            assert_eq!(b.density, 0.0);
        }
    }

    #[test]
    fn density_two_point_masses() {
        let mut records: Vec<UserRecord> = (0..25).map(|_| record_with_counts(5, 0)).collect();
        records.extend((0..25).map(|_| record_with_counts(0, 5)));
        let bins = polarization_density(&records, 10).unwrap();
        assert!((bins[0].density - 5.0).abs() < 1e-12);
        assert!((bins[9].density - 5.0).abs() < 1e-12);
        for b in &bins[1..9] {
            assert_eq!(b.density, 0.0);
        }
    }

    #[test]
    fn density_integrates_to_one() {
        let mut rng = crate::seed::substream(3, "density-test", 0);
        let records: Vec<UserRecord> = (0..10_000)
            .map(|_| {
                let c = rng.random_range(0..=1000u64);
                record_with_counts(1000 - c, c)
            })
            .collect();
        let bins = polarization_density(&records, 37).unwrap();
        let total: f64 = bins.iter().map(|b| b.density / 37.0).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn density_near_uniform_sample() {
        // Quantized-uniform rho; each of 10 bins should be close to density 1.
        let mut rng = crate::seed::substream(5, "density-uniform", 0);
        let records: Vec<UserRecord> = (0..100_000)
            .map(|_| {
                let c = rng.random_range(0..=1000u64);
                record_with_counts(1000 - c, c)
            })
            .collect();
        let bins = polarization_density(&records, 10).unwrap();
        for b in &bins {
            assert!(
                (b.density - 1.0).abs() < 0.05,
                "bin at {} has density {}",
                b.center,
                b.density
            );
        }
    }

    /// Independent route: raw moments accumulated as plain power sums,
    /// then centralised and corrected.
    fn bc_brute_force(values: &[f64]) -> f64 {
        let n = values.len() as f64;
        let s1: f64 = values.iter().sum();
        let s2: f64 = values.iter().map(|v| v * v).sum();
        let s3: f64 = values.iter().map(|v| v * v * v).sum();
        let s4: f64 = values.iter().map(|v| v * v * v * v).sum();
        let mean = s1 / n;
        let m2 = s2 / n - mean * mean;
        let m3 = s3 / n - 3.0 * mean * s2 / n + 2.0 * mean.powi(3);
        let m4 = s4 / n - 4.0 * mean * s3 / n + 6.0 * mean * mean * s2 / n - 3.0 * mean.powi(4);
        let g1 = m3 / m2.powf(1.5);
        let g2 = m4 / (m2 * m2) - 3.0;
        let skew = g1 * (n * (n - 1.0)).sqrt() / (n - 2.0);
        let kurt = ((n + 1.0) * g2 + 6.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0));
        (skew * skew + 1.0) / (kurt + 3.0 * (n - 1.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0)))
    }

    #[test]
    fn bc_matches_brute_force_on_random_samples() {
        let mut rng = crate::seed::substream(9, "bc-brute", 0);
        for _ in 0..100 {
            let n = rng.random_range(4..200);
            let values: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let report = bimodality_coefficient(&values).unwrap();
            let brute = bc_brute_force(&values);
            assert!(
                (report.bc - brute).abs() < 1e-12,
                "bc {} vs brute {}",
                report.bc,
                brute
            );
        }
    }

    #[test]
    fn bc_of_balanced_two_point_sample_approaches_one() {
        let mut values = vec![0.0; 5000];
        values.extend(vec![1.0; 5000]);
        let report = bimodality_coefficient(&values).unwrap();
        assert!(report.skewness.abs() < 1e-9);
        assert!((report.excess_kurtosis + 2.0).abs() < 0.01);
        assert!(report.bc > 0.99);
        assert!(report.is_bimodal);
    }

    #[test]
    fn bc_of_bell_shaped_sample_is_unimodal() {
        // Sum of twelve uniforms: symmetric, unimodal, roughly normal.
        let mut rng = crate::seed::substream(2, "bc-bell", 0);
        let values: Vec<f64> = (0..10_000)
            .map(|_| (0..12).map(|_| rng.random::<f64>()).sum::<f64>() / 12.0)
            .collect();
        let report = bimodality_coefficient(&values).unwrap();
        assert!(report.bc < BC_CRIT, "bc = {}", report.bc);
        assert!(!report.is_bimodal);
    }

    #[test]
    fn bc_of_uniform_sample_sits_at_crit() {
        let mut rng = crate::seed::substream(4, "bc-uniform", 0);
        let values: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>()).collect();
        let report = bimodality_coefficient(&values).unwrap();
        assert!((report.bc - BC_CRIT).abs() < 0.03, "bc = {}", report.bc);
    }

    #[test]
    fn bc_rejects_degenerate_input() {
        assert!(matches!(
            bimodality_coefficient(&[1.0, 1.0, 1.0]),
            Err(Error::TooFewValues { .. })
        ));
        assert!(matches!(
            bimodality_coefficient(&[1.0, 1.0, 1.0, 1.0]),
            Err(Error::ConstantInput)
        ));
    }

    #[test]
    fn polarized_fraction_counts_labels() {
        let records = vec![
            record_with_counts(5, 0),  // science
            record_with_counts(1, 1),  // middle
            record_with_counts(0, 5),  // conspiracy
            record_with_counts(0, 9),  // conspiracy
        ];
        assert!((polarized_fraction(&records).unwrap() - 0.75).abs() < 1e-15);

        let all_science: Vec<UserRecord> = (0..4).map(|_| record_with_counts(3, 0)).collect();
        assert_eq!(polarized_fraction(&all_science).unwrap(), 1.0);

        assert!(matches!(polarized_fraction(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn thresholds_are_strict() {
        // rho = 1/20 = 0.05 and 19/20 = 0.95 stay unpolarized.
        assert_eq!(
            record_with_counts(19, 1).label,
            PolarityLabel::NotPolarized
        );
        assert_eq!(
            record_with_counts(1, 19).label,
            PolarityLabel::NotPolarized
        );
    }
}
