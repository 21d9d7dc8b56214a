//! Multinomial logistic classification of users into the three polarity
//! classes from their early polarization, with the evaluation protocols
//! built around it: cohort sampling, an n-sweep, Monte-Carlo
//! cross-validation, and cross-platform transfer.
//!
//! The model has one scalar feature per fit (the polarization after `n`
//! comments) plus an intercept, with the log-odds of each non-baseline
//! class linear in the feature. Fitting maximises the ridge-penalised
//! log-likelihood by Newton steps with step-halving.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::polarization::UserRecord;
use crate::seed::substream;
use crate::{Error, Result};

/// Default ridge penalty; keeps the optimum finite on separable cohorts
/// without visibly moving probabilities.
pub const DEFAULT_RIDGE: f64 = 1e-6;
/// Default prefix length of the trajectory feature.
pub const DEFAULT_FEATURE_N: usize = 50;
/// Default users sampled per class when building a cohort.
pub const DEFAULT_PER_CLASS: usize = 400;
/// Cohorts only admit users with at least this many comments.
pub const MIN_COHORT_COMMENTS: usize = 100;
/// Defaults of the Monte-Carlo cross-validation protocol.
pub const DEFAULT_CV_TRAIN: usize = 1000;
pub const DEFAULT_CV_TEST: usize = 200;
pub const DEFAULT_CV_ITERATIONS: usize = 1000;

const MAX_NEWTON_ITERATIONS: usize = 200;
const GRADIENT_TOLERANCE: f64 = 1e-8;
const FALLBACK_ASCENT_STEPS: usize = 500;
// On nearly separable data with a tiny ridge the raw Newton direction is
// enormous (the Hessian degenerates to -ridge*I); capping the step keeps
// the line search productive.
const NEWTON_STEP_CAP: f64 = 25.0;

/// Fitted multinomial logistic model. `alphas[k]` and `betas[k]` belong to
/// the k-th non-baseline class in ascending class order; the baseline
/// class has all coefficients fixed at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultinomialModel {
    pub baseline: usize,
    pub classes: usize,
    pub alphas: Vec<f64>,
    pub betas: Vec<Vec<f64>>,
    /// Trajectory prefix length the feature came from, when applicable.
    pub feature_spec: Option<usize>,
    pub ridge: f64,
    pub converged: bool,
    pub grad_norm: f64,
}

impl MultinomialModel {
    fn feature_dim(&self) -> usize {
        self.betas.first().map_or(0, Vec::len)
    }

    fn nonbaseline_classes(&self) -> Vec<usize> {
        (0..self.classes).filter(|&j| j != self.baseline).collect()
    }
}

/// Numerically stable softmax (max subtraction).
pub(crate) fn softmax(etas: &[f64]) -> Vec<f64> {
    let max = etas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = etas.iter().map(|e| (e - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}

/// Class probabilities for one feature vector.
pub fn predict(model: &MultinomialModel, feature: &[f64]) -> Result<Vec<f64>> {
    if feature.len() != model.feature_dim() {
        return Err(Error::DimensionMismatch {
            left: feature.len(),
            right: model.feature_dim(),
        });
    }
    if feature.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { context: "feature vector" });
    }
    let mut etas = vec![0.0; model.classes];
    for (k, &j) in model.nonbaseline_classes().iter().enumerate() {
        let mut eta = model.alphas[k];
        for (b, x) in model.betas[k].iter().zip(feature) {
            eta += b * x;
        }
        etas[j] = eta;
    }
    Ok(softmax(&etas))
}

/// Argmax class with ties resolved to the lowest class index.
pub fn predict_class(model: &MultinomialModel, feature: &[f64]) -> Result<usize> {
    let probs = predict(model, feature)?;
    let mut best = 0;
    for (j, &p) in probs.iter().enumerate() {
        if p > probs[best] {
            best = j;
        }
    }
    Ok(best)
}

/// Flat parameter layout: one `[alpha, beta...]` block per non-baseline
/// class, blocks in ascending class order.
struct Objective<'a> {
    features: &'a [Vec<f64>],
    labels: &'a [usize],
    nonbase: Vec<usize>,
    dim: usize, // features per example
    classes: usize,
    baseline: usize,
    ridge: f64,
}

impl<'a> Objective<'a> {
    fn block(&self) -> usize {
        self.dim + 1
    }

    fn len(&self) -> usize {
        self.nonbase.len() * self.block()
    }

    fn etas(&self, params: &[f64], x: &[f64]) -> Vec<f64> {
        let block = self.block();
        let mut etas = vec![0.0; self.classes];
        for (k, &j) in self.nonbase.iter().enumerate() {
            let w = &params[k * block..(k + 1) * block];
            let mut eta = w[0];
            for (b, v) in w[1..].iter().zip(x) {
                eta += b * v;
            }
            etas[j] = eta;
        }
        etas
    }

    /// Penalised log-likelihood.
    fn value(&self, params: &[f64]) -> f64 {
        let mut ll = 0.0;
        for (x, &y) in self.features.iter().zip(self.labels) {
            let etas = self.etas(params, x);
            let max = etas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + etas.iter().map(|e| (e - max).exp()).sum::<f64>().ln();
            ll += etas[y] - lse;
        }
        ll - 0.5 * self.ridge * params.iter().map(|p| p * p).sum::<f64>()
    }

    /// Gradient of [`Objective::value`].
    fn gradient(&self, params: &[f64]) -> Vec<f64> {
        let block = self.block();
        let mut grad = vec![0.0; self.len()];
        for (x, &y) in self.features.iter().zip(self.labels) {
            let probs = softmax(&self.etas(params, x));
            for (k, &j) in self.nonbase.iter().enumerate() {
                let resid = f64::from(y == j) - probs[j];
                grad[k * block] += resid;
                for (g, v) in grad[k * block + 1..(k + 1) * block].iter_mut().zip(x) {
                    *g += resid * v;
                }
            }
        }
        for (g, p) in grad.iter_mut().zip(params) {
            *g -= self.ridge * p;
        }
        grad
    }

    /// Dense Hessian of [`Objective::value`] (negative definite).
    fn hessian(&self, params: &[f64]) -> Vec<Vec<f64>> {
        let block = self.block();
        let len = self.len();
        let mut h = vec![vec![0.0; len]; len];
        let mut z = vec![0.0; block];
        for x in self.features {
            let probs = softmax(&self.etas(params, x));
            z[0] = 1.0;
            z[1..].copy_from_slice(x);
            for (k1, &j1) in self.nonbase.iter().enumerate() {
                for (k2, &j2) in self.nonbase.iter().enumerate() {
                    let w = probs[j1] * (f64::from(j1 == j2) - probs[j2]);
                    for a in 0..block {
                        for b in 0..block {
                            h[k1 * block + a][k2 * block + b] -= w * z[a] * z[b];
                        }
                    }
                }
            }
        }
        for (i, row) in h.iter_mut().enumerate() {
            row[i] -= self.ridge;
        }
        h
    }
}

/// Solve `m x = rhs` by Gaussian elimination with partial pivoting.
/// Returns None when the matrix is numerically singular.
fn solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in (col + 1)..n {
            let factor = m[row][col] / m[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                m[row][k] -= factor * m[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in (row + 1)..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Fit by Newton iterations with step-halving; gradient-ascent fallback if
/// a Hessian solve fails. `_seed` is accepted for interface uniformity;
/// the optimiser is deterministic.
pub fn fit_multinomial(
    features: &[Vec<f64>],
    labels: &[usize],
    baseline: usize,
    ridge: f64,
    _seed: u64,
) -> Result<MultinomialModel> {
    let (model, _trace) = fit_multinomial_traced(features, labels, baseline, ridge)?;
    Ok(model)
}

/// Fitting core; also returns the penalised log-likelihood after each
/// accepted step.
pub(crate) fn fit_multinomial_traced(
    features: &[Vec<f64>],
    labels: &[usize],
    baseline: usize,
    ridge: f64,
) -> Result<(MultinomialModel, Vec<f64>)> {
    if features.is_empty() || features.len() != labels.len() {
        return Err(Error::LengthMismatch { left: features.len(), right: labels.len() });
    }
    if ridge < 0.0 {
        return Err(Error::InvalidConfig("ridge must be non-negative".into()));
    }
    let dim = features[0].len();
    if features.iter().any(|f| f.len() != dim) {
        return Err(Error::InvalidConfig("inconsistent feature dimensions".into()));
    }
    let classes = labels.iter().max().copied().unwrap_or(0) + 1;
    for class in 0..classes {
        if !labels.contains(&class) {
            return Err(Error::MissingClass { class });
        }
    }
    if baseline >= classes {
        return Err(Error::InvalidConfig(format!(
            "baseline class {baseline} out of range (J = {classes})"
        )));
    }
    if classes < 2 {
        return Err(Error::InvalidConfig("need at least two classes".into()));
    }

    let obj = Objective {
        features,
        labels,
        nonbase: (0..classes).filter(|&j| j != baseline).collect(),
        dim,
        classes,
        baseline,
        ridge,
    };

    let mut params = vec![0.0; obj.len()];
    let mut value = obj.value(&params);
    let mut trace = vec![value];
    let mut converged = false;
    let mut grad_norm = f64::INFINITY;
    let mut stalled = 0usize;

    for _ in 0..MAX_NEWTON_ITERATIONS {
        let grad = obj.gradient(&params);
        grad_norm = max_abs(&grad);
        if grad_norm <= GRADIENT_TOLERANCE {
            converged = true;
            break;
        }
        let mut direction = match solve(obj.hessian(&params), grad.iter().map(|g| -g).collect()) {
            Some(d) => d,
            None => {
                return ascent_fallback(obj, params, trace);
            }
        };
        let magnitude = max_abs(&direction);
        if magnitude > NEWTON_STEP_CAP {
            for d in &mut direction {
                *d *= NEWTON_STEP_CAP / magnitude;
            }
        }
        // Step-halving keeps the penalised log-likelihood non-decreasing.
        let mut stepped = false;
        let mut scale = 1.0;
        for _ in 0..60 {
            let candidate: Vec<f64> = params
                .iter()
                .zip(&direction)
                .map(|(p, d)| p + scale * d)
                .collect();
            let candidate_value = obj.value(&candidate);
            if candidate_value.is_finite() && candidate_value >= value {
                // Gains below f64 resolution of the objective mean the
                // optimiser is done even if the gradient tolerance is out
                // of numerical reach.
                if candidate_value - value < 1e-13 * (1.0 + value.abs()) {
                    stalled += 1;
                } else {
                    stalled = 0;
                }
                params = candidate;
                value = candidate_value;
                trace.push(value);
                stepped = true;
                break;
            }
            scale *= 0.5;
        }
        if !stepped || stalled >= 2 {
            break;
        }
    }

    if !converged {
        grad_norm = max_abs(&obj.gradient(&params));
        converged = grad_norm <= GRADIENT_TOLERANCE;
    }
    Ok((build_model(&obj, &params, converged, grad_norm), trace))
}

fn ascent_fallback(
    obj: Objective<'_>,
    mut params: Vec<f64>,
    mut trace: Vec<f64>,
) -> Result<(MultinomialModel, Vec<f64>)> {
    let mut value = obj.value(&params);
    let mut step = 1.0;
    for _ in 0..FALLBACK_ASCENT_STEPS {
        let grad = obj.gradient(&params);
        if max_abs(&grad) <= GRADIENT_TOLERANCE {
            break;
        }
        loop {
            let candidate: Vec<f64> =
                params.iter().zip(&grad).map(|(p, g)| p + step * g).collect();
            let candidate_value = obj.value(&candidate);
            if candidate_value.is_finite() && candidate_value > value {
                params = candidate;
                value = candidate_value;
                trace.push(value);
                step *= 1.2;
                break;
            }
            step *= 0.5;
            if step < 1e-14 {
                break;
            }
        }
        if step < 1e-14 {
            break;
        }
    }
    let grad_norm = max_abs(&obj.gradient(&params));
    let converged = grad_norm <= GRADIENT_TOLERANCE;
    Ok((build_model(&obj, &params, converged, grad_norm), trace))
}

fn build_model(obj: &Objective<'_>, params: &[f64], converged: bool, grad_norm: f64) -> MultinomialModel {
    let block = obj.block();
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    for k in 0..obj.nonbase.len() {
        let w = &params[k * block..(k + 1) * block];
        alphas.push(w[0]);
        betas.push(w[1..].to_vec());
    }
    MultinomialModel {
        baseline: obj.baseline,
        classes: obj.classes,
        alphas,
        betas,
        feature_spec: None,
        ridge: obj.ridge,
        converged,
        grad_norm,
    }
}

/// Penalised log-likelihood and its gradient at explicit coefficients,
/// using the same parameter layout as the fitter. Exposed for gradient
/// and oracle checks.
pub fn penalized_loglik_and_grad(
    features: &[Vec<f64>],
    labels: &[usize],
    classes: usize,
    baseline: usize,
    ridge: f64,
    params: &[f64],
) -> Result<(f64, Vec<f64>)> {
    if features.is_empty() || features.len() != labels.len() {
        return Err(Error::LengthMismatch { left: features.len(), right: labels.len() });
    }
    let dim = features[0].len();
    let obj = Objective {
        features,
        labels,
        nonbase: (0..classes).filter(|&j| j != baseline).collect(),
        dim,
        classes,
        baseline,
        ridge,
    };
    if params.len() != obj.len() {
        return Err(Error::DimensionMismatch { left: params.len(), right: obj.len() });
    }
    Ok((obj.value(params), obj.gradient(params)))
}

/// A classification cohort: one row per sampled user.
#[derive(Debug, Clone, PartialEq)]
pub struct Cohort {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub user_ids: Vec<String>,
    /// Trajectory prefix length the features were taken at.
    pub feature_n: usize,
}

/// Sample `per_class` users per final-label class and take their
/// polarization after `n` comments as the feature.
///
/// Eligibility requires a trajectory of at least `max(n, 100)` comments.
/// Selection depends on the seed but not on `n`, so sweeping `n` under one
/// seed keeps the same users.
pub fn build_cohort(
    records: &[UserRecord],
    n: usize,
    per_class: usize,
    seed: u64,
) -> Result<Cohort> {
    if n < 1 {
        return Err(Error::InvalidConfig("n must be at least 1".into()));
    }
    let min_len = n.max(MIN_COHORT_COMMENTS);
    let mut by_class: Vec<Vec<&UserRecord>> = vec![Vec::new(); 3];
    for r in records {
        if r.trajectory.len() >= min_len {
            by_class[r.label.class_index()].push(r);
        }
    }

    let mut cohort = Cohort {
        features: Vec::with_capacity(3 * per_class),
        labels: Vec::with_capacity(3 * per_class),
        user_ids: Vec::with_capacity(3 * per_class),
        feature_n: n,
    };
    for (class, candidates) in by_class.iter_mut().enumerate() {
        if candidates.len() < per_class {
            return Err(Error::InsufficientClass {
                class,
                needed: per_class,
                available: candidates.len(),
            });
        }
        let mut rng = substream(seed, "cohort", class as u64);
        candidates.partial_shuffle(&mut rng, per_class);
        for r in candidates.iter().take(per_class) {
            cohort.features.push(vec![r.trajectory[n - 1]]);
            cohort.labels.push(class);
            cohort.user_ids.push(r.user_id.clone());
        }
    }
    Ok(cohort)
}

/// Per-class one-vs-rest counts and measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: usize,
    pub true_positives: usize,
    pub true_negatives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionStats {
    pub per_class: Vec<ClassMetrics>,
    pub total: usize,
    pub correct: usize,
}

/// Evaluate argmax predictions against true labels.
pub fn evaluate(
    model: &MultinomialModel,
    features: &[Vec<f64>],
    labels: &[usize],
) -> Result<ConfusionStats> {
    if features.is_empty() || features.len() != labels.len() {
        return Err(Error::LengthMismatch { left: features.len(), right: labels.len() });
    }
    let predictions: Vec<usize> = features
        .iter()
        .map(|f| predict_class(model, f))
        .collect::<Result<_>>()?;

    let total = labels.len();
    let mut correct = 0usize;
    let mut per_class = Vec::with_capacity(model.classes);
    for class in 0..model.classes {
        let mut tp = 0usize;
        let mut tn = 0usize;
        let mut fp = 0usize;
        let mut fne = 0usize;
        for (&pred, &truth) in predictions.iter().zip(labels) {
            match (pred == class, truth == class) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fne += 1,
                (false, false) => tn += 1,
            }
        }
        let precision = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
        let recall = if tp + fne > 0 { tp as f64 / (tp + fne) as f64 } else { 0.0 };
        per_class.push(ClassMetrics {
            class,
            true_positives: tp,
            true_negatives: tn,
            false_positives: fp,
            false_negatives: fne,
            precision,
            recall,
            accuracy: (tp + tn) as f64 / total as f64,
        });
    }
    for (&pred, &truth) in predictions.iter().zip(labels) {
        if pred == truth {
            correct += 1;
        }
    }
    Ok(ConfusionStats { per_class, total, correct })
}

/// One row of an n-sweep table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub class: usize,
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
}

/// For each `n`: build the cohort, fit on it, evaluate in-sample.
/// Held-out assessment is [`monte_carlo_cv`]'s job.
pub fn n_sweep(
    records: &[UserRecord],
    n_values: &[usize],
    per_class: usize,
    ridge: f64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &n in n_values {
        let cohort = build_cohort(records, n, per_class, seed)?;
        let model = fit_multinomial(&cohort.features, &cohort.labels, 2, ridge, seed)?;
        let stats = evaluate(&model, &cohort.features, &cohort.labels)?;
        for m in stats.per_class {
            rows.push(SweepRow {
                n,
                class: m.class,
                precision: m.precision,
                recall: m.recall,
                accuracy: m.accuracy,
            });
        }
    }
    Ok(rows)
}

/// Mean and standard deviation of each measure for one class across
/// cross-validation iterations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvClassSummary {
    pub class: usize,
    pub precision_mean: f64,
    pub precision_sd: f64,
    pub recall_mean: f64,
    pub recall_sd: f64,
    pub accuracy_mean: f64,
    pub accuracy_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    pub per_class: Vec<CvClassSummary>,
    pub iterations: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub seed: u64,
    /// Splits redrawn because one side missed a class.
    pub resamples: usize,
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Monte-Carlo cross-validation: repeated disjoint train/test splits with
/// per-iteration refits, summarised per class and measure.
pub fn monte_carlo_cv(
    features: &[Vec<f64>],
    labels: &[usize],
    train_size: usize,
    test_size: usize,
    iterations: usize,
    ridge: f64,
    seed: u64,
) -> Result<CvSummary> {
    if features.len() != labels.len() {
        return Err(Error::LengthMismatch { left: features.len(), right: labels.len() });
    }
    if train_size + test_size > features.len() {
        return Err(Error::InvalidConfig(format!(
            "train {train_size} + test {test_size} exceeds {} examples",
            features.len()
        )));
    }
    if iterations < 2 {
        return Err(Error::InvalidConfig("need at least 2 iterations".into()));
    }
    let classes = labels.iter().max().copied().unwrap_or(0) + 1;

    let per_iteration: Vec<Result<(ConfusionStats, usize)>> = (0..iterations)
        .into_par_iter()
        .map(|iter| {
            let mut rng = substream(seed, "cv-split", iter as u64);
            let mut indices: Vec<usize> = (0..features.len()).collect();
            let mut resamples = 0usize;
            loop {
                indices.shuffle(&mut rng);
                let train = &indices[..train_size];
                let test = &indices[train_size..train_size + test_size];
                let covers = |slice: &[usize]| {
                    (0..classes).all(|c| slice.iter().any(|&i| labels[i] == c))
                };
                if covers(train) && covers(test) {
                    let train_x: Vec<Vec<f64>> = train.iter().map(|&i| features[i].clone()).collect();
                    let train_y: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
                    let test_x: Vec<Vec<f64>> = test.iter().map(|&i| features[i].clone()).collect();
                    let test_y: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
                    let model = fit_multinomial(&train_x, &train_y, classes - 1, ridge, seed)?;
                    return Ok((evaluate(&model, &test_x, &test_y)?, resamples));
                }
                resamples += 1;
                if resamples > 1000 {
                    return Err(Error::InvalidConfig(
                        "cannot draw a split covering every class".into(),
                    ));
                }
            }
        })
        .collect();

    let mut stats = Vec::with_capacity(iterations);
    let mut resamples = 0usize;
    for item in per_iteration {
        let (s, r) = item?;
        stats.push(s);
        resamples += r;
    }

    let mut per_class = Vec::with_capacity(classes);
    for class in 0..classes {
        let series = |f: &dyn Fn(&ClassMetrics) -> f64| -> Vec<f64> {
            stats.iter().map(|s| f(&s.per_class[class])).collect()
        };
        let (precision_mean, precision_sd) = mean_sd(&series(&|m| m.precision));
        let (recall_mean, recall_sd) = mean_sd(&series(&|m| m.recall));
        let (accuracy_mean, accuracy_sd) = mean_sd(&series(&|m| m.accuracy));
        per_class.push(CvClassSummary {
            class,
            precision_mean,
            precision_sd,
            recall_mean,
            recall_sd,
            accuracy_mean,
            accuracy_sd,
        });
    }
    Ok(CvSummary {
        per_class,
        iterations,
        train_size,
        test_size,
        seed,
        resamples,
    })
}

/// Fit the standard cohort model: scalar trajectory feature, conspiracy
/// class as the baseline.
pub fn fit_cohort(cohort: &Cohort, ridge: f64) -> Result<MultinomialModel> {
    let mut model = fit_multinomial(&cohort.features, &cohort.labels, 2, ridge, 0)?;
    model.feature_spec = Some(cohort.feature_n);
    Ok(model)
}

/// Fit on all of one cohort, evaluate on all of another built at the same
/// trajectory prefix.
pub fn transfer(train: &Cohort, test: &Cohort, ridge: f64) -> Result<ConfusionStats> {
    if train.feature_n != test.feature_n {
        return Err(Error::InvalidConfig(format!(
            "cohorts built at different n: {} vs {}",
            train.feature_n, test.feature_n
        )));
    }
    let model = fit_cohort(train, ridge)?;
    evaluate(&model, &test.features, &test.labels)
}

/// Write an n-sweep table as CSV (`n,class,precision,recall,accuracy`).
pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["n", "class", "precision", "recall", "accuracy"])?;
    for r in rows {
        w.write_record(&[
            r.n.to_string(),
            r.class.to_string(),
            r.precision.to_string(),
            r.recall.to_string(),
            r.accuracy.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
