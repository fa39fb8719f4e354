//! Least squares classification core: the closed-form ridge fit, decision and
//! prediction rules, the supervised / label-based / responsibility-based
//! objectives, and the two evaluation measures.

use serde::{Deserialize, Serialize};

use crate::encoding::{EncodedTargets, LabelEncoding};
use crate::error::{Error, Result};
use crate::matrix::{cholesky_solve, dot, FeatureMatrix};

/// Weights of the linear classifier, intercept coordinate last when present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Domain(format!(
                    "non-finite weight {v} at coordinate {i}"
                )));
            }
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Euclidean distance to another weight vector.
    pub fn distance(&self, other: &WeightVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Ridge regularization settings.
///
/// When `penalize_intercept` is false and the design matrix carries an
/// intercept column, that coordinate is excluded from the penalty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RidgeConfig {
    pub lambda: f64,
    pub penalize_intercept: bool,
}

impl Default for RidgeConfig {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            penalize_intercept: false,
        }
    }
}

impl RidgeConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(Error::Config(format!(
                "regularization strength must be a nonnegative real, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    /// Diagonal of the penalty matrix for a given design matrix.
    fn penalty_diag(&self, x: &FeatureMatrix) -> Vec<f64> {
        let mut d = vec![self.lambda; x.cols()];
        if !self.penalize_intercept && x.has_intercept_column() {
            if let Some(last) = d.last_mut() {
                *last = 0.0;
            }
        }
        d
    }
}

/// Per-object probabilities of membership in the class encoded `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Responsibilities(Vec<f64>);

impl Responsibilities {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (j, &q) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::Domain(format!(
                    "responsibility {q} at index {j} lies outside [0, 1]"
                )));
            }
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Returns the unique minimizer of `||Xw - t||^2 + lambda ||w_pen||^2`.
///
/// Solves the regularized normal equations by Cholesky factorization with a
/// single refinement pass. A singular normal matrix (e.g. `lambda = 0` with
/// rank-deficient `X`) is reported as an error, never pseudo-inverted.
pub fn fit_ridge(x: &FeatureMatrix, t: &EncodedTargets, cfg: &RidgeConfig) -> Result<WeightVector> {
    cfg.validate()?;
    if x.rows() != t.len() {
        return Err(Error::Shape(format!(
            "design matrix has {} rows but {} targets were given",
            x.rows(),
            t.len()
        )));
    }
    if x.cols() == 0 {
        return Err(Error::Shape("design matrix has no columns".into()));
    }
    let d = x.cols();
    let mut a = x.gram();
    let penalty = cfg.penalty_diag(x);
    for (j, &p) in penalty.iter().enumerate() {
        a[j * d + j] += p;
    }
    let b = x.t_vec(t.values())?;
    let context = format!(
        "{} rows, {} columns, lambda = {}",
        x.rows(),
        d,
        cfg.lambda
    );
    let mut w = cholesky_solve(&a, &b, &context)?;

    // one refinement pass tightens first-order stationarity
    let mut residual = b.clone();
    for i in 0..d {
        residual[i] -= dot(&a[i * d..(i + 1) * d], &w);
    }
    let delta = cholesky_solve(&a, &residual, &context)?;
    for (wi, di) in w.iter_mut().zip(&delta) {
        *wi += di;
    }
    WeightVector::new(w)
}

/// Linear scores `X w`, one per row of `X`.
pub fn decision_values(w: &WeightVector, x: &FeatureMatrix) -> Result<Vec<f64>> {
    x.mat_vec(w.values())
}

/// Classifies each row by the nearest class code; an exact tie at the
/// midpoint resolves to the class encoded `m`.
pub fn predict(
    w: &WeightVector,
    x: &FeatureMatrix,
    encoding: LabelEncoding,
) -> Result<EncodedTargets> {
    let d = decision_values(w, x)?;
    Ok(EncodedTargets::new(
        d.iter().map(|&v| classify_value(v, encoding)).collect(),
    ))
}

/// Nearest-code rule for a single decision value.
pub fn classify_value(value: f64, encoding: LabelEncoding) -> f64 {
    let dm = (value - encoding.m()).abs();
    let dn = (value - encoding.n()).abs();
    if dn < dm {
        encoding.n()
    } else {
        encoding.m()
    }
}

fn penalty_term(w: &WeightVector, x: &FeatureMatrix, cfg: &RidgeConfig) -> Result<f64> {
    if w.len() != x.cols() {
        return Err(Error::Shape(format!(
            "weights have {} coordinates but the matrix has {} columns",
            w.len(),
            x.cols()
        )));
    }
    let penalty = cfg.penalty_diag(x);
    Ok(w.values()
        .iter()
        .zip(&penalty)
        .map(|(wi, p)| p * wi * wi)
        .sum())
}

fn residual_sum_of_squares(w: &WeightVector, x: &FeatureMatrix, t: &[f64]) -> Result<f64> {
    if x.rows() != t.len() {
        return Err(Error::Shape(format!(
            "matrix has {} rows but {} targets were given",
            x.rows(),
            t.len()
        )));
    }
    let scores = x.mat_vec(w.values())?;
    Ok(scores
        .iter()
        .zip(t)
        .map(|(s, y)| (s - y) * (s - y))
        .sum())
}

/// Supervised objective: `||X w - y||^2 + lambda ||w_pen||^2`.
pub fn objective_supervised(
    w: &WeightVector,
    x_lab: &FeatureMatrix,
    y: &EncodedTargets,
    cfg: &RidgeConfig,
) -> Result<f64> {
    cfg.validate()?;
    Ok(residual_sum_of_squares(w, x_lab, y.values())? + penalty_term(w, x_lab, cfg)?)
}

/// Label-based objective: the supervised objective on the stacked design
/// matrix with targets `[y; u]`, where `u` are imputed labels.
pub fn objective_label_based(
    w: &WeightVector,
    u: &EncodedTargets,
    x_lab: &FeatureMatrix,
    y: &EncodedTargets,
    x_unl: &FeatureMatrix,
    cfg: &RidgeConfig,
) -> Result<f64> {
    if u.len() != x_unl.rows() {
        return Err(Error::Shape(format!(
            "{} imputed labels for {} unlabeled rows",
            u.len(),
            x_unl.rows()
        )));
    }
    Ok(objective_supervised(w, x_lab, y, cfg)? + residual_sum_of_squares(w, x_unl, u.values())?)
}

/// Responsibility-based objective: the supervised objective plus, per
/// unlabeled object, `q (x'w - m)^2 + (1 - q)(x'w - n)^2`.
pub fn objective_responsibility(
    w: &WeightVector,
    q: &Responsibilities,
    x_lab: &FeatureMatrix,
    y: &EncodedTargets,
    x_unl: &FeatureMatrix,
    encoding: LabelEncoding,
    cfg: &RidgeConfig,
) -> Result<f64> {
    if q.len() != x_unl.rows() {
        return Err(Error::Shape(format!(
            "{} responsibilities for {} unlabeled rows",
            q.len(),
            x_unl.rows()
        )));
    }
    let supervised = objective_supervised(w, x_lab, y, cfg)?;
    let scores = x_unl.mat_vec(w.values())?;
    let (m, n) = (encoding.m(), encoding.n());
    let unlabeled: f64 = scores
        .iter()
        .zip(q.values())
        .map(|(s, qj)| qj * (s - m) * (s - m) + (1.0 - qj) * (s - n) * (s - n))
        .sum();
    Ok(supervised + unlabeled)
}

/// Fraction of mismatched labels.
pub fn error_rate(predicted: &EncodedTargets, truth: &EncodedTargets) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::Shape(format!(
            "{} predictions against {} true labels",
            predicted.len(),
            truth.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::Domain("error rate of an empty label set".into()));
    }
    let mismatches = predicted
        .values()
        .iter()
        .zip(truth.values())
        .filter(|(p, t)| p != t)
        .count();
    Ok(mismatches as f64 / predicted.len() as f64)
}

/// Mean squared residual on a test set; excludes the penalty term.
pub fn average_quadratic_loss(
    w: &WeightVector,
    x_test: &FeatureMatrix,
    y_test: &EncodedTargets,
) -> Result<f64> {
    if x_test.rows() == 0 {
        return Err(Error::Domain(
            "average quadratic loss over an empty test set".into(),
        ));
    }
    Ok(residual_sum_of_squares(w, x_test, y_test.values())? / x_test.rows() as f64)
}
