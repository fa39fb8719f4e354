//! Block coordinate descent for the two semi-supervised objectives.
//!
//! Both procedures alternate an exact closed-form update of the pseudo-label
//! block with a ridge refit of the weights on the stacked design matrix:
//!
//! * soft-label: the label-based objective is minimized over the imputed
//!   labels `u` under the box constraint `u_j in [lo, hi]`, which makes the
//!   update a clamp of the decision values to the encoding interval;
//! * hard-label: the responsibility-based objective is linear in each `q_j`,
//!   so the exact update assigns each unlabeled object entirely to the
//!   nearest class code. The resulting iteration is ordinary hard-label
//!   self-training.
//!
//! Without the box constraint the soft variant would be trivial: `u_j =
//! x_j'w` zeroes every unlabeled residual and any supervised solution is
//! immediately stationary.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::{EncodedTargets, LabelEncoding};
use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;
use crate::model::{
    decision_values, fit_ridge, objective_label_based, objective_responsibility,
    Responsibilities, RidgeConfig, WeightVector,
};
use crate::seeding;

/// Absolute slack allowed on the descent trace before an iteration is
/// declared non-monotone (an internal invariant violation).
pub const MONOTONE_SLACK: f64 = 1e-10;

/// Which semi-supervised objective to optimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Label-based objective over `(w, u)`.
    SoftLabel,
    /// Responsibility-based objective over `(w, q)`.
    HardLabel,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::SoftLabel => "soft_label",
            Variant::HardLabel => "hard_label",
        }
    }
}

/// Stopping rule and ridge settings for block coordinate descent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcdConfig {
    pub max_iterations: usize,
    /// Convergence threshold on the per-iteration objective decrease,
    /// relative to `max(1, |previous objective|)`.
    pub objective_tolerance: f64,
    pub ridge: RidgeConfig,
}

impl Default for BcdConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            objective_tolerance: 1e-8,
            ridge: RidgeConfig::default(),
        }
    }
}

impl BcdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if !self.objective_tolerance.is_finite() || self.objective_tolerance < 0.0 {
            return Err(Error::Config(format!(
                "objective_tolerance must be a nonnegative real, got {}",
                self.objective_tolerance
            )));
        }
        self.ridge.validate()
    }
}

/// Converged weights plus the descent trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub weights: WeightVector,
    /// Final pseudo-target block: `u` for the soft variant, `t(q)` for hard.
    pub pseudo_targets: EncodedTargets,
    /// Objective value after each completed iteration; non-increasing.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl FitResult {
    pub fn final_objective(&self) -> f64 {
        *self.objective_trace.last().expect("at least one iteration")
    }
}

/// Initialization of the descent.
#[derive(Debug, Clone)]
pub enum BcdInit {
    /// Start from the supervised fit; iteration 1 is the first
    /// self-learning step.
    Supervised,
    /// Start from given imputed labels (soft variant only).
    SoftTargets(EncodedTargets),
    /// Start from given responsibilities (hard variant only).
    HardResponsibilities(Responsibilities),
}

/// Exact minimizer of the label-based objective over `u` for fixed `w`:
/// each decision value clamped to the encoding interval.
pub fn soft_label_update(
    w: &WeightVector,
    x_unl: &FeatureMatrix,
    encoding: LabelEncoding,
) -> Result<EncodedTargets> {
    let scores = decision_values(w, x_unl)?;
    let (lo, hi) = (encoding.lo(), encoding.hi());
    Ok(EncodedTargets::new(
        scores.iter().map(|s| s.clamp(lo, hi)).collect(),
    ))
}

/// Exact minimizer of the responsibility-based objective over `q` for fixed
/// `w`: all mass on the nearer class code, ties to the class encoded `m`.
pub fn hard_responsibility_update(
    w: &WeightVector,
    x_unl: &FeatureMatrix,
    encoding: LabelEncoding,
) -> Result<Responsibilities> {
    let scores = decision_values(w, x_unl)?;
    let (m, n) = (encoding.m(), encoding.n());
    let q = scores
        .iter()
        .map(|s| {
            let dm = (s - m) * (s - m);
            let dn = (s - n) * (s - n);
            if dn < dm {
                0.0
            } else {
                1.0
            }
        })
        .collect();
    Responsibilities::new(q)
}

/// Targets implied by responsibilities: `t_j = q_j m + (1 - q_j) n`.
pub fn responsibilities_to_targets(
    q: &Responsibilities,
    encoding: LabelEncoding,
) -> EncodedTargets {
    let (m, n) = (encoding.m(), encoding.n());
    EncodedTargets::new(q.values().iter().map(|qj| qj * m + (1.0 - qj) * n).collect())
}

#[derive(Clone, PartialEq)]
enum PseudoBlock {
    Soft(Vec<f64>),
    Hard(Vec<f64>),
}

impl PseudoBlock {
    fn targets(&self, encoding: LabelEncoding) -> EncodedTargets {
        match self {
            PseudoBlock::Soft(u) => EncodedTargets::new(u.clone()),
            PseudoBlock::Hard(q) => {
                let (m, n) = (encoding.m(), encoding.n());
                EncodedTargets::new(q.iter().map(|qj| qj * m + (1.0 - qj) * n).collect())
            }
        }
    }
}

fn update_block(
    variant: Variant,
    w: &WeightVector,
    x_unl: &FeatureMatrix,
    encoding: LabelEncoding,
) -> Result<PseudoBlock> {
    match variant {
        Variant::SoftLabel => Ok(PseudoBlock::Soft(
            soft_label_update(w, x_unl, encoding)?.into_vec(),
        )),
        Variant::HardLabel => Ok(PseudoBlock::Hard(
            hard_responsibility_update(w, x_unl, encoding)?
                .values()
                .to_vec(),
        )),
    }
}

fn block_objective(
    w: &WeightVector,
    pseudo: &PseudoBlock,
    x_lab: &FeatureMatrix,
    y: &EncodedTargets,
    x_unl: &FeatureMatrix,
    encoding: LabelEncoding,
    ridge: &RidgeConfig,
) -> Result<f64> {
    match pseudo {
        PseudoBlock::Soft(u) => objective_label_based(
            w,
            &EncodedTargets::new(u.clone()),
            x_lab,
            y,
            x_unl,
            ridge,
        ),
        PseudoBlock::Hard(q) => objective_responsibility(
            w,
            &Responsibilities::new(q.clone())?,
            x_lab,
            y,
            x_unl,
            encoding,
            ridge,
        ),
    }
}

/// Runs block coordinate descent from the supervised fit.
pub fn run_bcd(
    variant: Variant,
    x_lab: &FeatureMatrix,
    y: &EncodedTargets,
    x_unl: &FeatureMatrix,
    encoding: LabelEncoding,
    cfg: &BcdConfig,
) -> Result<FitResult> {
    run_bcd_from(variant, BcdInit::Supervised, x_lab, y, x_unl, encoding, cfg)
}

/// Runs block coordinate descent from an explicit initialization.
///
/// Each iteration performs the exact pseudo-target update for the current
/// weights (skipped on the first iteration when starting from given
/// pseudo-targets), refits the weights on the stacked design matrix, and
/// records the objective. The descent stops when the relative objective
/// decrease falls to `objective_tolerance`, when the hard variant's discrete
/// block repeats exactly, or at `max_iterations`.
pub fn run_bcd_from(
    variant: Variant,
    init: BcdInit,
    x_lab: &FeatureMatrix,
    y: &EncodedTargets,
    x_unl: &FeatureMatrix,
    encoding: LabelEncoding,
    cfg: &BcdConfig,
) -> Result<FitResult> {
    cfg.validate()?;
    if x_lab.rows() == 0 {
        return Err(Error::Domain("no labeled objects".into()));
    }
    if x_lab.rows() != y.len() {
        return Err(Error::Shape(format!(
            "{} labeled rows but {} targets",
            x_lab.rows(),
            y.len()
        )));
    }
    let x_stacked = x_lab.vstack(x_unl)?;

    // Iteration 1 state: the pseudo block to refit against, plus the
    // objective at the pre-refit weights when those exist.
    let (mut pseudo, mut prev_objective) = match init {
        BcdInit::Supervised => {
            let w0 = fit_ridge(x_lab, y, &cfg.ridge)?;
            let p = update_block(variant, &w0, x_unl, encoding)?;
            let j_pre = block_objective(&w0, &p, x_lab, y, x_unl, encoding, &cfg.ridge)?;
            (p, Some(j_pre))
        }
        BcdInit::SoftTargets(u) => {
            if variant != Variant::SoftLabel {
                return Err(Error::Config(
                    "soft pseudo-target initialization given to the hard-label variant".into(),
                ));
            }
            if u.len() != x_unl.rows() {
                return Err(Error::Shape(format!(
                    "{} initial pseudo-targets for {} unlabeled rows",
                    u.len(),
                    x_unl.rows()
                )));
            }
            for (j, &v) in u.values().iter().enumerate() {
                if !(encoding.lo()..=encoding.hi()).contains(&v) {
                    return Err(Error::Domain(format!(
                        "initial pseudo-target {v} at index {j} outside [{}, {}]",
                        encoding.lo(),
                        encoding.hi()
                    )));
                }
            }
            (PseudoBlock::Soft(u.into_vec()), None)
        }
        BcdInit::HardResponsibilities(q) => {
            if variant != Variant::HardLabel {
                return Err(Error::Config(
                    "responsibility initialization given to the soft-label variant".into(),
                ));
            }
            if q.len() != x_unl.rows() {
                return Err(Error::Shape(format!(
                    "{} initial responsibilities for {} unlabeled rows",
                    q.len(),
                    x_unl.rows()
                )));
            }
            (PseudoBlock::Hard(q.values().to_vec()), None)
        }
    };

    let mut trace: Vec<f64> = Vec::new();
    let mut weights: Option<WeightVector> = None;
    let mut converged = false;
    let mut iterations = 0;

    for k in 1..=cfg.max_iterations {
        iterations = k;
        if k > 1 {
            let w = weights.as_ref().expect("weights set after iteration 1");
            let next = update_block(variant, w, x_unl, encoding)?;
            if variant == Variant::HardLabel && next == pseudo {
                // The discrete block repeats, so the refit would reproduce
                // the same weights and objective exactly; record the
                // zero-decrease step and stop.
                trace.push(*trace.last().expect("trace nonempty after iteration 1"));
                converged = true;
                break;
            }
            pseudo = next;
        }

        let targets = stack_targets(y, &pseudo.targets(encoding));
        let w = fit_ridge(&x_stacked, &targets, &cfg.ridge)?;
        let objective = block_objective(&w, &pseudo, x_lab, y, x_unl, encoding, &cfg.ridge)?;
        weights = Some(w);

        if let Some(last) = trace.last() {
            if objective > last + MONOTONE_SLACK {
                return Err(Error::Internal(format!(
                    "objective increased from {last} to {objective} at iteration {k}"
                )));
            }
        }
        trace.push(objective);

        if let Some(prev) = prev_objective {
            let decrease = prev - objective;
            if decrease <= cfg.objective_tolerance * prev.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        prev_objective = Some(objective);
    }

    let weights = weights.expect("max_iterations >= 1 guarantees one refit");
    Ok(FitResult {
        pseudo_targets: pseudo.targets(encoding),
        weights,
        objective_trace: trace,
        iterations,
        converged,
    })
}

fn stack_targets(y: &EncodedTargets, pseudo: &EncodedTargets) -> EncodedTargets {
    let mut t = y.values().to_vec();
    t.extend_from_slice(pseudo.values());
    EncodedTargets::new(t)
}

/// Deduplication thresholds for distinct local minima: objective values are
/// compared relative to `max(1, |objective|)`, weights by Euclidean distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DedupConfig {
    pub objective_rel: f64,
    pub weight_dist: f64,
}

impl Default for DedupConfig {
    fn default() -> Self {
        Self {
            objective_rel: 1e-6,
            weight_dist: 1e-4,
        }
    }
}

/// One deduplicated descent fixed point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalMinimum {
    pub weights: WeightVector,
    pub objective: f64,
    /// Number of runs (restarts plus the supervised-initialized run) that
    /// ended in this minimum.
    pub basin_count: usize,
}

/// Outcome of a random-restart sweep over descent initializations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaReport {
    pub variant: Variant,
    /// Distinct minima sorted by objective value, then weights.
    pub distinct_minima: Vec<LocalMinimum>,
    /// Random restarts requested; one supervised-initialized run is added,
    /// so basin counts sum to `n_restarts + 1` when every run converges.
    pub n_restarts: usize,
    pub total_runs: usize,
    pub unconverged_runs: usize,
    pub dedup: DedupConfig,
    pub seed: u64,
}

impl MinimaReport {
    pub fn distinct_count(&self) -> usize {
        self.distinct_minima.len()
    }
}

/// Runs descent from `n_restarts` random pseudo-target initializations plus
/// one supervised initialization and groups the converged solutions into
/// distinct minima.
///
/// Restart `i` draws from an RNG stream derived from `(seed, i)`, so the
/// report is identical however the runs are scheduled. Random soft starts
/// draw `u_j` uniformly on the encoding interval; hard starts draw each
/// `q_j` as a fair coin.
pub fn enumerate_local_minima(
    variant: Variant,
    x_lab: &FeatureMatrix,
    y: &EncodedTargets,
    x_unl: &FeatureMatrix,
    encoding: LabelEncoding,
    cfg: &BcdConfig,
    n_restarts: usize,
    dedup: DedupConfig,
    seed: u64,
) -> Result<MinimaReport> {
    if n_restarts < 1 {
        return Err(Error::Config("n_restarts must be at least 1".into()));
    }
    if !(dedup.objective_rel >= 0.0 && dedup.weight_dist >= 0.0) {
        return Err(Error::Config(
            "deduplication tolerances must be nonnegative".into(),
        ));
    }

    let inits: Vec<BcdInit> = std::iter::once(BcdInit::Supervised)
        .chain(
            (0..n_restarts as u64)
                .map(|i| random_init(variant, x_unl.rows(), encoding, seed, i)),
        )
        .collect();

    use rayon::prelude::*;
    let runs: Vec<FitResult> = inits
        .into_par_iter()
        .enumerate()
        .map(|(run_index, init)| {
            run_bcd_from(variant, init, x_lab, y, x_unl, encoding, cfg).map_err(|e| {
                Error::Internal(format!("restart {run_index}: {e}"))
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let total_runs = runs.len();
    let unconverged_runs = runs.iter().filter(|r| !r.converged).count();

    // Order-normalize before grouping so the report is schedule-independent.
    let mut outcomes: Vec<(f64, WeightVector)> = runs
        .into_iter()
        .filter(|r| r.converged)
        .map(|r| (r.final_objective(), r.weights))
        .collect();
    outcomes.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("objectives are finite")
            .then_with(|| lex_cmp(a.1.values(), b.1.values()))
    });

    let mut minima: Vec<LocalMinimum> = Vec::new();
    for (objective, weights) in outcomes {
        let existing = minima.iter_mut().find(|min| {
            (objective - min.objective).abs() <= dedup.objective_rel * min.objective.abs().max(1.0)
                && weights.distance(&min.weights) <= dedup.weight_dist
        });
        match existing {
            Some(min) => min.basin_count += 1,
            None => minima.push(LocalMinimum {
                weights,
                objective,
                basin_count: 1,
            }),
        }
    }

    Ok(MinimaReport {
        variant,
        distinct_minima: minima,
        n_restarts,
        total_runs,
        unconverged_runs,
        dedup,
        seed,
    })
}

fn random_init(variant: Variant, n_unlabeled: usize, encoding: LabelEncoding, seed: u64, restart: u64) -> BcdInit {
    let mut rng = seeding::stream_rng(seed, &[restart, seeding::tag("restart")]);
    match variant {
        Variant::SoftLabel => {
            let (lo, hi) = (encoding.lo(), encoding.hi());
            let u = (0..n_unlabeled)
                .map(|_| rng.random_range(lo..=hi))
                .collect();
            BcdInit::SoftTargets(EncodedTargets::new(u))
        }
        Variant::HardLabel => {
            let q = (0..n_unlabeled)
                .map(|_| if rng.random::<bool>() { 1.0 } else { 0.0 })
                .collect();
            BcdInit::HardResponsibilities(
                Responsibilities::new(q).expect("coin flips are in range"),
            )
        }
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).expect("weights are finite") {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn enc() -> LabelEncoding {
        LabelEncoding::default()
    }

    /// Two labeled points at -1 and +1 with an intercept column; the
    /// supervised least squares fit is the identity line.
    fn line_setup(unlabeled: &[f64]) -> (FeatureMatrix, EncodedTargets, FeatureMatrix) {
        let x_lab = FeatureMatrix::from_rows(&[vec![-1.0], vec![1.0]])
            .unwrap()
            .with_intercept()
            .unwrap();
        let y = EncodedTargets::new(vec![-1.0, 1.0]);
        let rows: Vec<Vec<f64>> = unlabeled.iter().map(|&v| vec![v]).collect();
        let x_unl = FeatureMatrix::from_rows(&rows)
            .unwrap()
            .with_intercept()
            .unwrap();
        (x_lab, y, x_unl)
    }

    #[test]
    fn soft_update_clamps_to_encoding_interval() {
        let w = WeightVector::new(vec![1.0, 0.0]).unwrap();
        let (_, _, x_unl) = line_setup(&[-1.0, 0.5]);
        let u = soft_label_update(&w, &x_unl, enc()).unwrap();
        assert_eq!(u.values(), &[-1.0, 0.5]);

        let (_, _, far) = line_setup(&[4.0, -3.0]);
        let u = soft_label_update(&w, &far, enc()).unwrap();
        assert_eq!(u.values(), &[1.0, -1.0]);
    }

    #[test]
    fn hard_update_assigns_nearest_code_with_tie_to_m() {
        let w = WeightVector::new(vec![1.0, 0.0]).unwrap();
        let (_, _, x_unl) = line_setup(&[0.3, 0.0, -0.4]);
        let q = hard_responsibility_update(&w, &x_unl, enc()).unwrap();
        assert_eq!(q.values(), &[0.0, 1.0, 1.0]);
    }

    #[test]
    fn responsibilities_map_to_interval_targets() {
        let q = Responsibilities::new(vec![1.0, 0.0, 0.5]).unwrap();
        let t = responsibilities_to_targets(&q, enc());
        assert_eq!(t.values(), &[-1.0, 1.0, 0.0]);
    }

    #[test]
    fn interior_unlabeled_objects_leave_the_fit_unchanged() {
        let (x_lab, y, x_unl) = line_setup(&[-1.0, 0.5]);
        let cfg = BcdConfig::default();
        let supervised = fit_ridge(&x_lab, &y, &cfg.ridge).unwrap();
        let fit = run_bcd(Variant::SoftLabel, &x_lab, &y, &x_unl, enc(), &cfg).unwrap();
        assert!(fit.converged);
        assert_eq!(fit.iterations, 1);
        for (a, b) in fit.weights.values().iter().zip(supervised.values()) {
            assert_relative_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn exterior_unlabeled_object_moves_the_fit() {
        let (x_lab, y, x_unl) = line_setup(&[-1.0, 4.0]);
        let cfg = BcdConfig::default();
        let supervised = fit_ridge(&x_lab, &y, &cfg.ridge).unwrap();
        let fit = run_bcd(Variant::SoftLabel, &x_lab, &y, &x_unl, enc(), &cfg).unwrap();
        assert!(fit.converged);
        let dist = fit.weights.distance(&supervised);
        assert!(dist > 1e-3, "expected a weight update, distance {dist}");
    }

    #[test]
    fn no_unlabeled_data_returns_supervised_fit_in_one_iteration() {
        for variant in [Variant::SoftLabel, Variant::HardLabel] {
            let (x_lab, y, _) = line_setup(&[]);
            let x_unl = FeatureMatrix::empty(2, true);
            let cfg = BcdConfig::default();
            let supervised = fit_ridge(&x_lab, &y, &cfg.ridge).unwrap();
            let fit = run_bcd(variant, &x_lab, &y, &x_unl, enc(), &cfg).unwrap();
            assert!(fit.converged);
            assert_eq!(fit.iterations, 1);
            assert_eq!(fit.weights, supervised);
            assert!(fit.pseudo_targets.is_empty());
        }
    }

    #[test]
    fn trace_is_recorded_and_non_increasing() {
        let (x_lab, y, x_unl) = line_setup(&[-1.0, 4.0, 2.5, -0.2]);
        for variant in [Variant::SoftLabel, Variant::HardLabel] {
            let fit = run_bcd(variant, &x_lab, &y, &x_unl, enc(), &BcdConfig::default()).unwrap();
            assert_eq!(fit.objective_trace.len(), fit.iterations);
            for pair in fit.objective_trace.windows(2) {
                assert!(pair[1] <= pair[0] + MONOTONE_SLACK);
            }
        }
    }

    #[test]
    fn mismatched_init_is_a_config_error() {
        let (x_lab, y, x_unl) = line_setup(&[0.5]);
        let init = BcdInit::SoftTargets(EncodedTargets::new(vec![0.0]));
        let err = run_bcd_from(
            Variant::HardLabel,
            init,
            &x_lab,
            &y,
            &x_unl,
            enc(),
            &BcdConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn out_of_interval_soft_init_is_a_domain_error() {
        let (x_lab, y, x_unl) = line_setup(&[0.5]);
        let init = BcdInit::SoftTargets(EncodedTargets::new(vec![2.0]));
        let err = run_bcd_from(
            Variant::SoftLabel,
            init,
            &x_lab,
            &y,
            &x_unl,
            enc(),
            &BcdConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn minima_bookkeeping_for_a_single_restart() {
        let (x_lab, y, x_unl) = line_setup(&[-1.0, 0.5]);
        let report = enumerate_local_minima(
            Variant::SoftLabel,
            &x_lab,
            &y,
            &x_unl,
            enc(),
            &BcdConfig::default(),
            1,
            DedupConfig::default(),
            7,
        )
        .unwrap();
        assert_eq!(report.total_runs, 2);
        assert_eq!(report.unconverged_runs, 0);
        let basin_sum: usize = report.distinct_minima.iter().map(|m| m.basin_count).sum();
        assert_eq!(basin_sum, 2);
        assert!(report.distinct_count() == 1 || report.distinct_count() == 2);
    }

    #[test]
    fn minima_report_is_deterministic() {
        let (x_lab, y, x_unl) = line_setup(&[-1.0, 4.0, 0.3, 2.0]);
        let run = || {
            enumerate_local_minima(
                Variant::HardLabel,
                &x_lab,
                &y,
                &x_unl,
                enc(),
                &BcdConfig::default(),
                12,
                DedupConfig::default(),
                99,
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn minima_report_serializes_weights_as_arrays() {
        let (x_lab, y, x_unl) = line_setup(&[0.5]);
        let report = enumerate_local_minima(
            Variant::SoftLabel,
            &x_lab,
            &y,
            &x_unl,
            enc(),
            &BcdConfig::default(),
            1,
            DedupConfig::default(),
            1,
        )
        .unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert!(json["distinct_minima"][0]["weights"].is_array());
        assert_eq!(json["variant"], "soft_label");
    }
}
