//! Semi-supervised least squares classification.
//!
//! Two adaptations of the supervised least squares classifier to the
//! semi-supervised setting, both optimized by block coordinate descent:
//!
//! * soft-label self-learning, which treats the missing labels as a
//!   continuous block of pseudo-targets constrained to the encoding
//!   interval, and
//! * hard-label self-learning, which assigns each unlabeled object a 0/1
//!   class responsibility.
//!
//! On top of the optimizers sit dataset generators and splitters, a
//! random-restart enumerator of the optimizers' fixed points, and a
//! deterministic experiment harness producing long-format results tables.

pub mod config;
pub mod data;
pub mod encoding;
pub mod harness;
pub mod error;
pub mod matrix;
pub mod model;
pub mod selflearn;
pub mod seeding;

pub use data::{
    default_1d_example, generate_1d_example, generate_two_gaussians, load_csv, make_fraction_split,
    make_split, save_csv, Dataset, ExperimentSplit, GaussianConfig,
};
pub use encoding::{encode_labels, ClassMap, EncodedTargets, LabelEncoding};
pub use harness::{
    evaluate_classifiers, read_results_csv, run_fit, run_fraction_curve, run_minima_job,
    run_seed_sweep, run_unlabeled_curve, summarize, write_results_csv, write_summary_csv,
    write_sweep_csv, ClassifierKind, ClassifierSpec, CurveConfig, DatasetRef, FitJobConfig,
    FitOutput, FractionCurveConfig, GroupKey, Measure, MeasureOutcome, MinimaJobConfig,
    ResultRow, ResultsTable, SizeRole, SummaryRow, SweepConfig, SweepRow, DEFAULT_GROUP_KEYS,
};
pub use error::{Error, ErrorCategory, Result};
pub use matrix::FeatureMatrix;
pub use model::{
    average_quadratic_loss, decision_values, error_rate, fit_ridge, objective_label_based,
    objective_responsibility, objective_supervised, predict, Responsibilities, RidgeConfig,
    WeightVector,
};
pub use selflearn::{
    enumerate_local_minima, hard_responsibility_update, responsibilities_to_targets, run_bcd,
    run_bcd_from, soft_label_update, BcdConfig, BcdInit, DedupConfig, FitResult, LocalMinimum,
    MinimaReport, Variant,
};
