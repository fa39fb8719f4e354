//! Experiment protocols: paired classifier evaluation on shared splits,
//! unlabeled-count and labeled-fraction learning curves, seed sweeps,
//! long-format results tables and their aggregation.
//!
//! Every protocol is deterministic given its config: repeats own RNG streams
//! derived from the master seed, run concurrently or not, and rows are
//! sorted by key before anything is persisted. Both measures are always
//! computed while the fits are at hand; measure selection only filters the
//! emitted rows.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{
    generate_two_gaussians, load_csv, make_fraction_family, make_unlabeled_family, Dataset,
    ExperimentSplit, GaussianConfig,
};
use crate::encoding::{ClassMap, EncodedTargets, LabelEncoding};
use crate::error::{Error, Result};
use crate::model::{
    average_quadratic_loss, error_rate, fit_ridge, predict, RidgeConfig, WeightVector,
};
use crate::selflearn::{run_bcd, BcdConfig, Variant};
use crate::seeding;

/// Test-set quantities recorded per fitted classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Measure {
    Error,
    AverageLossTest,
}

pub const ALL_MEASURES: [Measure; 2] = [Measure::Error, Measure::AverageLossTest];

impl Measure {
    pub fn name(&self) -> &'static str {
        match self {
            Measure::Error => "Error",
            Measure::AverageLossTest => "AverageLossTest",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "Error" => Ok(Measure::Error),
            "AverageLossTest" => Ok(Measure::AverageLossTest),
            other => Err(Error::Config(format!(
                "unknown measure {other:?}; expected Error or AverageLossTest"
            ))),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which classifier to fit on a split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Supervised,
    SelfLearningSoft,
    SelfLearningHard,
    /// Supervised least squares on labeled ∪ unlabeled using the true
    /// labels of the unlabeled block; the upper-reference baseline.
    Oracle,
}

impl ClassifierKind {
    pub fn name(&self) -> &'static str {
        match self {
            ClassifierKind::Supervised => "supervised",
            ClassifierKind::SelfLearningSoft => "self_learning_soft",
            ClassifierKind::SelfLearningHard => "self_learning_hard",
            ClassifierKind::Oracle => "oracle",
        }
    }
}

/// A classifier plus its fitting configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    pub ridge: RidgeConfig,
    /// Descent settings; used by the self-learning kinds only.
    pub bcd: Option<BcdConfig>,
}

impl ClassifierSpec {
    pub fn supervised(ridge: RidgeConfig) -> Self {
        Self {
            kind: ClassifierKind::Supervised,
            ridge,
            bcd: None,
        }
    }

    pub fn oracle(ridge: RidgeConfig) -> Self {
        Self {
            kind: ClassifierKind::Oracle,
            ridge,
            bcd: None,
        }
    }

    pub fn soft(bcd: BcdConfig) -> Self {
        Self {
            kind: ClassifierKind::SelfLearningSoft,
            ridge: bcd.ridge,
            bcd: Some(bcd),
        }
    }

    pub fn hard(bcd: BcdConfig) -> Self {
        Self {
            kind: ClassifierKind::SelfLearningHard,
            ridge: bcd.ridge,
            bcd: Some(bcd),
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    fn effective_bcd(&self) -> BcdConfig {
        self.bcd.unwrap_or(BcdConfig {
            ridge: self.ridge,
            ..BcdConfig::default()
        })
    }

    /// Fits this classifier on the split and returns its weights.
    pub fn fit(&self, split: &ExperimentSplit) -> Result<WeightVector> {
        let (x_lab, y) = &split.labeled;
        match self.kind {
            ClassifierKind::Supervised => fit_ridge(x_lab, y, &self.ridge),
            ClassifierKind::Oracle => {
                let x_all = x_lab.vstack(&split.unlabeled)?;
                let mut t = y.values().to_vec();
                t.extend_from_slice(split.unlabeled_truth.values());
                fit_ridge(&x_all, &EncodedTargets::new(t), &self.ridge)
            }
            ClassifierKind::SelfLearningSoft => Ok(run_bcd(
                Variant::SoftLabel,
                x_lab,
                y,
                &split.unlabeled,
                split.encoding,
                &self.effective_bcd(),
            )?
            .weights),
            ClassifierKind::SelfLearningHard => Ok(run_bcd(
                Variant::HardLabel,
                x_lab,
                y,
                &split.unlabeled,
                split.encoding,
                &self.effective_bcd(),
            )?
            .weights),
        }
    }
}

/// The full roster fitted by the curve protocols.
pub fn default_roster(ridge: RidgeConfig, bcd: BcdConfig) -> Vec<ClassifierSpec> {
    vec![
        ClassifierSpec::supervised(ridge),
        ClassifierSpec::soft(bcd),
        ClassifierSpec::hard(bcd),
        ClassifierSpec::oracle(ridge),
    ]
}

/// A measured value, or the tag of the error that prevented it. Failed fits
/// become tagged missing values so one bad repeat cannot abort a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MeasureOutcome {
    Value(f64),
    Failed(String),
}

impl MeasureOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            MeasureOutcome::Value(v) => Some(*v),
            MeasureOutcome::Failed(_) => None,
        }
    }
}

fn failure_tag(e: &Error) -> String {
    let tag = match e {
        Error::Config(_) => "config",
        Error::Data(_) => "data",
        Error::Encoding(_) => "encoding",
        Error::Shape(_) => "shape",
        Error::Domain(_) => "domain",
        Error::RankDeficient(_) => "rank_deficiency",
        Error::Internal(_) => "internal",
        Error::Io(_) => "io",
    };
    tag.to_string()
}

/// Role of the size parameter in a results row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeRole {
    NUnlabeled,
    LabeledFraction,
}

impl SizeRole {
    pub fn name(&self) -> &'static str {
        match self {
            SizeRole::NUnlabeled => "n_unlabeled",
            SizeRole::LabeledFraction => "labeled_fraction",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "n_unlabeled" => Ok(SizeRole::NUnlabeled),
            "labeled_fraction" => Ok(SizeRole::LabeledFraction),
            other => Err(Error::Data(format!("unknown size role {other:?}"))),
        }
    }
}

/// One long-format experiment record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub dataset: String,
    pub classifier: String,
    pub repeat_index: usize,
    pub size_role: SizeRole,
    pub size: f64,
    pub measure: Measure,
    pub value: MeasureOutcome,
    /// Fingerprint of the split all roster members shared for this row.
    pub split_fingerprint: u64,
}

impl ResultRow {
    fn key(&self) -> (String, String, usize, SizeRole, OrdF64, Measure) {
        (
            self.dataset.clone(),
            self.classifier.clone(),
            self.repeat_index,
            self.size_role,
            OrdF64(self.size),
            self.measure,
        )
    }
}

/// Total order on finite f64 sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);
impl Eq for OrdF64 {}
impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.partial_cmp(&other.0).expect("sizes are finite")
    }
}

/// Long-format results, unique per
/// `(dataset, classifier, repeat, size_role, size, measure)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ResultsTable {
    pub rows: Vec<ResultRow>,
}

impl ResultsTable {
    pub fn new(mut rows: Vec<ResultRow>) -> Result<Self> {
        rows.sort_by_key(ResultRow::key);
        for pair in rows.windows(2) {
            if pair[0].key() == pair[1].key() {
                return Err(Error::Internal(format!(
                    "duplicate results key: {} / {} / repeat {} / {} {} / {}",
                    pair[0].dataset,
                    pair[0].classifier,
                    pair[0].repeat_index,
                    pair[0].size_role.name(),
                    pair[0].size,
                    pair[0].measure
                )));
            }
        }
        let table = Self { rows };
        table.validate_ranges()?;
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn validate_ranges(&self) -> Result<()> {
        for row in &self.rows {
            if let MeasureOutcome::Value(v) = row.value {
                let ok = match row.measure {
                    Measure::Error => (0.0..=1.0).contains(&v),
                    Measure::AverageLossTest => v >= 0.0 && v.is_finite(),
                };
                if !ok {
                    return Err(Error::Internal(format!(
                        "{} value {v} out of range for {}/{}",
                        row.measure, row.dataset, row.classifier
                    )));
                }
            }
        }
        Ok(())
    }

    /// Rows for one classifier and measure, keyed by size.
    pub fn series(&self, classifier: &str, measure: Measure) -> Vec<(f64, Option<f64>)> {
        self.rows
            .iter()
            .filter(|r| r.classifier == classifier && r.measure == measure)
            .map(|r| (r.size, r.value.value()))
            .collect()
    }
}

const RESULTS_HEADER: &str = "dataset,classifier,repeat,size_role,size,measure,value";

fn format_value(v: &MeasureOutcome) -> String {
    match v {
        MeasureOutcome::Value(x) => format!("{x:.16e}"),
        MeasureOutcome::Failed(tag) => format!("NA({tag})"),
    }
}

fn format_size(role: SizeRole, size: f64) -> String {
    match role {
        SizeRole::NUnlabeled => format!("{}", size as u64),
        SizeRole::LabeledFraction => format!("{size}"),
    }
}

/// Writes the table sorted by key; measured values carry 17 significant
/// digits so a read round-trips bit-exactly.
pub fn write_results_csv(table: &ResultsTable, path: impl AsRef<Path>) -> Result<()> {
    let mut table = table.clone();
    table.rows.sort_by_key(ResultRow::key);
    table.validate_ranges()?;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path.as_ref())?);
    writeln!(out, "{RESULTS_HEADER}")?;
    for r in &table.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.dataset,
            r.classifier,
            r.repeat_index,
            r.size_role.name(),
            format_size(r.size_role, r.size),
            r.measure.name(),
            format_value(&r.value)
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_results_csv(path: impl AsRef<Path>) -> Result<ResultsTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    let reader = std::io::BufReader::new(file);
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Data(format!("line {line_no}: {e}")))?;
        if idx == 0 {
            if line != RESULTS_HEADER {
                return Err(Error::Data(format!(
                    "line 1: expected header {RESULTS_HEADER:?}, got {line:?}"
                )));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Data(format!(
                "line {line_no}: expected 7 fields, got {}",
                fields.len()
            )));
        }
        let repeat_index: usize = fields[2]
            .parse()
            .map_err(|_| Error::Data(format!("line {line_no}: bad repeat {:?}", fields[2])))?;
        let size_role = SizeRole::parse(fields[3])
            .map_err(|e| Error::Data(format!("line {line_no}: {e}")))?;
        let size: f64 = fields[4]
            .parse()
            .map_err(|_| Error::Data(format!("line {line_no}: bad size {:?}", fields[4])))?;
        let measure = Measure::parse(fields[5])
            .map_err(|e| Error::Data(format!("line {line_no}: {e}")))?;
        let value = if let Some(tag) = fields[6]
            .strip_prefix("NA(")
            .and_then(|s| s.strip_suffix(')'))
        {
            MeasureOutcome::Failed(tag.to_string())
        } else {
            MeasureOutcome::Value(fields[6].parse().map_err(|_| {
                Error::Data(format!("line {line_no}: bad value {:?}", fields[6]))
            })?)
        };
        rows.push(ResultRow {
            dataset: fields[0].to_string(),
            classifier: fields[1].to_string(),
            repeat_index,
            size_role,
            size,
            measure,
            value,
            split_fingerprint: 0,
        });
    }
    // fingerprints are not persisted; keys must still be unique
    let mut table = ResultsTable { rows };
    table.rows.sort_by_key(ResultRow::key);
    table.validate_ranges()?;
    Ok(table)
}

/// Fits every roster member on the identical split and computes the
/// requested measures on its test block. A failed fit yields tagged missing
/// values instead of aborting.
pub fn evaluate_classifiers(
    split: &ExperimentSplit,
    roster: &[ClassifierSpec],
    measures: &[Measure],
) -> Result<Vec<(ClassifierSpec, Measure, MeasureOutcome)>> {
    if roster.is_empty() {
        return Err(Error::Config("classifier roster is empty".into()));
    }
    let names: BTreeSet<&str> = roster.iter().map(|s| s.name()).collect();
    if names.len() != roster.len() {
        return Err(Error::Config(
            "classifier roster contains duplicate kinds".into(),
        ));
    }
    let mut out = Vec::with_capacity(roster.len() * measures.len());
    for spec in roster {
        let fitted = spec.fit(split);
        for &measure in measures {
            let outcome = match &fitted {
                Err(e) => MeasureOutcome::Failed(failure_tag(e)),
                Ok(w) => match compute_measure(measure, w, split) {
                    Ok(v) => MeasureOutcome::Value(v),
                    Err(e) => MeasureOutcome::Failed(failure_tag(&e)),
                },
            };
            out.push((spec.clone(), measure, outcome));
        }
    }
    Ok(out)
}

fn compute_measure(measure: Measure, w: &WeightVector, split: &ExperimentSplit) -> Result<f64> {
    let (x_test, y_test) = &split.test;
    match measure {
        Measure::Error => {
            let predicted = predict(w, x_test, split.encoding)?;
            error_rate(&predicted, y_test)
        }
        Measure::AverageLossTest => average_quadratic_loss(w, x_test, y_test),
    }
}

/// Where the experiment data comes from: a synthetic generator URI or a CSV
/// file on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DatasetRef {
    Builtin {
        gaussian: GaussianConfig,
        /// Rows per materialized dataset; when absent, protocols that can
        /// derive the minimum size do so.
        n: Option<usize>,
        /// When set, one fixed dataset is shared by all repeats; otherwise
        /// each repeat draws a fresh dataset from its own seed stream.
        seed: Option<u64>,
    },
    Csv {
        path: String,
        label_column: String,
        class_map: Option<ClassMap>,
    },
}

impl DatasetRef {
    /// Parses `builtin:gaussians?d=2&sep=2&prior=0.5[&n=..][&seed=..]` or
    /// treats the string as a CSV path (label column defaults to `label`).
    pub fn parse(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("builtin:") {
            let (kind, query) = match rest.split_once('?') {
                Some((k, q)) => (k, q),
                None => (rest, ""),
            };
            if kind != "gaussians" {
                return Err(Error::Config(format!(
                    "unknown builtin dataset {kind:?}; available: gaussians"
                )));
            }
            let mut gaussian = GaussianConfig::default();
            let mut n = None;
            let mut seed = None;
            for pair in query.split('&').filter(|p| !p.is_empty()) {
                let (key, value) = pair.split_once('=').ok_or_else(|| {
                    Error::Config(format!("malformed dataset parameter {pair:?}"))
                })?;
                fn bad(key: &str, value: &str) -> Error {
                    Error::Config(format!("bad value for dataset parameter {key}={value}"))
                }
                match key {
                    "d" => gaussian.d = value.parse().map_err(|_| bad(key, value))?,
                    "sep" => {
                        gaussian.mean_separation = value.parse().map_err(|_| bad(key, value))?
                    }
                    "prior" => gaussian.class_prior = value.parse().map_err(|_| bad(key, value))?,
                    "n" => n = Some(value.parse().map_err(|_| bad(key, value))?),
                    "seed" => seed = Some(value.parse().map_err(|_| bad(key, value))?),
                    other => {
                        return Err(Error::Config(format!(
                            "unknown dataset parameter {other:?} (known: d, sep, prior, n, seed)"
                        )))
                    }
                }
            }
            gaussian.validate()?;
            Ok(DatasetRef::Builtin { gaussian, n, seed })
        } else {
            Ok(DatasetRef::Csv {
                path: s.to_string(),
                label_column: "label".to_string(),
                class_map: None,
            })
        }
    }

    pub fn display_string(&self) -> String {
        match self {
            DatasetRef::Builtin { gaussian, n, seed } => {
                let mut s = format!(
                    "builtin:gaussians?d={}&sep={}&prior={}",
                    gaussian.d, gaussian.mean_separation, gaussian.class_prior
                );
                if let Some(n) = n {
                    s.push_str(&format!("&n={n}"));
                }
                if let Some(seed) = seed {
                    s.push_str(&format!("&seed={seed}"));
                }
                s
            }
            DatasetRef::Csv { path, .. } => path.clone(),
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            DatasetRef::Builtin { gaussian, .. } => Some(gaussian.d),
            DatasetRef::Csv { .. } => None,
        }
    }

    /// Materializes the dataset shared by all repeats, when the reference
    /// pins one (CSV file, or builtin with an explicit seed).
    fn resolve_shared(&self, min_rows: Option<usize>) -> Result<Option<Dataset>> {
        match self {
            DatasetRef::Csv {
                path,
                label_column,
                class_map,
            } => Ok(Some(load_csv(path, label_column, class_map.clone())?)),
            DatasetRef::Builtin { gaussian, seed, .. } => match seed {
                Some(s) => {
                    let rows = self.rows_per_draw(min_rows)?;
                    Ok(Some(generate_two_gaussians(gaussian, rows, *s)?))
                }
                None => {
                    self.rows_per_draw(min_rows)?; // validate now, not mid-run
                    Ok(None)
                }
            },
        }
    }

    fn rows_per_draw(&self, min_rows: Option<usize>) -> Result<usize> {
        match self {
            DatasetRef::Builtin { n, .. } => n.or(min_rows).ok_or_else(|| {
                Error::Config(
                    "builtin dataset needs an explicit n for this protocol (builtin:gaussians?...&n=...)"
                        .into(),
                )
            }),
            DatasetRef::Csv { .. } => Err(Error::Config(
                "rows_per_draw applies to builtin datasets only".into(),
            )),
        }
    }

    /// Dataset for one repeat: the shared one, or a fresh draw from the
    /// repeat's seed stream.
    fn for_repeat<'a>(
        &self,
        shared: &'a Option<Dataset>,
        min_rows: Option<usize>,
        master_seed: u64,
        repeat: usize,
    ) -> Result<std::borrow::Cow<'a, Dataset>> {
        if let Some(ds) = shared {
            return Ok(std::borrow::Cow::Borrowed(ds));
        }
        match self {
            DatasetRef::Builtin { gaussian, .. } => {
                let rows = self.rows_per_draw(min_rows)?;
                let seed = seeding::derive_seed(
                    master_seed,
                    &[repeat as u64, seeding::tag("dataset")],
                );
                Ok(std::borrow::Cow::Owned(generate_two_gaussians(
                    gaussian, rows, seed,
                )?))
            }
            DatasetRef::Csv { .. } => unreachable!("csv datasets are always shared"),
        }
    }
}

fn validate_measures(measures: &[Measure]) -> Result<()> {
    if measures.is_empty() {
        return Err(Error::Config("at least one measure is required".into()));
    }
    let set: BTreeSet<Measure> = measures.iter().copied().collect();
    if set.len() != measures.len() {
        return Err(Error::Config("duplicate measures requested".into()));
    }
    Ok(())
}

fn validate_labeled_count(l: usize, dim: Option<usize>, ridge: &RidgeConfig) -> Result<()> {
    if ridge.lambda == 0.0 {
        if let Some(d) = dim {
            if l <= d {
                return Err(Error::Config(format!(
                    "with lambda = 0 the labeled count must exceed the data dimension; got l = {l}, d = {d}"
                )));
            }
        }
    }
    Ok(())
}

/// Unlabeled-count learning-curve protocol: the labeled count stays fixed
/// while the unlabeled count walks a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveConfig {
    pub dataset: DatasetRef,
    pub encoding: LabelEncoding,
    pub l_fixed: usize,
    pub u_grid: Vec<usize>,
    pub test_size: usize,
    pub repeats: usize,
    pub master_seed: u64,
    pub measures: Vec<Measure>,
    pub standardize: bool,
    pub ridge: RidgeConfig,
    pub bcd: BcdConfig,
}

impl CurveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repeats < 1 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if self.u_grid.is_empty() || self.u_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "u_grid must be nonempty and strictly increasing".into(),
            ));
        }
        if self.test_size < 1 {
            return Err(Error::Config("test_size must be at least 1".into()));
        }
        validate_measures(&self.measures)?;
        validate_labeled_count(self.l_fixed, self.dataset.dim(), &self.ridge)?;
        self.ridge.validate()?;
        self.bcd.validate()
    }

    fn min_rows(&self) -> usize {
        self.l_fixed + self.u_grid.iter().max().copied().unwrap_or(0) + self.test_size
    }
}

/// Labeled-fraction learning-curve protocol: a fixed test holdout, with the
/// labeled share of the remaining rows walking a fraction grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionCurveConfig {
    pub dataset: DatasetRef,
    pub encoding: LabelEncoding,
    pub fractions: Vec<f64>,
    pub test_fraction: f64,
    pub repeats: usize,
    pub master_seed: u64,
    pub measures: Vec<Measure>,
    pub standardize: bool,
    pub ridge: RidgeConfig,
    pub bcd: BcdConfig,
}

impl FractionCurveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repeats < 1 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if self.fractions.is_empty()
            || self.fractions.windows(2).any(|w| w[0] >= w[1])
            || self.fractions.iter().any(|&f| !(f > 0.0 && f <= 1.0))
        {
            return Err(Error::Config(
                "fractions must be nonempty, strictly increasing and inside (0, 1]".into(),
            ));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!(
                "test fraction must lie strictly inside (0, 1), got {}",
                self.test_fraction
            )));
        }
        validate_measures(&self.measures)?;
        self.ridge.validate()?;
        self.bcd.validate()
    }
}

fn curve_rows_for_repeat(
    splits: &[(f64, SizeRole, ExperimentSplit)],
    roster: &[ClassifierSpec],
    dataset_name: &str,
    repeat: usize,
) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for (size, role, split) in splits {
        let outcomes = evaluate_classifiers(split, roster, &ALL_MEASURES)?;
        let fingerprint = split.fingerprint();
        for (spec, measure, value) in outcomes {
            rows.push(ResultRow {
                dataset: dataset_name.to_string(),
                classifier: spec.name().to_string(),
                repeat_index: repeat,
                size_role: *role,
                size: *size,
                measure,
                value,
                split_fingerprint: fingerprint,
            });
        }
    }
    Ok(rows)
}

fn filter_measures(rows: Vec<ResultRow>, measures: &[Measure]) -> Vec<ResultRow> {
    rows.into_iter()
        .filter(|r| measures.contains(&r.measure))
        .collect()
}

/// Runs the unlabeled-count protocol. Within a repeat the labeled and test
/// blocks are identical across the whole grid and the unlabeled sets are
/// nested, so a curve isolates the effect of added unlabeled data.
pub fn run_unlabeled_curve(cfg: &CurveConfig) -> Result<ResultsTable> {
    cfg.validate()?;
    let min_rows = Some(cfg.min_rows());
    let shared = cfg.dataset.resolve_shared(min_rows)?;
    if let Some(ds) = &shared {
        validate_labeled_count(cfg.l_fixed, Some(ds.dim()), &cfg.ridge)?;
    }
    let roster = default_roster(cfg.ridge, cfg.bcd);

    let per_repeat: Vec<Vec<ResultRow>> = (0..cfg.repeats)
        .into_par_iter()
        .map(|repeat| {
            let with_repeat = |e: Error| Error::Internal(format!("repeat {repeat}: {e}"));
            let ds = cfg
                .dataset
                .for_repeat(&shared, min_rows, cfg.master_seed, repeat)
                .map_err(with_repeat)?;
            let split_seed =
                seeding::derive_seed(cfg.master_seed, &[repeat as u64, seeding::tag("split")]);
            let family = make_unlabeled_family(
                &ds,
                cfg.l_fixed,
                &cfg.u_grid,
                cfg.test_size,
                cfg.encoding,
                cfg.standardize,
                split_seed,
            )
            .map_err(with_repeat)?;
            let splits: Vec<(f64, SizeRole, ExperimentSplit)> = family
                .into_iter()
                .map(|(u, s)| (u as f64, SizeRole::NUnlabeled, s))
                .collect();
            curve_rows_for_repeat(&splits, &roster, ds.name(), repeat).map_err(with_repeat)
        })
        .collect::<Result<_>>()?;

    let rows = filter_measures(per_repeat.into_iter().flatten().collect(), &cfg.measures);
    ResultsTable::new(rows)
}

/// Runs the labeled-fraction protocol: one test holdout per repeat, nested
/// labeled sets across increasing fractions.
pub fn run_fraction_curve(cfg: &FractionCurveConfig) -> Result<ResultsTable> {
    cfg.validate()?;
    let shared = cfg.dataset.resolve_shared(None)?;
    let roster = default_roster(cfg.ridge, cfg.bcd);

    let per_repeat: Vec<Vec<ResultRow>> = (0..cfg.repeats)
        .into_par_iter()
        .map(|repeat| {
            let with_repeat = |e: Error| Error::Internal(format!("repeat {repeat}: {e}"));
            let ds = cfg
                .dataset
                .for_repeat(&shared, None, cfg.master_seed, repeat)
                .map_err(with_repeat)?;
            let split_seed =
                seeding::derive_seed(cfg.master_seed, &[repeat as u64, seeding::tag("split")]);
            let family = make_fraction_family(
                &ds,
                cfg.test_fraction,
                &cfg.fractions,
                cfg.encoding,
                cfg.standardize,
                split_seed,
            )
            .map_err(with_repeat)?;
            let splits: Vec<(f64, SizeRole, ExperimentSplit)> = family
                .into_iter()
                .map(|(f, s)| (f, SizeRole::LabeledFraction, s))
                .collect();
            curve_rows_for_repeat(&splits, &roster, ds.name(), repeat).map_err(with_repeat)
        })
        .collect::<Result<_>>()?;

    let rows = filter_measures(per_repeat.into_iter().flatten().collect(), &cfg.measures);
    ResultsTable::new(rows)
}

/// Seed-sweep protocol settings: one generated dataset and one split per
/// seed, with supervised / soft / hard fitted on each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub gaussian: GaussianConfig,
    pub l: usize,
    pub u: usize,
    pub t: usize,
    pub encoding: LabelEncoding,
    pub standardize: bool,
    pub ridge: RidgeConfig,
    pub bcd: BcdConfig,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.gaussian.validate()?;
        if self.l + self.u + self.t > self.gaussian.n_per_draw {
            return Err(Error::Config(format!(
                "sweep needs l + u + t = {} rows but n_per_draw is {}",
                self.l + self.u + self.t,
                self.gaussian.n_per_draw
            )));
        }
        if self.t < 1 {
            return Err(Error::Config("sweep needs a nonempty test block".into()));
        }
        validate_labeled_count(self.l, Some(self.gaussian.d), &self.ridge)?;
        self.ridge.validate()?;
        self.bcd.validate()
    }
}

/// Per-seed, per-classifier sweep record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub seed: u64,
    pub classifier: String,
    pub test_error: MeasureOutcome,
    /// True when every test prediction landed in the same class.
    pub single_class: bool,
}

/// Generates a dataset per seed, fits supervised / soft / hard on one split
/// of it, and records each classifier's test error and whether it collapsed
/// to a single class.
pub fn run_seed_sweep(cfg: &SweepConfig, seeds: &[u64]) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    if seeds.is_empty() {
        return Err(Error::Config("seed list is empty".into()));
    }
    let roster = vec![
        ClassifierSpec::supervised(cfg.ridge),
        ClassifierSpec::soft(cfg.bcd),
        ClassifierSpec::hard(cfg.bcd),
    ];

    let per_seed: Vec<Vec<SweepRow>> = seeds
        .par_iter()
        .map(|&seed| {
            let with_seed = |e: Error| Error::Internal(format!("seed {seed}: {e}"));
            let ds = generate_two_gaussians(&cfg.gaussian, cfg.gaussian.n_per_draw, seed)
                .map_err(with_seed)?;
            let split_seed = seeding::derive_seed(seed, &[seeding::tag("sweep_split")]);
            let split = crate::data::make_split(
                &ds,
                cfg.l,
                cfg.u,
                cfg.t,
                cfg.encoding,
                cfg.standardize,
                split_seed,
            )
            .map_err(with_seed)?;
            let mut rows = Vec::with_capacity(roster.len());
            for spec in &roster {
                let (test_error, single_class) = match spec.fit(&split) {
                    Err(e) => (MeasureOutcome::Failed(failure_tag(&e)), false),
                    Ok(w) => {
                        let predicted = predict(&w, &split.test.0, split.encoding)
                            .map_err(with_seed)?;
                        let single = predicted
                            .values()
                            .windows(2)
                            .all(|p| p[0] == p[1]);
                        match error_rate(&predicted, &split.test.1) {
                            Err(e) => (MeasureOutcome::Failed(failure_tag(&e)), single),
                            Ok(v) => (MeasureOutcome::Value(v), single),
                        }
                    }
                };
                rows.push(SweepRow {
                    seed,
                    classifier: spec.name().to_string(),
                    test_error,
                    single_class,
                });
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;

    Ok(per_seed.into_iter().flatten().collect())
}

const SWEEP_HEADER: &str = "seed,classifier,error,single_class";

pub fn write_sweep_csv(rows: &[SweepRow], path: impl AsRef<Path>) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path.as_ref())?);
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.seed,
            r.classifier,
            format_value(&r.test_error),
            r.single_class
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Settings for a local-minima enumeration on one drawn split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaJobConfig {
    pub dataset: DatasetRef,
    pub encoding: LabelEncoding,
    pub l: usize,
    pub u: usize,
    pub t: usize,
    pub standardize: bool,
    pub variants: Vec<Variant>,
    pub restarts: usize,
    pub dedup: crate::selflearn::DedupConfig,
    pub seed: u64,
    pub ridge: RidgeConfig,
    pub bcd: BcdConfig,
}

impl MinimaJobConfig {
    pub fn validate(&self) -> Result<()> {
        if self.variants.is_empty() {
            return Err(Error::Config("at least one variant is required".into()));
        }
        if self.restarts < 1 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        validate_labeled_count(self.l, self.dataset.dim(), &self.ridge)?;
        self.ridge.validate()?;
        self.bcd.validate()
    }
}

/// Draws one split from the dataset reference and enumerates descent fixed
/// points for each requested variant.
pub fn run_minima_job(
    cfg: &MinimaJobConfig,
) -> Result<Vec<(Variant, crate::selflearn::MinimaReport)>> {
    cfg.validate()?;
    let min_rows = Some(cfg.l + cfg.u + cfg.t);
    let shared = cfg.dataset.resolve_shared(min_rows)?;
    let ds = cfg.dataset.for_repeat(&shared, min_rows, cfg.seed, 0)?;
    let split_seed = seeding::derive_seed(cfg.seed, &[seeding::tag("split")]);
    let split = crate::data::make_split(
        &ds,
        cfg.l,
        cfg.u,
        cfg.t,
        cfg.encoding,
        cfg.standardize,
        split_seed,
    )?;
    cfg.variants
        .iter()
        .map(|&variant| {
            let report = crate::selflearn::enumerate_local_minima(
                variant,
                &split.labeled.0,
                &split.labeled.1,
                &split.unlabeled,
                split.encoding,
                &cfg.bcd,
                cfg.restarts,
                cfg.dedup,
                cfg.seed,
            )?;
            Ok((variant, report))
        })
        .collect()
}

/// Settings for a single fit of one classifier on one drawn split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitJobConfig {
    pub dataset: DatasetRef,
    pub encoding: LabelEncoding,
    pub classifier: ClassifierKind,
    pub l: usize,
    pub u: usize,
    pub t: usize,
    pub standardize: bool,
    pub master_seed: u64,
    pub ridge: RidgeConfig,
    pub bcd: BcdConfig,
}

/// Fit summary printed by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOutput {
    pub classifier: String,
    pub weights: WeightVector,
    pub iterations: usize,
    pub objective: f64,
    pub converged: bool,
    pub test_error: f64,
    pub test_average_loss: f64,
    pub n_labeled: usize,
    pub n_unlabeled: usize,
    pub n_test: usize,
}

/// Draws one split and fits one classifier on it, reporting the optimizer
/// trace tail and both test measures.
pub fn run_fit(cfg: &FitJobConfig) -> Result<FitOutput> {
    cfg.ridge.validate()?;
    cfg.bcd.validate()?;
    validate_labeled_count(cfg.l, cfg.dataset.dim(), &cfg.ridge)?;
    let min_rows = Some(cfg.l + cfg.u + cfg.t);
    let shared = cfg.dataset.resolve_shared(min_rows)?;
    let ds = cfg
        .dataset
        .for_repeat(&shared, min_rows, cfg.master_seed, 0)?;
    let split_seed = seeding::derive_seed(cfg.master_seed, &[seeding::tag("split")]);
    let split = crate::data::make_split(
        &ds,
        cfg.l,
        cfg.u,
        cfg.t,
        cfg.encoding,
        cfg.standardize,
        split_seed,
    )?;

    let (x_lab, y) = &split.labeled;
    let (weights, iterations, objective, converged) = match cfg.classifier {
        ClassifierKind::Supervised => {
            let w = fit_ridge(x_lab, y, &cfg.ridge)?;
            let obj = crate::model::objective_supervised(&w, x_lab, y, &cfg.ridge)?;
            (w, 1, obj, true)
        }
        ClassifierKind::Oracle => {
            let x_all = x_lab.vstack(&split.unlabeled)?;
            let mut t = y.values().to_vec();
            t.extend_from_slice(split.unlabeled_truth.values());
            let t = EncodedTargets::new(t);
            let w = fit_ridge(&x_all, &t, &cfg.ridge)?;
            let obj = crate::model::objective_supervised(&w, &x_all, &t, &cfg.ridge)?;
            (w, 1, obj, true)
        }
        ClassifierKind::SelfLearningSoft | ClassifierKind::SelfLearningHard => {
            let variant = if cfg.classifier == ClassifierKind::SelfLearningSoft {
                Variant::SoftLabel
            } else {
                Variant::HardLabel
            };
            let bcd = BcdConfig {
                ridge: cfg.ridge,
                ..cfg.bcd
            };
            let fit = run_bcd(variant, x_lab, y, &split.unlabeled, split.encoding, &bcd)?;
            let obj = fit.final_objective();
            (fit.weights, fit.iterations, obj, fit.converged)
        }
    };

    let predicted = predict(&weights, &split.test.0, split.encoding)?;
    let test_error = error_rate(&predicted, &split.test.1)?;
    let test_average_loss = average_quadratic_loss(&weights, &split.test.0, &split.test.1)?;
    Ok(FitOutput {
        classifier: cfg.classifier.name().to_string(),
        weights,
        iterations,
        objective,
        converged,
        test_error,
        test_average_loss,
        n_labeled: split.n_labeled(),
        n_unlabeled: split.n_unlabeled(),
        n_test: split.n_test(),
    })
}

/// Fields a summary may group by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKey {
    Dataset,
    Classifier,
    Repeat,
    SizeRole,
    Size,
    Measure,
}

impl GroupKey {
    pub fn name(&self) -> &'static str {
        match self {
            GroupKey::Dataset => "dataset",
            GroupKey::Classifier => "classifier",
            GroupKey::Repeat => "repeat",
            GroupKey::SizeRole => "size_role",
            GroupKey::Size => "size",
            GroupKey::Measure => "measure",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "dataset" => Ok(GroupKey::Dataset),
            "classifier" => Ok(GroupKey::Classifier),
            "repeat" => Ok(GroupKey::Repeat),
            "size_role" => Ok(GroupKey::SizeRole),
            "size" => Ok(GroupKey::Size),
            "measure" => Ok(GroupKey::Measure),
            other => Err(Error::Config(format!(
                "unknown group key {other:?} (known: dataset, classifier, repeat, size_role, size, measure)"
            ))),
        }
    }
}

/// The default grouping: everything except the repeat index.
pub const DEFAULT_GROUP_KEYS: [GroupKey; 5] = [
    GroupKey::Dataset,
    GroupKey::Classifier,
    GroupKey::SizeRole,
    GroupKey::Size,
    GroupKey::Measure,
];

/// Mean / standard deviation / effective count for one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    /// Key values in the order of the requested group keys.
    pub keys: Vec<String>,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

/// Aggregates measured values per group: mean, sample standard deviation
/// (n-1 denominator; reported as 0 for singleton groups) and the effective
/// count, which excludes failed rows.
pub fn summarize(table: &ResultsTable, group_keys: &[GroupKey]) -> Result<Vec<SummaryRow>> {
    if table.is_empty() {
        return Err(Error::Data("cannot summarize an empty table".into()));
    }
    if group_keys.is_empty() {
        return Err(Error::Config("at least one group key is required".into()));
    }
    let mut seen = BTreeSet::new();
    for k in group_keys {
        if !seen.insert(k.name()) {
            return Err(Error::Config(format!("duplicate group key {}", k.name())));
        }
    }

    let typed_key = |row: &ResultRow| -> (String, String, usize, String, OrdF64, String) {
        let mut key = (
            String::new(),
            String::new(),
            0usize,
            String::new(),
            OrdF64(0.0),
            String::new(),
        );
        for k in group_keys {
            match k {
                GroupKey::Dataset => key.0 = row.dataset.clone(),
                GroupKey::Classifier => key.1 = row.classifier.clone(),
                GroupKey::Repeat => key.2 = row.repeat_index,
                GroupKey::SizeRole => key.3 = row.size_role.name().to_string(),
                GroupKey::Size => key.4 = OrdF64(row.size),
                GroupKey::Measure => key.5 = row.measure.name().to_string(),
            }
        }
        key
    };
    let display_key = |row: &ResultRow| -> Vec<String> {
        group_keys
            .iter()
            .map(|k| match k {
                GroupKey::Dataset => row.dataset.clone(),
                GroupKey::Classifier => row.classifier.clone(),
                GroupKey::Repeat => row.repeat_index.to_string(),
                GroupKey::SizeRole => row.size_role.name().to_string(),
                GroupKey::Size => format_size(row.size_role, row.size),
                GroupKey::Measure => row.measure.name().to_string(),
            })
            .collect()
    };

    let mut groups: std::collections::BTreeMap<
        (String, String, usize, String, OrdF64, String),
        (Vec<String>, Vec<f64>),
    > = Default::default();
    for row in &table.rows {
        let entry = groups
            .entry(typed_key(row))
            .or_insert_with(|| (display_key(row), Vec::new()));
        if let MeasureOutcome::Value(v) = row.value {
            entry.1.push(v);
        }
    }

    let mut out = Vec::with_capacity(groups.len());
    for (_, (keys, values)) in groups {
        if values.is_empty() {
            continue; // every row in the group failed
        }
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let std = if count > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1) as f64)
                .sqrt()
        } else {
            0.0
        };
        out.push(SummaryRow {
            keys,
            mean,
            std,
            count,
        });
    }
    Ok(out)
}

pub fn write_summary_csv(
    rows: &[SummaryRow],
    group_keys: &[GroupKey],
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path.as_ref())?);
    let header: Vec<&str> = group_keys
        .iter()
        .map(GroupKey::name)
        .chain(["mean", "std", "count"])
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for r in rows {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{}",
            r.keys.join(","),
            r.mean,
            r.std,
            r.count
        )?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_curve_cfg() -> CurveConfig {
        CurveConfig {
            dataset: DatasetRef::parse("builtin:gaussians?d=2&sep=2&prior=0.5").unwrap(),
            encoding: LabelEncoding::default(),
            l_fixed: 10,
            u_grid: vec![0, 8],
            test_size: 30,
            repeats: 2,
            master_seed: 42,
            measures: vec![Measure::Error, Measure::AverageLossTest],
            standardize: false,
            ridge: RidgeConfig::default(),
            bcd: BcdConfig::default(),
        }
    }

    #[test]
    fn measure_and_role_names_round_trip() {
        for m in ALL_MEASURES {
            assert_eq!(Measure::parse(m.name()).unwrap(), m);
        }
        for r in [SizeRole::NUnlabeled, SizeRole::LabeledFraction] {
            assert_eq!(SizeRole::parse(r.name()).unwrap(), r);
        }
        assert!(Measure::parse("error").is_err());
    }

    #[test]
    fn dataset_ref_parsing() {
        let r = DatasetRef::parse("builtin:gaussians?d=3&sep=1.5&prior=0.4&n=100&seed=9").unwrap();
        match &r {
            DatasetRef::Builtin { gaussian, n, seed } => {
                assert_eq!(gaussian.d, 3);
                assert_eq!(gaussian.mean_separation, 1.5);
                assert_eq!(gaussian.class_prior, 0.4);
                assert_eq!(*n, Some(100));
                assert_eq!(*seed, Some(9));
            }
            _ => panic!("expected builtin"),
        }
        assert_eq!(
            r.display_string(),
            "builtin:gaussians?d=3&sep=1.5&prior=0.4&n=100&seed=9"
        );
        assert!(DatasetRef::parse("builtin:nope").is_err());
        assert!(DatasetRef::parse("builtin:gaussians?bogus=1").is_err());
        assert!(matches!(
            DatasetRef::parse("some/file.csv").unwrap(),
            DatasetRef::Csv { .. }
        ));
    }

    #[test]
    fn unlabeled_curve_cardinality_and_keys() {
        let cfg = small_curve_cfg();
        let table = run_unlabeled_curve(&cfg).unwrap();
        // 4 classifiers x 2 grid points x 2 repeats x 2 measures
        assert_eq!(table.len(), 4 * 2 * 2 * 2);
        // single-measure run filters rows only
        let cfg_err = CurveConfig {
            measures: vec![Measure::Error],
            ..cfg
        };
        let table_err = run_unlabeled_curve(&cfg_err).unwrap();
        assert_eq!(table_err.len(), 4 * 2 * 2);
        assert!(table_err.rows.iter().all(|r| r.measure == Measure::Error));
    }

    #[test]
    fn unlabeled_curve_is_deterministic() {
        let cfg = small_curve_cfg();
        let a = run_unlabeled_curve(&cfg).unwrap();
        let b = run_unlabeled_curve(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn supervised_rows_are_constant_across_the_grid() {
        let table = run_unlabeled_curve(&small_curve_cfg()).unwrap();
        for repeat in 0..2 {
            for measure in ALL_MEASURES {
                let vals: Vec<f64> = table
                    .rows
                    .iter()
                    .filter(|r| {
                        r.classifier == "supervised"
                            && r.repeat_index == repeat
                            && r.measure == measure
                    })
                    .map(|r| r.value.value().unwrap())
                    .collect();
                assert_eq!(vals.len(), 2);
                assert_eq!(vals[0], vals[1]);
            }
        }
    }

    #[test]
    fn rows_within_a_group_share_their_split_fingerprint() {
        let table = run_unlabeled_curve(&small_curve_cfg()).unwrap();
        for repeat in 0..2 {
            for &u in &[0.0, 8.0] {
                let prints: BTreeSet<u64> = table
                    .rows
                    .iter()
                    .filter(|r| r.repeat_index == repeat && r.size == u)
                    .map(|r| r.split_fingerprint)
                    .collect();
                assert_eq!(prints.len(), 1, "paired comparison broken");
            }
        }
    }

    #[test]
    fn zero_unlabeled_rows_make_all_non_oracle_classifiers_agree() {
        let table = run_unlabeled_curve(&small_curve_cfg()).unwrap();
        for repeat in 0..2 {
            for measure in ALL_MEASURES {
                let val = |name: &str| -> f64 {
                    table
                        .rows
                        .iter()
                        .find(|r| {
                            r.classifier == name
                                && r.repeat_index == repeat
                                && r.size == 0.0
                                && r.measure == measure
                        })
                        .unwrap()
                        .value
                        .value()
                        .unwrap()
                };
                let s = val("supervised");
                assert_relative_eq!(val("self_learning_soft"), s, epsilon = 1e-12);
                assert_relative_eq!(val("self_learning_hard"), s, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn fraction_curve_cardinality() {
        let cfg = FractionCurveConfig {
            dataset: DatasetRef::parse("builtin:gaussians?d=2&sep=2&prior=0.5&n=100").unwrap(),
            encoding: LabelEncoding::default(),
            fractions: vec![0.1, 0.5],
            test_fraction: 0.2,
            repeats: 3,
            master_seed: 7,
            measures: vec![Measure::Error],
            standardize: false,
            ridge: RidgeConfig::default(),
            bcd: BcdConfig::default(),
        };
        let table = run_fraction_curve(&cfg).unwrap();
        assert_eq!(table.len(), 4 * 2 * 3);
        assert!(table
            .rows
            .iter()
            .all(|r| r.size_role == SizeRole::LabeledFraction));
    }

    #[test]
    fn fraction_one_collapses_the_self_learners() {
        let cfg = FractionCurveConfig {
            dataset: DatasetRef::parse("builtin:gaussians?d=2&sep=2&prior=0.5&n=60").unwrap(),
            encoding: LabelEncoding::default(),
            fractions: vec![1.0],
            test_fraction: 0.2,
            repeats: 2,
            master_seed: 3,
            measures: vec![Measure::Error, Measure::AverageLossTest],
            standardize: false,
            ridge: RidgeConfig::default(),
            bcd: BcdConfig::default(),
        };
        let table = run_fraction_curve(&cfg).unwrap();
        for repeat in 0..2 {
            for measure in ALL_MEASURES {
                let val = |name: &str| -> f64 {
                    table
                        .rows
                        .iter()
                        .find(|r| {
                            r.classifier == name && r.repeat_index == repeat && r.measure == measure
                        })
                        .unwrap()
                        .value
                        .value()
                        .unwrap()
                };
                let s = val("supervised");
                assert_relative_eq!(val("self_learning_soft"), s, epsilon = 1e-12);
                assert_relative_eq!(val("self_learning_hard"), s, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn builtin_without_n_is_rejected_for_fraction_curves() {
        let cfg = FractionCurveConfig {
            dataset: DatasetRef::parse("builtin:gaussians?d=2&sep=2&prior=0.5").unwrap(),
            encoding: LabelEncoding::default(),
            fractions: vec![0.5],
            test_fraction: 0.2,
            repeats: 1,
            master_seed: 3,
            measures: vec![Measure::Error],
            standardize: false,
            ridge: RidgeConfig::default(),
            bcd: BcdConfig::default(),
        };
        assert!(matches!(run_fraction_curve(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn results_csv_round_trips_and_is_byte_stable() {
        let table = run_unlabeled_curve(&small_curve_cfg()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        write_results_csv(&table, &p1).unwrap();
        write_results_csv(&table, &p2).unwrap();
        assert_eq!(
            std::fs::read(&p1).unwrap(),
            std::fs::read(&p2).unwrap(),
            "two writes differ"
        );
        let header = std::fs::read_to_string(&p1).unwrap();
        assert!(header.starts_with("dataset,classifier,repeat,size_role,size,measure,value\n"));
        let back = read_results_csv(&p1).unwrap();
        assert_eq!(back.len(), table.len());
        for (a, b) in back.rows.iter().zip(&{
            let mut t = table.clone();
            t.rows.sort_by_key(ResultRow::key);
            t
        }.rows) {
            assert_eq!(a.dataset, b.dataset);
            assert_eq!(a.classifier, b.classifier);
            assert_eq!(a.value, b.value, "lossless value round-trip");
            assert_eq!(a.size, b.size);
        }
    }

    #[test]
    fn malformed_results_csv_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        std::fs::write(
            &p,
            "dataset,classifier,repeat,size_role,size,measure,value\nx,y,0,n_unlabeled,1,Error,oops\n",
        )
        .unwrap();
        let err = read_results_csv(&p).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn seed_sweep_rows_are_deterministic_per_seed() {
        let cfg = SweepConfig {
            gaussian: GaussianConfig {
                d: 2,
                mean_separation: 2.0,
                class_prior: 0.5,
                n_per_draw: 120,
            },
            l: 6,
            u: 60,
            t: 40,
            encoding: LabelEncoding::default(),
            standardize: false,
            ridge: RidgeConfig::default(),
            bcd: BcdConfig::default(),
        };
        let rows = run_seed_sweep(&cfg, &[5, 9, 5]).unwrap();
        assert_eq!(rows.len(), 9);
        // duplicate seed produces identical rows
        let first: Vec<&SweepRow> = rows.iter().filter(|r| r.seed == 5).collect();
        assert_eq!(first.len(), 6);
        assert_eq!(first[0], first[3]);
        assert_eq!(first[1], first[4]);
        assert_eq!(first[2], first[5]);
        // supervised rows do not depend on the order of the list
        let reordered = run_seed_sweep(&cfg, &[9, 5]).unwrap();
        let sup_a = rows
            .iter()
            .find(|r| r.seed == 9 && r.classifier == "supervised")
            .unwrap();
        let sup_b = reordered
            .iter()
            .find(|r| r.seed == 9 && r.classifier == "supervised")
            .unwrap();
        assert_eq!(sup_a, sup_b);
    }

    #[test]
    fn summarize_matches_hand_computation() {
        let mk = |repeat: usize, v: f64| ResultRow {
            dataset: "d".into(),
            classifier: "c".into(),
            repeat_index: repeat,
            size_role: SizeRole::NUnlabeled,
            size: 4.0,
            measure: Measure::Error,
            value: MeasureOutcome::Value(v),
            split_fingerprint: 0,
        };
        let table = ResultsTable::new(vec![mk(0, 0.0), mk(1, 1.0)]).unwrap();
        let rows = summarize(&table, &DEFAULT_GROUP_KEYS).unwrap();
        assert_eq!(rows.len(), 1);
        assert_relative_eq!(rows[0].mean, 0.5);
        assert_relative_eq!(rows[0].std, 0.7071067811865476, epsilon = 1e-12);
        assert_eq!(rows[0].count, 2);

        let single = ResultsTable::new(vec![mk(0, 0.25)]).unwrap();
        let rows = summarize(&single, &DEFAULT_GROUP_KEYS).unwrap();
        assert_eq!(rows[0].std, 0.0);
        assert_eq!(rows[0].count, 1);

        assert!(summarize(&ResultsTable::default(), &DEFAULT_GROUP_KEYS).is_err());
    }

    #[test]
    fn summarize_skips_failed_rows_in_counts() {
        let mk = |repeat: usize, value: MeasureOutcome| ResultRow {
            dataset: "d".into(),
            classifier: "c".into(),
            repeat_index: repeat,
            size_role: SizeRole::NUnlabeled,
            size: 4.0,
            measure: Measure::Error,
            value,
            split_fingerprint: 0,
        };
        let table = ResultsTable::new(vec![
            mk(0, MeasureOutcome::Value(0.5)),
            mk(1, MeasureOutcome::Failed("rank_deficiency".into())),
        ])
        .unwrap();
        let rows = summarize(&table, &DEFAULT_GROUP_KEYS).unwrap();
        assert_eq!(rows[0].count, 1);
        assert_relative_eq!(rows[0].mean, 0.5);
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let mk = || ResultRow {
            dataset: "d".into(),
            classifier: "c".into(),
            repeat_index: 0,
            size_role: SizeRole::NUnlabeled,
            size: 4.0,
            measure: Measure::Error,
            value: MeasureOutcome::Value(0.5),
            split_fingerprint: 0,
        };
        assert!(ResultsTable::new(vec![mk(), mk()]).is_err());
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        let row = ResultRow {
            dataset: "d".into(),
            classifier: "c".into(),
            repeat_index: 0,
            size_role: SizeRole::NUnlabeled,
            size: 4.0,
            measure: Measure::Error,
            value: MeasureOutcome::Value(1.5),
            split_fingerprint: 0,
        };
        assert!(ResultsTable::new(vec![row]).is_err());
    }
}
