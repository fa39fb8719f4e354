//! Flat key-value experiment configuration files.
//!
//! The format is one `key = value` pair per line, `#` starting a comment.
//! Command-line flags override file values; the merged map is what a run
//! echoes into its provenance sidecar.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::data::GaussianConfig;
use crate::encoding::{ClassMap, LabelEncoding};
use crate::error::{Error, Result};
use crate::harness::{
    CurveConfig, DatasetRef, FitJobConfig, FractionCurveConfig, Measure, MinimaJobConfig,
    SweepConfig, ClassifierKind,
};
use crate::model::RidgeConfig;
use crate::selflearn::{BcdConfig, DedupConfig, Variant};

/// Merged configuration: file pairs plus flag overrides, last write wins.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "config line {line_no}: expected `key = value`, got {raw:?}"
                ))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(Error::Config(format!("config line {line_no}: empty key")));
            }
            if entries.insert(key.clone(), value).is_some() {
                return Err(Error::Config(format!(
                    "config line {line_no}: duplicate key {key:?}"
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    /// Sets or overrides one value (used for flag overrides).
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// The effective key-value pairs, for the provenance echo.
    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }

    /// Rejects keys outside the subcommand's schema, naming the offender.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for key in self.entries.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "unknown config key {key:?}; known keys: {}",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                Error::Config(format!("config key {key:?} has invalid value {raw:?}"))
            }),
        }
    }

    fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.parse(key)?
            .ok_or_else(|| Error::Config(format!("missing required config key {key:?}")))
    }

    fn parse_bool(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some("false") | Some("0") | Some("no") => Ok(false),
            Some(other) => Err(Error::Config(format!(
                "config key {key:?} must be true or false, got {other:?}"
            ))),
        }
    }

    fn parse_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<T>().map_err(|_| {
                        Error::Config(format!(
                            "config key {key:?}: invalid list element {s:?} in {raw:?}"
                        ))
                    })
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }
}

/// Parses a seed list: either comma-separated values or a range `a..b`
/// (half-open).
pub fn parse_seed_list(raw: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = raw.split_once("..") {
        let start: u64 = a.trim().parse().map_err(|_| {
            Error::Config(format!("invalid seed range start {a:?} in {raw:?}"))
        })?;
        let end: u64 = b.trim().parse().map_err(|_| {
            Error::Config(format!("invalid seed range end {b:?} in {raw:?}"))
        })?;
        if end <= start {
            return Err(Error::Config(format!(
                "empty seed range {raw:?}; use start..end with start < end"
            )));
        }
        Ok((start..end).collect())
    } else {
        raw.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<u64>()
                    .map_err(|_| Error::Config(format!("invalid seed {s:?} in {raw:?}")))
            })
            .collect()
    }
}

fn encoding_from(cfg: &ConfigMap) -> Result<LabelEncoding> {
    let m = cfg.parse_or("m", -1.0)?;
    let n = cfg.parse_or("n", 1.0)?;
    LabelEncoding::new(m, n)
}

fn ridge_from(cfg: &ConfigMap) -> Result<RidgeConfig> {
    Ok(RidgeConfig {
        lambda: cfg.parse_or("lambda", 0.0)?,
        penalize_intercept: cfg.parse_bool("penalize_intercept", false)?,
    })
}

fn bcd_from(cfg: &ConfigMap) -> Result<BcdConfig> {
    Ok(BcdConfig {
        max_iterations: cfg.parse_or("max_iterations", 500)?,
        objective_tolerance: cfg.parse_or("tolerance", 1e-8)?,
        ridge: ridge_from(cfg)?,
    })
}

fn dataset_from(cfg: &ConfigMap) -> Result<DatasetRef> {
    let raw: String = cfg.require("dataset")?;
    let mut dataset = DatasetRef::parse(&raw)?;
    if let DatasetRef::Csv {
        label_column,
        class_map,
        ..
    } = &mut dataset
    {
        if let Some(col) = cfg.get("label_column") {
            *label_column = col.to_string();
        }
        match (cfg.get("class_m"), cfg.get("class_n")) {
            (Some(a), Some(b)) => *class_map = Some(ClassMap::new(a, b)?),
            (None, None) => {}
            _ => {
                return Err(Error::Config(
                    "class_m and class_n must be given together".into(),
                ))
            }
        }
    }
    Ok(dataset)
}

fn measures_from(cfg: &ConfigMap) -> Result<Vec<Measure>> {
    match cfg.get("measures") {
        None => Ok(vec![Measure::Error, Measure::AverageLossTest]),
        Some(raw) => raw
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(Measure::parse)
            .collect(),
    }
}

const COMMON_KEYS: &[&str] = &[
    "dataset",
    "label_column",
    "class_m",
    "class_n",
    "m",
    "n",
    "lambda",
    "penalize_intercept",
    "max_iterations",
    "tolerance",
    "standardize",
    "master_seed",
];

fn with_common(extra: &[&'static str]) -> Vec<&'static str> {
    let mut keys: Vec<&'static str> = COMMON_KEYS.to_vec();
    keys.extend_from_slice(extra);
    keys
}

pub const CURVE_UNLABELED_KEYS: &[&str] = &["labeled", "u_grid", "test_size", "repeats", "measures"];
pub const CURVE_FRACTION_KEYS: &[&str] = &["fractions", "test_fraction", "repeats", "measures"];
pub const MINIMA_KEYS: &[&str] = &[
    "labeled",
    "unlabeled",
    "test_size",
    "variant",
    "restarts",
    "dedup_objective",
    "dedup_weight",
];
pub const SWEEP_KEYS: &[&str] = &[
    "d",
    "separation",
    "prior",
    "n_per_draw",
    "labeled",
    "unlabeled",
    "test_size",
    "seeds",
];
pub const FIT_KEYS: &[&str] = &["classifier", "labeled", "unlabeled", "test_size"];

/// Builds the unlabeled-count curve configuration.
pub fn unlabeled_curve_config(cfg: &ConfigMap) -> Result<CurveConfig> {
    cfg.check_keys(&with_common(CURVE_UNLABELED_KEYS))?;
    let config = CurveConfig {
        dataset: dataset_from(cfg)?,
        encoding: encoding_from(cfg)?,
        l_fixed: cfg.parse_or("labeled", 10)?,
        u_grid: cfg
            .parse_list("u_grid")?
            .unwrap_or_else(|| vec![0, 2, 8, 32, 128, 512]),
        test_size: cfg.parse_or("test_size", 500)?,
        repeats: cfg.parse_or("repeats", 250)?,
        master_seed: cfg.parse_or("master_seed", 1)?,
        measures: measures_from(cfg)?,
        standardize: cfg.parse_bool("standardize", false)?,
        ridge: ridge_from(cfg)?,
        bcd: bcd_from(cfg)?,
    };
    config.validate()?;
    Ok(config)
}

/// Builds the labeled-fraction curve configuration.
pub fn fraction_curve_config(cfg: &ConfigMap) -> Result<FractionCurveConfig> {
    cfg.check_keys(&with_common(CURVE_FRACTION_KEYS))?;
    let config = FractionCurveConfig {
        dataset: dataset_from(cfg)?,
        encoding: encoding_from(cfg)?,
        fractions: cfg.parse_list("fractions")?.unwrap_or_else(|| {
            (1..=10).map(|k| k as f64 / 10.0).collect()
        }),
        test_fraction: cfg.parse_or("test_fraction", 0.2)?,
        repeats: cfg.parse_or("repeats", 250)?,
        master_seed: cfg.parse_or("master_seed", 1)?,
        measures: measures_from(cfg)?,
        standardize: cfg.parse_bool("standardize", false)?,
        ridge: ridge_from(cfg)?,
        bcd: bcd_from(cfg)?,
    };
    config.validate()?;
    Ok(config)
}

/// Builds the local-minima job configuration.
pub fn minima_config(cfg: &ConfigMap) -> Result<MinimaJobConfig> {
    cfg.check_keys(&with_common(MINIMA_KEYS))?;
    let variants = match cfg.get("variant").unwrap_or("both") {
        "soft" => vec![Variant::SoftLabel],
        "hard" => vec![Variant::HardLabel],
        "both" => vec![Variant::SoftLabel, Variant::HardLabel],
        other => {
            return Err(Error::Config(format!(
                "variant must be soft, hard or both, got {other:?}"
            )))
        }
    };
    let config = MinimaJobConfig {
        dataset: dataset_from(cfg)?,
        encoding: encoding_from(cfg)?,
        l: cfg.parse_or("labeled", 10)?,
        u: cfg.parse_or("unlabeled", 50)?,
        t: cfg.parse_or("test_size", 0)?,
        standardize: cfg.parse_bool("standardize", false)?,
        variants,
        restarts: cfg.parse_or("restarts", 50)?,
        dedup: DedupConfig {
            objective_rel: cfg.parse_or("dedup_objective", 1e-6)?,
            weight_dist: cfg.parse_or("dedup_weight", 1e-4)?,
        },
        seed: cfg.parse_or("master_seed", 1)?,
        ridge: ridge_from(cfg)?,
        bcd: bcd_from(cfg)?,
    };
    config.validate()?;
    Ok(config)
}

/// Builds the seed-sweep configuration and its seed list.
pub fn sweep_config(cfg: &ConfigMap) -> Result<(SweepConfig, Vec<u64>)> {
    let mut keys: Vec<&str> = COMMON_KEYS
        .iter()
        .filter(|k| !matches!(**k, "dataset" | "label_column" | "class_m" | "class_n"))
        .copied()
        .collect();
    keys.extend_from_slice(SWEEP_KEYS);
    cfg.check_keys(&keys)?;

    let l = cfg.parse_or("labeled", 4)?;
    let u = cfg.parse_or("unlabeled", 200)?;
    let t = cfg.parse_or("test_size", 500)?;
    let config = SweepConfig {
        gaussian: GaussianConfig {
            d: cfg.parse_or("d", 2)?,
            mean_separation: cfg.parse_or("separation", 2.0)?,
            class_prior: cfg.parse_or("prior", 0.5)?,
            n_per_draw: cfg.parse_or("n_per_draw", l + u + t)?,
        },
        l,
        u,
        t,
        encoding: encoding_from(cfg)?,
        standardize: cfg.parse_bool("standardize", false)?,
        ridge: ridge_from(cfg)?,
        bcd: bcd_from(cfg)?,
    };
    config.validate()?;
    let seeds = parse_seed_list(cfg.get("seeds").unwrap_or("0..50"))?;
    if seeds.is_empty() {
        return Err(Error::Config("seed list is empty".into()));
    }
    Ok((config, seeds))
}

/// Builds a single-fit job.
pub fn fit_config(cfg: &ConfigMap) -> Result<FitJobConfig> {
    cfg.check_keys(&with_common(FIT_KEYS))?;
    let classifier = match cfg.get("classifier").unwrap_or("supervised") {
        "supervised" => ClassifierKind::Supervised,
        "soft" | "self_learning_soft" => ClassifierKind::SelfLearningSoft,
        "hard" | "self_learning_hard" => ClassifierKind::SelfLearningHard,
        "oracle" => ClassifierKind::Oracle,
        other => {
            return Err(Error::Config(format!(
                "unknown classifier {other:?}; expected supervised, soft, hard or oracle"
            )))
        }
    };
    Ok(FitJobConfig {
        dataset: dataset_from(cfg)?,
        encoding: encoding_from(cfg)?,
        classifier,
        l: cfg.parse_or("labeled", 10)?,
        u: cfg.parse_or("unlabeled", 100)?,
        t: cfg.parse_or("test_size", 500)?,
        standardize: cfg.parse_bool("standardize", false)?,
        master_seed: cfg.parse_or("master_seed", 1)?,
        ridge: ridge_from(cfg)?,
        bcd: bcd_from(cfg)?,
    })
}
