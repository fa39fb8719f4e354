//! Shared fixtures for the criterion benchmarks.

use selfls::{
    generate_two_gaussians, make_split, Dataset, ExperimentSplit, GaussianConfig, LabelEncoding,
};

/// A generated two-Gaussian dataset of the given size.
pub fn dataset(n: usize, d: usize) -> Dataset {
    let cfg = GaussianConfig {
        d,
        mean_separation: 2.0,
        class_prior: 0.5,
        n_per_draw: n,
    };
    generate_two_gaussians(&cfg, n, 7).expect("benchmark dataset")
}

/// A labeled/unlabeled/test split of a generated dataset.
pub fn split(l: usize, u: usize, t: usize, d: usize) -> ExperimentSplit {
    let ds = dataset(l + u + t, d);
    make_split(&ds, l, u, t, LabelEncoding::default(), false, 3).expect("benchmark split")
}
