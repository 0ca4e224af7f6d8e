//! Coverage, total hit probability and optimal cache placement for a finite
//! cache-enabled device-to-device network.
//!
//! Transmitters form a uniform binomial point process in a disk with the
//! receiver at the centre. The receiver is served by the k-th closest device
//! while a random subset of the other devices interferes under Rayleigh
//! fading. Every analytic result has a seeded Monte Carlo counterpart in
//! [`montecarlo`].

// `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod caching;
pub mod coverage;
pub mod error;
pub mod geometry;
pub mod interference;
pub mod montecarlo;
pub mod quadrature;
pub mod specfun;
pub mod stream;

pub mod cli;

pub use caching::{
    hit_probability, optimize_placement, throughput, zipf_pmf, CachePolicy, ContentLibrary,
    Placement,
};
pub use coverage::{coverage_probability, coverage_upper_bound, CoverageTable};
pub use error::{Error, Result};
pub use geometry::{NetworkConfig, ServingIndex};
pub use interference::{laplace_interference, MixtureWeights, WeightMode};
pub use montecarlo::{simulate_coverage, simulate_hit, SimulationReport};
pub use specfun::{hyp2f1_caching, interference_factor};

/// Crate version recorded in every output file header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// β in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
