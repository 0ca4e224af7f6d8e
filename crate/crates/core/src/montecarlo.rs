//! Seeded end-to-end simulator of the finite network.
//!
//! Each trial drops N_t devices uniformly in the disk, picks the serving
//! device, draws N_a − 1 interferers uniformly without replacement from the
//! other N_t − 1 devices and applies unit-mean exponential fading to every
//! link. A trial's randomness depends only on (seed, trial index).

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::caching::{zipf_pmf, CachePolicy, ContentLibrary};
use crate::error::{domain, Result};
use crate::geometry::{sample_radius, NetworkConfig, ServingIndex};
use crate::stream::{count_trials, trial_rng, StreamTag};

/// Bernoulli Monte Carlo estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
    pub scenario: String,
}

impl SimulationReport {
    fn from_count(successes: u64, trials: u64, seed: u64, scenario: String) -> Self {
        let n = trials as f64;
        let estimate = successes as f64 / n;
        Self {
            estimate,
            stderr: (estimate * (1.0 - estimate) / n).sqrt(),
            trials,
            seed,
            scenario,
        }
    }

    /// |value − estimate| in units of the standard error (∞ if the error is
    /// zero and the values differ).
    pub fn z_score(&self, value: f64) -> f64 {
        let diff = (value - self.estimate).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.stderr
        }
    }
}

/// A uniform point in the disk of radius `radius`: radius r_d·√u, angle uniform.
pub fn sample_disk_point<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> [f64; 2] {
    let u: f64 = rng.random();
    let theta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    disk_point_from_uniforms(u, theta, radius)
}

pub fn disk_point_from_uniforms(u: f64, theta: f64, radius: f64) -> [f64; 2] {
    let rho = radius * u.sqrt();
    [rho * theta.cos(), rho * theta.sin()]
}

/// Distances of one BPP realization to the centre, in draw order.
pub fn sample_bpp_distances<R: Rng + ?Sized>(cfg: &NetworkConfig, rng: &mut R) -> Vec<f64> {
    (0..cfg.n_total)
        .map(|_| sample_radius(cfg.radius, rng))
        .collect()
}

/// Distance to the k-th closest device of one BPP realization.
pub fn sample_serving_distance<R: Rng + ?Sized>(
    k: ServingIndex,
    cfg: &NetworkConfig,
    rng: &mut R,
) -> f64 {
    let mut d = sample_bpp_distances(cfg, rng);
    d.sort_unstable_by(f64::total_cmp);
    d[k.get() - 1]
}

// Sorted distances in, SIR test out. The device at `server` (0-based rank)
// serves; the interferers are a uniform subset of the rest.
fn serve<R: Rng + ?Sized>(
    sorted: &mut Vec<f64>,
    server: usize,
    beta: f64,
    cfg: &NetworkConfig,
    rng: &mut R,
) -> bool {
    let d_server = sorted.remove(server);
    let n_interferers = cfg.n_active - 1;
    let (chosen, _) = sorted.partial_shuffle(rng, n_interferers);
    let mut interference = 0.0;
    for &d in chosen.iter() {
        let h: f64 = Exp1.sample(rng);
        interference += h * d.powf(-cfg.alpha);
    }
    let h: f64 = Exp1.sample(rng);
    let signal = h * d_server.powf(-cfg.alpha);
    // With no interferers the SIR is +∞ and the link is always covered.
    signal >= beta * interference
}

fn check_common(beta: f64, trials: u64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return domain(format!("SIR threshold must be finite and > 0, got {beta}"));
    }
    if trials == 0 {
        return domain("trials must be >= 1");
    }
    Ok(())
}

/// Empirical P(SIR ≥ β) with the k-th closest device serving.
pub fn simulate_coverage(
    k: usize,
    beta: f64,
    cfg: &NetworkConfig,
    trials: u64,
    seed: u64,
) -> Result<SimulationReport> {
    cfg.validate()?;
    let idx = ServingIndex::new(k, cfg)?;
    check_common(beta, trials)?;
    let hits = count_trials(trials, |i| {
        let mut rng = trial_rng(seed, StreamTag::Coverage, i);
        let mut d = sample_bpp_distances(cfg, &mut rng);
        d.sort_unstable_by(f64::total_cmp);
        serve(&mut d, idx.get() - 1, beta, cfg, &mut rng)
    });
    let scenario = format!(
        "coverage k={k} beta={beta} n_total={} n_active={} radius={} alpha={}",
        cfg.n_total, cfg.n_active, cfg.radius, cfg.alpha
    );
    Ok(SimulationReport::from_count(hits, trials, seed, scenario))
}

/// Empirical total hit probability under independent per-device caching.
///
/// Each device stores content j independently with probability b_j, so a
/// realization may exceed the cache capacity; only the marginals are modeled.
pub fn simulate_hit(
    policy: &CachePolicy,
    library: &ContentLibrary,
    beta: f64,
    cfg: &NetworkConfig,
    trials: u64,
    seed: u64,
) -> Result<SimulationReport> {
    cfg.validate()?;
    policy.validate(library)?;
    check_common(beta, trials)?;
    let pmf = zipf_pmf(library)?;
    let cumulative: Vec<f64> = pmf
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let probs = policy.probs();
    let hits = count_trials(trials, |i| {
        let mut rng = trial_rng(seed, StreamTag::Hit, i);
        let u: f64 = rng.random();
        let content = cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(cumulative.len() - 1);
        let mut d = sample_bpp_distances(cfg, &mut rng);
        d.sort_unstable_by(f64::total_cmp);
        let b = probs[content];
        let Some(server) = (0..cfg.n_total).find(|_| rng.random::<f64>() < b) else {
            return false;
        };
        serve(&mut d, server, beta, cfg, &mut rng)
    });
    let scenario = format!(
        "hit probs={:?} catalog={} gamma={} capacity={} beta={beta} n_total={} n_active={} radius={} alpha={}",
        probs,
        library.size,
        library.gamma,
        library.cache_capacity,
        cfg.n_total,
        cfg.n_active,
        cfg.radius,
        cfg.alpha
    );
    Ok(SimulationReport::from_count(hits, trials, seed, scenario))
}

/// One-sample Kolmogorov–Smirnov statistic of `samples` against `cdf`.
/// Sorts `samples` in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_unstable_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            (f - lo).abs().max((hi - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 99% critical value of the one-sample KS statistic.
pub fn ks_critical_99(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}
