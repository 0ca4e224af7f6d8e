//! Zipf content popularity, total hit probability and the capacity-constrained
//! cache placement problem
//!
//!   maximize Σ_j P_j · g(b_j)   s.t.  Σ_j b_j ≤ m_c,  0 ≤ b_j ≤ 1,
//!
//! with g(b) = Σ_k P_c^(k) (1 − b)^(k−1) b the probability that the closest
//! device holding a content is within coverage.

use serde::{Deserialize, Serialize};

use crate::coverage::CoverageTable;
use crate::error::{domain, Error, Result};
use crate::geometry::NetworkConfig;

/// Slack allowed on the capacity and box constraints.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Catalog of equally sized contents with Zipf popularity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContentLibrary {
    /// Number of contents J.
    pub size: usize,
    /// Zipf exponent γ.
    pub gamma: f64,
    /// Contents a device can store, m_c.
    pub cache_capacity: usize,
}

impl ContentLibrary {
    pub fn new(size: usize, gamma: f64, cache_capacity: usize) -> Result<Self> {
        let lib = Self {
            size,
            gamma,
            cache_capacity,
        };
        lib.validate()?;
        Ok(lib)
    }

    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return domain("catalog size must be >= 1");
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return domain(format!(
                "Zipf exponent must be finite and >= 0, got {}",
                self.gamma
            ));
        }
        if self.cache_capacity == 0 || self.cache_capacity > self.size {
            return domain(format!(
                "cache capacity must lie in 1..={}, got {}",
                self.size, self.cache_capacity
            ));
        }
        Ok(())
    }
}

/// Per-content caching probabilities b = (b₁, …, b_J).
#[derive(Debug, Clone, PartialEq)]
pub struct CachePolicy {
    probs: Vec<f64>,
}

impl CachePolicy {
    pub fn new(probs: Vec<f64>, library: &ContentLibrary) -> Result<Self> {
        let policy = Self { probs };
        policy.validate(library)?;
        Ok(policy)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn validate(&self, library: &ContentLibrary) -> Result<()> {
        library.validate()?;
        if self.probs.len() != library.size {
            return Err(Error::Dimension {
                what: "cache policy",
                got: self.probs.len(),
                expected: library.size,
            });
        }
        if let Some((j, b)) = self
            .probs
            .iter()
            .enumerate()
            .find(|(_, b)| !(**b >= 0.0 && **b <= 1.0))
        {
            return domain(format!(
                "caching probability b_{} = {b} outside [0, 1]",
                j + 1
            ));
        }
        let total = self.total();
        if total > library.cache_capacity as f64 + FEASIBILITY_TOL {
            return domain(format!(
                "caching probabilities sum to {total}, above capacity {}",
                library.cache_capacity
            ));
        }
        Ok(())
    }
}

/// Request probabilities P_j = j^(−γ) / Σ_i i^(−γ).
pub fn zipf_pmf(library: &ContentLibrary) -> Result<Vec<f64>> {
    library.validate()?;
    let raw: Vec<f64> = (1..=library.size)
        .map(|j| (j as f64).powf(-library.gamma))
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|x| x / total).collect())
}

/// g(b) = Σ_k P_c^(k) (1 − b)^(k−1) b.
pub fn content_objective(b: f64, coverage: &[f64]) -> f64 {
    let miss = 1.0 - b;
    let mut reach = b;
    let mut total = 0.0;
    for &pc in coverage {
        total += pc * reach;
        reach *= miss;
    }
    total
}

/// g'(b) = Σ_k P_c^(k) [(1 − b)^(k−1) − (k − 1) b (1 − b)^(k−2)].
pub fn content_objective_derivative(b: f64, coverage: &[f64]) -> f64 {
    let miss = 1.0 - b;
    let mut total = 0.0;
    let mut pow = 1.0; // (1 − b)^(k−1)
    let mut pow_prev = 0.0; // (1 − b)^(k−2)
    for (i, &pc) in coverage.iter().enumerate() {
        let km1 = i as f64;
        total += pc * (pow - km1 * b * pow_prev);
        pow_prev = pow;
        pow *= miss;
    }
    total
}

/// P_hit = Σ_j P_j Σ_k P_c^(k) (1 − b_j)^(k−1) b_j.
pub fn hit_probability(
    policy: &CachePolicy,
    coverage: &CoverageTable,
    library: &ContentLibrary,
) -> Result<f64> {
    policy.validate(library)?;
    if coverage.is_empty() {
        return domain("coverage table is empty");
    }
    let pmf = zipf_pmf(library)?;
    Ok(objective(&pmf, policy.probs(), &coverage.values).clamp(0.0, 1.0))
}

fn objective(pmf: &[f64], b: &[f64], coverage: &[f64]) -> f64 {
    pmf.iter()
        .zip(b)
        .map(|(&w, &bj)| w * content_objective(bj, coverage))
        .sum()
}

/// Optimizer output.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub policy: CachePolicy,
    /// Objective at `policy`, the maximized hit probability.
    pub max_hit: f64,
    /// Capacity multiplier found by the dual bisection.
    pub multiplier: f64,
}

const GOLDEN_ITERS: usize = 90;
const STARTS: usize = 5;
const DUAL_ITERS: usize = 200;
const POLISH_SWEEPS: usize = 500;
const POLISH_GRID: usize = 32;

// Golden-section maximization of `f` on [lo, hi]; returns (argmax, max).
fn golden_max<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..GOLDEN_ITERS {
        if hi - lo < 1e-14 {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

// Global-ish 1-D maximization on [lo, hi]: endpoints, a coarse grid, then a
// golden-section refinement in every grid cell. Ties go to the smaller point.
fn robust_max<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, cells: usize) -> (f64, f64) {
    let mut best = (lo, f(lo));
    if hi <= lo {
        return best;
    }
    let width = (hi - lo) / cells as f64;
    for c in 0..cells {
        let a = lo + width * c as f64;
        let b = if c + 1 == cells { hi } else { a + width };
        let cand = golden_max(f, a, b);
        if cand.1 > best.1 {
            best = cand;
        }
    }
    let end = f(hi);
    if end > best.1 {
        best = (hi, end);
    }
    best
}

/// Maximizes the total hit probability over the caching probabilities.
///
/// Lagrangian dual bisection on the capacity multiplier, with each content's
/// best response found by a multi-start golden-section search (g is not
/// assumed concave), followed by pairwise projected coordinate ascent along
/// the capacity face.
pub fn optimize_placement(coverage: &CoverageTable, library: &ContentLibrary) -> Result<Placement> {
    library.validate()?;
    if coverage.is_empty() {
        return domain("coverage table is empty");
    }
    let pc = &coverage.values;
    let pmf = zipf_pmf(library)?;
    let capacity = library.cache_capacity as f64;
    let j_count = library.size;

    if library.cache_capacity >= j_count {
        let b = vec![1.0; j_count];
        let max_hit = objective(&pmf, &b, pc);
        return Ok(Placement {
            policy: CachePolicy::new(b, library)?,
            max_hit,
            multiplier: 0.0,
        });
    }

    let best_response = |w: f64, lambda: f64| -> f64 {
        let phi = |b: f64| w * content_objective(b, pc) - lambda * b;
        robust_max(&phi, 0.0, 1.0, STARTS).0
    };
    let responses =
        |lambda: f64| -> Vec<f64> { pmf.iter().map(|&w| best_response(w, lambda)).collect() };

    // |g'| ≤ Σ k·P_c^(k), so beyond this multiplier nothing is cached.
    let slope_bound: f64 = pc
        .iter()
        .enumerate()
        .map(|(i, &p)| (i + 1) as f64 * p)
        .sum();
    let mut lo = 0.0;
    let mut hi = slope_bound + 1.0;
    for _ in 0..DUAL_ITERS {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        let total: f64 = responses(mid).iter().sum();
        if total <= capacity {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut b = responses(hi);

    // Any capacity left over (a jump in the dual response) goes to the
    // coordinates with the steepest marginal gain.
    let mut slack = capacity - b.iter().sum::<f64>();
    while slack > FEASIBILITY_TOL {
        let pick = (0..j_count).filter(|&j| b[j] < 1.0).max_by(|&x, &y| {
            let gx = pmf[x] * content_objective_derivative(b[x], pc);
            let gy = pmf[y] * content_objective_derivative(b[y], pc);
            gx.total_cmp(&gy).then(y.cmp(&x))
        });
        let Some(j) = pick else { break };
        let step = slack.min(1.0 - b[j]);
        b[j] += step;
        slack -= step;
    }

    // Pairwise transfers keep Σ b fixed.
    let mut converged = false;
    for _ in 0..POLISH_SWEEPS {
        let mut gain = 0.0;
        for i in 0..j_count {
            for j in (i + 1)..j_count {
                let (bi, bj) = (b[i], b[j]);
                let pair = |t: f64| {
                    pmf[i] * content_objective((bi + t).clamp(0.0, 1.0), pc)
                        + pmf[j] * content_objective((bj - t).clamp(0.0, 1.0), pc)
                };
                let lo_t = (-bi).max(bj - 1.0);
                let hi_t = (1.0 - bi).min(bj);
                let current = pair(0.0);
                let (t, val) = robust_max(&pair, lo_t, hi_t, POLISH_GRID);
                if val > current + 1e-16 {
                    b[i] = (bi + t).clamp(0.0, 1.0);
                    b[j] = (bj - t).clamp(0.0, 1.0);
                    gain += val - current;
                }
            }
        }
        if gain < 1e-14 {
            converged = true;
            break;
        }
    }
    let max_hit = objective(&pmf, &b, pc);
    if !converged {
        return Err(Error::NotConverged {
            iterations: POLISH_SWEEPS,
            objective: max_hit,
            best: b,
        });
    }

    // Rounding in the transfers can leave Σ b a few ulps above capacity.
    let total: f64 = b.iter().sum();
    if total > capacity {
        let excess = total - capacity;
        if let Some(j) = (0..j_count).max_by(|&x, &y| b[x].total_cmp(&b[y]).then(y.cmp(&x))) {
            b[j] -= excess;
        }
    }
    let max_hit = objective(&pmf, &b, pc);
    Ok(Placement {
        policy: CachePolicy::new(b, library)?,
        max_hit,
        multiplier: hi,
    })
}

/// T* = N_a · P*_hit.
pub fn throughput(placement: &Placement, cfg: &NetworkConfig) -> f64 {
    throughput_from_hit(placement.max_hit, cfg.n_active)
}

pub fn throughput_from_hit(max_hit: f64, n_active: usize) -> f64 {
    n_active as f64 * max_hit
}
