//! Laplace transform of the interference seen by a receiver served by its
//! k-th closest device, conditioned on the serving distance.
//!
//! Given the serving distance r, the devices closer than r and those farther
//! than r are independent and each i.i.d. with the conditional laws in
//! [`crate::geometry`]. The transform is therefore a mixture, over the number
//! ℓ of active interferers that are closer than the server, of
//! (inner factor)^ℓ · (outer factor)^(N_a − 1 − ℓ).
//!
//! Two mixture laws for ℓ are provided, see [`WeightMode`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Error, Result};
use crate::geometry::{sample_inner, sample_outer, NetworkConfig, ServingIndex};
use crate::quadrature::{integrate, QuadOptions};
use crate::specfun::hyp2f1_caching_complement;
use crate::stream::{sum_trials, trial_rng, StreamTag};

/// Law of the number of active interferers closer than the server.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// Renormalized binomial(N_a − 1, p) truncated at min(k − 1, N_a − 1),
    /// with p = (k − 1)/(N_t − 1).
    #[default]
    Paper,
    /// Hypergeometric: N_a − 1 interferers drawn without replacement from the
    /// k − 1 inner and N_t − k outer non-serving devices.
    Exact,
}

impl WeightMode {
    pub const ALL: [WeightMode; 2] = [WeightMode::Paper, WeightMode::Exact];

    pub fn as_str(self) -> &'static str {
        match self {
            WeightMode::Paper => "paper",
            WeightMode::Exact => "exact",
        }
    }
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "paper" => Ok(WeightMode::Paper),
            "exact" => Ok(WeightMode::Exact),
            other => domain(format!(
                "unknown weight mode {other:?} (expected paper|exact)"
            )),
        }
    }
}

/// Mixture weights over ℓ = 0..=n_cap inner interferers.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureWeights {
    pub k: usize,
    /// Probability that a given non-serving device is closer than the server.
    pub p: f64,
    pub n_cap: usize,
    pub weights: Vec<f64>,
}

impl MixtureWeights {
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights.iter().copied().enumerate()
    }
}

fn ln_choose(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

// ℓ·ln p + m·ln(1 − p) with 0·ln 0 = 0.
fn ln_bernoulli_powers(p: f64, successes: usize, failures: usize) -> f64 {
    let mut acc = 0.0;
    if successes > 0 {
        acc += successes as f64 * p.ln();
    }
    if failures > 0 {
        acc += failures as f64 * (1.0 - p).ln();
    }
    acc
}

fn normalize_log_weights(ln_w: Vec<f64>) -> Vec<f64> {
    let max = ln_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = ln_w.iter().map(|&l| (l - max).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn rank_setup(k: usize, cfg: &NetworkConfig) -> Result<(f64, usize)> {
    cfg.validate()?;
    ServingIndex::new(k, cfg)?;
    let p = if cfg.n_total == 1 {
        0.0
    } else {
        (k - 1) as f64 / (cfg.n_total - 1) as f64
    };
    Ok((p, (k - 1).min(cfg.n_active - 1)))
}

/// Truncated, renormalized binomial weights ξ(ℓ).
pub fn mixture_weights(k: usize, cfg: &NetworkConfig) -> Result<MixtureWeights> {
    let (p, n_cap) = rank_setup(k, cfg)?;
    let n = cfg.n_active - 1;
    let ln_w = (0..=n_cap)
        .map(|l| ln_choose(n, l) + ln_bernoulli_powers(p, l, n - l))
        .collect();
    Ok(MixtureWeights {
        k,
        p,
        n_cap,
        weights: normalize_log_weights(ln_w),
    })
}

/// Hypergeometric weights C(k−1, ℓ)·C(N_t−k, N_a−1−ℓ)/C(N_t−1, N_a−1).
pub fn mixture_weights_exact(k: usize, cfg: &NetworkConfig) -> Result<MixtureWeights> {
    let (p, n_cap) = rank_setup(k, cfg)?;
    let n = cfg.n_active - 1;
    let outer = cfg.n_total - k;
    let ln_w = (0..=n_cap)
        .map(|l| {
            if n - l > outer {
                f64::NEG_INFINITY
            } else {
                ln_choose(k - 1, l) + ln_choose(outer, n - l)
            }
        })
        .collect();
    Ok(MixtureWeights {
        k,
        p,
        n_cap,
        weights: normalize_log_weights(ln_w),
    })
}

pub fn mixture_weights_for(
    mode: WeightMode,
    k: usize,
    cfg: &NetworkConfig,
) -> Result<MixtureWeights> {
    match mode {
        WeightMode::Paper => mixture_weights(k, cfg),
        WeightMode::Exact => mixture_weights_exact(k, cfg),
    }
}

fn check_serving_distance(r: f64, k: usize, cfg: &NetworkConfig) -> Result<()> {
    let ok = (r > 0.0 && r < cfg.radius) || (r == cfg.radius && k == cfg.n_total);
    if !ok {
        return domain(format!(
            "serving distance {r} outside (0, {}) for rank {k} of {}",
            cfg.radius, cfg.n_total
        ));
    }
    Ok(())
}

/// E[1/(1 + s·U^(−α))] for U from the inner conditional law; C(α,s,r)/r².
pub fn inner_factor(s: f64, r: f64, alpha: f64) -> Result<f64> {
    hyp2f1_caching_complement(alpha, -(r.powf(alpha) / s))
}

/// E[1/(1 + s·U^(−α))] for U from the outer conditional law;
/// (C(α,s,r_d) − C(α,s,r))/(r_d² − r²).
pub fn outer_factor(s: f64, r: f64, cfg: &NetworkConfig) -> Result<f64> {
    let rd = cfg.radius;
    let alpha = cfg.alpha;
    let width = rd * rd - r * r;
    if r > 0.99 * rd {
        // Direct form avoids subtracting two nearly equal C values.
        let mass = integrate(
            |u| {
                let ua = u.powf(alpha);
                2.0 * u * ua / (ua + s)
            },
            r,
            rd,
            QuadOptions::new(1e-13 * width, 10_000),
        )?;
        return Ok(mass.value / width);
    }
    let c_rd = rd * rd * hyp2f1_caching_complement(alpha, -(rd.powf(alpha) / s))?;
    let c_r = r * r * hyp2f1_caching_complement(alpha, -(r.powf(alpha) / s))?;
    Ok(((c_rd - c_r) / width).clamp(0.0, 1.0))
}

/// Conditional Laplace transform L_I^(k)(s | r).
pub fn laplace_interference(
    s: f64,
    r: f64,
    k: usize,
    cfg: &NetworkConfig,
    mode: WeightMode,
) -> Result<f64> {
    cfg.validate()?;
    ServingIndex::new(k, cfg)?;
    check_serving_distance(r, k, cfg)?;
    if !(s >= 0.0) || !s.is_finite() {
        return domain(format!("Laplace variable must be finite and >= 0, got {s}"));
    }
    if s == 0.0 || cfg.n_active == 1 {
        return Ok(1.0);
    }
    let weights = mixture_weights_for(mode, k, cfg)?;
    laplace_with_weights(s, r, cfg, &weights)
}

pub(crate) fn laplace_with_weights(
    s: f64,
    r: f64,
    cfg: &NetworkConfig,
    weights: &MixtureWeights,
) -> Result<f64> {
    let n = cfg.n_active - 1;
    let inner = inner_factor(s, r, cfg.alpha)?;
    let needs_outer = weights.iter().any(|(l, w)| w > 0.0 && l < n);
    let outer = if needs_outer {
        outer_factor(s, r, cfg)?
    } else {
        1.0
    };
    let value = weights
        .iter()
        .filter(|&(_, w)| w > 0.0)
        .map(|(l, w)| w * inner.powi(l as i32) * outer.powi((n - l) as i32))
        .sum::<f64>();
    Ok(value.clamp(0.0, 1.0))
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

/// Brute-force estimate of L_I^(k)(s | r): draws the inner-interferer count
/// without replacement, distances from the conditional samplers and unit-mean
/// exponential fading, then averages exp(−s·Σ h·u^(−α)).
pub fn laplace_mc_oracle(
    s: f64,
    r: f64,
    k: usize,
    cfg: &NetworkConfig,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    cfg.validate()?;
    ServingIndex::new(k, cfg)?;
    check_serving_distance(r, k, cfg)?;
    if !(s >= 0.0) {
        return domain(format!("Laplace variable must be >= 0, got {s}"));
    }
    if trials == 0 {
        return domain("trials must be >= 1");
    }
    let n_interferers = cfg.n_active - 1;
    let (sum, sum_sq) = sum_trials(trials, |i| {
        let mut rng = trial_rng(seed, StreamTag::Laplace, i);
        let mut inner_left = k - 1;
        let mut pool = cfg.n_total - 1;
        let mut interference = 0.0;
        for _ in 0..n_interferers {
            let is_inner = rng.random_range(0..pool) < inner_left;
            pool -= 1;
            let u = if is_inner {
                inner_left -= 1;
                sample_inner(r, &mut rng)
            } else {
                sample_outer(r, cfg, &mut rng)
            };
            let h: f64 = Exp1.sample(&mut rng);
            interference += h * u.powf(-cfg.alpha);
        }
        (-s * interference).exp()
    });
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        mean,
        stderr: (var / n).sqrt(),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n_total: usize, n_active: usize) -> NetworkConfig {
        NetworkConfig::new(n_total, n_active, 1.0, 4.0).unwrap()
    }

    fn assert_weights(w: &MixtureWeights, expect: &[f64]) {
        assert_eq!(w.weights.len(), expect.len(), "{w:?}");
        for (a, b) in w.weights.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{w:?} vs {expect:?}");
        }
    }

    #[test]
    fn paper_weights_examples() {
        assert_weights(&mixture_weights(1, &cfg(7, 4)).unwrap(), &[1.0]);
        let w = mixture_weights(2, &cfg(3, 2)).unwrap();
        assert_eq!(w.p, 0.5);
        assert_eq!(w.n_cap, 1);
        assert_weights(&w, &[0.5, 0.5]);
        let w = mixture_weights(3, &cfg(5, 5)).unwrap();
        assert_eq!(w.n_cap, 2);
        assert_weights(&w, &[1.0 / 11.0, 4.0 / 11.0, 6.0 / 11.0]);
        assert_weights(&mixture_weights(1, &cfg(1, 1)).unwrap(), &[1.0]);
    }

    #[test]
    fn exact_weights_examples() {
        assert_weights(
            &mixture_weights_exact(3, &cfg(5, 5)).unwrap(),
            &[0.0, 0.0, 1.0],
        );
        assert_weights(&mixture_weights_exact(2, &cfg(3, 2)).unwrap(), &[0.5, 0.5]);
        assert_weights(&mixture_weights_exact(1, &cfg(9, 3)).unwrap(), &[1.0]);
        // C(3,ℓ)·C(4,3−ℓ)/C(7,3) for k=4, N_t=8, N_a=4
        assert_weights(
            &mixture_weights_exact(4, &cfg(8, 4)).unwrap(),
            &[4.0 / 35.0, 18.0 / 35.0, 12.0 / 35.0, 1.0 / 35.0],
        );
    }

    #[test]
    fn weights_reject_bad_rank() {
        assert!(mixture_weights(6, &cfg(5, 5)).is_err());
        assert!(mixture_weights_exact(0, &cfg(5, 5)).is_err());
    }

    #[test]
    fn weights_sum_to_one_and_exact_is_point_mass_when_all_active() {
        for n_total in 1..=15 {
            for n_active in 1..=n_total {
                let c = cfg(n_total, n_active);
                for k in 1..=n_total {
                    for mode in WeightMode::ALL {
                        let w = mixture_weights_for(mode, k, &c).unwrap();
                        assert_eq!(w.weights.len(), w.n_cap + 1);
                        assert!(w.weights.iter().all(|&x| (0.0..=1.0).contains(&x)));
                        let total: f64 = w.weights.iter().sum();
                        assert!((total - 1.0).abs() < 1e-12);
                    }
                    if n_active == n_total {
                        let w = mixture_weights_exact(k, &c).unwrap();
                        assert_eq!(w.weights[k - 1], 1.0);
                    }
                }
            }
        }
    }

    #[test]
    fn weight_mode_parsing() {
        assert_eq!("paper".parse::<WeightMode>().unwrap(), WeightMode::Paper);
        assert_eq!("EXACT".parse::<WeightMode>().unwrap(), WeightMode::Exact);
        assert!("other".parse::<WeightMode>().is_err());
        assert_eq!(WeightMode::default(), WeightMode::Paper);
    }

    #[test]
    fn trivial_transform_values() {
        let c = cfg(5, 5);
        for mode in WeightMode::ALL {
            assert_eq!(laplace_interference(0.0, 0.4, 3, &c, mode).unwrap(), 1.0);
            assert_eq!(
                laplace_interference(2.0, 0.4, 3, &cfg(5, 1), mode).unwrap(),
                1.0
            );
        }
        let mc = laplace_mc_oracle(0.0, 0.4, 3, &c, 100, 1).unwrap();
        assert_eq!((mc.mean, mc.stderr), (1.0, 0.0));
        let mc = laplace_mc_oracle(3.0, 0.4, 3, &cfg(5, 1), 100, 1).unwrap();
        assert_eq!((mc.mean, mc.stderr), (1.0, 0.0));
    }

    #[test]
    fn serving_distance_domain() {
        let c = cfg(5, 5);
        assert!(laplace_interference(1.0, 0.0, 2, &c, WeightMode::Paper).is_err());
        assert!(laplace_interference(1.0, 1.0, 2, &c, WeightMode::Paper).is_err());
        assert!(laplace_interference(1.0, 1.2, 5, &c, WeightMode::Paper).is_err());
        assert!(laplace_interference(-1.0, 0.5, 2, &c, WeightMode::Paper).is_err());
        // r = r_d is allowed for the farthest rank: the outer set is empty.
        for mode in WeightMode::ALL {
            let v = laplace_interference(1.0, 1.0, 5, &c, mode).unwrap();
            let inner = 1.0 - std::f64::consts::FRAC_PI_4;
            assert!((v - inner.powi(4)).abs() < 1e-12, "{mode}: {v}");
        }
    }

    #[test]
    fn outer_factor_branches_agree() {
        // The near-rim quadrature branch and the closed form must meet at 0.99 r_d.
        let c = NetworkConfig::new(6, 6, 2.0, 3.3).unwrap();
        for s in [0.05, 1.0, 40.0] {
            let r = 0.99 * c.radius;
            let closed = {
                let width = c.radius.powi(2) - r * r;
                let c_rd = c.radius.powi(2)
                    * hyp2f1_caching_complement(c.alpha, -(c.radius.powf(c.alpha) / s)).unwrap();
                let c_r =
                    r * r * hyp2f1_caching_complement(c.alpha, -(r.powf(c.alpha) / s)).unwrap();
                (c_rd - c_r) / width
            };
            let quad = outer_factor(s, r * (1.0 + 1e-15), &c).unwrap();
            assert!((closed - quad).abs() < 1e-8, "s={s}: {closed} vs {quad}");
        }
    }

    #[test]
    fn strictly_decreasing_in_s_and_bounded() {
        for (n_total, n_active) in [(5, 5), (8, 3), (12, 12)] {
            let c = cfg(n_total, n_active);
            for k in [1, n_total / 2, n_total] {
                for r in [0.1, 0.5, 0.9] {
                    for mode in WeightMode::ALL {
                        let mut prev = 1.0 + 1e-15;
                        for i in 0..15 {
                            let s = 1e-4 * 3f64.powi(i);
                            let v = laplace_interference(s, r, k, &c, mode).unwrap();
                            assert!(v > 0.0 && v <= 1.0);
                            assert!(v < prev, "N_t={n_total} k={k} r={r} s={s}: {v} >= {prev}");
                            prev = v;
                        }
                    }
                }
            }
        }
    }
}
