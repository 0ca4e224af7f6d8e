//! Distance distributions of a uniform binomial point process in a disk
//! centred on the receiver, and exact samplers for them.
//!
//! Densities are clamped to zero outside their support rather than erroring.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Result};

/// Parameters of the finite network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    /// Number of transmitting devices in the disk.
    pub n_total: usize,
    /// Number of simultaneously active devices (server plus interferers).
    pub n_active: usize,
    /// Disk radius.
    pub radius: f64,
    /// Path-loss exponent.
    pub alpha: f64,
}

impl NetworkConfig {
    pub fn new(n_total: usize, n_active: usize, radius: f64, alpha: f64) -> Result<Self> {
        let cfg = Self {
            n_total,
            n_active,
            radius,
            alpha,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_total == 0 {
            return domain("n_total must be >= 1");
        }
        if self.n_active == 0 || self.n_active > self.n_total {
            return domain(format!(
                "n_active must lie in 1..={}, got {}",
                self.n_total, self.n_active
            ));
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return domain(format!(
                "radius must be finite and > 0, got {}",
                self.radius
            ));
        }
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return domain(format!("alpha must be finite and > 2, got {}", self.alpha));
        }
        Ok(())
    }

    /// Same network with a different number of active devices.
    pub fn with_active(&self, n_active: usize) -> Result<Self> {
        Self::new(self.n_total, n_active, self.radius, self.alpha)
    }

    /// Same network with a different radius.
    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        Self::new(self.n_total, self.n_active, radius, self.alpha)
    }
}

/// Rank of the serving device among all transmitters, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ServingIndex(usize);

impl ServingIndex {
    pub fn new(k: usize, cfg: &NetworkConfig) -> Result<Self> {
        if k == 0 || k > cfg.n_total {
            return domain(format!(
                "serving rank must lie in 1..={}, got {k}",
                cfg.n_total
            ));
        }
        Ok(Self(k))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// Density 2w/r_d² of a single device's distance to the centre.
pub fn distance_pdf(w: f64, cfg: &NetworkConfig) -> f64 {
    if !(0.0..=cfg.radius).contains(&w) {
        return 0.0;
    }
    2.0 * w / (cfg.radius * cfg.radius)
}

/// CDF w²/r_d², clamped to [0, 1].
pub fn distance_cdf(w: f64, cfg: &NetworkConfig) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    (w * w / (cfg.radius * cfg.radius)).min(1.0)
}

fn ln_choose_order(n: usize, k: usize) -> f64 {
    // ln N!/((k−1)!(N−k)!)
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64) - ln_gamma((n - k) as f64 + 1.0)
}

/// Density of the distance to the k-th closest of the `n_total` devices.
pub fn serving_distance_pdf(r: f64, k: ServingIndex, cfg: &NetworkConfig) -> f64 {
    let k = k.get();
    let n = cfg.n_total;
    if !(0.0..=cfg.radius).contains(&r) {
        return 0.0;
    }
    let f = distance_pdf(r, cfg);
    if f == 0.0 {
        return 0.0;
    }
    let big_f = distance_cdf(r, cfg);
    let mut ln = ln_choose_order(n, k) + f.ln();
    if k > 1 {
        ln += (k - 1) as f64 * big_f.ln();
    }
    // (1 − F)^0 is taken as 1 even at r = r_d.
    if n > k {
        let tail = 1.0 - big_f;
        if tail <= 0.0 {
            return 0.0;
        }
        ln += (n - k) as f64 * tail.ln();
    }
    ln.exp()
}

/// CDF of the k-th closest distance, Σ_{i≥k} C(N,i) Fⁱ (1−F)^(N−i).
pub fn serving_distance_cdf(r: f64, k: ServingIndex, cfg: &NetworkConfig) -> f64 {
    let big_f = distance_cdf(r, cfg);
    if big_f <= 0.0 {
        return 0.0;
    }
    if big_f >= 1.0 {
        return 1.0;
    }
    let n = cfg.n_total;
    let ln_n = ln_gamma(n as f64 + 1.0);
    let total: f64 = (k.get()..=n)
        .map(|i| {
            let ln_c = ln_n - ln_gamma(i as f64 + 1.0) - ln_gamma((n - i) as f64 + 1.0);
            (ln_c + i as f64 * big_f.ln() + (n - i) as f64 * (1.0 - big_f).ln()).exp()
        })
        .sum();
    total.clamp(0.0, 1.0)
}

/// Density of an interferer that lies closer than the serving distance `r`.
pub fn inner_conditional_pdf(u: f64, r: f64, cfg: &NetworkConfig) -> Result<f64> {
    if !(r > 0.0) || r > cfg.radius {
        return domain(format!(
            "serving distance must lie in (0, {}], got {r}",
            cfg.radius
        ));
    }
    if !(0.0..r).contains(&u) {
        return Ok(0.0);
    }
    Ok(2.0 * u / (r * r))
}

/// Density of an interferer that lies farther than the serving distance `r`.
pub fn outer_conditional_pdf(u: f64, r: f64, cfg: &NetworkConfig) -> Result<f64> {
    if !(r >= 0.0) || r >= cfg.radius {
        return domain(format!(
            "serving distance must lie in [0, {}), got {r}",
            cfg.radius
        ));
    }
    if !(u > r && u <= cfg.radius) {
        return Ok(0.0);
    }
    Ok(2.0 * u / (cfg.radius * cfg.radius - r * r))
}

/// Inverse CDF of the inner conditional law: u = r·√v.
pub fn inner_quantile(r: f64, v: f64) -> f64 {
    r * v.sqrt()
}

/// Inverse CDF of the outer conditional law: u = √(r² + v·(r_d² − r²)).
pub fn outer_quantile(r: f64, v: f64, cfg: &NetworkConfig) -> f64 {
    let rd2 = cfg.radius * cfg.radius;
    (r * r + v * (rd2 - r * r)).sqrt()
}

pub fn sample_inner<R: Rng + ?Sized>(r: f64, rng: &mut R) -> f64 {
    inner_quantile(r, rng.random::<f64>())
}

pub fn sample_outer<R: Rng + ?Sized>(r: f64, cfg: &NetworkConfig, rng: &mut R) -> f64 {
    outer_quantile(r, rng.random::<f64>(), cfg)
}

/// Distance of a uniform point in the disk: r_d·√u.
pub fn sample_radius<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> f64 {
    radius * rng.random::<f64>().sqrt()
}
