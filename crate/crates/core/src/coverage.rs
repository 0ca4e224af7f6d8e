//! Coverage probability of the receiver when served by its k-th closest
//! device, and the closed-form upper bound that drops the interferers
//! farther than the server.
//!
//! All thresholds are linear-scale SIR values; dB conversion happens at the
//! CLI boundary.

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::geometry::{serving_distance_pdf, NetworkConfig, ServingIndex};
use crate::interference::{laplace_with_weights, mixture_weights_for, WeightMode};
use crate::quadrature::{integrate_with_breaks, QuadOptions};
use crate::specfun::hyp2f1_caching_complement;

/// Absolute tolerance of the outer quadrature over the serving distance.
pub const COVERAGE_TOL: f64 = 1e-7;

const COVERAGE_QUAD: QuadOptions = QuadOptions {
    abs_tol: COVERAGE_TOL,
    max_panels: 10_000,
};

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return domain(format!("SIR threshold must be finite and > 0, got {beta}"));
    }
    Ok(())
}

/// P_c^(k) = ∫₀^{r_d} L_I^(k)(β·r^α | r) f_R^(k)(r) dr.
pub fn coverage_probability(
    k: usize,
    beta: f64,
    cfg: &NetworkConfig,
    mode: WeightMode,
) -> Result<f64> {
    cfg.validate()?;
    check_beta(beta)?;
    let idx = ServingIndex::new(k, cfg)?;
    if cfg.n_active == 1 {
        return Ok(1.0);
    }
    let weights = mixture_weights_for(mode, k, cfg)?;
    let rd = cfg.radius;
    let integrand = |r: f64| -> f64 {
        let density = serving_distance_pdf(r, idx, cfg);
        if density == 0.0 || r <= 0.0 {
            return 0.0;
        }
        let s = beta * r.powf(cfg.alpha);
        // Panels never sample the endpoints, so r < r_d here unless k = N_t.
        match laplace_with_weights(s, r, cfg, &weights) {
            Ok(l) => l * density,
            Err(_) => f64::NAN,
        }
    };
    // The last 1% of the disk gets its own panels: for k = N_t the density
    // peaks at the rim.
    let result = integrate_with_breaks(integrand, &[0.0, 0.5 * rd, 0.99 * rd, rd], COVERAGE_QUAD)?;
    if result.value.is_nan() {
        return domain("coverage integrand evaluated outside its domain");
    }
    Ok(clamp_probability(result.value))
}

fn clamp_probability(v: f64) -> f64 {
    // Quadrature noise may push the value a hair outside [0, 1].
    v.clamp(0.0, 1.0)
}

/// Upper bound that keeps only the interferers closer than the server,
/// using the truncated-binomial weights.
pub fn coverage_upper_bound(k: usize, beta: f64, cfg: &NetworkConfig) -> Result<f64> {
    coverage_upper_bound_with(k, beta, cfg, WeightMode::Paper)
}

/// Σ_ℓ w(ℓ)·(1 − ₂F₁(1, 2/α; 1 + 2/α; −1/β))^ℓ for the chosen mixture law.
pub fn coverage_upper_bound_with(
    k: usize,
    beta: f64,
    cfg: &NetworkConfig,
    mode: WeightMode,
) -> Result<f64> {
    cfg.validate()?;
    check_beta(beta)?;
    let weights = mixture_weights_for(mode, k, cfg)?;
    let inner = hyp2f1_caching_complement(cfg.alpha, -1.0 / beta)?;
    let bound = weights
        .iter()
        .filter(|&(_, w)| w > 0.0)
        .map(|(l, w)| w * inner.powi(l as i32))
        .sum::<f64>();
    Ok(clamp_probability(bound))
}

/// (1 − √β·arctan(1/√β))^(k−1): the bound for α = 4 when every device is active.
pub fn closed_form_bound_alpha4(k: usize, beta: f64) -> f64 {
    let sb = beta.sqrt();
    (1.0 - sb * (1.0 / sb).atan()).powi(k as i32 - 1)
}

/// Coverage probabilities P_c^(k) for k = 1..=N_t at one threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageTable {
    pub beta: f64,
    pub values: Vec<f64>,
    pub cfg: NetworkConfig,
    pub weight_mode: WeightMode,
}

impl CoverageTable {
    /// Evaluates every rank; ranks run in parallel but the table is identical
    /// to a sequential build.
    pub fn compute(beta: f64, cfg: &NetworkConfig, mode: WeightMode) -> Result<Self> {
        cfg.validate()?;
        check_beta(beta)?;
        let values = (1..=cfg.n_total)
            .into_par_iter()
            .map(|k| coverage_probability(k, beta, cfg, mode))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self {
            beta,
            values,
            cfg: *cfg,
            weight_mode: mode,
        })
    }

    /// Builds a table from precomputed values (k = 1 first).
    pub fn from_values(
        beta: f64,
        values: Vec<f64>,
        cfg: &NetworkConfig,
        mode: WeightMode,
    ) -> Result<Self> {
        cfg.validate()?;
        if values.len() != cfg.n_total {
            return Err(crate::error::Error::Dimension {
                what: "coverage table",
                got: values.len(),
                expected: cfg.n_total,
            });
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return domain("coverage values must lie in [0, 1]");
        }
        Ok(Self {
            beta,
            values,
            cfg: *cfg,
            weight_mode: mode,
        })
    }

    /// P_c^(k), 1-based.
    pub fn get(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.values.get(i)).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when the values do not increase with k (up to `tol`).
    pub fn is_nonincreasing(&self, tol: f64) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0] + tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn cfg(n_total: usize, n_active: usize) -> NetworkConfig {
        NetworkConfig::new(n_total, n_active, 1.0, 4.0).unwrap()
    }

    #[test]
    fn no_interference_means_full_coverage() {
        let c = cfg(6, 1);
        for k in 1..=6 {
            for mode in WeightMode::ALL {
                assert_eq!(coverage_probability(k, 3.0, &c, mode).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn two_devices_farthest_server() {
        for mode in WeightMode::ALL {
            let v = coverage_probability(2, 1.0, &cfg(2, 2), mode).unwrap();
            assert!((v - (1.0 - FRAC_PI_4)).abs() < 1e-6, "{mode}: {v}");
        }
    }

    #[test]
    fn bound_point_values() {
        for n in [2usize, 3, 5, 9] {
            assert_eq!(coverage_upper_bound(1, 1.0, &cfg(n, n)).unwrap(), 1.0);
        }
        let b = coverage_upper_bound(2, 1.0, &cfg(2, 2)).unwrap();
        assert!((b - (1.0 - FRAC_PI_4)).abs() < 1e-12);
        let b = coverage_upper_bound(3, 1.0, &cfg(3, 3)).unwrap();
        assert!((b - (1.0 - FRAC_PI_4).powi(2)).abs() < 1e-12);
        assert!((b - 0.046_054_0).abs() < 1e-7);
        let b = coverage_upper_bound_with(3, 1.0, &cfg(7, 7), WeightMode::Exact).unwrap();
        assert!((b - (1.0 - FRAC_PI_4).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn invalid_inputs() {
        let c = cfg(5, 5);
        assert!(coverage_probability(0, 1.0, &c, WeightMode::Paper).is_err());
        assert!(coverage_probability(6, 1.0, &c, WeightMode::Paper).is_err());
        assert!(coverage_probability(2, 0.0, &c, WeightMode::Paper).is_err());
        assert!(coverage_upper_bound(2, -1.0, &c).is_err());
        assert!(CoverageTable::from_values(1.0, vec![1.0; 4], &c, WeightMode::Paper).is_err());
        assert!(CoverageTable::from_values(1.0, vec![1.2; 5], &c, WeightMode::Paper).is_err());
    }

    #[test]
    fn table_is_monotone_and_indexed_from_one() {
        let c = cfg(6, 4);
        let t = CoverageTable::compute(1.0, &c, WeightMode::Paper).unwrap();
        assert_eq!(t.len(), 6);
        assert_eq!(t.get(0), None);
        assert_eq!(t.get(1), Some(t.values[0]));
        assert!(t.is_nonincreasing(1e-9), "{:?}", t.values);
        assert!(t.values.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
