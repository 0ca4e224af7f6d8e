//! The Gauss hypergeometric kernel ₂F₁(1, 2/α; 1 + 2/α; z) for z ≤ 0 and the
//! interference factor built on top of it.
//!
//! With b = 2/α the kernel has the series Σₙ b·zⁿ/(b + n), used for
//! |z| < 0.9. Beyond that the integral form b·∫₀¹ t^(b−1)/(1 − z·t) dt is
//! used after the substitution t = v^(1/b), which removes the endpoint
//! singularity and leaves ∫₀¹ dv/(1 − z·v^(α/2)).
//!
//! Most callers need 1 − ₂F₁ rather than ₂F₁ itself (the interference factor
//! is x²·(1 − ₂F₁)), so both paths are written for the complement to avoid
//! cancellation when z is close to 0.

use crate::error::{domain, Result};
use crate::quadrature::{integrate, QuadOptions};

/// Below this |z| the power series is used; at or above it, quadrature.
pub const SERIES_SWITCHOVER: f64 = 0.9;

const KERNEL_QUAD: QuadOptions = QuadOptions {
    abs_tol: 1e-12,
    max_panels: 10_000,
};

/// Validated (α, z) pair for the kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeomParams {
    alpha: f64,
    z: f64,
}

impl HypergeomParams {
    pub fn new(alpha: f64, z: f64) -> Result<Self> {
        if !(alpha > 2.0) || !alpha.is_finite() {
            return domain(format!(
                "path-loss exponent must be finite and > 2, got {alpha}"
            ));
        }
        if !(z <= 0.0) {
            return domain(format!("kernel argument must be <= 0, got {z}"));
        }
        Ok(Self { alpha, z })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// The `b = 2/α` parameter of the kernel.
    pub fn b(&self) -> f64 {
        2.0 / self.alpha
    }

    /// 1 − ₂F₁(1, b; 1 + b; z), dispatching on |z|.
    pub fn complement(&self) -> Result<f64> {
        if self.z == 0.0 {
            Ok(0.0)
        } else if self.z.abs() < SERIES_SWITCHOVER {
            Ok(self.complement_series())
        } else {
            self.complement_integral()
        }
    }

    /// 1 − ₂F₁ via −Σ_{n≥1} b·zⁿ/(b + n). Only meaningful for |z| < 1.
    pub fn complement_series(&self) -> f64 {
        let b = self.b();
        let y = -self.z;
        // Alternating series in y = |z|; terms shrink monotonically for y < 1.
        let mut sum = 0.0;
        let mut power = 1.0;
        for n in 1..=5_000u32 {
            power *= y;
            let term = b * power / (b + f64::from(n));
            if n % 2 == 1 {
                sum += term;
            } else {
                sum -= term;
            }
            if term < 1e-18 {
                break;
            }
        }
        sum
    }

    /// 1 − ₂F₁ via ∫₀¹ y·v^p / (1 + y·v^p) dv with y = −z, p = α/2.
    pub fn complement_integral(&self) -> Result<f64> {
        let y = -self.z;
        let p = 0.5 * self.alpha;
        let r = integrate(
            |v| {
                let t = y * v.powf(p);
                t / (1.0 + t)
            },
            0.0,
            1.0,
            KERNEL_QUAD,
        )?;
        Ok(r.value)
    }
}

/// ₂F₁(1, 2/α; 1 + 2/α; z) for α > 2 and z ≤ 0.
pub fn hyp2f1_caching(alpha: f64, z: f64) -> Result<f64> {
    Ok(1.0 - HypergeomParams::new(alpha, z)?.complement()?)
}

/// 1 − ₂F₁(1, 2/α; 1 + 2/α; z), computed without cancellation.
pub fn hyp2f1_caching_complement(alpha: f64, z: f64) -> Result<f64> {
    HypergeomParams::new(alpha, z)?.complement()
}

/// C(α, s, x) = x² − x²·₂F₁(1, 2/α; 1 + 2/α; −x^α/s).
///
/// Equivalently 2∫₀ˣ u/(1 + s·u^(−α)) du, the interference mass of a disk of
/// radius `x` seen by a receiver at the origin with Laplace variable `s`.
pub fn interference_factor(alpha: f64, s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0) {
        return domain(format!("Laplace variable must be > 0, got {s}"));
    }
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("radius must be finite and > 0, got {x}"));
    }
    let z = -(x.powf(alpha) / s);
    Ok(x * x * hyp2f1_caching_complement(alpha, z)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn at_origin_is_one() {
        assert_eq!(hyp2f1_caching(4.0, 0.0).unwrap(), 1.0);
        assert_eq!(hyp2f1_caching(2.5, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn alpha_four_unit_argument_is_quarter_pi() {
        let v = hyp2f1_caching(4.0, -1.0).unwrap();
        assert!((v - FRAC_PI_4).abs() < 1e-10, "{v}");
    }

    #[test]
    fn arctan_identity() {
        for y in [0.1_f64, 0.5, 1.0, 2.0, 10.0] {
            let v = hyp2f1_caching(4.0, -y * y).unwrap();
            let expect = y.atan() / y;
            assert!((v - expect).abs() < 1e-9, "y={y}: {v} vs {expect}");
        }
    }

    #[test]
    fn series_and_integral_agree_on_overlap() {
        for alpha in [2.2, 3.0, 3.5, 4.0, 6.0] {
            for i in 0..=40 {
                let z = -(0.5 + 0.4 * f64::from(i) / 40.0);
                let p = HypergeomParams::new(alpha, z).unwrap();
                let s = p.complement_series();
                let q = p.complement_integral().unwrap();
                assert!((s - q).abs() < 1e-9, "alpha={alpha} z={z}: {s} vs {q}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(hyp2f1_caching(2.0, -1.0).is_err());
        assert!(hyp2f1_caching(1.5, -1.0).is_err());
        assert!(hyp2f1_caching(4.0, 0.1).is_err());
        assert!(hyp2f1_caching(4.0, f64::NAN).is_err());
        assert!(interference_factor(4.0, 0.0, 1.0).is_err());
        assert!(interference_factor(4.0, -1.0, 1.0).is_err());
        assert!(interference_factor(4.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn interference_factor_unit_case() {
        let c = interference_factor(4.0, 1.0, 1.0).unwrap();
        assert!((c - (1.0 - FRAC_PI_4)).abs() < 1e-10);
    }

    #[test]
    fn interference_factor_vanishes_for_large_s() {
        let c = interference_factor(4.0, 1e12, 1.0).unwrap();
        assert!((0.0..1e-12).contains(&c), "{c}");
    }

    #[test]
    fn very_large_argument_stays_in_range() {
        for z in [-1e3, -1e8, -1e15] {
            let f = hyp2f1_caching(3.0, z).unwrap();
            assert!(f > 0.0 && f < 1.0, "z={z}: {f}");
        }
    }

    #[test]
    fn bounded_and_monotone_in_s_on_grid() {
        for ia in 0..20 {
            let alpha = 2.1 + 0.2 * f64::from(ia);
            let mut prev = f64::INFINITY;
            for is in 0..20 {
                let s = 10f64.powf(-3.0 + 0.35 * f64::from(is));
                let x = 0.8;
                let c = interference_factor(alpha, s, x).unwrap();
                assert!((0.0..x * x).contains(&c), "alpha={alpha} s={s}: {c}");
                assert!(c <= prev + 1e-12, "not monotone at alpha={alpha} s={s}");
                prev = c;
            }
        }
    }
}
