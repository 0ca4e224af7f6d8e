//! Oracles shared by the integration tests. They deliberately avoid the
//! library's own quadrature and optimizer.

#![allow(dead_code)]

use d2dcache::caching::{CachePolicy, ContentLibrary};
use d2dcache::coverage::CoverageTable;
use d2dcache::hit_probability;

/// Tanh-sinh quadrature of `f` on [a, b], refined by halving the step until
/// two successive levels agree to `tol`. Handles integrable endpoint
/// singularities. Panics if it fails to settle.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    use std::f64::consts::FRAC_PI_2;
    const T_MAX: f64 = 5.5;
    let width = b - a;
    let node = |t: f64| -> f64 {
        let s = FRAC_PI_2 * t.sinh();
        let cs = s.cosh();
        let w = FRAC_PI_2 * t.cosh() / (2.0 * cs * cs);
        if w == 0.0 || !w.is_finite() {
            return 0.0;
        }
        // Logistic form keeps nodes near `a` accurate when a = 0.
        let x = a + width / (1.0 + (-2.0 * s).exp());
        if x <= a || x >= b {
            return 0.0;
        }
        width * w * f(x)
    };
    let mut h = 0.5;
    let mut sum = node(0.0);
    let mut t = h;
    while t <= T_MAX {
        sum += node(t) + node(-t);
        t += h;
    }
    let mut prev = sum * h;
    for _ in 0..12 {
        h /= 2.0;
        let mut t = h;
        while t <= T_MAX {
            sum += node(t) + node(-t);
            t += 2.0 * h;
        }
        let cur = sum * h;
        if (cur - prev).abs() < tol * cur.abs().max(1.0) {
            return cur;
        }
        prev = cur;
    }
    panic!("tanh-sinh did not settle: last estimate {prev}");
}

/// ₂F₁(1, b; 1 + b; z) = b ∫₀¹ t^(b−1) / (1 − z t) dt with b = 2/α.
pub fn hyp2f1_oracle(alpha: f64, z: f64) -> f64 {
    let b = 2.0 / alpha;
    b * tanh_sinh(|t| t.powf(b - 1.0) / (1.0 - z * t), 0.0, 1.0, 1e-14)
}

/// C(α, s, x) = 2 ∫₀ˣ u / (1 + s u^(−α)) du.
pub fn interference_factor_oracle(alpha: f64, s: f64, x: f64) -> f64 {
    2.0 * tanh_sinh(
        |u| {
            let ua = u.powf(alpha);
            u * ua / (ua + s)
        },
        0.0,
        x,
        1e-14,
    )
}

/// Best objective over caching vectors whose entries are multiples of
/// `1/steps`, at most 1 each, summing to exactly m_c (J = 2 or 3).
pub fn grid_max(table: &CoverageTable, lib: &ContentLibrary, steps: usize) -> (f64, Vec<f64>) {
    let m = lib.cache_capacity * steps;
    let eval = |units: &[usize]| -> f64 {
        let probs: Vec<f64> = units.iter().map(|&u| u as f64 / steps as f64).collect();
        let policy = CachePolicy::new(probs, lib).expect("grid point feasible");
        hit_probability(&policy, table, lib).expect("valid")
    };
    let mut best = (f64::NEG_INFINITY, Vec::new());
    let mut consider = |units: Vec<usize>| {
        let v = eval(&units);
        if v > best.0 {
            best = (v, units.iter().map(|&u| u as f64 / steps as f64).collect());
        }
    };
    match lib.size {
        2 => {
            for a in m.saturating_sub(steps)..=m.min(steps) {
                consider(vec![a, m - a]);
            }
        }
        3 => {
            for a in 0..=m.min(steps) {
                let rest = m - a;
                for b in rest.saturating_sub(steps)..=rest.min(steps) {
                    let c = rest - b;
                    if c <= steps {
                        consider(vec![a, b, c]);
                    }
                }
            }
        }
        j => panic!("grid oracle supports J = 2 or 3, got {j}"),
    }
    best
}

/// Pearson correlation.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}
