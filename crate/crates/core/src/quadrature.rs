//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Panels are kept in a max-heap keyed on their error estimate; the worst
//! panel is bisected until the summed error estimate drops below the
//! requested absolute tolerance or the panel budget is exhausted.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the embedded 7-point rule (nodes XGK[1], XGK[3], XGK[5], XGK[7]).
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping rule for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_panels: 10_000,
        }
    }
}

impl QuadOptions {
    pub fn new(abs_tol: f64, max_panels: usize) -> Self {
        Self {
            abs_tol,
            max_panels,
        }
    }
}

/// Integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Ties broken on the left endpoint so the bisection order is reproducible.
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Integral> {
    integrate_with_breaks(f, &[a, b], opts)
}

/// Integrates `f` over `[points[0], points[last]]`, seeding the panel set
/// with the given (strictly increasing) breakpoints.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    opts: QuadOptions,
) -> Result<Integral> {
    if points.len() < 2 {
        return Err(Error::Domain("quadrature needs at least two points".into()));
    }
    if points.windows(2).any(|w| !(w[0] < w[1])) {
        if points.windows(2).all(|w| w[0] == w[1]) {
            return Ok(Integral {
                value: 0.0,
                abs_error: 0.0,
                panels: 0,
            });
        }
        return Err(Error::Domain(format!(
            "quadrature breakpoints must be strictly increasing: {points:?}"
        )));
    }

    let mut heap: BinaryHeap<Panel> = points
        .windows(2)
        .map(|w| kronrod15(&f, w[0], w[1]))
        .collect();
    // Panels too narrow to bisect further; their error is final.
    let mut settled: Vec<Panel> = Vec::new();
    let mut panels = heap.len();
    let mut running_error: f64 = heap.iter().map(|p| p.error).sum();

    loop {
        if running_error <= opts.abs_tol {
            // Re-sum to shed drift from the incremental updates.
            running_error = totals(&heap, &settled).1;
            if running_error <= opts.abs_tol {
                break;
            }
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            settled.push(worst);
            continue;
        }
        if panels >= opts.max_panels {
            heap.push(worst);
            let (value, error) = totals(&heap, &settled);
            return Err(Error::Quadrature {
                value,
                error,
                panels,
            });
        }
        let left = kronrod15(&f, worst.a, mid);
        let right = kronrod15(&f, mid, worst.b);
        running_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        panels += 1;
    }

    let (value, abs_error) = totals(&heap, &settled);
    if abs_error > opts.abs_tol {
        return Err(Error::Quadrature {
            value,
            error: abs_error,
            panels,
        });
    }
    Ok(Integral {
        value,
        abs_error,
        panels,
    })
}

fn totals(heap: &BinaryHeap<Panel>, settled: &[Panel]) -> (f64, f64) {
    // Sum left to right so the result does not depend on heap layout.
    let mut all: Vec<&Panel> = heap.iter().chain(settled.iter()).collect();
    all.sort_by(|x, y| x.a.total_cmp(&y.a));
    all.iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(
            |x| x.powi(7) - 3.0 * x * x,
            0.0,
            2.0,
            QuadOptions::default(),
        )
        .unwrap();
        assert!((r.value - (32.0 - 8.0)).abs() < 1e-13);
        assert_eq!(r.panels, 1);
    }

    #[test]
    fn endpoint_singularity_converges() {
        // ∫₀¹ x^(-1/2) dx = 2
        let r = integrate(
            |x| 1.0 / x.sqrt(),
            0.0,
            1.0,
            QuadOptions::new(1e-10, 10_000),
        )
        .unwrap();
        assert!((r.value - 2.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn oscillatory() {
        let r = integrate(
            |x| (20.0 * x).sin(),
            0.0,
            std::f64::consts::PI,
            QuadOptions::new(1e-12, 1000),
        )
        .unwrap();
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let err = integrate(|x| 1.0 / x, 0.0, 1.0, QuadOptions::new(1e-12, 20)).unwrap_err();
        assert!(matches!(err, Error::Quadrature { panels: 20, .. }));
    }

    #[test]
    fn breakpoints_validated() {
        assert!(integrate_with_breaks(|x| x, &[0.0, 0.5, 0.2], QuadOptions::default()).is_err());
        let zero = integrate(|x| x, 1.0, 1.0, QuadOptions::default()).unwrap();
        assert_eq!(zero.value, 0.0);
    }
}
