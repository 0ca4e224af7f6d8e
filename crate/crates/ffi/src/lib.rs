//! C ABI over the `d2dcache` library.
//!
//! Every function returns a [`D2dStatus`] and writes results through out
//! pointers. Networks and coverage tables are opaque handles created by
//! `*_new` and released by the matching `*_free`. Panics never cross the
//! boundary; they surface as `D2D_STATUS_PANIC`.
//!
//! The header `include/d2dcache.h` is regenerated by the build script.

#![allow(clippy::missing_safety_doc)]

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use d2dcache::caching::{CachePolicy, ContentLibrary};
use d2dcache::coverage::{coverage_probability, coverage_upper_bound_with, CoverageTable};
use d2dcache::geometry::NetworkConfig;
use d2dcache::interference::{laplace_interference, WeightMode};
use d2dcache::montecarlo::{simulate_coverage, simulate_hit};
use d2dcache::{hyp2f1_caching, interference_factor, optimize_placement, Error};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum D2dStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument is outside the function's domain.
    InvalidArgument = 2,
    /// An array length does not match the model dimensions.
    DimensionMismatch = 3,
    /// Numerical integration did not reach its tolerance.
    QuadratureFailed = 4,
    /// The placement optimizer did not converge.
    NotConverged = 5,
    /// The library panicked; this is a bug.
    Panic = 6,
}

/// Mixture law for the number of interferers closer than the server.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum D2dWeightMode {
    /// Truncated binomial weights.
    Paper = 0,
    /// Hypergeometric weights.
    Exact = 1,
}

impl From<D2dWeightMode> for WeightMode {
    fn from(m: D2dWeightMode) -> Self {
        match m {
            D2dWeightMode::Paper => WeightMode::Paper,
            D2dWeightMode::Exact => WeightMode::Exact,
        }
    }
}

/// Opaque network configuration.
pub struct D2dNetwork {
    cfg: NetworkConfig,
}

/// Opaque table of coverage probabilities for every serving rank.
pub struct D2dCoverageTable {
    table: CoverageTable,
}

fn status_of(e: &Error) -> D2dStatus {
    match e {
        Error::Domain(_) => D2dStatus::InvalidArgument,
        Error::Dimension { .. } => D2dStatus::DimensionMismatch,
        Error::Quadrature { .. } => D2dStatus::QuadratureFailed,
        Error::NotConverged { .. } => D2dStatus::NotConverged,
    }
}

fn guard<F: FnOnce() -> Result<(), D2dStatus>>(f: F) -> D2dStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => D2dStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => D2dStatus::Panic,
    }
}

trait IntoStatus<T> {
    fn st(self) -> Result<T, D2dStatus>;
}

impl<T> IntoStatus<T> for d2dcache::Result<T> {
    fn st(self) -> Result<T, D2dStatus> {
        self.map_err(|e| status_of(&e))
    }
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, D2dStatus> {
    p.as_mut().ok_or(D2dStatus::NullPointer)
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, D2dStatus> {
    p.as_ref().ok_or(D2dStatus::NullPointer)
}

unsafe fn slice<'a>(p: *const f64, len: usize) -> Result<&'a [f64], D2dStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(D2dStatus::NullPointer);
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn library(size: usize, gamma: f64, cache_capacity: usize) -> Result<ContentLibrary, D2dStatus> {
    ContentLibrary::new(size, gamma, cache_capacity).st()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn d2d_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn d2d_status_message(status: D2dStatus) -> *const c_char {
    let msg: &'static CStr = match status {
        D2dStatus::Ok => c"ok",
        D2dStatus::NullPointer => c"null pointer argument",
        D2dStatus::InvalidArgument => c"argument outside the domain",
        D2dStatus::DimensionMismatch => c"array length mismatch",
        D2dStatus::QuadratureFailed => c"quadrature did not converge",
        D2dStatus::NotConverged => c"placement optimizer did not converge",
        D2dStatus::Panic => c"internal panic",
    };
    msg.as_ptr()
}

/// ₂F₁(1, 2/α; 1 + 2/α; z) for α > 2, z ≤ 0.
#[no_mangle]
pub unsafe extern "C" fn d2d_hyp2f1(alpha: f64, z: f64, out_value: *mut f64) -> D2dStatus {
    guard(|| {
        *out(out_value)? = hyp2f1_caching(alpha, z).st()?;
        Ok(())
    })
}

/// C(α, s, x) = x²·(1 − ₂F₁(1, 2/α; 1 + 2/α; −x^α/s)).
#[no_mangle]
pub unsafe extern "C" fn d2d_interference_factor(
    alpha: f64,
    s: f64,
    x: f64,
    out_value: *mut f64,
) -> D2dStatus {
    guard(|| {
        *out(out_value)? = interference_factor(alpha, s, x).st()?;
        Ok(())
    })
}

/// Creates a network of `n_total` devices, `n_active` of them transmitting,
/// in a disk of radius `radius` with path-loss exponent `alpha`.
#[no_mangle]
pub unsafe extern "C" fn d2d_network_new(
    n_total: usize,
    n_active: usize,
    radius: f64,
    alpha: f64,
    out_network: *mut *mut D2dNetwork,
) -> D2dStatus {
    guard(|| {
        let slot = out(out_network)?;
        *slot = ptr::null_mut();
        let cfg = NetworkConfig::new(n_total, n_active, radius, alpha).st()?;
        *slot = Box::into_raw(Box::new(D2dNetwork { cfg }));
        Ok(())
    })
}

/// Releases a network; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn d2d_network_free(network: *mut D2dNetwork) {
    if !network.is_null() {
        drop(Box::from_raw(network));
    }
}

/// Laplace transform of the interference at `s` given serving distance `r`
/// and serving rank `k` (1-based).
#[no_mangle]
pub unsafe extern "C" fn d2d_laplace_interference(
    network: *const D2dNetwork,
    s: f64,
    r: f64,
    k: usize,
    mode: D2dWeightMode,
    out_value: *mut f64,
) -> D2dStatus {
    guard(|| {
        let net = handle(network)?;
        *out(out_value)? = laplace_interference(s, r, k, &net.cfg, mode.into()).st()?;
        Ok(())
    })
}

/// Coverage probability with the k-th closest device serving, linear SIR
/// threshold `beta`.
#[no_mangle]
pub unsafe extern "C" fn d2d_coverage(
    network: *const D2dNetwork,
    k: usize,
    beta: f64,
    mode: D2dWeightMode,
    out_value: *mut f64,
) -> D2dStatus {
    guard(|| {
        let net = handle(network)?;
        *out(out_value)? = coverage_probability(k, beta, &net.cfg, mode.into()).st()?;
        Ok(())
    })
}

/// Upper bound on the coverage probability that ignores the interferers
/// farther than the server.
#[no_mangle]
pub unsafe extern "C" fn d2d_coverage_bound(
    network: *const D2dNetwork,
    k: usize,
    beta: f64,
    mode: D2dWeightMode,
    out_value: *mut f64,
) -> D2dStatus {
    guard(|| {
        let net = handle(network)?;
        *out(out_value)? = coverage_upper_bound_with(k, beta, &net.cfg, mode.into()).st()?;
        Ok(())
    })
}

/// Monte Carlo coverage estimate and its standard error.
#[no_mangle]
pub unsafe extern "C" fn d2d_simulate_coverage(
    network: *const D2dNetwork,
    k: usize,
    beta: f64,
    trials: u64,
    seed: u64,
    out_estimate: *mut f64,
    out_stderr: *mut f64,
) -> D2dStatus {
    guard(|| {
        let net = handle(network)?;
        let (est, se) = (out(out_estimate)?, out(out_stderr)?);
        let report = simulate_coverage(k, beta, &net.cfg, trials, seed).st()?;
        *est = report.estimate;
        *se = report.stderr;
        Ok(())
    })
}

/// Computes the coverage probability of every serving rank at `beta`.
#[no_mangle]
pub unsafe extern "C" fn d2d_coverage_table_new(
    network: *const D2dNetwork,
    beta: f64,
    mode: D2dWeightMode,
    out_table: *mut *mut D2dCoverageTable,
) -> D2dStatus {
    guard(|| {
        let slot = out(out_table)?;
        *slot = ptr::null_mut();
        let net = handle(network)?;
        let table = CoverageTable::compute(beta, &net.cfg, mode.into()).st()?;
        *slot = Box::into_raw(Box::new(D2dCoverageTable { table }));
        Ok(())
    })
}

/// Releases a coverage table; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn d2d_coverage_table_free(table: *mut D2dCoverageTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of ranks (N_t) in the table.
#[no_mangle]
pub unsafe extern "C" fn d2d_coverage_table_len(
    table: *const D2dCoverageTable,
    out_len: *mut usize,
) -> D2dStatus {
    guard(|| {
        let t = handle(table)?;
        *out(out_len)? = t.table.len();
        Ok(())
    })
}

/// Coverage probability of rank `k` (1-based).
#[no_mangle]
pub unsafe extern "C" fn d2d_coverage_table_get(
    table: *const D2dCoverageTable,
    k: usize,
    out_value: *mut f64,
) -> D2dStatus {
    guard(|| {
        let t = handle(table)?;
        let slot = out(out_value)?;
        *slot = t.table.get(k).ok_or(D2dStatus::InvalidArgument)?;
        Ok(())
    })
}

/// Total hit probability of the caching probabilities `probs[0..size]` for a
/// Zipf(`gamma`) library with `cache_capacity` slots per device.
#[no_mangle]
pub unsafe extern "C" fn d2d_hit_probability(
    table: *const D2dCoverageTable,
    probs: *const f64,
    size: usize,
    gamma: f64,
    cache_capacity: usize,
    out_value: *mut f64,
) -> D2dStatus {
    guard(|| {
        let t = handle(table)?;
        let slot = out(out_value)?;
        let lib = library(size, gamma, cache_capacity)?;
        let policy = CachePolicy::new(slice(probs, size)?.to_vec(), &lib).st()?;
        *slot = d2dcache::hit_probability(&policy, &t.table, &lib).st()?;
        Ok(())
    })
}

/// Optimal caching probabilities, written to `out_probs[0..size]`, and the
/// maximum hit probability.
#[no_mangle]
pub unsafe extern "C" fn d2d_optimize_placement(
    table: *const D2dCoverageTable,
    size: usize,
    gamma: f64,
    cache_capacity: usize,
    out_probs: *mut f64,
    out_max_hit: *mut f64,
) -> D2dStatus {
    guard(|| {
        let t = handle(table)?;
        let max_hit = out(out_max_hit)?;
        if out_probs.is_null() {
            return Err(D2dStatus::NullPointer);
        }
        let lib = library(size, gamma, cache_capacity)?;
        let placement = optimize_placement(&t.table, &lib).st()?;
        std::slice::from_raw_parts_mut(out_probs, size).copy_from_slice(placement.policy.probs());
        *max_hit = placement.max_hit;
        Ok(())
    })
}

/// Monte Carlo estimate of the total hit probability.
#[no_mangle]
pub unsafe extern "C" fn d2d_simulate_hit(
    network: *const D2dNetwork,
    probs: *const f64,
    size: usize,
    gamma: f64,
    cache_capacity: usize,
    beta: f64,
    trials: u64,
    seed: u64,
    out_estimate: *mut f64,
    out_stderr: *mut f64,
) -> D2dStatus {
    guard(|| {
        let net = handle(network)?;
        let (est, se) = (out(out_estimate)?, out(out_stderr)?);
        let lib = library(size, gamma, cache_capacity)?;
        let policy = CachePolicy::new(slice(probs, size)?.to_vec(), &lib).st()?;
        let report = simulate_hit(&policy, &lib, beta, &net.cfg, trials, seed).st()?;
        *est = report.estimate;
        *se = report.stderr;
        Ok(())
    })
}
