//! Built-in invariant suite run by `d2dcache selftest`.

use std::fmt::Write as _;

use rand::Rng;

use crate::caching::{
    hit_probability, optimize_placement, CachePolicy, ContentLibrary, FEASIBILITY_TOL,
};
use crate::coverage::{
    closed_form_bound_alpha4, coverage_probability, coverage_upper_bound_with, CoverageTable,
};
use crate::geometry::{
    distance_cdf, sample_inner, sample_outer, serving_distance_cdf, NetworkConfig, ServingIndex,
};
use crate::interference::{
    laplace_interference, laplace_mc_oracle, mixture_weights_for, WeightMode,
};
use crate::montecarlo::{
    ks_critical_99, ks_statistic, sample_serving_distance, simulate_coverage, simulate_hit,
};
use crate::specfun::{hyp2f1_caching, interference_factor, HypergeomParams};
use crate::stream::{trial_rng, StreamTag};

/// Deliberate faults for checking that the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Lowers every coverage bound by 0.01 before the dominance check.
    BoundDominance,
}

impl std::str::FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bound-dominance" => Ok(Fault::BoundDominance),
            other => Err(format!(
                "unknown fault {other:?} (expected bound-dominance)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SelftestOptions {
    pub seed: u64,
    pub trials: u64,
    pub fault: Option<Fault>,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            trials: 20_000,
            fault: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub result: Result<(), String>,
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.result.is_ok())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for o in &self.outcomes {
            match &o.result {
                Ok(()) => writeln!(s, "PASS {}", o.name).unwrap(),
                Err(msg) => writeln!(s, "FAIL {}: {msg}", o.name).unwrap(),
            }
        }
        let failed = self.outcomes.iter().filter(|o| o.result.is_err()).count();
        writeln!(s, "{} checks, {failed} failed", self.outcomes.len()).unwrap();
        s
    }
}

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn net(n_total: usize, n_active: usize) -> NetworkConfig {
    NetworkConfig::new(n_total, n_active, 1.0, 4.0).expect("valid network")
}

const BETA_DB: [f64; 7] = [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0];

fn betas() -> impl Iterator<Item = f64> {
    BETA_DB.iter().map(|&db| crate::db_to_linear(db))
}

fn err(e: crate::Error) -> String {
    e.to_string()
}

fn specfun_identities() -> Check {
    for x in [0.1, 0.5, 1.0, 3.0, 10.0] {
        let f = hyp2f1_caching(4.0, -x * x).map_err(err)?;
        let expect = x.atan() / x;
        ensure((f - expect).abs() < 1e-12, || {
            format!("2F1 at z=-{}: {f} vs {expect}", x * x)
        })?;
    }
    for z in [-0.85, -0.9, -0.95] {
        let p = HypergeomParams::new(3.3, z).map_err(err)?;
        let (a, b) = (p.complement_series(), p.complement_integral().map_err(err)?);
        ensure((a - b).abs() < 1e-10, || {
            format!("series/integral disagree at z={z}: {a} vs {b}")
        })?;
    }
    let c = interference_factor(4.0, 1.0, 1.0).map_err(err)?;
    ensure(
        (c - (1.0 - std::f64::consts::FRAC_PI_4)).abs() < 1e-12,
        || format!("C(4,1,1) = {c}"),
    )
}

fn geometry_samplers(seed: u64, n: usize) -> Check {
    let cfg = net(5, 5);
    let crit = ks_critical_99(n);
    let r = 0.6;
    let mut rng = trial_rng(seed, StreamTag::Geometry, 0);
    let mut inner: Vec<f64> = (0..n).map(|_| sample_inner(r, &mut rng)).collect();
    let d = ks_statistic(&mut inner, |u| (u / r).powi(2).min(1.0));
    ensure(d < crit, || format!("inner KS {d} >= {crit}"))?;
    let mut outer: Vec<f64> = (0..n).map(|_| sample_outer(r, &cfg, &mut rng)).collect();
    let d = ks_statistic(&mut outer, |u| {
        ((u * u - r * r) / (1.0 - r * r)).clamp(0.0, 1.0)
    });
    ensure(d < crit, || format!("outer KS {d} >= {crit}"))?;
    for k in [1, 3, 5] {
        let idx = ServingIndex::new(k, &cfg).map_err(err)?;
        let mut d: Vec<f64> = (0..n)
            .map(|_| sample_serving_distance(idx, &cfg, &mut rng))
            .collect();
        let stat = ks_statistic(&mut d, |x| serving_distance_cdf(x, idx, &cfg));
        ensure(stat < crit, || format!("serving k={k} KS {stat} >= {crit}"))?;
    }
    let mut radii: Vec<f64> = (0..n).map(|_| rng.random::<f64>().sqrt()).collect();
    let stat = ks_statistic(&mut radii, |w| distance_cdf(w, &cfg));
    ensure(stat < crit, || format!("disk radius KS {stat} >= {crit}"))
}

fn mixture_weights_normalized() -> Check {
    for (nt, na) in [(5, 5), (9, 4), (20, 7), (3, 1)] {
        let cfg = net(nt, na);
        for k in 1..=nt {
            for mode in WeightMode::ALL {
                let w = mixture_weights_for(mode, k, &cfg).map_err(err)?;
                let total: f64 = w.weights.iter().sum();
                ensure(
                    (total - 1.0).abs() < 1e-12 && w.weights.iter().all(|&x| x >= 0.0),
                    || format!("{mode} weights k={k} N_t={nt} N_a={na}: {:?}", w.weights),
                )?;
            }
        }
    }
    Ok(())
}

fn laplace_matches_simulation(seed: u64, trials: u64) -> Check {
    let cfg = net(6, 4);
    for (k, r, s) in [(1, 0.3, 0.05), (3, 0.5, 0.2), (6, 0.8, 0.5)] {
        let exact = laplace_interference(s, r, k, &cfg, WeightMode::Exact).map_err(err)?;
        let mc = laplace_mc_oracle(s, r, k, &cfg, trials, seed).map_err(err)?;
        let z = (exact - mc.mean).abs() / mc.stderr.max(1e-12);
        ensure(z < 4.0, || {
            format!("k={k} r={r} s={s}: {exact} vs {} ± {}", mc.mean, mc.stderr)
        })?;
    }
    Ok(())
}

fn bound_dominance(fault: Option<Fault>) -> Check {
    let shift = if fault == Some(Fault::BoundDominance) {
        0.01
    } else {
        0.0
    };
    for cfg in [net(5, 5), net(8, 3)] {
        for beta in betas() {
            for k in 1..=cfg.n_total {
                for mode in WeightMode::ALL {
                    let pc = coverage_probability(k, beta, &cfg, mode).map_err(err)?;
                    let bound =
                        coverage_upper_bound_with(k, beta, &cfg, mode).map_err(err)? - shift;
                    ensure(bound >= pc - 1e-7, || {
                        format!("{mode} k={k} beta={beta}: bound {bound} < coverage {pc}")
                    })?;
                }
            }
        }
    }
    Ok(())
}

fn bound_exact_at_last_rank() -> Check {
    let cfg = net(5, 5);
    for beta in betas() {
        let pc = coverage_probability(5, beta, &cfg, WeightMode::Paper).map_err(err)?;
        let bound = coverage_upper_bound_with(5, beta, &cfg, WeightMode::Paper).map_err(err)?;
        ensure((pc - bound).abs() <= 1e-5, || {
            format!("beta={beta}: {pc} vs {bound}")
        })?;
        for k in 1..=5 {
            let general =
                coverage_upper_bound_with(k, beta, &cfg, WeightMode::Exact).map_err(err)?;
            let closed = closed_form_bound_alpha4(k, beta);
            ensure((general - closed).abs() <= 1e-9, || {
                format!("k={k} beta={beta}: {general} vs {closed}")
            })?;
        }
    }
    Ok(())
}

fn coverage_monotone_and_scale_free() -> Check {
    let small = net(7, 4);
    let large = NetworkConfig::new(7, 4, 10.0, 4.0).map_err(err)?;
    for beta in betas() {
        for mode in WeightMode::ALL {
            let a = CoverageTable::compute(beta, &small, mode).map_err(err)?;
            let b = CoverageTable::compute(beta, &large, mode).map_err(err)?;
            ensure(a.is_nonincreasing(1e-7), || {
                format!("{mode} beta={beta} not monotone: {:?}", a.values)
            })?;
            for (x, y) in a.values.iter().zip(&b.values) {
                ensure((x - y).abs() <= 1e-7, || {
                    format!("{mode} beta={beta}: r_d=1 {x} vs r_d=10 {y}")
                })?;
            }
        }
    }
    Ok(())
}

fn coverage_matches_simulation(seed: u64, trials: u64) -> Check {
    let cfg = net(5, 5);
    for k in [1, 2, 3] {
        for db in [-5.0, 5.0] {
            let beta = crate::db_to_linear(db);
            let exact = coverage_probability(k, beta, &cfg, WeightMode::Exact).map_err(err)?;
            let mc = simulate_coverage(k, beta, &cfg, trials, seed).map_err(err)?;
            let se = (exact * (1.0 - exact) / trials as f64).sqrt();
            let z = (exact - mc.estimate).abs() / se.max(1e-12);
            ensure(z < 4.0, || {
                format!("k={k} beta={db} dB: {exact} vs {} ± {se}", mc.estimate)
            })?;
        }
    }
    Ok(())
}

fn hit_matches_simulation(seed: u64, trials: u64) -> Check {
    let cfg = net(10, 4);
    let lib = ContentLibrary::new(3, 0.8, 1).map_err(err)?;
    let beta = 1.0;
    let table = CoverageTable::compute(beta, &cfg, WeightMode::Exact).map_err(err)?;
    let policy = CachePolicy::new(vec![0.5, 0.3, 0.2], &lib).map_err(err)?;
    let p = hit_probability(&policy, &table, &lib).map_err(err)?;
    let mc = simulate_hit(&policy, &lib, beta, &cfg, trials, seed).map_err(err)?;
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    ensure((p - mc.estimate).abs() < 4.0 * se, || {
        format!("{p} vs {} ± {se}", mc.estimate)
    })
}

fn optimizer_certified() -> Check {
    let cfg = net(20, 1);
    let lib = ContentLibrary::new(2, 1.2, 1).map_err(err)?;
    let table = CoverageTable::compute(1.0, &cfg, WeightMode::Paper).map_err(err)?;
    let opt = optimize_placement(&table, &lib).map_err(err)?;
    let pmf = crate::caching::zipf_pmf(&lib).map_err(err)?;
    let sigma = (pmf[0] / pmf[1]).powf(1.0 / 19.0);
    let b1 = opt.policy.probs()[0];
    ensure((b1 - sigma / (1.0 + sigma)).abs() < 1e-6, || {
        format!("b1* {b1} vs {}", sigma / (1.0 + sigma))
    })?;

    let cfg = net(20, 8);
    for (gamma, beta) in [(0.6, 0.5), (1.2, 1.0), (2.0, 3.0)] {
        let lib = ContentLibrary::new(2, gamma, 1).map_err(err)?;
        let table = CoverageTable::compute(beta, &cfg, WeightMode::Paper).map_err(err)?;
        let opt = optimize_placement(&table, &lib).map_err(err)?;
        let probs = opt.policy.probs();
        ensure(
            probs
                .iter()
                .all(|&b| (-FEASIBILITY_TOL..=1.0 + FEASIBILITY_TOL).contains(&b))
                && opt.policy.total() <= 1.0 + FEASIBILITY_TOL,
            || format!("infeasible {probs:?}"),
        )?;
        let grid = (0..=1000)
            .map(|i| {
                let b1 = i as f64 / 1000.0;
                let policy = CachePolicy::new(vec![b1, 1.0 - b1], &lib).expect("feasible");
                hit_probability(&policy, &table, &lib).expect("valid")
            })
            .fold(f64::NEG_INFINITY, f64::max);
        ensure(opt.max_hit >= grid - 1e-5, || {
            format!("gamma={gamma}: optimizer {} < grid {grid}", opt.max_hit)
        })?;
    }
    Ok(())
}

fn simulation_deterministic(seed: u64) -> Check {
    let cfg = net(5, 5);
    let a = simulate_coverage(2, 1.0, &cfg, 5000, seed).map_err(err)?;
    let b = simulate_coverage(2, 1.0, &cfg, 5000, seed).map_err(err)?;
    ensure(a.estimate.to_bits() == b.estimate.to_bits(), || {
        "repeat run differs".into()
    })
}

type NamedCheck<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

pub fn run(opts: &SelftestOptions) -> SelftestReport {
    let seed = opts.seed;
    let trials = opts.trials.max(1000);
    let ks_n = (trials as usize).clamp(1000, 100_000);
    let checks: Vec<NamedCheck> = vec![
        ("specfun identities", Box::new(specfun_identities)),
        (
            "geometry samplers (KS, 99%)",
            Box::new(move || geometry_samplers(seed, ks_n)),
        ),
        (
            "mixture weights normalized",
            Box::new(mixture_weights_normalized),
        ),
        (
            "Laplace transform vs simulation",
            Box::new(move || laplace_matches_simulation(seed, trials)),
        ),
        (
            "bound dominance",
            Box::new(move || bound_dominance(opts.fault)),
        ),
        (
            "bound exactness and closed form",
            Box::new(bound_exact_at_last_rank),
        ),
        (
            "coverage monotone in k, scale free",
            Box::new(coverage_monotone_and_scale_free),
        ),
        (
            "coverage vs simulation",
            Box::new(move || coverage_matches_simulation(seed, trials)),
        ),
        (
            "hit probability vs simulation",
            Box::new(move || hit_matches_simulation(seed, trials)),
        ),
        ("optimizer certification", Box::new(optimizer_certified)),
        (
            "simulation determinism",
            Box::new(move || simulation_deterministic(seed)),
        ),
    ];
    let outcomes = checks
        .into_iter()
        .map(|(name, check)| CheckOutcome {
            name,
            result: check(),
        })
        .collect();
    SelftestReport { outcomes }
}
