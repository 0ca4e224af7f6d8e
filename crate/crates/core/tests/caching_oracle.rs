mod common;

use common::grid_max;
use d2dcache::caching::{zipf_pmf, CachePolicy, ContentLibrary, FEASIBILITY_TOL};
use d2dcache::coverage::CoverageTable;
use d2dcache::geometry::NetworkConfig;
use d2dcache::interference::WeightMode;
use d2dcache::stream::{trial_rng, StreamTag};
use d2dcache::{db_to_linear, hit_probability, optimize_placement, simulate_hit, throughput};
use rand::Rng;

fn table(n_total: usize, n_active: usize, beta: f64, mode: WeightMode) -> CoverageTable {
    let c = NetworkConfig::new(n_total, n_active, 1.0, 4.0).unwrap();
    CoverageTable::compute(beta, &c, mode).unwrap()
}

fn assert_feasible(probs: &[f64], lib: &ContentLibrary) {
    assert!(
        probs
            .iter()
            .all(|&b| (-FEASIBILITY_TOL..=1.0 + FEASIBILITY_TOL).contains(&b)),
        "{probs:?}"
    );
    let total: f64 = probs.iter().sum();
    assert!(
        total <= lib.cache_capacity as f64 + FEASIBILITY_TOL,
        "{probs:?}"
    );
    if lib.cache_capacity <= lib.size {
        assert!(
            (total - lib.cache_capacity as f64).abs() <= 1e-9,
            "capacity not used: {probs:?}"
        );
    }
}

#[test]
fn optimizer_matches_exhaustive_grid() {
    let mut rng = trial_rng(2024, StreamTag::Sweep, 0);
    for j in [2usize, 3] {
        for case in 0..12 {
            let gamma = rng.random_range(0.0..2.0);
            let db = rng.random_range(-10.0..10.0);
            let n_total = rng.random_range(5..=20);
            let n_active = rng.random_range(1..=n_total);
            let capacity = if j == 3 { 1 + case % 2 } else { 1 };
            let lib = ContentLibrary::new(j, gamma, capacity).unwrap();
            let mode = if case % 3 == 0 {
                WeightMode::Exact
            } else {
                WeightMode::Paper
            };
            let t = table(n_total, n_active, db_to_linear(db), mode);
            let opt = optimize_placement(&t, &lib).unwrap();
            assert_feasible(opt.policy.probs(), &lib);
            let (grid, at) = grid_max(&t, &lib, 1000);
            let tag = format!("J={j} gamma={gamma:.3} beta={db:.2} dB N_t={n_total} N_a={n_active} m_c={capacity}");
            assert!(
                opt.max_hit >= grid - 1e-5,
                "{tag}: {} < grid {grid} at {at:?}",
                opt.max_hit
            );
            assert!(
                opt.max_hit <= grid + 1e-5,
                "{tag}: {} > grid {grid} at {at:?}",
                opt.max_hit
            );
            let recomputed = hit_probability(&opt.policy, &t, &lib).unwrap();
            assert!((recomputed - opt.max_hit).abs() < 1e-12);
        }
    }
}

#[test]
fn single_active_device_closed_form() {
    let lib = ContentLibrary::new(2, 1.2, 1).unwrap();
    let pmf = zipf_pmf(&lib).unwrap();
    let sigma = (pmf[0] / pmf[1]).powf(1.0 / 19.0);
    let expect = sigma / (1.0 + sigma);
    assert!((expect - 0.5110).abs() < 1e-4);
    for mode in WeightMode::ALL {
        let opt = optimize_placement(&table(20, 1, 1.0, mode), &lib).unwrap();
        assert!(
            (opt.policy.probs()[0] - expect).abs() < 1e-6,
            "{:?}",
            opt.policy
        );
    }
}

#[test]
fn full_load_moves_toward_popular_content() {
    let lib = ContentLibrary::new(2, 1.2, 1).unwrap();
    let base = optimize_placement(&table(20, 1, 1.0, WeightMode::Paper), &lib).unwrap();
    let t = table(20, 20, 1.0, WeightMode::Paper);
    let opt = optimize_placement(&t, &lib).unwrap();
    let b1 = opt.policy.probs()[0];
    assert!(b1 > base.policy.probs()[0]);
    let (_, at) = grid_max(&t, &lib, 10_000);
    assert!((b1 - at[0]).abs() <= 1e-3, "{b1} vs grid {}", at[0]);
}

#[test]
fn single_content_hit_bounded_by_caching_mass() {
    let lib = ContentLibrary::new(1, 0.7, 1).unwrap();
    for n_active in [1, 3, 8] {
        for db in [-10.0, 0.0, 10.0] {
            let t = table(8, n_active, db_to_linear(db), WeightMode::Paper);
            for i in 0..=20 {
                let b = i as f64 / 20.0;
                let p =
                    hit_probability(&CachePolicy::new(vec![b], &lib).unwrap(), &t, &lib).unwrap();
                let cap = 1.0 - (1.0 - b).powi(8);
                assert!(p <= cap + 1e-12 && p <= t.values[0] + 1e-12, "b={b}: {p}");
            }
        }
    }
}

#[test]
fn hit_curve_matches_simulation() {
    let c = NetworkConfig::new(20, 20, 1.0, 4.0).unwrap();
    let lib = ContentLibrary::new(2, 1.2, 1).unwrap();
    let t = CoverageTable::compute(1.0, &c, WeightMode::Exact).unwrap();
    for i in 0..=20 {
        let b1 = i as f64 / 20.0;
        let policy = CachePolicy::new(vec![b1, 1.0 - b1], &lib).unwrap();
        let p = hit_probability(&policy, &t, &lib).unwrap();
        let mc = simulate_hit(&policy, &lib, 1.0, &c, 100_000, 500 + i).unwrap();
        let se = (p * (1.0 - p) / 1e5).sqrt();
        assert!(
            (p - mc.estimate).abs() <= 3.0 * se,
            "b1={b1}: {p} vs {} ± {se}",
            mc.estimate
        );
    }
}

#[test]
fn figure_trends() {
    let lib = ContentLibrary::new(2, 1.2, 1).unwrap();
    for mode in WeightMode::ALL {
        let mut prev: Option<(f64, f64, f64)> = None;
        for n_active in 1..=20 {
            let cfg = NetworkConfig::new(20, n_active, 1.0, 4.0).unwrap();
            let t = CoverageTable::compute(1.0, &cfg, mode).unwrap();
            let opt = optimize_placement(&t, &lib).unwrap();
            let tp = throughput(&opt, &cfg);
            let b1 = opt.policy.probs()[0];
            if let Some((pb, ph, pt)) = prev {
                assert!(b1 >= pb - 1e-9, "{mode} N_a={n_active}: b1 {b1} < {pb}");
                assert!(opt.max_hit <= ph + 1e-12, "{mode} N_a={n_active}: hit rose");
                assert!(tp >= pt - 1e-12, "{mode} N_a={n_active}: throughput fell");
            }
            prev = Some((b1, opt.max_hit, tp));
        }
    }
}
