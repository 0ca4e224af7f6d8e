use d2dcache::geometry::NetworkConfig;
use d2dcache::interference::{laplace_interference, laplace_mc_oracle, WeightMode};

fn cfg(n_total: usize, n_active: usize) -> NetworkConfig {
    NetworkConfig::new(n_total, n_active, 1.0, 4.0).unwrap()
}

#[test]
fn reference_point_million_draws() {
    let c = cfg(5, 5);
    let (r, beta) = (0.5_f64, 1.0);
    let s = beta * r.powi(4);
    let mc = laplace_mc_oracle(s, r, 2, &c, 1_000_000, 7).unwrap();
    let exact = laplace_interference(s, r, 2, &c, WeightMode::Exact).unwrap();
    assert!(
        (exact - mc.mean).abs() <= 3.0 * mc.stderr,
        "{exact} vs {} ± {}",
        mc.mean,
        mc.stderr
    );
}

#[test]
fn last_rank_million_draws() {
    let c = cfg(5, 5);
    let r = 0.8_f64;
    let s = r.powi(4);
    let mc = laplace_mc_oracle(s, r, 5, &c, 1_000_000, 8).unwrap();
    for mode in WeightMode::ALL {
        let v = laplace_interference(s, r, 5, &c, mode).unwrap();
        assert!(
            (v - mc.mean).abs() <= 3.0 * mc.stderr,
            "{mode}: {v} vs {} ± {}",
            mc.mean,
            mc.stderr
        );
    }
}

// Exact weights are gated; paper-mode weights are only reported.
#[test]
fn grid_against_conditional_simulation() {
    let c = cfg(7, 5);
    let trials = 1_000_000;
    let mut worst_paper: f64 = 0.0;
    for (i, k) in [1usize, 4, 7].into_iter().enumerate() {
        for (j, r) in [0.2_f64, 0.55, 0.9].into_iter().enumerate() {
            for (l, beta) in [0.1_f64, 1.0, 10.0].into_iter().enumerate() {
                let s = beta * r.powi(4);
                let seed = (100 * i + 10 * j + l) as u64;
                let mc = laplace_mc_oracle(s, r, k, &c, trials, seed).unwrap();
                let exact = laplace_interference(s, r, k, &c, WeightMode::Exact).unwrap();
                assert!(
                    (exact - mc.mean).abs() <= 3.0 * mc.stderr,
                    "k={k} r={r} beta={beta}: {exact} vs {} ± {}",
                    mc.mean,
                    mc.stderr
                );
                let paper = laplace_interference(s, r, k, &c, WeightMode::Paper).unwrap();
                let z = (paper - mc.mean).abs() / mc.stderr.max(1e-300);
                worst_paper = worst_paper.max(z);
                println!("k={k} r={r} beta={beta}: exact {exact:.6} paper {paper:.6} mc {:.6} ± {:.1e} (paper z={z:.1})", mc.mean, mc.stderr);
            }
        }
    }
    println!("largest paper-weight deviation: {worst_paper:.1} standard errors");
}
