//! The figure-reproduction experiments, each producing a [`Table`].
//!
//! Columns:
//!
//! * `coverage`: `beta_db, k, pc_paper, pc_exact, bound_paper, bound_exact,
//!   mc_estimate, mc_stderr`
//! * `hitcurve`: `n_active, b1, b2, p_hit, argmax, mc_estimate, mc_stderr`
//! * `maxhit`: `n_active, p_hit_max, b_1 … b_J, mc_estimate, mc_stderr`
//! * `throughput`: `n_active, p_hit_max, throughput`
//!
//! The Monte Carlo columns are empty when `trials = 0`. Each row's simulation
//! seed is derived from the master seed and the row index.

use rand::RngCore;
use rayon::prelude::*;

use super::output::{Cell, Table};
use super::spec::{Experiment, ExperimentSpec};
use crate::caching::{hit_probability, optimize_placement, throughput_from_hit, CachePolicy};
use crate::coverage::{coverage_probability, coverage_upper_bound_with, CoverageTable};
use crate::error::Result;
use crate::interference::WeightMode;
use crate::montecarlo::{simulate_coverage, simulate_hit, SimulationReport};
use crate::stream::{trial_rng, StreamTag};

/// Simulation seed of output row `row`.
pub fn row_seed(seed: u64, row: u64) -> u64 {
    trial_rng(seed, StreamTag::Sweep, row).next_u64()
}

pub fn run(experiment: Experiment, spec: &ExperimentSpec) -> Result<Table> {
    match experiment {
        Experiment::Coverage => coverage(spec),
        Experiment::HitCurve => hitcurve(spec),
        Experiment::MaxHit => maxhit(spec),
        Experiment::Throughput => throughput(spec),
    }
}

fn mc_cells(report: Option<SimulationReport>) -> [Cell; 2] {
    match report {
        Some(r) => [Cell::Real(r.estimate), Cell::Real(r.stderr)],
        None => [Cell::Empty, Cell::Empty],
    }
}

fn coverage(spec: &ExperimentSpec) -> Result<Table> {
    let cfg = &spec.network;
    let trials = spec.run.trials;
    let points: Vec<(f64, usize)> = spec
        .sweep
        .points()
        .into_iter()
        .flat_map(|db| spec.run.ranks.iter().map(move |&k| (db, k)))
        .collect();
    let rows = points
        .par_iter()
        .enumerate()
        .map(|(row, &(db, k))| -> Result<Vec<Cell>> {
            let beta = crate::db_to_linear(db);
            let mc = if trials > 0 {
                Some(simulate_coverage(
                    k,
                    beta,
                    cfg,
                    trials,
                    row_seed(spec.run.seed, row as u64),
                )?)
            } else {
                None
            };
            let [est, se] = mc_cells(mc);
            Ok(vec![
                Cell::Real(db),
                Cell::Int(k as u64),
                Cell::Real(coverage_probability(k, beta, cfg, WeightMode::Paper)?),
                Cell::Real(coverage_probability(k, beta, cfg, WeightMode::Exact)?),
                Cell::Real(coverage_upper_bound_with(k, beta, cfg, WeightMode::Paper)?),
                Cell::Real(coverage_upper_bound_with(k, beta, cfg, WeightMode::Exact)?),
                est,
                se,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new([
        "beta_db",
        "k",
        "pc_paper",
        "pc_exact",
        "bound_paper",
        "bound_exact",
        "mc_estimate",
        "mc_stderr",
    ]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn hitcurve(spec: &ExperimentSpec) -> Result<Table> {
    let beta = crate::db_to_linear(spec.run.beta_db);
    let lib = &spec.library;
    let b1s = spec.sweep.points();
    let mut table = Table::new([
        "n_active",
        "b1",
        "b2",
        "p_hit",
        "argmax",
        "mc_estimate",
        "mc_stderr",
    ]);
    for (block, &n_active) in spec.run.n_active_values.iter().enumerate() {
        let cfg = spec.network.with_active(n_active)?;
        let cov = CoverageTable::compute(beta, &cfg, spec.run.weight_mode)?;
        let rows = b1s
            .par_iter()
            .enumerate()
            .map(|(i, &b1)| -> Result<(f64, f64, [Cell; 2])> {
                let policy = CachePolicy::new(vec![b1, 1.0 - b1], lib)?;
                let p = hit_probability(&policy, &cov, lib)?;
                let mc = if spec.run.trials > 0 {
                    let row = (block * b1s.len() + i) as u64;
                    Some(simulate_hit(
                        &policy,
                        lib,
                        beta,
                        &cfg,
                        spec.run.trials,
                        row_seed(spec.run.seed, row),
                    )?)
                } else {
                    None
                };
                Ok((b1, p, mc_cells(mc)))
            })
            .collect::<Result<Vec<_>>>()?;
        // First maximal row wins ties.
        let best = rows
            .iter()
            .enumerate()
            .fold(0, |best, (i, r)| if r.1 > rows[best].1 { i } else { best });
        for (i, (b1, p, [est, se])) in rows.into_iter().enumerate() {
            table.push(vec![
                Cell::Int(n_active as u64),
                Cell::Real(b1),
                Cell::Real(1.0 - b1),
                Cell::Real(p),
                Cell::Flag(i == best),
                est,
                se,
            ]);
        }
    }
    Ok(table)
}

struct Optimum {
    n_active: usize,
    max_hit: f64,
    probs: Vec<f64>,
    mc: Option<SimulationReport>,
}

fn optimize_sweep(spec: &ExperimentSpec, simulate: bool) -> Result<Vec<Optimum>> {
    let beta = crate::db_to_linear(spec.run.beta_db);
    let lib = &spec.library;
    let counts = spec
        .n_active_points()
        .map_err(|e| crate::error::Error::Domain(e.0))?;
    counts
        .par_iter()
        .enumerate()
        .map(|(row, &n_active)| {
            let cfg = spec.network.with_active(n_active)?;
            let cov = CoverageTable::compute(beta, &cfg, spec.run.weight_mode)?;
            let placement = optimize_placement(&cov, lib)?;
            let mc = if simulate && spec.run.trials > 0 {
                Some(simulate_hit(
                    &placement.policy,
                    lib,
                    beta,
                    &cfg,
                    spec.run.trials,
                    row_seed(spec.run.seed, row as u64),
                )?)
            } else {
                None
            };
            Ok(Optimum {
                n_active,
                max_hit: placement.max_hit,
                probs: placement.policy.into_probs(),
                mc,
            })
        })
        .collect()
}

fn maxhit(spec: &ExperimentSpec) -> Result<Table> {
    let mut columns = vec!["n_active".to_string(), "p_hit_max".to_string()];
    columns.extend((1..=spec.library.size).map(|j| format!("b_{j}")));
    columns.extend(["mc_estimate".to_string(), "mc_stderr".to_string()]);
    let mut table = Table::new(columns);
    for opt in optimize_sweep(spec, true)? {
        let mut row = vec![Cell::Int(opt.n_active as u64), Cell::Real(opt.max_hit)];
        row.extend(opt.probs.iter().map(|&b| Cell::Real(b)));
        row.extend(mc_cells(opt.mc));
        table.push(row);
    }
    Ok(table)
}

fn throughput(spec: &ExperimentSpec) -> Result<Table> {
    let mut table = Table::new(["n_active", "p_hit_max", "throughput"]);
    for opt in optimize_sweep(spec, false)? {
        table.push(vec![
            Cell::Int(opt.n_active as u64),
            Cell::Real(opt.max_hit),
            Cell::Real(throughput_from_hit(opt.max_hit, opt.n_active)),
        ]);
    }
    Ok(table)
}
