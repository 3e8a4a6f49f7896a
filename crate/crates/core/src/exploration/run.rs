use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::exploration::explore::{explore_region, RegionOutcome, WorkCounters};
use crate::moo::{ParetoPoint, ParetoSet};
use crate::preference::{find_balance_point, make_preference_vectors, BalanceResult, Subregion};
use crate::problem::Problem;
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    pub region_index: usize,
    pub points: usize,
    pub work: WorkCounters,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorationReport {
    pub balance: BalanceResult,
    /// Empty for an unrestricted run.
    pub regions: Vec<Subregion>,
    pub sets: Vec<ParetoSet>,
    pub summaries: Vec<RegionSummary>,
    pub best: ParetoPoint,
    /// Includes the balance-point descent.
    pub total_descent_iters: usize,
    pub total_tangent_solves: usize,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl ExplorationReport {
    pub fn points(&self) -> impl Iterator<Item = &ParetoPoint> {
        self.sets.iter().flat_map(|s| s.points.iter())
    }

    pub fn point_count(&self) -> usize {
        self.sets.iter().map(ParetoSet::len).sum()
    }
}

/// Point with the smallest main-task loss; ties go to the lower region, then
/// to the earlier insertion.
pub fn select_best(sets: &[ParetoSet]) -> Result<ParetoPoint> {
    let mut ordered: Vec<&ParetoSet> = sets.iter().collect();
    ordered.sort_by_key(|s| s.region_index);
    let mut best: Option<&ParetoPoint> = None;
    for p in ordered.iter().flat_map(|s| s.points.iter()) {
        if best.is_none_or(|b| p.losses.main() < b.losses.main()) {
            best = Some(p);
        }
    }
    best.cloned().ok_or(Error::NoSolution)
}

fn initial_theta<P: Problem + ?Sized>(problem: &P, seed: u64) -> Vec<f64> {
    problem.sample_initial(&mut rng_from_seed(seed))
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))
}

fn assemble(
    balance: BalanceResult,
    regions: Vec<Subregion>,
    outcomes: Vec<RegionOutcome>,
    started: Instant,
) -> Result<ExplorationReport> {
    let mut total = WorkCounters { descent_iters: balance.point.iters_used, tangent_solves: 0 };
    let mut sets = Vec::with_capacity(outcomes.len());
    let mut summaries = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        total += outcome.work;
        summaries.push(RegionSummary {
            region_index: outcome.set.region_index,
            points: outcome.set.len(),
            work: outcome.work,
            error: outcome.error,
        });
        sets.push(outcome.set);
    }
    let best = select_best(&sets)?;
    Ok(ExplorationReport {
        balance,
        regions,
        sets,
        summaries,
        best,
        total_descent_iters: total.descent_iters,
        total_tangent_solves: total.tangent_solves,
        wall_time: started.elapsed(),
    })
}

/// Full pipeline on one thread. See [`psst_run_parallel`].
pub fn psst_run<P: Problem + ?Sized>(problem: &P, config: &SolverConfig) -> Result<ExplorationReport> {
    psst_run_parallel(problem, config, 1)
}

/// Balance point, `K` preference subregions, then an independent exploration
/// per region from its own seeded start. Regions run on up to `threads`
/// workers and are merged by index, so the report does not depend on the
/// thread count.
pub fn psst_run_parallel<P: Problem + ?Sized>(
    problem: &P,
    config: &SolverConfig,
    threads: usize,
) -> Result<ExplorationReport> {
    config.validate()?;
    let started = Instant::now();
    let theta0 = initial_theta(problem, config.master_seed);
    let balance = find_balance_point(problem, &theta0, config)?;
    let regions = Subregion::from_preferences(&make_preference_vectors(balance.pi0, config.k)?)?;

    let explore = |region: &Subregion| {
        let seed = if config.warm_start {
            balance.point.theta.to_vec()
        } else {
            initial_theta(problem, derive_seed(config.master_seed, region.index as u64))
        };
        explore_region(problem, &seed, Some(region), region.index, config)
    };
    let outcomes: Vec<RegionOutcome> = if threads <= 1 {
        regions.iter().map(explore).collect()
    } else {
        pool(threads)?.install(|| regions.par_iter().map(explore).collect())
    };
    assemble(balance, regions, outcomes, started)
}

/// Ablation without preference regions: continuation over the whole front
/// from the balance point, keeping at most `budget` points.
pub fn unrestricted_run<P: Problem + ?Sized>(
    problem: &P,
    config: &SolverConfig,
    budget: usize,
) -> Result<ExplorationReport> {
    config.validate()?;
    let started = Instant::now();
    let theta0 = initial_theta(problem, config.master_seed);
    let balance = find_balance_point(problem, &theta0, config)?;
    let cfg = SolverConfig { region_budget: budget.max(1), ..config.clone() };
    let outcome = explore_region(problem, &balance.point.theta, None, 0, &cfg);
    assemble(balance, Vec::new(), vec![outcome], started)
}
