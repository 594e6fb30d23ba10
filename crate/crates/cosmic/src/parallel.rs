//! Thread-pool fan-out. Every runner assembles results by task index, so
//! output does not depend on the number of workers or their schedule.

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use cosmic_core::hierarchy::{HierarchyPlan, HierarchyResult};
use cosmic_core::oracle::{sweep_joint, verify_prop1, Prop1Check};
use cosmic_core::{Result, RngSeed};

/// A pool with `jobs` workers; `None` or `0` means one per logical core.
pub fn pool(jobs: Option<usize>) -> ThreadPool {
    ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .expect("thread pool construction")
}

/// Runs every pairwise fit of the plan on `jobs` workers.
pub fn run_hierarchy(plan: &HierarchyPlan, jobs: Option<usize>) -> Result<HierarchyResult> {
    let tasks = plan.tasks();
    let results = pool(jobs).install(|| {
        tasks
            .par_iter()
            .map(|&task| plan.run(task).map(|mi| (task, mi)))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(plan.assemble(&results))
}

/// The bound check of every sweep trial, in trial order.
pub fn verify_sweep(trials: usize, seed: RngSeed, max_size: usize, jobs: Option<usize>) -> Result<Vec<Prop1Check>> {
    pool(jobs).install(|| {
        (0..trials)
            .into_par_iter()
            .map(|i| verify_prop1(&sweep_joint(seed, i, max_size)))
            .collect()
    })
}
