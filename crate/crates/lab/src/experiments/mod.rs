//! One module per experiment kind. Each returns a [`Table`] whose `pass`
//! column is computed from the estimates, never set by hand.

mod equivalence;
mod flow;
mod moments;
mod monotonicity;
mod transience;
mod ward;

use rayon::prelude::*;
use vrjp_core::environment::{sample_u_mcmc, SampleBatch};
use vrjp_core::stats::Estimate;
use vrjp_core::{VertexId, WiredGraph};

use crate::config::{ExperimentConfig, ExperimentSpec};
use crate::error::{LabError, LabResult};
use crate::table::{Table, Value};

/// Shared state of one run: the config and the worker pool.
pub(crate) struct Context<'a> {
    pub config: &'a ExperimentConfig,
    pool: rayon::ThreadPool,
}

impl<'a> Context<'a> {
    pub fn new(config: &'a ExperimentConfig, workers: usize) -> LabResult<Self> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
        Ok(Context { config, pool })
    }

    /// Runs `task(index, seed)` once per seed on the pool; results come
    /// back in seed order.
    pub fn per_seed<T, F>(&self, task: F) -> LabResult<Vec<T>>
    where
        T: Send,
        F: Fn(usize, u64) -> LabResult<T> + Sync,
    {
        self.pool
            .install(|| self.config.seeds.par_iter().enumerate().map(|(k, &s)| task(k, s)).collect())
    }

    /// One sampler chain per seed, optionally tilted.
    pub fn chains(&self, g: &WiredGraph, tilt: Option<VertexId>, salt: u64) -> LabResult<Vec<SampleBatch>> {
        let config = vrjp_core::environment::SampleConfig {
            tilt,
            ..self.config.sampler.to_core()
        };
        self.per_seed(|_, seed| Ok(sample_u_mcmc(g, &config, seed ^ salt)?))
    }
}

/// Sampler diagnostics that make a run fail regardless of row outcomes.
pub(crate) fn flag_chains(table: &mut Table, label: &str, batches: &[SampleBatch]) {
    for b in batches.iter().filter(|b| b.flagged) {
        table.hard_failures.push(format!(
            "{label}: sampler acceptance {:.3} out of range for seed {}",
            b.acceptance_rate, b.seed
        ));
    }
}

/// Pools per-chain estimates of the same quantity.
pub(crate) fn pooled(parts: &[Estimate]) -> Estimate {
    Estimate::combine(parts)
}

pub(crate) fn vertices_or_all(vertices: &Option<Vec<usize>>, n: usize) -> LabResult<Vec<usize>> {
    match vertices {
        None => Ok((0..n).collect()),
        Some(list) => {
            if let Some(v) = list.iter().find(|&&v| v >= n) {
                return Err(LabError::Config(format!("vertex {v} is outside a graph with {n} vertices")));
            }
            Ok(list.clone())
        }
    }
}

pub(crate) fn estimate_values(e: &Estimate) -> [Value; 2] {
    [Value::from(e.mean), Value::from(e.se)]
}

pub fn run_experiment(config: &ExperimentConfig, workers: usize) -> LabResult<Table> {
    let ctx = Context::new(config, workers)?;
    match &config.experiment {
        ExperimentSpec::MomentBounds { .. } => moments::run(&ctx),
        ExperimentSpec::WardScan { .. } => ward::run(&ctx),
        ExperimentSpec::TransienceBound { .. } => transience::run(&ctx),
        ExperimentSpec::VrjpEquivalence { .. } => equivalence::run(&ctx),
        ExperimentSpec::FlowEnergy => flow::run(&ctx),
        ExperimentSpec::Monotonicity { .. } => monotonicity::run(&ctx),
    }
}
