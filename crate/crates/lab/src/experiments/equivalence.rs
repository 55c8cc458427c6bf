use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vrjp_core::environment::{sample_u_mcmc, SampleConfig};
use vrjp_core::stats::total_variation;
use vrjp_core::vrjp::{
    annealed_rwrc, count_visits, expected_visits, path_law, simulate_vrjp_with, ConductanceWalker, StopRule,
    DEFAULT_STEP_CAP,
};
use vrjp_core::VertexId;

use super::Context;
use crate::config::ExperimentSpec;
use crate::error::{LabError, LabResult};
use crate::models::{Descriptor, SAMPLING_LIMIT};
use crate::table::{Table, Value};

const WALK_SALT: u64 = 0xa77e;
const QUENCHED_SALT: u64 = 0x9e7c;

type Law = BTreeMap<Vec<VertexId>, u64>;

fn merge_laws(laws: Vec<Law>) -> Law {
    let mut merged = Law::new();
    for law in laws {
        for (path, count) in law {
            *merged.entry(path).or_insert(0) += count;
        }
    }
    merged
}

pub(super) fn run(ctx: &Context) -> LabResult<Table> {
    let ExperimentSpec::VrjpEquivalence {
        samples_per_seed,
        jumps,
        start,
        tv_threshold,
    } = &ctx.config.experiment
    else {
        unreachable!("dispatched on kind");
    };
    let (samples, jumps, start) = (*samples_per_seed, *jumps, *start);
    let mut columns: Vec<&str> = Descriptor::COLUMNS.to_vec();
    columns.extend(["metric", "value", "se", "reference", "pass"]);
    let mut table = Table::new("vrjp_equivalence", &columns);
    let env = ctx.config.sampler.to_core();

    for instance in ctx.config.model.instances(SAMPLING_LIMIT)? {
        let g = &instance.graph;
        if start > g.n() {
            return Err(LabError::Config(format!(
                "start {start} is outside {} (ρ is {})",
                instance.descriptor.label(),
                g.n()
            )));
        }
        let label = instance.descriptor.label();
        let make_row = |metric: &str, value: f64, se: Option<f64>, reference: f64, pass: bool| {
            let mut row = instance.descriptor.values();
            row.extend([
                Value::from(metric),
                Value::from(value),
                Value::opt_float(se),
                Value::from(reference),
                Value::from(pass),
            ]);
            row
        };

        let vrjp = ctx.per_seed(|_, seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut skeletons = Vec::with_capacity(samples);
            for _ in 0..samples {
                let trace = simulate_vrjp_with(g, start, StopRule::Jumps(jumps), DEFAULT_STEP_CAP, &mut rng)?;
                skeletons.push(trace.skeleton());
            }
            Ok(path_law(skeletons, jumps))
        })?;
        let annealed = ctx.per_seed(|_, seed| {
            let run = annealed_rwrc(g, &env, start, samples, StopRule::Jumps(jumps), seed ^ WALK_SALT)?;
            Ok(path_law(run.walks.into_iter().map(|w| w.path), jumps))
        })?;
        let tv = total_variation(&merge_laws(vrjp), &merge_laws(annealed));
        let row = make_row("path_law_tv", tv, None, *tv_threshold, tv <= *tv_threshold);
        table.push(row);

        // Quenched identity E[N_x] = c(x) ℛ(c, x ↔ ρ) in one sampled environment.
        let x = if start < g.n() { start } else { 0 };
        let short = SampleConfig {
            sweeps: env.sweeps.min(2000),
            ..env
        };
        let quenched = ctx.per_seed(|_, seed| {
            let batch = sample_u_mcmc(g, &short, seed ^ QUENCHED_SALT)?;
            let u = batch.row(batch.len() - 1);
            let c = g.conductances(u)?;
            let walker = ConductanceWalker::new(g, &c)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ QUENCHED_SALT ^ WALK_SALT);
            let paths: Vec<_> = (0..samples)
                .map(|_| walker.walk(x, StopRule::HitRho, DEFAULT_STEP_CAP, &mut rng).path)
                .collect();
            Ok((expected_visits(g, &c, x)?, count_visits(&paths, x, g.rho())))
        })?;
        for (k, (expected, visits)) in quenched.into_iter().enumerate() {
            if visits.excluded > 0 {
                table
                    .hard_failures
                    .push(format!("{label}: {} quenched walks hit the step cap", visits.excluded));
            }
            let est = visits.estimate;
            let ok = visits.excluded == 0 && est.within(expected, 3.0);
            let row = make_row(&format!("quenched_visits[{k}]"), est.mean, Some(est.se), expected, ok);
            table.push(row);
        }
    }
    Ok(table)
}
