use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vrjp_core::environment::{sample_s_with, ward_statistic, WardMatrices};
use vrjp_core::stats::{batch_means, DEFAULT_BATCHES};

use super::{estimate_values, flag_chains, pooled, Context};
use crate::config::ExperimentSpec;
use crate::error::{LabError, LabResult};
use crate::models::{Descriptor, SAMPLING_LIMIT};
use crate::table::{Table, Value};

/// Seeds of the `s | u` draws are kept apart from the sampler's.
const S_SALT: u64 = 0x005e_ed0f;

struct ChainSums {
    values: Vec<Vec<f64>>,
    violations: Vec<usize>,
}

pub(super) fn run(ctx: &Context) -> LabResult<Table> {
    let ExperimentSpec::WardScan { m } = &ctx.config.experiment else {
        unreachable!("dispatched on kind");
    };
    let mut columns: Vec<&str> = Descriptor::COLUMNS.to_vec();
    columns.extend(["n", "m", "samples", "mean", "se", "det_floor_violations", "pass"]);
    let mut table = Table::new("ward_scan", &columns);

    for instance in ctx.config.model.instances(SAMPLING_LIMIT)? {
        let g = &instance.graph;
        let min_weight = g.plus_weights().iter().copied().fold(f64::INFINITY, f64::min);
        if let Some(&bad) = m.iter().find(|&&x| x >= min_weight) {
            return Err(LabError::Config(format!(
                "{}: m = {bad} must stay below the smallest weight {min_weight}",
                instance.descriptor.label()
            )));
        }
        let exponents: Vec<Vec<f64>> = m.iter().map(|&x| vec![x; g.plus_edges().len()]).collect();
        let floors: Vec<f64> = m
            .iter()
            .map(|&x| g.plus_weights().iter().map(|w| 1.0 - x / w).product())
            .collect();

        let batches = ctx.chains(g, None, 0)?;
        flag_chains(&mut table, &instance.descriptor.label(), &batches);
        let sums = ctx.per_seed(|k, seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ S_SALT);
            let mut sums = ChainSums {
                values: vec![Vec::with_capacity(batches[k].len()); m.len()],
                violations: vec![0; m.len()],
            };
            for u in batches[k].rows() {
                let s = sample_s_with(g, u, &mut rng)?;
                for (j, me) in exponents.iter().enumerate() {
                    sums.values[j].push(ward_statistic(g, u, &s, me)?);
                    let det = WardMatrices::new(g, u, &s, me)?.det_identity_minus();
                    if det < floors[j] * (1.0 - 1e-12) {
                        sums.violations[j] += 1;
                    }
                }
            }
            Ok(sums)
        })?;

        for (j, &x) in m.iter().enumerate() {
            let parts: Vec<_> = sums.iter().map(|c| batch_means(&c.values[j], DEFAULT_BATCHES)).collect();
            let est = pooled(&parts);
            let violations: usize = sums.iter().map(|c| c.violations[j]).sum();
            if violations > 0 {
                table.hard_failures.push(format!(
                    "{}: det(I - M𝒢) below Π(1 - m/W) on {violations} samples at m = {x}",
                    instance.descriptor.label()
                ));
            }
            let mut row = instance.descriptor.values();
            row.extend([Value::from(g.n()), Value::from(x), Value::from(est.n)]);
            row.extend(estimate_values(&est));
            row.extend([Value::from(violations), Value::from(violations == 0 && est.within(1.0, 3.0))]);
            table.push(row);
        }
    }
    Ok(table)
}
