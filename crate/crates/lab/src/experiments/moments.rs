use vrjp_core::environment::estimate_exp_moment;

use super::{estimate_values, flag_chains, pooled, vertices_or_all, Context};
use crate::config::ExperimentSpec;
use crate::error::{LabError, LabResult};
use crate::models::{Descriptor, SAMPLING_LIMIT};
use crate::table::{Table, Value};

pub(super) fn run(ctx: &Context) -> LabResult<Table> {
    let ExperimentSpec::MomentBounds { m, sigma, vertices, bound } = &ctx.config.experiment else {
        unreachable!("dispatched on kind");
    };
    let model = &ctx.config.model;
    let mut columns: Vec<&str> = Descriptor::COLUMNS.to_vec();
    columns.extend(["i", "sigma", "m", "estimate", "se", "ess", "bound", "pass"]);
    let mut table = Table::new("moment_bounds", &columns);

    let mut bounds = Vec::with_capacity(m.len());
    for &order in m {
        let b = match bound {
            Some(b) => *b,
            None => model.moment_bound(order)?.ok_or_else(|| {
                LabError::Config("this model has no analytic constant; set `bound` in [experiment]".into())
            })?,
        };
        bounds.push(b);
    }

    for instance in model.instances(SAMPLING_LIMIT)? {
        let g = &instance.graph;
        let batches = ctx.chains(g, None, 0)?;
        flag_chains(&mut table, &instance.descriptor.label(), &batches);
        for i in vertices_or_all(vertices, g.n())? {
            for &s in sigma {
                for (&order, &b) in m.iter().zip(&bounds) {
                    let parts = batches
                        .iter()
                        .map(|batch| estimate_exp_moment(batch, i, s, order, 0.0))
                        .collect::<Result<Vec<_>, _>>()?;
                    let ess: f64 = parts.iter().map(|p| p.ess).sum();
                    let est = pooled(&parts.iter().map(|p| p.estimate).collect::<Vec<_>>());
                    let mut row = instance.descriptor.values();
                    row.extend([Value::from(i), Value::from(s), Value::from(order)]);
                    row.extend(estimate_values(&est));
                    row.extend([Value::from(ess), Value::from(b), Value::from(est.below(b, 3.0))]);
                    table.push(row);
                }
            }
        }
    }
    Ok(table)
}
