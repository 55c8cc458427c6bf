use vrjp_core::environment::{estimate_exp_moment, SampleBatch};
use vrjp_core::stats::Estimate;
use vrjp_core::weights::{euclidean_hierarchical_pair, EuclideanLongRange};
use vrjp_core::{VertexId, WiredGraph};

use super::{estimate_values, flag_chains, pooled, vertices_or_all, Context};
use crate::config::{ExperimentSpec, ModelSpec};
use crate::error::LabResult;
use crate::models::{Descriptor, PIN_TOLERANCE, SAMPLING_LIMIT};
use crate::table::{Table, Value};

/// Keeps the chains of the dominating model apart from the dominated one.
const MINUS_SALT: u64 = 0xd0d0;

fn scaled(g: &WiredGraph, scale: f64) -> LabResult<WiredGraph> {
    let edges: Vec<_> = g.edges().iter().map(|e| (e.a, e.b, scale * e.weight)).collect();
    let pins = g.pins().iter().map(|h| scale * h).collect();
    Ok(WiredGraph::new(g.n(), edges, pins)?)
}

fn moment(batches: &[SampleBatch], i: VertexId, sigma: f64, m: f64) -> LabResult<Estimate> {
    let parts = batches
        .iter()
        .map(|b| estimate_exp_moment(b, i, sigma, m, 0.0).map(|e| e.estimate))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(pooled(&parts))
}

pub(super) fn run(ctx: &Context) -> LabResult<Table> {
    let ExperimentSpec::Monotonicity { m, sigma, scale, vertices } = &ctx.config.experiment else {
        unreachable!("dispatched on kind");
    };
    let mut columns: Vec<&str> = Descriptor::COLUMNS.to_vec();
    columns.extend(["i", "sigma", "m", "plus", "plus_se", "minus", "minus_se", "pass"]);
    let mut table = Table::new("monotonicity", &columns);

    for instance in ctx.config.model.instances(SAMPLING_LIMIT)? {
        let label = instance.descriptor.label();
        let (plus, minus) = match &ctx.config.model {
            ModelSpec::Euclidean { d, wbar, alpha, .. } => {
                let model = EuclideanLongRange::log_envelope(*d, *wbar, *alpha);
                let levels = instance.descriptor.size.expect("euclidean instances carry N") as u32;
                euclidean_hierarchical_pair(&model, levels, PIN_TOLERANCE)?
            }
            _ => {
                let minus = scaled(&instance.graph, *scale)?;
                (instance.graph, minus)
            }
        };
        let plus_chains = ctx.chains(&plus, None, 0)?;
        let minus_chains = ctx.chains(&minus, None, MINUS_SALT)?;
        flag_chains(&mut table, &format!("{label} W+"), &plus_chains);
        flag_chains(&mut table, &format!("{label} W-"), &minus_chains);

        for i in vertices_or_all(vertices, plus.n())? {
            for &s in sigma {
                for &order in m {
                    let p = moment(&plus_chains, i, s, order)?;
                    let q = moment(&minus_chains, i, s, order)?;
                    let ordered = p.mean <= q.mean + 3.0 * p.se.hypot(q.se);
                    let mut row = instance.descriptor.values();
                    row.extend([Value::from(i), Value::from(s), Value::from(order)]);
                    row.extend(estimate_values(&p));
                    row.extend(estimate_values(&q));
                    row.push(Value::from(ordered));
                    table.push(row);
                }
            }
        }
    }
    Ok(table)
}
