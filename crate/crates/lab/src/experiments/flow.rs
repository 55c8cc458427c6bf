use vrjp_core::electrical::AnnuliFlow;
use vrjp_core::weights::EuclideanLongRange;

use super::Context;
use crate::config::ModelSpec;
use crate::error::{LabError, LabResult};
use crate::models::Descriptor;
use crate::table::{Table, Value};

/// Boxes up to this many points also get the pointwise node-rule check.
const POINTWISE_LIMIT: usize = 4096;

pub(super) fn run(ctx: &Context) -> LabResult<Table> {
    let ModelSpec::Euclidean { d, levels, wbar, alpha } = &ctx.config.model else {
        return Err(LabError::Config("flow_energy needs a euclidean model".into()));
    };
    let model = EuclideanLongRange::log_envelope(*d, *wbar, *alpha);
    let mut columns: Vec<&str> = Descriptor::COLUMNS.to_vec();
    columns.extend(["points", "node_rule", "energy", "bound", "pass"]);
    let mut table = Table::new("flow_energy", &columns);

    for &k in levels {
        let descriptor = Descriptor {
            model: "euclidean",
            d: Some(*d),
            size: Some(k as i64),
            alpha: Some(*alpha),
            wbar: Some(*wbar),
        };
        let flow = AnnuliFlow::new(*d, k).map_err(|e| LabError::Config(format!("{}: {e}", descriptor.label())))?;
        let points = 1usize << ((k as usize + 1) * d);
        let mut rule = flow.check_node_rule();
        if rule.is_ok() && points <= POINTWISE_LIMIT {
            rule = flow.check_node_rule_pointwise();
        }
        if let Err(e) = &rule {
            table.hard_failures.push(format!("{}: {e}", descriptor.label()));
        }
        let energy = flow.energy(&model.profile);
        let bound = flow.energy_bound(*wbar, *alpha);
        let mut row = descriptor.values();
        row.extend([
            Value::from(points),
            Value::from(rule.is_ok()),
            Value::from(energy),
            Value::from(bound),
            Value::from(rule.is_ok() && energy <= bound),
        ]);
        table.push(row);
    }
    Ok(table)
}
