//! Config-driven experiments on top of `vrjp-core`.
//!
//! A run reads one TOML file, executes one experiment kind over a list of
//! seeds in parallel and writes a CSV table with a JSON mirror. Results do
//! not depend on the number of workers.

// `!(x > 0.0)` is used on purpose so that NaN parameters are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod models;
pub mod oracle;
pub mod table;

pub use config::ExperimentConfig;
pub use error::{LabError, LabResult};
pub use experiments::run_experiment;
pub use table::Table;

use config::{ExperimentSpec, ModelSpec};
use vrjp_core::electrical::AnnuliFlow;

/// Checks a config as far as possible without sampling: schema, model
/// parameters, size guards and model/experiment compatibility. Returns the
/// planned vertex counts.
pub fn validate(config: &ExperimentConfig) -> LabResult<Vec<usize>> {
    let needs = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(LabError::Config(format!("{} needs {what}", config.experiment.kind())))
        }
    };
    match (&config.experiment, &config.model) {
        (ExperimentSpec::FlowEnergy, m) => needs(matches!(m, ModelSpec::Euclidean { .. }), "a euclidean model")?,
        (ExperimentSpec::TransienceBound { .. }, m) => needs(
            matches!(m, ModelSpec::Euclidean { .. } | ModelSpec::Highdim { .. }),
            "a euclidean or highdim model",
        )?,
        (ExperimentSpec::MomentBounds { m, bound: None, .. }, model) => {
            for &order in m {
                needs(model.moment_bound(order)?.is_some(), "an explicit `bound` for this model")?;
            }
        }
        _ => {}
    }
    if let (ExperimentSpec::FlowEnergy, ModelSpec::Euclidean { d, levels, .. }) = (&config.experiment, &config.model) {
        // Flow checks enumerate boxes rather than building graphs.
        for &k in levels {
            AnnuliFlow::new(*d, k).map_err(|e| LabError::Config(format!("level {k}: {e}")))?;
        }
        return config.model.planned_sizes();
    }
    let instances = config.model.instances(models::SAMPLING_LIMIT)?;
    Ok(instances.iter().map(|i| i.graph.n()).collect())
}
