use vrjp_core::electrical::weight_resistance;
use vrjp_core::environment::{sample_u_mcmc, SampleBatch, SampleConfig};
use vrjp_core::stats::Estimate;
use vrjp_core::transience::{empirical_kx, kx_high_dim, kx_long_range, visit_bound_experiment};
use vrjp_core::weights::EuclideanLongRange;
use vrjp_core::VertexId;

use super::{pooled, Context};
use crate::config::{ExperimentSpec, ModelSpec};
use crate::error::{LabError, LabResult};
use crate::models::{default_center, PIN_TOLERANCE, SAMPLING_LIMIT};
use crate::table::{Table, Value};

const KX_SALT: u64 = 0x6b78;

/// How a row's value was obtained.
#[derive(Clone, Copy)]
enum Method {
    Analytic,
    Deterministic,
    Sampled,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Deterministic => "deterministic",
            Method::Sampled => "sampled",
        }
    }
}

struct Row<'a> {
    metric: &'a str,
    size: Option<i64>,
    value: f64,
    se: Option<f64>,
    reference: Option<f64>,
    method: Method,
    pass: Option<bool>,
}

impl Row<'_> {
    fn values(self, x: &str) -> Vec<Value> {
        vec![
            Value::from(self.metric),
            Value::opt(self.size),
            Value::from(x),
            Value::from(self.value),
            Value::opt_float(self.se),
            Value::opt_float(self.reference),
            Value::from(self.method.name()),
            self.pass.map_or(Value::Empty, Value::from),
        ]
    }
}

/// Joins per-seed batches of one graph into a single batch.
fn merge(batches: &[SampleBatch]) -> SampleBatch {
    let mut merged = batches[0].clone();
    for b in &batches[1..] {
        merged.draws.extend_from_slice(&b.draws);
    }
    merged
}

pub(super) fn run(ctx: &Context) -> LabResult<Table> {
    let ExperimentSpec::TransienceBound {
        walks_per_seed,
        moment_order,
        kx_draws,
    } = &ctx.config.experiment
    else {
        unreachable!("dispatched on kind");
    };
    let model = &ctx.config.model;
    let kx = match model {
        ModelSpec::Highdim { .. } => kx_high_dim(&model.high_dim_model()?, *moment_order, PIN_TOLERANCE)?,
        ModelSpec::Euclidean { d, wbar, alpha, .. } => {
            kx_long_range(&EuclideanLongRange::log_envelope(*d, *wbar, *alpha), *moment_order, PIN_TOLERANCE)?
        }
        _ => return Err(LabError::Config("transience_bound needs a highdim or euclidean model".into())),
    };
    // The walk starts at the common centre of the boxes, or at the origin
    // corner of the dyadic boxes.
    let start = match model {
        ModelSpec::Highdim { d, sides, center, .. } => vec![center.unwrap_or_else(|| default_center(sides)); *d],
        ModelSpec::Euclidean { d, .. } => vec![0; *d],
        _ => unreachable!(),
    };

    let x_name = format!("{start:?}");
    let mut table = Table::new(
        "transience_bound",
        &["metric", "N", "x", "value", "se", "reference", "method", "pass"],
    );
    let push = |table: &mut Table, row: Row| table.push(row.values(&x_name));
    push(
        &mut table,
        Row {
            metric: "kx_analytic",
            size: None,
            value: kx,
            se: None,
            reference: None,
            method: Method::Analytic,
            pass: None,
        },
    );

    let instances = model.instances(SAMPLING_LIMIT)?;
    let mut resistances = Vec::with_capacity(instances.len());
    for instance in &instances {
        let g = &instance.graph;
        let x = g
            .vertex_at(&start)
            .ok_or_else(|| LabError::Config(format!("{} does not contain {start:?}", instance.descriptor.label())))?;
        let r = weight_resistance(g, x)?.value;
        push(
            &mut table,
            Row {
                metric: "resistance",
                size: instance.descriptor.size,
                value: r,
                se: None,
                reference: None,
                method: Method::Deterministic,
                pass: None,
            },
        );
        resistances.push(r);
    }
    if resistances.windows(2).any(|w| w[1] < w[0] * (1.0 - 1e-12)) {
        table.hard_failures.push(format!("resistances {resistances:?} decrease along nested boxes"));
    }

    let env = ctx.config.sampler.to_core();
    for instance in &instances {
        let g = &instance.graph;
        let x: VertexId = g.vertex_at(&start).expect("checked above");
        let label = instance.descriptor.label();
        let reports = ctx.per_seed(|_, seed| Ok(visit_bound_experiment(g, x, kx, &env, *walks_per_seed, seed)?))?;
        let excluded: usize = reports.iter().map(|r| r.visits.excluded).sum();
        if excluded > 0 {
            table.hard_failures.push(format!("{label}: {excluded} walks hit the step cap before reaching ρ"));
        }
        let est = pooled(&reports.iter().map(|r| r.visits.estimate).collect::<Vec<_>>());
        let bound = reports[0].bound;
        let holds = excluded == 0 && est.below(bound, 3.0);
        push(
            &mut table,
            Row {
                metric: "visits",
                size: instance.descriptor.size,
                value: est.mean,
                se: Some(est.se),
                reference: Some(bound),
                method: Method::Sampled,
                pass: Some(holds),
            },
        );

        if *kx_draws > 0 {
            let config = SampleConfig {
                sweeps: kx_draws * env.thinning,
                tilt: Some(x),
                ..env
            };
            let batches = ctx.per_seed(|_, seed| Ok(sample_u_mcmc(g, &config, seed ^ KX_SALT)?))?;
            for b in batches.iter().filter(|b| b.flagged) {
                table
                    .hard_failures
                    .push(format!("{label}: sampler acceptance {:.3} out of range for seed {}", b.acceptance_rate, b.seed));
            }
            let empirical: Estimate = empirical_kx(g, &merge(&batches), x)?.estimate;
            push(
                &mut table,
                Row {
                    metric: "kx_empirical",
                    size: instance.descriptor.size,
                    value: empirical.mean,
                    se: Some(empirical.se),
                    reference: Some(kx),
                    method: Method::Sampled,
                    pass: Some(empirical.below(kx, 3.0)),
                },
            );
            push(
                &mut table,
                Row {
                    metric: "kx_ratio",
                    size: instance.descriptor.size,
                    value: empirical.mean / kx,
                    se: None,
                    reference: Some(1.0),
                    method: Method::Sampled,
                    pass: None,
                },
            );
        }
    }
    Ok(table)
}
