//! Deterministic checks on a single small graph: the matrix-tree identity,
//! quadrature normalisations and Thomson's principle for the harmonic flow.

use vrjp_core::electrical::{harmonic_flow, thomson_upper_bound};
use vrjp_core::environment::{integrate_two_vertex, quadrature_1v, Selector};
use vrjp_core::graph::ENUMERATION_LIMIT;
use vrjp_core::WiredGraph;

use crate::error::{LabError, LabResult};
use crate::table::{Table, Value};

const RELATIVE_TOL: f64 = 1e-9;
const QUADRATURE_TOL: f64 = 1e-8;

struct Checker {
    table: Table,
}

impl Checker {
    fn record(&mut self, check: &str, target: String, value: f64, reference: f64, tol: f64, relative: bool) {
        let error = (value - reference).abs();
        let scale = if relative { reference.abs().max(f64::MIN_POSITIVE) } else { 1.0 };
        let pass = error <= tol * scale;
        if !pass {
            self.table
                .hard_failures
                .push(format!("{check} at {target}: {value} vs {reference}"));
        }
        self.table.push(vec![
            Value::from(check),
            Value::from(target),
            Value::from(value),
            Value::from(reference),
            Value::from(error),
            Value::from(pass),
        ]);
    }
}

/// Runs every check that applies to `g` at the field `u` (zero by default).
pub fn run_oracle(g: &WiredGraph, field: Option<&[f64]>) -> LabResult<Table> {
    let zeros = vec![0.0; g.n()];
    let u = field.unwrap_or(&zeros);
    if u.len() != g.n() {
        return Err(LabError::Config(format!("field has {} entries for {} vertices", u.len(), g.n())));
    }
    let mut checker = Checker {
        table: Table::new("oracle", &["check", "target", "value", "reference", "abs_error", "pass"]),
    };

    if g.n() < ENUMERATION_LIMIT {
        let det = g.log_det_laplacian(u)?;
        let trees = g.spanning_tree_sum(u)?.ln();
        checker.record("log_det_vs_spanning_trees", "graph".into(), det, trees, RELATIVE_TOL, true);
    }

    match g.n() {
        1 => {
            let h = g.pin(0);
            let mass = quadrature_1v(h, Selector::Normalization)?;
            checker.record("normalization", "u0".into(), mass, 1.0, QUADRATURE_TOL, false);
            let mean = quadrature_1v(h, Selector::ExpMoment { sigma: 1.0, m: 1.0 })?;
            checker.record("exp_moment", "u0".into(), mean, 1.0, QUADRATURE_TOL, false);
        }
        2 => {
            let mass = integrate_two_vertex(g, |_, _| 1.0, QUADRATURE_TOL * 1e-2)?;
            checker.record("normalization", "u".into(), mass, 1.0, QUADRATURE_TOL, false);
            let mean = integrate_two_vertex(g, |a, _| a.exp(), QUADRATURE_TOL * 1e-2)?;
            checker.record("exp_moment", "u0".into(), mean, 1.0, QUADRATURE_TOL, false);
        }
        _ => {}
    }

    let c = g.conductances(u)?;
    for x in 0..g.n() {
        let flow = harmonic_flow(g, &c, x)?;
        let thomson = thomson_upper_bound(g, &flow, &c)?;
        checker.record(
            "thomson_energy_vs_resistance",
            format!("x={x}"),
            thomson.energy,
            thomson.resistance,
            RELATIVE_TOL,
            true,
        );
    }
    Ok(checker.table)
}
