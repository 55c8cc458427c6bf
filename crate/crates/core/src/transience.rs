//! The visit bound `E[N_x] ≤ K_x ℛ^N(W, x↔ρ)` for the walk started at `x`:
//! the constant `K_x`, nested-box resistances, and an annealed experiment that
//! puts the two next to each other.

use crate::electrical::{weight_resistance, ResistanceResult};
use crate::environment::{SampleBatch, SampleConfig};
use crate::graph::{PlusEdge, VertexId, WiredGraph};
use crate::stats::{self, Estimate, DEFAULT_BATCHES};
use crate::vrjp::{annealed_rwrc, count_visits, StopRule, VisitCounts};
use crate::weights::{constant_c, EuclideanLongRange, HighDimModel};
use crate::{Error, Result};

/// Moment order needed when Hölder's inequality splits
/// `E[e^{u_x+u_k-u_i-u_j+u_0}]` into five factors.
pub const HOLDER_ORDER: f64 = 5.0;

/// `C(W̄, d, α, m) · Σ_{k≠x} W_xk` for the long-range model; independent of
/// `x`. The bound on `E[c_f/c_e]` needs `m = HOLDER_ORDER`.
pub fn kx_long_range(model: &EuclideanLongRange, m: f64, tol: f64) -> Result<f64> {
    let constant = constant_c(model.wbar, model.d, model.alpha, m)?;
    Ok(constant * model.ambient().row_sum(tol)?.value)
}

/// `2^{2m+1} · Σ_{k≠x} W_xk`; with `m = HOLDER_ORDER` the factor is `2^{11}`.
pub fn kx_high_dim(model: &HighDimModel, m: f64, tol: f64) -> Result<f64> {
    if m < 1.0 {
        return Err(Error::Precondition(format!("moment order must be ≥ 1, got {m}")));
    }
    Ok(2f64.powf(2.0 * m + 1.0) * model.ambient().row_sum(tol)?.value)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmpiricalKx {
    /// Largest edge estimate of `W_e Σ_{f∋x} E[c_f / c_e]`.
    pub estimate: Estimate,
    pub edge: PlusEdge,
}

/// Estimates `max_e W_e Σ_{f∋x} E[c_f/c_e]` from draws of the environment
/// seen by a walk (normally tilted at its start). With `u_ρ = 0` the edge
/// term is `Σ_k W_xk E[e^{u_x+u_k-u_i-u_j}]`, summed over `k ∈ Λ ∪ {ρ}`.
pub fn empirical_kx(g: &WiredGraph, batch: &SampleBatch, x: VertexId) -> Result<EmpiricalKx> {
    if x >= g.n() {
        return Err(Error::OutOfRange(format!("vertex {x}")));
    }
    if batch.n != g.n() || batch.len() < DEFAULT_BATCHES {
        return Err(Error::Precondition(format!(
            "need at least {DEFAULT_BATCHES} draws on a graph with {} vertices",
            g.n()
        )));
    }
    let around_x: Vec<f64> = batch
        .rows()
        .map(|u| {
            let inner: f64 = g.neighbors(x).iter().map(|&(k, w)| w * (u[x] + u[k]).exp()).sum();
            inner + g.pin(x) * u[x].exp()
        })
        .collect();
    let mut best: Option<EmpiricalKx> = None;
    for &e in g.plus_edges() {
        let values: Vec<f64> = batch
            .rows()
            .zip(&around_x)
            .map(|(u, s)| s * (-e.field_sum(u)).exp())
            .collect();
        let estimate = stats::batch_means(&values, DEFAULT_BATCHES);
        if best.is_none_or(|b| estimate.mean > b.estimate.mean) {
            best = Some(EmpiricalKx { estimate, edge: e });
        }
    }
    best.ok_or_else(|| Error::Precondition("graph has no edges".into()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NestedResistance {
    pub side: i64,
    pub resistance: ResistanceResult,
}

/// `ℛ(W, x↔ρ)` on boxes of the given sides around `x = (center, …, center)`,
/// each box wired to the rest of the lattice.
pub fn nested_box_resistances(model: &HighDimModel, center: i64, sides: &[i64], tol: f64) -> Result<Vec<NestedResistance>> {
    if sides.windows(2).any(|w| w[0] >= w[1]) || sides.first().is_some_and(|&s| s < 1) {
        return Err(Error::Precondition(format!("box sides {sides:?} must be positive and increasing")));
    }
    let x = vec![center; model.d];
    sides
        .iter()
        .map(|&side| {
            let g = model.box_graph(side, center - (side - 1) / 2, tol)?;
            let v = g
                .vertex_at(&x)
                .ok_or_else(|| Error::Precondition(format!("box of side {side} misses {x:?}")))?;
            Ok(NestedResistance {
                side,
                resistance: weight_resistance(&g, v)?,
            })
        })
        .collect()
}

/// Resistances never decrease along the sequence, up to relative round-off.
pub fn weakly_increasing(nested: &[NestedResistance]) -> bool {
    nested.windows(2).all(|w| {
        let (a, b) = (w[0].resistance.value, w[1].resistance.value);
        b >= a * (1.0 - 1e-12)
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VisitBoundReport {
    pub kx: f64,
    pub resistance: f64,
    pub bound: f64,
    pub visits: VisitCounts,
    /// Sweeps between environment draws.
    pub spacing: usize,
    pub pilot_iat: f64,
    pub acceptance_rate: f64,
    /// Empirical mean ≤ bound within three standard errors.
    pub holds: bool,
}

/// Annealed walks from `x` until they reach `ρ`, in environments drawn from
/// `e^{u_x} dν`; the mean number of visits to `x` is compared with `K_x ℛ`.
pub fn visit_bound_experiment(
    g: &WiredGraph,
    x: VertexId,
    kx: f64,
    env: &SampleConfig,
    n_walks: usize,
    seed: u64,
) -> Result<VisitBoundReport> {
    if x >= g.n() {
        return Err(Error::OutOfRange(format!("vertex {x}")));
    }
    if !(kx > 0.0 && kx.is_finite()) {
        return Err(Error::Precondition(format!("K_x = {kx} must be positive")));
    }
    let resistance = weight_resistance(g, x)?.value;
    let bound = kx * resistance;
    let run = annealed_rwrc(g, env, x, n_walks, StopRule::HitRho, seed)?;
    let paths: Vec<Vec<VertexId>> = run.walks.into_iter().map(|w| w.path).collect();
    let visits = count_visits(&paths, x, g.rho());
    Ok(VisitBoundReport {
        kx,
        resistance,
        bound,
        visits,
        spacing: run.spacing,
        pilot_iat: run.pilot_iat,
        acceptance_rate: run.acceptance_rate,
        holds: visits.excluded == 0 && visits.estimate.below(bound, 3.0),
    })
}
