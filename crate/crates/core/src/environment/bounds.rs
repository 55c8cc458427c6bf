//! Moment estimates of the environment and the explicit bounds they are
//! compared with.

use super::sampler::{run_chains, SampleBatch, SampleConfig};
use crate::graph::{VertexId, WiredGraph};
use crate::stats::{self, Estimate, DEFAULT_BATCHES};
use crate::{Error, Result};

/// `exp((2m+1)²/8 · Σ_k 1/W_k)` for a self-avoiding path with weights `W_k`
/// ending at the wiring point.
pub fn path_moment_bound(weights: &[f64], m: f64) -> Result<f64> {
    if m < 1.0 {
        return Err(Error::Precondition(format!("moment order must be ≥ 1, got {m}")));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0)) {
        return Err(Error::Precondition(format!("path weight {w} is not positive")));
    }
    let inverse: f64 = weights.iter().map(|w| 1.0 / w).sum();
    Ok(((2.0 * m + 1.0).powi(2) / 8.0 * inverse).exp())
}

/// `exp((2σm - 1)² / (8w))`, the Gaussian bound on `E[e^{σ m Δu}]` across a
/// single edge of weight `w`.
pub fn edge_moment_bound(w: f64, sigma: f64, m: f64) -> f64 {
    ((2.0 * sigma * m - 1.0).powi(2) / (8.0 * w)).exp()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoshMomentCheck {
    pub estimate: Estimate,
    pub bound: f64,
    /// `estimate ≤ bound + 3 SE`.
    pub holds: bool,
}

/// Estimates `E[Π_e cosh(u_{e₊} - u_{e₋})^{m_e}]` and compares it with
/// `Π_e (1 - m_e/W_e)^{-1}`; `m` is indexed like `E₊` and must satisfy
/// `0 ≤ m_e < W_e`.
pub fn cosh_moment_bound_check(g: &WiredGraph, batch: &SampleBatch, m: &[f64]) -> Result<CoshMomentCheck> {
    let edges = g.plus_edges();
    if m.len() != edges.len() {
        return Err(Error::DimensionMismatch {
            expected: edges.len(),
            got: m.len(),
        });
    }
    for (k, (&me, &we)) in m.iter().zip(g.plus_weights()).enumerate() {
        if !(me >= 0.0 && me < we) {
            return Err(Error::Precondition(format!("need 0 ≤ m_e < W_e on edge {k}, got m={me}, W={we}")));
        }
    }
    if batch.n != g.n() || batch.is_empty() {
        return Err(Error::Precondition("batch does not match the graph or is empty".into()));
    }
    let values: Vec<f64> = batch
        .rows()
        .map(|u| {
            edges
                .iter()
                .zip(m)
                .map(|(e, me)| me * e.field_diff(u).cosh().ln())
                .sum::<f64>()
                .exp()
        })
        .collect();
    let estimate = stats::batch_means(&values, DEFAULT_BATCHES);
    let bound: f64 = m.iter().zip(g.plus_weights()).map(|(me, we)| 1.0 / (1.0 - me / we)).product();
    Ok(CoshMomentCheck {
        estimate,
        bound,
        holds: estimate.below(bound, 3.0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentEstimate {
    pub estimate: Estimate,
    pub ess: f64,
    /// `ess` reached the requested floor.
    pub reliable: bool,
}

/// Sample mean and batch-means error of `e^{σ m u_i}`.
pub fn estimate_exp_moment(batch: &SampleBatch, i: VertexId, sigma: f64, m: f64, ess_floor: f64) -> Result<MomentEstimate> {
    if batch.is_empty() {
        return Err(Error::Precondition("empty batch".into()));
    }
    if i >= batch.n {
        return Err(Error::OutOfRange(format!("vertex {i}")));
    }
    if sigma.abs() != 1.0 || m < 1.0 {
        return Err(Error::Precondition(format!("need σ = ±1 and m ≥ 1, got σ={sigma}, m={m}")));
    }
    let values: Vec<f64> = batch.rows().map(|u| (sigma * m * u[i]).exp()).collect();
    let ess = stats::effective_sample_size(&values);
    Ok(MomentEstimate {
        estimate: stats::batch_means(&values, DEFAULT_BATCHES),
        ess,
        reliable: ess >= ess_floor,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotonicityResult {
    pub plus: Estimate,
    pub minus: Estimate,
    /// `plus ≤ minus` up to three combined standard errors.
    pub ordered: bool,
}

/// Compares `E_{W⁺,h⁺}[e^{σ m u_i}]` with `E_{W⁻,h⁻}[e^{σ m u_i}]` for a
/// dominated pair on a common vertex set. One chain per seed and model.
pub fn monotonicity_check(
    plus: &WiredGraph,
    minus: &WiredGraph,
    i: VertexId,
    m: f64,
    sigma: f64,
    config: &SampleConfig,
    seeds: &[u64],
) -> Result<MonotonicityResult> {
    check_domination(plus, minus)?;
    let estimate = |g: &WiredGraph, salt: u64| -> Result<Estimate> {
        let salted: Vec<u64> = seeds.iter().map(|s| s ^ salt).collect();
        let parts = run_chains(g, config, &salted)?
            .iter()
            .map(|b| estimate_exp_moment(b, i, sigma, m, 0.0).map(|e| e.estimate))
            .collect::<Result<Vec<_>>>()?;
        Ok(Estimate::combine(&parts))
    };
    let plus_est = estimate(plus, 0)?;
    let minus_est = estimate(minus, 0x9e37_79b9_7f4a_7c15)?;
    let slack = 3.0 * plus_est.se.hypot(minus_est.se);
    Ok(MonotonicityResult {
        plus: plus_est,
        minus: minus_est,
        ordered: plus_est.mean <= minus_est.mean + slack,
    })
}

fn check_domination(plus: &WiredGraph, minus: &WiredGraph) -> Result<()> {
    if plus.n() != minus.n() {
        return Err(Error::DimensionMismatch {
            expected: plus.n(),
            got: minus.n(),
        });
    }
    for e in minus.edges() {
        if plus.weight(e.a, e.b) < e.weight {
            return Err(Error::Precondition(format!("edge ({}, {}) is not dominated", e.a, e.b)));
        }
    }
    for i in 0..plus.n() {
        if plus.pin(i) < minus.pin(i) {
            return Err(Error::Precondition(format!("pinning at {i} is not dominated")));
        }
    }
    Ok(())
}
