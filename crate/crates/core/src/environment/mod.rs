//! The random environment `ν^Λ_{W,h}` of the VRJP and its bosonic extension.
//!
//! The `u`-marginal has density
//! `exp(-Σ W_ij (cosh(u_i-u_j) - 1) - Σ h_i (cosh u_i - 1)) · √det D(u) · e^{-Σu_i} / (2π)^{|Λ|/2}`
//! and, given `u`, the `s`-field is a centred Gaussian with covariance
//! `D(u)^{-1}`. The wiring point carries `u_ρ = s_ρ = 0`.

mod bounds;
mod oracle;
mod sampler;
mod ward;

pub use bounds::{
    cosh_moment_bound_check, edge_moment_bound, estimate_exp_moment, monotonicity_check, path_moment_bound,
    CoshMomentCheck, MomentEstimate, MonotonicityResult,
};
pub use oracle::{integrate_two_vertex, quadrature_1v, Selector, SingleVertexCdf};
pub use sampler::{run_chains, sample_u_mcmc, KernelChoice, SampleBatch, SampleConfig};
pub use ward::{sample_s_given_u, sample_s_with, ward_statistic, ward_statistic_via_laplacian, WardMatrices};

use std::f64::consts::PI;

use crate::graph::{PlusEdge, VertexId, WiredGraph};
use crate::linalg;
use crate::{Error, Result};

/// A field configuration `(u, s)` on `Λ`; `s` is optional.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldConfig {
    pub u: Vec<f64>,
    pub s: Option<Vec<f64>>,
}

impl FieldConfig {
    pub fn new(g: &WiredGraph, u: Vec<f64>, s: Option<Vec<f64>>) -> Result<Self> {
        g.check_field(&u)?;
        if let Some(s) = &s {
            g.check_field(s)?;
        }
        Ok(FieldConfig { u, s })
    }

    pub fn b(&self, edge: PlusEdge) -> f64 {
        b_edge(&self.u, self.s.as_deref(), edge)
    }
}

/// `B_e = cosh(u_{e₊} - u_{e₋}) + ½ (s_{e₊} - s_{e₋})² e^{u_{e₊}+u_{e₋}}`,
/// with `s ≡ 0` when absent.
pub fn b_edge(u: &[f64], s: Option<&[f64]>, edge: PlusEdge) -> f64 {
    let ds = s.map_or(0.0, |s| edge.field_diff(s));
    edge.field_diff(u).cosh() + 0.5 * ds * ds * edge.field_sum(u).exp()
}

/// `B_i = B_{iρ}`.
pub fn b_pin(u: &[f64], s: Option<&[f64]>, i: VertexId) -> f64 {
    b_edge(u, s, PlusEdge::Pin(i))
}

/// Unnormalised log-density of `ν` at `u`; with `tilt = Some(t)` the density
/// of `e^{u_t} dν`.
pub fn log_density_u(g: &WiredGraph, u: &[f64], tilt: Option<VertexId>) -> Result<f64> {
    g.check_field(u)?;
    if let Some(t) = tilt {
        if t >= g.n() {
            return Err(Error::OutOfRange(format!("tilt vertex {t}")));
        }
    }
    let m = g.conjugated_laplacian(u)?;
    // ½ ln det D - Σ u = ½ ln det M.
    let half_log_det = 0.5 * linalg::log_det(&m)?;
    Ok(energy(g, u) + half_log_det - 0.5 * g.n() as f64 * (2.0 * PI).ln() + tilt.map_or(0.0, |t| u[t]))
}

/// `-Σ_{E} W (cosh Δu - 1) - Σ h (cosh u - 1)`.
pub(crate) fn energy(g: &WiredGraph, u: &[f64]) -> f64 {
    let edges: f64 = g.edges().iter().map(|e| e.weight * cosh_m1(u[e.a] - u[e.b])).sum();
    let pins: f64 = g.pins().iter().zip(u).map(|(h, x)| h * cosh_m1(*x)).sum();
    -(edges + pins)
}

/// `cosh x - 1`, accurate near zero.
pub(crate) fn cosh_m1(x: f64) -> f64 {
    let s = (0.5 * x).sinh();
    2.0 * s * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn b_examples() {
        let u = [0.0, 0.0];
        assert_eq!(b_edge(&u, None, PlusEdge::Inner(0, 1)), 1.0);
        assert_relative_eq!(b_edge(&[1.0, 0.0], None, PlusEdge::Inner(0, 1)), 1f64.cosh());
        assert_relative_eq!(b_edge(&u, Some(&[2.0, 0.0]), PlusEdge::Inner(0, 1)), 3.0);
        assert_relative_eq!(b_pin(&[0.0], Some(&[2.0]), 0), 3.0);
    }

    #[test]
    fn log_density_examples() {
        let single = WiredGraph::new(1, [], vec![1.0]).unwrap();
        assert_relative_eq!(log_density_u(&single, &[0.0], None).unwrap(), -0.5 * (2.0 * PI).ln());
        let two = WiredGraph::new(2, [(0, 1, 1.0)], vec![2.0, 3.0]).unwrap();
        assert_relative_eq!(
            log_density_u(&two, &[0.0, 0.0], None).unwrap(),
            -(2.0 * PI).ln() + 0.5 * 11f64.ln(),
            max_relative = 1e-14
        );
        let u = [0.3, -0.7];
        let plain = log_density_u(&two, &u, None).unwrap();
        assert_relative_eq!(log_density_u(&two, &u, Some(0)).unwrap() - plain, 0.3, max_relative = 1e-12);
        assert!(log_density_u(&two, &u, Some(2)).is_err());
        assert!(log_density_u(&two, &[0.0], None).is_err());
    }

    #[test]
    fn field_config_validates() {
        let two = WiredGraph::new(2, [(0, 1, 1.0)], vec![2.0, 3.0]).unwrap();
        assert!(FieldConfig::new(&two, vec![0.0, f64::NAN], None).is_err());
        assert!(FieldConfig::new(&two, vec![0.0, 0.0], Some(vec![1.0])).is_err());
        let f = FieldConfig::new(&two, vec![0.0, 0.0], Some(vec![2.0, 0.0])).unwrap();
        assert_relative_eq!(f.b(PlusEdge::Inner(0, 1)), 3.0);
    }

    proptest! {
        #[test]
        fn b_is_at_least_one(a in -5.0..5.0f64, b in -5.0..5.0f64, sa in -5.0..5.0f64, sb in -5.0..5.0f64) {
            let u = [a, b];
            let s = [sa, sb];
            prop_assert!(b_edge(&u, Some(&s), PlusEdge::Inner(0, 1)) >= 1.0);
            prop_assert!(b_pin(&u, Some(&s), 1) >= 1.0);
        }

        #[test]
        fn density_matches_laplacian_form(a in -2.0..2.0f64, b in -2.0..2.0f64) {
            // ½ ln det D(u) - Σ u is what the conjugated form computes.
            let g = WiredGraph::new(2, [(0, 1, 1.5)], vec![0.5, 2.0]).unwrap();
            let u = [a, b];
            let direct = energy(&g, &u) + 0.5 * g.laplacian(&u).unwrap().log_det().unwrap() - a - b
                - (2.0 * PI).ln();
            let got = log_density_u(&g, &u, None).unwrap();
            prop_assert!((direct - got).abs() < 1e-11);
        }
    }
}
