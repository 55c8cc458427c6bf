//! Deterministic quadrature oracles on one- and two-vertex graphs.

use std::f64::consts::PI;

use super::{cosh_m1, log_density_u};
use crate::graph::WiredGraph;
use crate::quadrature;
use crate::{Error, Result};

/// What to integrate against the one-vertex marginal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Selector {
    /// Total mass.
    Normalization,
    /// `E[e^{σ m u}]`.
    ExpMoment { sigma: f64, m: f64 },
}

fn single_log_density(h: f64, u: f64) -> f64 {
    0.5 * (h / (2.0 * PI)).ln() - h * cosh_m1(u) - 0.5 * u
}

/// Integral of the selected function against
/// `√(h/2π) e^{-h(cosh u - 1)} e^{-u/2} du`, to absolute error `1e-10`.
pub fn quadrature_1v(h: f64, selector: Selector) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Precondition(format!("pinning must be positive, got {h}")));
    }
    let shift = match selector {
        Selector::Normalization => 0.0,
        Selector::ExpMoment { sigma, m } => sigma * m,
    };
    quadrature::integrate_line(|u| (single_log_density(h, u) + shift * u).exp(), 1e-10)
}

/// Tabulated CDF of `u` on a single vertex with pinning `h`.
#[derive(Clone, Debug)]
pub struct SingleVertexCdf {
    lo: f64,
    step: f64,
    cumulative: Vec<f64>,
}

impl SingleVertexCdf {
    pub fn new(h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Precondition(format!("pinning must be positive, got {h}")));
        }
        let density = |u: f64| single_log_density(h, u).exp();
        let (lo, hi) = quadrature::tail_window(&density, 0.0, 1e-16)?;
        const CELLS: usize = 8192;
        let step = (hi - lo) / CELLS as f64;
        let mut cumulative = Vec::with_capacity(CELLS + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for k in 0..CELLS {
            let a = lo + k as f64 * step;
            acc += quadrature::integrate(density, a, a + step, 1e-14)?;
            cumulative.push(acc);
        }
        Ok(SingleVertexCdf { lo, step, cumulative })
    }

    /// Total mass of the tabulated density (should be 1).
    pub fn mass(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let pos = (x - self.lo) / self.step;
        if pos <= 0.0 {
            return 0.0;
        }
        let k = pos.floor() as usize;
        if k + 1 >= self.cumulative.len() {
            return 1.0;
        }
        let frac = pos - k as f64;
        let v = self.cumulative[k] + frac * (self.cumulative[k + 1] - self.cumulative[k]);
        v / self.mass()
    }
}

/// Nested adaptive quadrature of `∫∫ f(u₀, u₁) dν(u)` on a two-vertex graph.
pub fn integrate_two_vertex<F: Fn(f64, f64) -> f64>(g: &WiredGraph, f: F, tol: f64) -> Result<f64> {
    if g.n() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: g.n(),
        });
    }
    let joint = |a: f64, b: f64| log_density_u(g, &[a, b], None).map_or(0.0, |l| l.exp() * f(a, b));
    let inner_tol = tol * 1e-3;
    let inner = |a: f64| -> f64 {
        quadrature::integrate_line(|b| joint(a, b), inner_tol).unwrap_or(f64::NAN)
    };
    let value = quadrature::integrate_line(inner, tol)?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite("inner quadrature failed".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PINS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

    fn moment(h: f64, sigma: f64, m: f64) -> f64 {
        quadrature_1v(h, Selector::ExpMoment { sigma, m }).unwrap()
    }

    #[test]
    fn normalisation_and_bessel_moments() {
        for h in PINS {
            assert!((quadrature_1v(h, Selector::Normalization).unwrap() - 1.0).abs() < 1e-8);
            assert!((moment(h, 1.0, 1.0) - 1.0).abs() < 1e-8);
            assert!((moment(h, -1.0, 1.0) - (1.0 + 1.0 / h)).abs() < 1e-8);
            // K_{5/2}/K_{1/2} and K_{3/2}/K_{1/2}.
            assert!((moment(h, -1.0, 2.0) - (1.0 + 3.0 / h + 3.0 / (h * h))).abs() < 1e-8);
            assert!((moment(h, 1.0, 2.0) - (1.0 + 1.0 / h)).abs() < 1e-8);
        }
        assert!(quadrature_1v(0.0, Selector::Normalization).is_err());
    }

    #[test]
    fn cdf_table() {
        let cdf = SingleVertexCdf::new(1.0).unwrap();
        assert!((cdf.mass() - 1.0).abs() < 1e-9);
        assert_eq!(cdf.eval(-1e3), 0.0);
        assert_eq!(cdf.eval(1e3), 1.0);
        let mut prev = 0.0;
        for k in -40..=40 {
            let v = cdf.eval(k as f64 * 0.25);
            assert!(v >= prev);
            prev = v;
        }
        // Median check: P(u ≤ 0) from direct quadrature.
        let direct = quadrature::integrate(|u| single_log_density(1.0, u).exp(), -60.0, 0.0, 1e-12).unwrap();
        assert!((cdf.eval(0.0) - direct).abs() < 1e-8);
    }

    #[test]
    fn two_vertex_normalisation() {
        let g = WiredGraph::new(2, [(0, 1, 1.0)], vec![2.0, 3.0]).unwrap();
        let mass = integrate_two_vertex(&g, |_, _| 1.0, 1e-8).unwrap();
        assert!((mass - 1.0).abs() < 1e-6, "{mass}");
        let e0 = integrate_two_vertex(&g, |a, _| a.exp(), 1e-8).unwrap();
        assert!((e0 - 1.0).abs() < 1e-6, "{e0}");
        let weak = WiredGraph::new(2, [(0, 1, 0.5)], vec![0.0, 1.0]).unwrap();
        assert!((integrate_two_vertex(&weak, |_, _| 1.0, 1e-8).unwrap() - 1.0).abs() < 1e-6);
    }
}
