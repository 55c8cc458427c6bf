//! The Gaussian `s | u` conditional and the Ward determinant statistic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::b_edge;
use crate::graph::{PlusEdge, WiredGraph};
use crate::linalg::{self, Matrix, Vector};
use crate::{Error, Result};

/// Draws `s ~ N(0, D(u)^{-1})` with a fresh generator seeded by `seed`.
pub fn sample_s_given_u(g: &WiredGraph, u: &[f64], seed: u64) -> Result<Vec<f64>> {
    sample_s_with(g, u, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Draws `s ~ N(0, D(u)^{-1})`. With `D = A M A`, `A = diag(e^u)` and
/// `M = L Lᵗ`, `s = A^{-1} L^{-ᵗ} ξ` for standard normal `ξ`.
pub fn sample_s_with<R: Rng>(g: &WiredGraph, u: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    let m = g.conjugated_laplacian(u)?;
    let chol = linalg::cholesky(&m)?;
    let xi = Vector::from_iterator(g.n(), (0..g.n()).map(|_| rng.sample::<f64, _>(StandardNormal)));
    let z = chol
        .l()
        .transpose()
        .solve_upper_triangular(&xi)
        .ok_or(Error::NotPositiveDefinite)?;
    Ok(z.iter().zip(u).map(|(zi, ui)| zi * (-ui).exp()).collect())
}

/// `Q`, `𝒢 = √Q Fᵗ D^{-1} F √Q` and `M = diag(m)` over `E₊`.
#[derive(Clone, Debug, PartialEq)]
pub struct WardMatrices {
    /// `Q_e = e^{u_{e₊}+u_{e₋}} / B_e`.
    pub q: Vec<f64>,
    pub green: Matrix,
    pub m: Vec<f64>,
}

impl WardMatrices {
    pub fn new(g: &WiredGraph, u: &[f64], s: &[f64], m: &[f64]) -> Result<Self> {
        check_weights(g, m)?;
        g.check_field(s)?;
        let edges = g.plus_edges();
        let n = g.n();
        let b: Vec<f64> = edges.iter().map(|&e| b_edge(u, Some(s), e)).collect();
        let q: Vec<f64> = edges.iter().zip(&b).map(|(e, b)| e.field_sum(u).exp() / b).collect();
        // Y = A^{-1} F √Q has entries ±e^{(u₊+u₋)/2 - u_i} / √B_e, so that
        // 𝒢 = Yᵗ M^{-1} Y without forming e^{±u} separately.
        let mut y = Matrix::zeros(n, edges.len());
        for (k, &e) in edges.iter().enumerate() {
            let half = 0.5 * e.field_sum(u);
            let scale = b[k].sqrt();
            y[(e.plus(), k)] = (half - u[e.plus()]).exp() / scale;
            if let Some(minus) = e.minus() {
                y[(minus, k)] = -(half - u[minus]).exp() / scale;
            }
        }
        let chol = linalg::cholesky(&g.conjugated_laplacian(u)?)?;
        let solved = chol.solve(&y);
        let green = y.transpose() * solved;
        Ok(WardMatrices {
            q,
            green,
            m: m.to_vec(),
        })
    }

    /// `det(I - M𝒢)`, restricted to edges with `m_e > 0`.
    pub fn det_identity_minus(&self) -> f64 {
        let active: Vec<usize> = (0..self.m.len()).filter(|&k| self.m[k] > 0.0).collect();
        let k = active.len();
        let mut a = Matrix::identity(k, k);
        for (r, &e) in active.iter().enumerate() {
            for (c, &f) in active.iter().enumerate() {
                a[(r, c)] -= self.m[e] * self.green[(e, f)];
            }
        }
        linalg::det(&a)
    }
}

fn check_weights(g: &WiredGraph, m: &[f64]) -> Result<()> {
    if m.len() != g.plus_edges().len() {
        return Err(Error::DimensionMismatch {
            expected: g.plus_edges().len(),
            got: m.len(),
        });
    }
    if let Some(k) = m.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::Precondition(format!("edge exponent {} at {k} must be finite and ≥ 0", m[k])));
    }
    Ok(())
}

/// `Π_e B_e^{m_e} · det(I - M𝒢)`, with `m` indexed like `E₊`.
pub fn ward_statistic(g: &WiredGraph, u: &[f64], s: &[f64], m: &[f64]) -> Result<f64> {
    let w = WardMatrices::new(g, u, s, m)?;
    Ok(product_b(g, u, s, m) * w.det_identity_minus())
}

/// Same statistic with the determinant computed as
/// `det(D - F M Q Fᵗ) / det D`.
pub fn ward_statistic_via_laplacian(g: &WiredGraph, u: &[f64], s: &[f64], m: &[f64]) -> Result<f64> {
    check_weights(g, m)?;
    g.check_field(s)?;
    let c = g.conductances(u)?;
    let reduced: Vec<f64> = g
        .plus_edges()
        .iter()
        .zip(&c)
        .zip(m)
        .map(|((&e, &ce), &me)| ce - me * e.field_sum(u).exp() / b_edge(u, Some(s), e))
        .collect();
    let d = g.laplacian_with(&c)?.into_inner();
    let d_minus = g.laplacian_with(&reduced)?.into_inner();
    let (sign_a, log_a) = linalg::signed_log_det(&d_minus);
    let (sign_b, log_b) = linalg::signed_log_det(&d);
    Ok(product_b(g, u, s, m) * sign_a * sign_b * (log_a - log_b).exp())
}

fn product_b(g: &WiredGraph, u: &[f64], s: &[f64], m: &[f64]) -> f64 {
    g.plus_edges()
        .iter()
        .zip(m)
        .filter(|(_, &me)| me > 0.0)
        .map(|(&e, &me): (&PlusEdge, &f64)| me * b_edge(u, Some(s), e).ln())
        .sum::<f64>()
        .exp()
}
