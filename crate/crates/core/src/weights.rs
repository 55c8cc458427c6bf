//! Weight families on `Z^d` and on binary trees, the wired boxes they induce,
//! and the explicit moment constants.

use std::collections::HashSet;

use crate::graph::{VertexId, WiredGraph};
use crate::quadrature;
use crate::{Error, Result};

/// Radial long-range profile `w: [1, ∞) → (0, ∞)`, evaluated at `‖i-j‖_∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    /// `w(x) = scale · x^{-exponent}`.
    Power { scale: f64, exponent: f64 },
    /// Decreasing envelope of `wbar · (log₂ x)^α / x^{2d}`: constant up to
    /// the maximiser `x* = e^{α/(2d)}`, equal to the bound beyond it.
    LogEnvelope { wbar: f64, alpha: f64, d: usize },
}

impl Profile {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Profile::Power { scale, exponent } => scale * x.powf(-exponent),
            Profile::LogEnvelope { wbar, alpha, d } => {
                let peak = (alpha / (2.0 * d as f64)).exp();
                wbar * log_lower_bound(x.max(peak), alpha, d)
            }
        }
    }

    /// Smallest radius from which `x^{d-1} w(x)` is non-increasing, or
    /// `None` when the radial sum over `Z^d` diverges.
    fn monotone_from(&self, d: usize) -> Option<f64> {
        let d = d as f64;
        match *self {
            Profile::Power { exponent, .. } => (exponent > d).then_some(1.0),
            Profile::LogEnvelope { alpha, d: own, .. } => {
                let peak = (alpha / (2.0 * own as f64)).exp();
                (own as f64 >= d).then(|| peak.max((alpha / (d + 1.0)).exp()))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Profile::Power { scale, exponent } => scale > 0.0 && exponent.is_finite() && scale.is_finite(),
            Profile::LogEnvelope { wbar, alpha, d } => wbar > 0.0 && wbar.is_finite() && alpha > 0.0 && d >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition(format!("invalid profile {self:?}")))
        }
    }
}

/// `(log₂ x)^α / x^{2d}`.
pub fn log_lower_bound(x: f64, alpha: f64, d: usize) -> f64 {
    x.log2().powf(alpha) * x.powi(-2 * d as i32)
}

/// Number of points of `Z^d` at sup-distance exactly `r ≥ 1` from a point.
pub fn shell_size(r: u64, d: usize) -> f64 {
    let outer = (2 * r + 1) as f64;
    let inner = (2 * r - 1) as f64;
    outer.powi(d as i32) - inner.powi(d as i32)
}

/// Translation-invariant ambient weights on `Z^d`:
/// `W_ij = w(‖i-j‖_∞) + nearest_neighbor · 1{‖i-j‖₁ = 1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeWeights {
    pub d: usize,
    pub radial: Option<Profile>,
    pub nearest_neighbor: f64,
}

/// A truncated infinite sum together with its certified relative error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub rel_error: f64,
    pub radius: u64,
}

impl LatticeWeights {
    pub fn weight(&self, i: &[i64], j: &[i64]) -> f64 {
        if i == j {
            return 0.0;
        }
        let sup = sup_distance(i, j);
        let l1: i64 = i.iter().zip(j).map(|(a, b)| (a - b).abs()).sum();
        let mut w = self.radial.map_or(0.0, |p| p.value(sup as f64));
        if l1 == 1 {
            w += self.nearest_neighbor;
        }
        w
    }

    /// `Σ_{j≠i} W_ij` over all of `Z^d`.
    pub fn row_sum(&self, tol: f64) -> Result<SeriesValue> {
        let origin = vec![0i64; self.d];
        self.pinning(&origin, &[], tol)
    }

    /// Wired pinning `h_i = Σ_{j ∉ inner} W_ij`. Shells of sup-radius `r`
    /// around `i` are summed exactly up to a radius `R` beyond `inner`; the
    /// remaining tail is bracketed between `∫_{R+1}^∞` and `∫_R^∞` of the
    /// (monotone) shell density and its midpoint is added.
    pub fn pinning(&self, i: &[i64], inner: &[Vec<i64>], tol: f64) -> Result<SeriesValue> {
        let nn_outside = if self.nearest_neighbor > 0.0 {
            let set: HashSet<&[i64]> = inner.iter().map(Vec::as_slice).collect();
            let mut count = 0usize;
            let mut p = i.to_vec();
            for axis in 0..self.d {
                for step in [-1i64, 1] {
                    p[axis] += step;
                    if !set.contains(p.as_slice()) {
                        count += 1;
                    }
                    p[axis] -= step;
                }
            }
            count as f64 * self.nearest_neighbor
        } else {
            0.0
        };
        let Some(profile) = self.radial else {
            return Ok(SeriesValue {
                value: nn_outside,
                rel_error: 0.0,
                radius: 1,
            });
        };
        profile.validate()?;
        let start = profile.monotone_from(self.d).ok_or_else(|| {
            Error::NonFinite(format!("radial weight sum of {profile:?} diverges in d={}", self.d))
        })?;

        let mut inside: Vec<u64> = Vec::new();
        for j in inner {
            let r = sup_distance(i, j) as usize;
            if r == 0 {
                continue;
            }
            if inside.len() <= r {
                inside.resize(r + 1, 0);
            }
            inside[r] += 1;
        }
        let r_inner = inside.len().saturating_sub(1) as u64;
        let mut radius = r_inner.max(start.ceil() as u64).max(8);
        let d = self.d;
        let outside_at = |r: u64| -> f64 {
            let occupied = inside.get(r as usize).copied().unwrap_or(0) as f64;
            shell_size(r, d) - occupied
        };

        let mut partial = 0.0;
        let mut summed_to = 0u64;
        loop {
            for r in summed_to + 1..=radius {
                partial += outside_at(r) * profile.value(r as f64);
            }
            summed_to = radius;
            let upper = shell_tail_integral(&profile, d, radius as f64)?;
            let lower = shell_tail_integral(&profile, d, (radius + 1) as f64)?;
            let value = partial + 0.5 * (upper + lower) + nn_outside;
            if !value.is_finite() {
                return Err(Error::NonFinite("pinning sum".into()));
            }
            let err = 0.5 * (upper - lower).abs();
            let rel = if value > 0.0 { err / value } else { 0.0 };
            if rel <= tol || radius > 1 << 40 {
                return Ok(SeriesValue {
                    value,
                    rel_error: rel,
                    radius,
                });
            }
            radius *= 2;
        }
    }
}

/// `∫_R^∞ shell(x) w(x) dx` with `shell(x) = (2x+1)^d - (2x-1)^d`, computed
/// in the variable `t = ln x`.
fn shell_tail_integral(profile: &Profile, d: usize, radius: f64) -> Result<f64> {
    let density = |t: f64| {
        let x = t.exp();
        let shell = (2.0 * x + 1.0).powi(d as i32) - (2.0 * x - 1.0).powi(d as i32);
        shell * profile.value(x) * x
    };
    let t0 = radius.ln();
    let head = density(t0);
    if head == 0.0 {
        return Ok(0.0);
    }
    let mut span = 8.0;
    while density(t0 + span) > 1e-22 * head {
        span *= 2.0;
        if span > 1e4 {
            return Err(Error::NonFinite("radial tail does not decay".into()));
        }
    }
    // Absolute tolerance relative to the head of the integrand.
    quadrature::integrate(density, t0, t0 + span, head * 1e-11)
}

fn sup_distance(i: &[i64], j: &[i64]) -> i64 {
    i.iter().zip(j).map(|(a, b)| (a - b).abs()).max().unwrap_or(0)
}

/// Points of `offset + {0, …, side-1}^d` in lexicographic order.
pub fn lattice_box(d: usize, side: i64, offset: i64) -> Vec<Vec<i64>> {
    let count = (side as usize).pow(d as u32);
    (0..count)
        .map(|mut k| {
            let mut p = vec![0i64; d];
            for c in (0..d).rev() {
                p[c] = offset + (k % side as usize) as i64;
                k /= side as usize;
            }
            p
        })
        .collect()
}

/// Restricts ambient weights to `inner` with wired boundary conditions.
pub fn build_wired_graph(inner: Vec<Vec<i64>>, ambient: &LatticeWeights, tol: f64) -> Result<WiredGraph> {
    let n = inner.len();
    if let Some(p) = inner.iter().find(|p| p.len() != ambient.d) {
        return Err(Error::DimensionMismatch {
            expected: ambient.d,
            got: p.len(),
        });
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let w = ambient.weight(&inner[a], &inner[b]);
            if w > 0.0 {
                edges.push((a, b, w));
            }
        }
    }
    let mut pins = Vec::with_capacity(n);
    let mut worst: f64 = 0.0;
    for p in &inner {
        let h = ambient.pinning(p, &inner, tol)?;
        worst = worst.max(h.rel_error);
        pins.push(h.value);
    }
    let g = WiredGraph::new(n, edges, pins)?.with_coords(inner)?;
    Ok(if ambient.radial.is_some() { g.with_pin_tolerance(worst) } else { g })
}

/// Euclidean long-range weights `W_ij = w(‖i-j‖_∞)` on `Z^d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EuclideanLongRange {
    pub d: usize,
    pub profile: Profile,
    pub wbar: f64,
    pub alpha: f64,
}

/// Outcome of a sampled compliance check.
#[derive(Clone, Debug, PartialEq)]
pub struct Compliance {
    pub ok: bool,
    pub failures: Vec<String>,
}

impl EuclideanLongRange {
    /// The canonical compliant model: `w` is the decreasing envelope of the
    /// lower bound itself.
    pub fn log_envelope(d: usize, wbar: f64, alpha: f64) -> Self {
        EuclideanLongRange {
            d,
            profile: Profile::LogEnvelope { wbar, alpha, d },
            wbar,
            alpha,
        }
    }

    pub fn ambient(&self) -> LatticeWeights {
        LatticeWeights {
            d: self.d,
            radial: Some(self.profile),
            nearest_neighbor: 0.0,
        }
    }

    /// The box `{0, …, 2^N - 1}^d` with wired boundary.
    pub fn box_graph(&self, levels: u32, tol: f64) -> Result<WiredGraph> {
        build_wired_graph(lattice_box(self.d, 1 << levels, 0), &self.ambient(), tol)
    }

    /// Sampled checks: monotone decrease, finiteness of the radial sum, the
    /// logarithmic lower bound, and `w(2^{⌈l/d⌉}) ≥ W̄^H 2^{-2l} l^α` for
    /// `1 ≤ l ≤ levels·d` with `W̄^H = W̄ d^{-α} 2^{-2d}`.
    pub fn check_compliance(&self, levels: u32) -> Compliance {
        let mut failures = Vec::new();
        let grid: Vec<f64> = (0..400).map(|k| 1.0 + (k as f64 * 0.05).powi(2)).collect();
        for pair in grid.windows(2) {
            if self.profile.value(pair[1]) > self.profile.value(pair[0]) * (1.0 + 1e-12) {
                failures.push(format!("w increases between {} and {}", pair[0], pair[1]));
                break;
            }
        }
        for &x in &grid {
            let bound = self.wbar * log_lower_bound(x, self.alpha, self.d);
            if self.profile.value(x) < bound * (1.0 - 1e-12) {
                failures.push(format!("lower bound fails at x={x}"));
                break;
            }
        }
        if self.profile.monotone_from(self.d).is_none() {
            failures.push("radial sum diverges".into());
        }
        let wbar_h = hierarchical_wbar(self.wbar, self.d, self.alpha);
        for l in 1..=(levels as usize * self.d) {
            let lhs = self.profile.value(2f64.powi(l.div_ceil(self.d) as i32));
            let rhs = wbar_h * 2f64.powi(-2 * l as i32) * (l as f64).powf(self.alpha);
            if lhs < rhs * (1.0 - 1e-12) {
                failures.push(format!("hierarchical comparison fails at l={l}"));
            }
        }
        Compliance {
            ok: failures.is_empty(),
            failures,
        }
    }
}

/// `W̄^H = W̄ d^{-α} 2^{-2d}`.
pub fn hierarchical_wbar(wbar: f64, d: usize, alpha: f64) -> f64 {
    wbar * (d as f64).powf(-alpha) * 2f64.powi(-2 * d as i32)
}

/// Nearest-neighbour weights `W̄` on `Z^d`, `d ≥ 3`, plus an optional
/// summable long-range part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HighDimModel {
    pub d: usize,
    pub wbar: f64,
    pub long_range: Option<Profile>,
}

impl HighDimModel {
    pub fn new(d: usize, wbar: f64, long_range: Option<Profile>) -> Result<Self> {
        if d < 3 {
            return Err(Error::Precondition(format!("high-dimensional model needs d ≥ 3, got {d}")));
        }
        if !(wbar > 0.0 && wbar.is_finite()) {
            return Err(Error::Precondition(format!("W̄ must be positive, got {wbar}")));
        }
        if let Some(p) = long_range {
            p.validate()?;
            if p.monotone_from(d).is_none() {
                return Err(Error::Precondition("long-range part is not summable".into()));
            }
        }
        Ok(HighDimModel { d, wbar, long_range })
    }

    pub fn ambient(&self) -> LatticeWeights {
        LatticeWeights {
            d: self.d,
            radial: self.long_range,
            nearest_neighbor: self.wbar,
        }
    }

    pub fn box_graph(&self, side: i64, offset: i64, tol: f64) -> Result<WiredGraph> {
        build_wired_graph(lattice_box(self.d, side, offset), &self.ambient(), tol)
    }
}

/// Weight function `w^H: ℕ → (0, ∞)` of the hierarchical model.
#[derive(Clone, Debug, PartialEq)]
pub enum HierarchicalProfile {
    /// `w^H(l) = W̄^H 2^{-2l} l^α`.
    PowerLog { wbar_h: f64, alpha: f64 },
    /// `w^H(l) = w(2^{⌈l/d⌉})` for a Euclidean profile.
    FromEuclidean { profile: Profile, d: usize },
    /// Explicit values `w^H(1), w^H(2), …`.
    Table(Vec<f64>),
}

impl HierarchicalProfile {
    pub fn value(&self, l: usize) -> f64 {
        match self {
            HierarchicalProfile::PowerLog { wbar_h, alpha } => {
                wbar_h * 2f64.powi(-2 * l as i32) * (l as f64).powf(*alpha)
            }
            HierarchicalProfile::FromEuclidean { profile, d } => profile.value(2f64.powi(l.div_ceil(*d) as i32)),
            HierarchicalProfile::Table(values) => values.get(l.wrapping_sub(1)).copied().unwrap_or(0.0),
        }
    }
}

/// Complete graph on the leaves `{0,1}^N` with `W_ij = w^H(d_H(i,j))` and
/// uniform pinning `h^H`. Leaf `k` has digits `z_m = (k >> m) & 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct HierarchicalModel {
    pub levels: usize,
    pub weight: HierarchicalProfile,
    pub pinning: f64,
}

impl HierarchicalModel {
    /// The model saturating the weight and pinning assumptions:
    /// `w^H(l) = W̄^H 2^{-2l} l^α`, `h^H = W̄^H 2^{-(2+N)} (N+1)^α`.
    pub fn minimal(levels: usize, wbar_h: f64, alpha: f64) -> Self {
        HierarchicalModel {
            levels,
            weight: HierarchicalProfile::PowerLog { wbar_h, alpha },
            pinning: wbar_h * 2f64.powi(-(2 + levels as i32)) * ((levels + 1) as f64).powf(alpha),
        }
    }

    pub fn leaf(&self, k: usize) -> Vec<u8> {
        (0..self.levels).map(|m| ((k >> m) & 1) as u8).collect()
    }

    /// `W^H_ij` for distinct leaves.
    pub fn weight_between(&self, i: &[u8], j: &[u8]) -> Result<f64> {
        if i.len() != self.levels || j.len() != self.levels {
            return Err(Error::DimensionMismatch {
                expected: self.levels,
                got: i.len().max(j.len()),
            });
        }
        let dh = hierarchical_distance(i, j)?;
        if dh == 0 {
            return Err(Error::Precondition("hierarchical weight of a leaf with itself".into()));
        }
        Ok(self.weight.value(dh))
    }

    /// Uniform pinning, independent of the leaf.
    pub fn pinning_of(&self, _leaf: &[u8]) -> f64 {
        self.pinning
    }

    pub fn graph(&self) -> Result<WiredGraph> {
        let n = 1usize << self.levels;
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let dh = usize::BITS as usize - (a ^ b).leading_zeros() as usize;
                edges.push((a, b, self.weight.value(dh)));
            }
        }
        WiredGraph::new(n, edges, vec![self.pinning; n])
    }

    /// Checks `w^H(l) ≥ W̄^H 2^{-2l} l^α` for `1 ≤ l ≤ N` and
    /// `h^H ≥ W̄^H 2^{-(2+N)} (N+1)^α`.
    pub fn satisfies_assumption(&self, wbar_h: f64, alpha: f64) -> bool {
        let slack = 1.0 - 1e-12;
        let weights_ok = (1..=self.levels).all(|l| {
            self.weight.value(l) >= wbar_h * 2f64.powi(-2 * l as i32) * (l as f64).powf(alpha) * slack
        });
        let n = self.levels as i32;
        weights_ok && self.pinning >= wbar_h * 2f64.powi(-(2 + n)) * ((n + 1) as f64).powf(alpha) * slack
    }
}

/// Interleaves binary digits: `z_n` is digit `⌊n/d⌋` of coordinate `n mod d`.
pub fn phi(point: &[i64], levels: u32) -> Result<Vec<u8>> {
    let d = point.len();
    let side = 1i64 << levels;
    if let Some(c) = point.iter().find(|&&c| c < 0 || c >= side) {
        return Err(Error::OutOfRange(format!("coordinate {c} outside [0, {side})")));
    }
    Ok((0..levels as usize * d)
        .map(|n| ((point[n % d] >> (n / d)) & 1) as u8)
        .collect())
}

pub fn phi_inverse(z: &[u8], d: usize) -> Result<Vec<i64>> {
    if d == 0 || !z.len().is_multiple_of(d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: z.len(),
        });
    }
    let mut point = vec![0i64; d];
    for (n, &digit) in z.iter().enumerate() {
        if digit > 1 {
            return Err(Error::OutOfRange(format!("digit {digit}")));
        }
        point[n % d] |= (digit as i64) << (n / d);
    }
    Ok(point)
}

/// Smallest `l` with `z_k = z'_k` for all `k ≥ l` (`L` if there is none,
/// which cannot happen for `k = L` itself, so the range is `0..=L`).
pub fn hierarchical_distance(z: &[u8], z2: &[u8]) -> Result<usize> {
    if z.len() != z2.len() {
        return Err(Error::DimensionMismatch {
            expected: z.len(),
            got: z2.len(),
        });
    }
    Ok(z.iter().zip(z2).rposition(|(a, b)| a != b).map_or(0, |p| p + 1))
}

/// `(d_H(φ(i), φ(j)), 2^{⌈d_H/d⌉} > ‖i-j‖_∞)`.
pub fn compare_dh_linf(i: &[i64], j: &[i64], levels: u32) -> Result<(usize, bool)> {
    if i.len() != j.len() {
        return Err(Error::DimensionMismatch {
            expected: i.len(),
            got: j.len(),
        });
    }
    let d = i.len();
    let dh = hierarchical_distance(&phi(i, levels)?, &phi(j, levels)?)?;
    let lhs = 1i64 << dh.div_ceil(d);
    Ok((dh, lhs > sup_distance(i, j)))
}

/// Antichain effective model: vertex 0 is `j = (1, 0^{N-1})`, vertex `l` is
/// `i_l` for `1 ≤ l ≤ N`. Only the path weights `W_{i_{l-1} i_l} =
/// 2^{2l-3} w^H(l)`, the pinnings `h_{i_l} = 2^{l-1} h^H` (`h_{i_1} = h^H`)
/// and the leaf-level attachment of `j` (`W_{j i_1} = w^H(1)`, `h_j = h^H`)
/// are set; every other antichain weight is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct AntichainModel {
    pub graph: WiredGraph,
    /// `i_1, …, i_N`.
    pub path: Vec<VertexId>,
    /// Weights along `i_1 → i_2 → … → i_N → ρ`.
    pub path_weights: Vec<f64>,
    /// Set because the remaining complete-graph weights are omitted.
    pub other_weights_omitted: bool,
}

pub fn antichain_effective_model(levels: usize, weight: &HierarchicalProfile, pinning: f64) -> Result<AntichainModel> {
    if levels == 0 {
        return Err(Error::Precondition("antichain model needs N ≥ 1".into()));
    }
    let n = levels + 1;
    let mut edges = vec![(0, 1, weight.value(1))];
    let mut pins = vec![0.0; n];
    pins[0] = pinning;
    pins[1] = pinning;
    let mut path_weights = Vec::with_capacity(levels);
    for (l, pin) in pins.iter_mut().enumerate().skip(2) {
        let w = 2f64.powi(2 * l as i32 - 3) * weight.value(l);
        edges.push((l - 1, l, w));
        path_weights.push(w);
        *pin = 2f64.powi(l as i32 - 1) * pinning;
    }
    path_weights.push(pins[levels]);
    Ok(AntichainModel {
        graph: WiredGraph::new(n, edges, pins)?,
        path: (1..=levels).collect(),
        path_weights,
        other_weights_omitted: levels >= 2,
    })
}

/// `Σ_{l≥2} l^{-α}` via Euler–Maclaurin, absolute error far below `1e-12`.
pub fn zeta_tail(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::Precondition(format!("series Σ l^-α diverges for α = {alpha}")));
    }
    const CUT: u32 = 200;
    let direct: f64 = (2..CUT).rev().map(|l| (l as f64).powf(-alpha)).sum();
    let l = CUT as f64;
    let a = alpha;
    let tail = l.powf(1.0 - a) / (a - 1.0) + 0.5 * l.powf(-a) + a * l.powf(-a - 1.0) / 12.0
        - a * (a + 1.0) * (a + 2.0) * l.powf(-a - 3.0) / 720.0
        + a * (a + 1.0) * (a + 2.0) * (a + 3.0) * (a + 4.0) * l.powf(-a - 5.0) / 30240.0;
    Ok(direct + tail)
}

/// `c_H(W̄^H, α, m) = exp((2m+1)² / W̄^H · Σ_{l≥2} l^{-α})`.
pub fn constant_ch(wbar_h: f64, alpha: f64, m: f64) -> Result<f64> {
    if !(wbar_h > 0.0) || m < 1.0 {
        return Err(Error::Precondition(format!("need W̄^H > 0 and m ≥ 1 (got {wbar_h}, {m})")));
    }
    Ok(((2.0 * m + 1.0).powi(2) / wbar_h * zeta_tail(alpha)?).exp())
}

/// `C(W̄, d, α, m) = c_H(W̄ d^{-α} 2^{-2d}, α, m)`.
pub fn constant_c(wbar: f64, d: usize, alpha: f64, m: f64) -> Result<f64> {
    constant_ch(hierarchical_wbar(wbar, d, alpha), alpha, m)
}

/// Dominated pair used to compare a Euclidean box with a hierarchical one:
/// `g⁺` is the wired box `{0,…,2^N-1}^d`; `g⁻` lives on the same vertices
/// with `W⁻_ij = w(2^{⌈d_H(φ(i),φ(j))/d⌉})` and uniform pinning `min_j h_j`.
pub fn euclidean_hierarchical_pair(model: &EuclideanLongRange, levels: u32, tol: f64) -> Result<(WiredGraph, WiredGraph)> {
    let plus = model.box_graph(levels, tol)?;
    let coords = plus.coords().expect("box graphs carry coordinates").to_vec();
    let digits: Vec<Vec<u8>> = coords.iter().map(|p| phi(p, levels)).collect::<Result<_>>()?;
    let hier = HierarchicalProfile::FromEuclidean {
        profile: model.profile,
        d: model.d,
    };
    let n = coords.len();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            edges.push((a, b, hier.value(hierarchical_distance(&digits[a], &digits[b])?)));
        }
    }
    let h_min = plus.pins().iter().copied().fold(f64::INFINITY, f64::min);
    let minus = WiredGraph::new(n, edges, vec![h_min; n])?.with_coords(coords)?;
    Ok((plus, minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const ZETA3: f64 = 1.202_056_903_159_594_2;

    #[test]
    fn phi_examples() {
        assert_eq!(phi(&[3, 2], 2).unwrap(), vec![1, 0, 1, 1]);
        assert_eq!(phi(&[0, 0, 0], 2).unwrap(), vec![0; 6]);
        assert!(phi(&[4, 0], 2).is_err());
        assert!(phi(&[-1], 2).is_err());
        for p in lattice_box(3, 4, 0) {
            assert_eq!(phi_inverse(&phi(&p, 2).unwrap(), 3).unwrap(), p);
        }
    }

    #[test]
    fn hierarchical_distance_examples() {
        assert_eq!(hierarchical_distance(&[0, 1, 1], &[0, 1, 1]).unwrap(), 0);
        assert_eq!(hierarchical_distance(&[0, 0, 0], &[1, 0, 0]).unwrap(), 1);
        assert_eq!(hierarchical_distance(&[0, 0, 0, 0], &[1, 1, 1, 1]).unwrap(), 4);
        assert!(hierarchical_distance(&[0, 0], &[0]).is_err());
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare_dh_linf(&[0, 0], &[3, 3], 2).unwrap(), (4, true));
        assert_eq!(compare_dh_linf(&[1, 2], &[1, 2], 2).unwrap(), (0, true));
    }

    #[test]
    fn hierarchical_weight_examples() {
        let model = HierarchicalModel {
            levels: 3,
            weight: HierarchicalProfile::PowerLog { wbar_h: 1.0, alpha: 2.0 },
            pinning: 0.7,
        };
        assert_relative_eq!(model.weight_between(&[0, 0, 0], &[1, 0, 0]).unwrap(), 0.25);
        assert_relative_eq!(model.weight_between(&[0, 0, 0], &[0, 1, 1]).unwrap(), 9.0 / 64.0);
        assert!(model.weight_between(&[0, 1, 0], &[0, 1, 0]).is_err());
        assert_eq!(model.pinning_of(&[1, 1, 0]), 0.7);
        let g = model.graph().unwrap();
        assert_eq!(g.edges().len(), 28);
        assert_relative_eq!(g.weight(0, 4), 9.0 / 64.0);
    }

    #[test]
    fn antichain_examples() {
        let table = HierarchicalProfile::Table(vec![0.5, 1.0, 1.0]);
        let model = antichain_effective_model(3, &table, 0.25).unwrap();
        assert_relative_eq!(model.graph.weight(1, 2), 2.0);
        assert_relative_eq!(model.graph.pin(2), 0.5);
        assert_relative_eq!(model.graph.pin(1), 0.25);
        assert_relative_eq!(model.graph.weight(2, 3), 8.0);
        assert_eq!(model.path_weights, vec![2.0, 8.0, 1.0]);
        assert!(model.other_weights_omitted);

        let single = antichain_effective_model(1, &table, 0.25).unwrap();
        assert_eq!(single.path, vec![1]);
        assert_eq!(single.path_weights, vec![0.25]);
        assert!(antichain_effective_model(0, &table, 1.0).is_err());
    }

    #[test]
    fn constants() {
        assert!((zeta_tail(2.0).unwrap() - (PI * PI / 6.0 - 1.0)).abs() < 1e-13);
        assert!((zeta_tail(4.0).unwrap() - (PI.powi(4) / 90.0 - 1.0)).abs() < 1e-13);
        assert!((zeta_tail(3.0).unwrap() - (ZETA3 - 1.0)).abs() < 1e-13);
        let c = constant_c(36.0, 1, 2.0, 1.0).unwrap();
        assert_relative_eq!(c, (PI * PI / 6.0 - 1.0).exp(), max_relative = 1e-12);
        assert!((c - 1.9058).abs() < 1e-4);
        let ch = constant_ch(8.0, 2.0, 1.0).unwrap();
        assert!((ch - 2.066).abs() < 1e-3);
        assert!(constant_ch(1e12, 2.0, 1.0).unwrap() - 1.0 < 1e-10);
        assert!(constant_ch(1.0, 1.0, 1.0).is_err());
        assert!(constant_c(1.0, 2, 1.5, 3.0).unwrap() > 1.0);
    }

    #[test]
    fn pinning_power_law_against_zeta() {
        // h_0 for Λ = {0,1,2,3}, w(x) = x^{-3}: Σ_{j≥1} j^{-3} + Σ_{j≥4} j^{-3}.
        let ambient = LatticeWeights {
            d: 1,
            radial: Some(Profile::Power { scale: 1.0, exponent: 3.0 }),
            nearest_neighbor: 0.0,
        };
        let inner = lattice_box(1, 4, 0);
        let h = ambient.pinning(&[0], &inner, 1e-10).unwrap();
        let exact = 2.0 * ZETA3 - 1.0 - 1.0 / 8.0 - 1.0 / 27.0;
        assert!((h.value - exact).abs() < 1e-8, "{} vs {exact}", h.value);
        assert!(h.rel_error <= 1e-10);
    }

    #[test]
    fn pinning_nearest_neighbor_box() {
        let model = HighDimModel::new(3, 40.0, None).unwrap();
        let g = model.box_graph(3, 0, 1e-10).unwrap();
        // Corner (0,0,0) has three outside neighbours, the centre none.
        assert_eq!(g.pin(g.vertex_at(&[0, 0, 0]).unwrap()), 120.0);
        assert_eq!(g.pin(g.vertex_at(&[1, 0, 1]).unwrap()), 40.0);
        assert_eq!(g.pin(g.vertex_at(&[1, 1, 1]).unwrap()), 0.0);
        assert!(HighDimModel::new(2, 1.0, None).is_err());
    }

    #[test]
    fn euclidean_model_compliance_and_pinning_domination() {
        for d in 1..=3 {
            let model = EuclideanLongRange::log_envelope(d, 36.0, 2.0);
            assert!(model.check_compliance(3).ok);
            for levels in 1..=3u32 {
                if d == 3 && levels == 3 {
                    continue;
                }
                let g = model.box_graph(levels, 1e-9).unwrap();
                let h_min = g.pins().iter().copied().fold(f64::INFINITY, f64::min);
                let bound = 2f64.powi(((levels + 1) as usize * d) as i32) * model.profile.value(2f64.powi(levels as i32 + 1));
                assert!(h_min >= bound, "d={d} N={levels}: {h_min} < {bound}");
            }
        }
        let bad = EuclideanLongRange {
            d: 1,
            profile: Profile::Power { scale: 1.0, exponent: 3.0 },
            wbar: 36.0,
            alpha: 2.0,
        };
        assert!(!bad.check_compliance(2).ok);
    }

    #[test]
    fn divergent_profile_rejected() {
        let ambient = LatticeWeights {
            d: 2,
            radial: Some(Profile::Power { scale: 1.0, exponent: 2.0 }),
            nearest_neighbor: 0.0,
        };
        assert!(matches!(ambient.row_sum(1e-6), Err(Error::NonFinite(_))));
    }

    #[test]
    fn row_sum_d1_power() {
        let ambient = LatticeWeights {
            d: 1,
            radial: Some(Profile::Power { scale: 1.0, exponent: 2.0 }),
            nearest_neighbor: 0.0,
        };
        let s = ambient.row_sum(1e-12).unwrap();
        assert_relative_eq!(s.value, PI * PI / 3.0, max_relative = 1e-11);
    }

    #[test]
    fn pair_is_dominated() {
        let model = EuclideanLongRange::log_envelope(2, 36.0, 2.0);
        let (plus, minus) = euclidean_hierarchical_pair(&model, 2, 1e-9).unwrap();
        for a in 0..plus.n() {
            assert!(plus.pin(a) >= minus.pin(a));
            for b in 0..plus.n() {
                if a != b {
                    assert!(plus.weight(a, b) >= minus.weight(a, b));
                }
            }
        }
    }
}
