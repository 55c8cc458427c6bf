//! Electrical networks on wired graphs: effective resistance, unit flows,
//! Thomson and Rayleigh checks, and the annuli flow on `Z^d`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_rational::Ratio;

use crate::graph::{PlusEdge, VertexId, WiredGraph};
use crate::linalg::{self, Matrix, Vector};
use crate::weights::Profile;
use crate::{Error, Result};

/// Largest box `P_K` the annuli flow will enumerate.
pub const ANNULI_POINT_LIMIT: u64 = 1 << 24;

/// Where the conductances of a resistance query came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConductanceSource {
    Deterministic,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResistanceResult {
    pub value: f64,
    /// FNV-1a hash of the graph's text form.
    pub fingerprint: u64,
    pub source: ConductanceSource,
}

fn fingerprint(g: &WiredGraph) -> u64 {
    g.to_text().bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn check_conductances(g: &WiredGraph, c: &[f64]) -> Result<()> {
    if c.len() != g.plus_edges().len() {
        return Err(Error::DimensionMismatch {
            expected: g.plus_edges().len(),
            got: c.len(),
        });
    }
    if let Some(k) = c.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::Precondition(format!("conductance {} on edge {k}", c[k])));
    }
    Ok(())
}

/// Potentials `v` on `Λ` (with `v_ρ = 0`) for a unit current injected at `x`.
/// Vertices cut off from `ρ` get potential zero; `x` itself must be connected.
pub fn potentials(g: &WiredGraph, c: &[f64], x: VertexId) -> Result<Vec<f64>> {
    check_conductances(g, c)?;
    if x >= g.n() {
        return Err(Error::OutOfRange(format!("vertex {x}")));
    }
    let reach = g.reachable_from_rho(|k| c[k] > 0.0);
    if !reach[x] {
        return Err(Error::InfiniteResistance(x));
    }
    let kept: Vec<VertexId> = (0..g.n()).filter(|&i| reach[i]).collect();
    let mut index = vec![usize::MAX; g.n()];
    for (k, &i) in kept.iter().enumerate() {
        index[i] = k;
    }
    let m = kept.len();
    let mut d = Matrix::zeros(m, m);
    for (e, &ce) in g.plus_edges().iter().zip(c) {
        if ce == 0.0 {
            continue;
        }
        match *e {
            PlusEdge::Inner(a, b) => {
                let (a, b) = (index[a], index[b]);
                d[(a, a)] += ce;
                d[(b, b)] += ce;
                d[(a, b)] -= ce;
                d[(b, a)] -= ce;
            }
            PlusEdge::Pin(a) => d[(index[a], index[a])] += ce,
        }
    }
    let mut rhs = Vector::zeros(m);
    rhs[index[x]] = 1.0;
    let v = linalg::cholesky(&d)?.solve(&rhs);
    let mut out = vec![0.0; g.n()];
    for (k, &i) in kept.iter().enumerate() {
        out[i] = v[k];
    }
    Ok(out)
}

/// `ℛ(c, x ↔ ρ)` for conductances `c` on `E₊`.
pub fn effective_resistance(g: &WiredGraph, c: &[f64], x: VertexId, source: ConductanceSource) -> Result<ResistanceResult> {
    let v = potentials(g, c, x)?;
    Ok(ResistanceResult {
        value: v[x],
        fingerprint: fingerprint(g),
        source,
    })
}

/// `ℛ(W, x ↔ ρ)` with the graph's own weights as conductances.
pub fn weight_resistance(g: &WiredGraph, x: VertexId) -> Result<ResistanceResult> {
    effective_resistance(g, g.plus_weights(), x, ConductanceSource::Deterministic)
}

/// Sink of a flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sink {
    Vertex(VertexId),
    Infinity,
}

/// An antisymmetric edge function `θ`, stored once per unordered pair.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowAssignment {
    entries: BTreeMap<(VertexId, VertexId), f64>,
    pub source: VertexId,
    pub sink: Sink,
}

impl FlowAssignment {
    pub fn new(source: VertexId, sink: Sink) -> Self {
        FlowAssignment {
            entries: BTreeMap::new(),
            source,
            sink,
        }
    }

    /// Sets `θ(i,j) = value` and `θ(j,i) = -value`.
    pub fn set(&mut self, i: VertexId, j: VertexId, value: f64) {
        if i == j {
            return;
        }
        let (key, v) = if i < j { ((i, j), value) } else { ((j, i), -value) };
        if v == 0.0 {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, v);
        }
    }

    pub fn get(&self, i: VertexId, j: VertexId) -> f64 {
        if i < j {
            self.entries.get(&(i, j)).copied().unwrap_or(0.0)
        } else {
            -self.entries.get(&(j, i)).copied().unwrap_or(0.0)
        }
    }

    /// Nonzero entries `(i, j, θ(i,j))` with `i < j`.
    pub fn entries(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        self.entries.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    /// `Σ_j θ(i,j)`.
    pub fn net_out(&self, i: VertexId) -> f64 {
        self.entries()
            .map(|(a, b, v)| if a == i { v } else if b == i { -v } else { 0.0 })
            .sum()
    }

    /// Checks `Σ_j θ(i,j) = δ_{source,i} - δ_{sink,i}` at every vertex in
    /// `vertices` to absolute tolerance `tol`.
    pub fn check_node_rule(&self, vertices: impl IntoIterator<Item = VertexId>, tol: f64) -> Result<()> {
        let mut net: BTreeMap<VertexId, f64> = BTreeMap::new();
        for (a, b, v) in self.entries() {
            *net.entry(a).or_default() += v;
            *net.entry(b).or_default() -= v;
        }
        for i in vertices {
            let mut expected = if i == self.source { 1.0 } else { 0.0 };
            if self.sink == Sink::Vertex(i) {
                expected -= 1.0;
            }
            let got = net.get(&i).copied().unwrap_or(0.0);
            if (got - expected).abs() > tol {
                return Err(Error::NodeRule {
                    vertex: i,
                    net: got,
                    expected,
                });
            }
        }
        Ok(())
    }

    /// `½ Σ_{i,j} θ(i,j)² / c_ij`.
    pub fn energy<F: Fn(VertexId, VertexId) -> f64>(&self, conductance: F) -> Result<f64> {
        let mut total = 0.0;
        for (a, b, v) in self.entries() {
            let c = conductance(a, b);
            if !(c > 0.0) {
                return Err(Error::InfiniteEnergy { a, b, flow: v });
            }
            total += v * v / c;
        }
        Ok(total)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "source {}", self.source);
        match self.sink {
            Sink::Vertex(v) => {
                let _ = writeln!(out, "sink {v}");
            }
            Sink::Infinity => {
                let _ = writeln!(out, "sink infinity");
            }
        }
        for (a, b, v) in self.entries() {
            let _ = writeln!(out, "flow {a} {b} {v}");
        }
        out
    }
}

impl fmt::Display for FlowAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for FlowAssignment {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut flow = FlowAssignment::new(0, Sink::Infinity);
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: k + 1, msg };
            let parts: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|e| err(format!("{e}")));
            match parts.as_slice() {
                ["source", v] => flow.source = num(v)?,
                ["sink", "infinity"] => flow.sink = Sink::Infinity,
                ["sink", v] => flow.sink = Sink::Vertex(num(v)?),
                ["flow", a, b, v] => {
                    let value: f64 = v.parse().map_err(|e| err(format!("{e}")))?;
                    flow.set(num(a)?, num(b)?, value);
                }
                _ => return Err(err(format!("unrecognised line `{line}`"))),
            }
        }
        Ok(flow)
    }
}

/// Conductance lookup on a graph; `ρ` is addressed as `g.n()`.
pub fn graph_conductance<'a>(g: &'a WiredGraph, c: &'a [f64]) -> impl Fn(VertexId, VertexId) -> f64 + 'a {
    let mut map = BTreeMap::new();
    for (e, &ce) in g.plus_edges().iter().zip(c) {
        map.insert((e.plus(), e.minus().unwrap_or(g.n())), ce);
    }
    move |a, b| map.get(&(a.min(b), a.max(b))).copied().unwrap_or(0.0)
}

/// The current flow `θ(a,b) = c_ab (v_a - v_b)` of a unit current from `x` to `ρ`.
pub fn harmonic_flow(g: &WiredGraph, c: &[f64], x: VertexId) -> Result<FlowAssignment> {
    let v = potentials(g, c, x)?;
    let mut flow = FlowAssignment::new(x, Sink::Vertex(g.n()));
    for (e, &ce) in g.plus_edges().iter().zip(c) {
        let a = e.plus();
        let vb = e.minus().map_or(0.0, |b| v[b]);
        flow.set(a, e.minus().unwrap_or(g.n()), ce * (v[a] - vb));
    }
    Ok(flow)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThomsonCheck {
    pub energy: f64,
    pub resistance: f64,
}

/// Energy of a unit flow `x → ρ`, which bounds `ℛ(c, x ↔ ρ)` from above.
/// The node rule is verified first.
pub fn thomson_upper_bound(g: &WiredGraph, flow: &FlowAssignment, c: &[f64]) -> Result<ThomsonCheck> {
    check_conductances(g, c)?;
    if flow.sink != Sink::Vertex(g.n()) || flow.source >= g.n() {
        return Err(Error::Precondition("Thomson bound needs a unit flow from an inner vertex to ρ".into()));
    }
    flow.check_node_rule(0..g.n(), 1e-9)?;
    let energy = flow.energy(graph_conductance(g, c))?;
    let resistance = effective_resistance(g, c, flow.source, ConductanceSource::Deterministic)?.value;
    Ok(ThomsonCheck { energy, resistance })
}

/// Checks `ℛ(c_high) ≤ ℛ(c_low)` for `c_low ≤ c_high` componentwise; returns
/// `(ℛ(c_low), ℛ(c_high))`.
pub fn rayleigh_monotonicity_check(g: &WiredGraph, c_low: &[f64], c_high: &[f64], x: VertexId) -> Result<(f64, f64)> {
    check_conductances(g, c_low)?;
    check_conductances(g, c_high)?;
    if let Some(k) = (0..c_low.len()).find(|&k| c_low[k] > c_high[k]) {
        return Err(Error::Precondition(format!("conductances not ordered on edge {k}")));
    }
    let low = effective_resistance(g, c_low, x, ConductanceSource::Deterministic)?.value;
    let high = effective_resistance(g, c_high, x, ConductanceSource::Deterministic)?.value;
    if high > low * (1.0 + 1e-12) {
        return Err(Error::RayleighViolation { low, high });
    }
    Ok((low, high))
}

/// `K_x · ℛ`.
pub fn visit_bound(k: f64, resistance: &ResistanceResult) -> Result<f64> {
    if !(k > 0.0 && resistance.value > 0.0) {
        return Err(Error::Precondition("visit bound needs positive inputs".into()));
    }
    Ok(k * resistance.value)
}

/// Unit flow from the origin of `Z^d` to infinity through the annuli
/// `B_0 = {0}`, `B_k = P_k ∖ P_{k-1}` with `P_k = (-2^k, 2^k]^d`, spreading
/// uniformly between consecutive annuli up to level `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnuliFlow {
    pub d: usize,
    pub levels: u32,
}

impl AnnuliFlow {
    pub fn new(d: usize, levels: u32) -> Result<Self> {
        if d == 0 || levels == 0 {
            return Err(Error::Precondition("annuli flow needs d ≥ 1 and K ≥ 1".into()));
        }
        let points = 2f64.powi(((levels + 1) as usize * d) as i32);
        if points > ANNULI_POINT_LIMIT as f64 {
            return Err(Error::LimitExceeded {
                what: "annuli box size",
                value: points as usize,
                limit: ANNULI_POINT_LIMIT as usize,
            });
        }
        Ok(AnnuliFlow { d, levels })
    }

    /// `|B_k| = 2^{(k+1)d} - 2^{kd}` for `k ≥ 1`, `|B_0| = 1`.
    pub fn annulus_size(&self, k: u32) -> i128 {
        if k == 0 {
            1
        } else {
            (1i128 << ((k + 1) as usize * self.d)) - (1i128 << (k as usize * self.d))
        }
    }

    /// Level of a point: `0` for the origin, `k` for `B_k`, `None` for
    /// points of `P_0 ∖ {0}`, which lie in no annulus.
    pub fn level(point: &[i64]) -> Option<u32> {
        if point.iter().all(|&c| c == 0) {
            return Some(0);
        }
        // Smallest k with -2^k < c ≤ 2^k for every coordinate.
        let k = point
            .iter()
            .map(|&c| {
                let mut k = 0u32;
                while !(-(1i64 << k) < c && c <= 1i64 << k) {
                    k += 1;
                }
                k
            })
            .max()
            .unwrap_or(0);
        (k > 0).then_some(k)
    }

    /// `θ` on a single pair `B_k → B_{k+1}`.
    pub fn theta(&self, k: u32) -> Ratio<i128> {
        Ratio::new(1, self.annulus_size(k) * self.annulus_size(k + 1))
    }

    pub fn flow_between(&self, i: &[i64], j: &[i64]) -> Ratio<i128> {
        match (Self::level(i), Self::level(j)) {
            (Some(a), Some(b)) if b == a + 1 && a < self.levels => self.theta(a),
            (Some(a), Some(b)) if a == b + 1 && b < self.levels => -self.theta(b),
            _ => Ratio::from_integer(0),
        }
    }

    /// Points of `P_K = (-2^K, 2^K]^d`, lexicographic.
    pub fn box_points(&self, k: u32) -> Vec<Vec<i64>> {
        let side = 1i64 << (k + 1);
        crate::weights::lattice_box(self.d, side, -(1i64 << k) + 1)
    }

    /// Annulus sizes counted by enumerating `P_K`.
    pub fn counted_sizes(&self) -> Vec<i128> {
        let mut counts = vec![0i128; self.levels as usize + 1];
        for p in self.box_points(self.levels) {
            if let Some(k) = Self::level(&p) {
                counts[k as usize] += 1;
            }
        }
        counts
    }

    /// Exact node rule at every point of level `< K`, with annulus sizes
    /// taken from enumeration and `θ` from the closed-form sizes.
    pub fn check_node_rule(&self) -> Result<()> {
        let counts = self.counted_sizes();
        for k in 0..=self.levels {
            if counts[k as usize] != self.annulus_size(k) {
                return Err(Error::Precondition(format!("annulus {k} has {} points", counts[k as usize])));
            }
        }
        for k in 0..self.levels {
            let out = Ratio::from_integer(counts[k as usize + 1]) * self.theta(k);
            let inflow = if k == 0 {
                Ratio::from_integer(0)
            } else {
                Ratio::from_integer(counts[k as usize - 1]) * self.theta(k - 1)
            };
            let expected = if k == 0 { Ratio::from_integer(1) } else { Ratio::from_integer(0) };
            if out - inflow != expected {
                return Err(Error::NodeRule {
                    vertex: k as usize,
                    net: ratio_to_f64(out - inflow),
                    expected: ratio_to_f64(expected),
                });
            }
        }
        Ok(())
    }

    /// Exact node rule by summing `θ(i, ·)` over all of `P_K` for every
    /// point of level `< K`. Quadratic in `|P_K|`.
    pub fn check_node_rule_pointwise(&self) -> Result<()> {
        let points = self.box_points(self.levels);
        if points.len() > 4096 {
            return Err(Error::LimitExceeded {
                what: "pointwise node-rule check",
                value: points.len(),
                limit: 4096,
            });
        }
        for (vertex, i) in points.iter().enumerate() {
            let Some(k) = Self::level(i) else { continue };
            if k >= self.levels {
                continue;
            }
            let net: Ratio<i128> = points.iter().map(|j| self.flow_between(i, j)).sum();
            let expected = Ratio::from_integer(i128::from(k == 0));
            if net != expected {
                return Err(Error::NodeRule {
                    vertex,
                    net: ratio_to_f64(net),
                    expected: ratio_to_f64(expected),
                });
            }
        }
        Ok(())
    }

    /// The flow on the enumerated box `P_K` as an explicit assignment,
    /// vertices indexed by position in [`box_points`](Self::box_points).
    pub fn materialize(&self) -> Result<(Vec<Vec<i64>>, FlowAssignment)> {
        let points = self.box_points(self.levels);
        if points.len() > 4096 {
            return Err(Error::LimitExceeded {
                what: "materialised annuli flow",
                value: points.len(),
                limit: 4096,
            });
        }
        let origin = points.iter().position(|p| p.iter().all(|&c| c == 0)).expect("origin is in P_K");
        let mut flow = FlowAssignment::new(origin, Sink::Infinity);
        for a in 0..points.len() {
            for b in a + 1..points.len() {
                let v = self.flow_between(&points[a], &points[b]);
                if v != Ratio::from_integer(0) {
                    flow.set(a, b, ratio_to_f64(v));
                }
            }
        }
        Ok((points, flow))
    }

    /// `½ Σ θ²/W` with `W_ij = w(‖i-j‖_∞)`, from pair counts by sup-distance.
    pub fn energy(&self, profile: &Profile) -> f64 {
        (0..self.levels)
            .map(|k| {
                let theta = ratio_to_f64(self.theta(k));
                let counts = self.pair_counts(k);
                let sum: f64 = counts
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(r, &c)| c as f64 / profile.value(r as f64))
                    .sum();
                theta * theta * sum
            })
            .sum()
    }

    /// `(2^{3d}/W̄) Σ_{k=0}^{K-1} (k+2)^{-α}`.
    pub fn energy_bound(&self, wbar: f64, alpha: f64) -> f64 {
        let series: f64 = (0..self.levels).map(|k| ((k + 2) as f64).powf(-alpha)).sum();
        2f64.powi(3 * self.d as i32) / wbar * series
    }

    /// Number of pairs `(i, j) ∈ B_k × B_{k+1}` at each sup-distance `r`.
    pub fn pair_counts(&self, k: u32) -> Vec<i128> {
        let max_r = (1usize << (k + 2)) + 1;
        let cumulative: Vec<i128> = (0..=max_r)
            .map(|r| {
                let r = r as i64;
                let (outer_a, inner_a) = self.level_boxes(k);
                let (outer_b, inner_b) = self.level_boxes(k + 1);
                let count = |a: Option<(i64, i64)>, b: Option<(i64, i64)>| -> i128 {
                    match (a, b) {
                        (Some(a), Some(b)) => pairs_within(a, b, r).pow(self.d as u32),
                        _ => 0,
                    }
                };
                count(Some(outer_a), Some(outer_b)) - count(inner_a, Some(outer_b)) - count(Some(outer_a), inner_b)
                    + count(inner_a, inner_b)
            })
            .collect();
        let mut exact = vec![0i128; max_r + 1];
        for r in 0..=max_r {
            exact[r] = cumulative[r] - if r > 0 { cumulative[r - 1] } else { 0 };
        }
        exact
    }

    /// `B_k` as (enclosing interval, removed interval) per coordinate.
    fn level_boxes(&self, k: u32) -> ((i64, i64), Option<(i64, i64)>) {
        if k == 0 {
            ((0, 0), None)
        } else {
            let outer = (-(1i64 << k) + 1, 1i64 << k);
            let inner = (-(1i64 << (k - 1)) + 1, 1i64 << (k - 1));
            (outer, Some(inner))
        }
    }
}

/// `#{(x, y) ∈ [a₀,a₁] × [b₀,b₁] : |x - y| ≤ r}`.
fn pairs_within(a: (i64, i64), b: (i64, i64), r: i64) -> i128 {
    (a.0..=a.1)
        .map(|x| {
            let lo = (x - r).max(b.0);
            let hi = (x + r).min(b.1);
            (hi - lo + 1).max(0) as i128
        })
        .sum()
}

fn ratio_to_f64(r: Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
