//! Finite weighted graphs wired to a single pinning vertex `ρ`.
//!
//! Vertices of the inner set `Λ` are numbered `0..n`; the wiring point is
//! addressed as `n` wherever a walk or flow needs to name it. The positive
//! edge set `E₊` consists of the inner edges (sorted lexicographically) followed
//! by the pinning edges `{i, ρ}` with `h_i > 0` in vertex order. Every edge is
//! oriented from its smaller endpoint to its larger one, with `ρ` treated as
//! the largest vertex.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;
use std::str::FromStr;

use crate::linalg::{self, Matrix};
use crate::{Error, Result};

pub type VertexId = usize;

/// Largest `|Λ ∪ {ρ}|` accepted by the spanning-tree enumeration oracle.
pub const ENUMERATION_LIMIT: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
    pub weight: f64,
}

/// An edge of `E₊`, oriented `e₊ → e₋`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlusEdge {
    Inner(VertexId, VertexId),
    Pin(VertexId),
}

impl PlusEdge {
    pub fn plus(self) -> VertexId {
        match self {
            PlusEdge::Inner(a, _) | PlusEdge::Pin(a) => a,
        }
    }

    /// `None` stands for the wiring point.
    pub fn minus(self) -> Option<VertexId> {
        match self {
            PlusEdge::Inner(_, b) => Some(b),
            PlusEdge::Pin(_) => None,
        }
    }

    pub fn touches(self, v: VertexId) -> bool {
        match self {
            PlusEdge::Inner(a, b) => a == v || b == v,
            PlusEdge::Pin(a) => a == v,
        }
    }

    /// Sum `u_{e₊} + u_{e₋}` with `u_ρ = 0`.
    pub fn field_sum(self, u: &[f64]) -> f64 {
        match self {
            PlusEdge::Inner(a, b) => u[a] + u[b],
            PlusEdge::Pin(a) => u[a],
        }
    }

    /// Difference `u_{e₊} - u_{e₋}` with `u_ρ = 0`.
    pub fn field_diff(self, u: &[f64]) -> f64 {
        match self {
            PlusEdge::Inner(a, b) => u[a] - u[b],
            PlusEdge::Pin(a) => u[a],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WiredGraph {
    n: usize,
    edges: Vec<Edge>,
    pins: Vec<f64>,
    neighbors: Vec<Vec<(VertexId, f64)>>,
    plus_edges: Vec<PlusEdge>,
    plus_weights: Vec<f64>,
    coords: Option<Vec<Vec<i64>>>,
    pin_tolerance: Option<f64>,
}

impl WiredGraph {
    /// Builds a wired graph on `n` inner vertices.
    ///
    /// Edges with weight exactly zero are dropped; negative or non-finite
    /// weights, self-loops and repeated pairs are rejected, as is a graph in
    /// which some vertex cannot reach `ρ` through positive edges.
    pub fn new<I>(n: usize, edges: I, pins: Vec<f64>) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId, f64)>,
    {
        if pins.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: pins.len(),
            });
        }
        for (i, &h) in pins.iter().enumerate() {
            if !h.is_finite() {
                return Err(Error::NonFinite(format!("pinning of vertex {i}")));
            }
            if h < 0.0 {
                return Err(Error::InvalidGraph(format!("negative pinning {h} at {i}")));
            }
        }

        let mut map: BTreeMap<(VertexId, VertexId), f64> = BTreeMap::new();
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidGraph(format!("edge ({i},{j}) out of range")));
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at {i}")));
            }
            if !w.is_finite() {
                return Err(Error::NonFinite(format!("weight of edge ({i},{j})")));
            }
            if w < 0.0 {
                return Err(Error::InvalidGraph(format!("negative weight on ({i},{j})")));
            }
            let key = (i.min(j), i.max(j));
            if map.insert(key, w).is_some() {
                return Err(Error::InvalidGraph(format!("repeated edge {key:?}")));
            }
        }
        let edges: Vec<Edge> = map
            .into_iter()
            .filter(|&(_, w)| w > 0.0)
            .map(|((a, b), weight)| Edge { a, b, weight })
            .collect();

        let mut neighbors = vec![Vec::new(); n];
        for e in &edges {
            neighbors[e.a].push((e.b, e.weight));
            neighbors[e.b].push((e.a, e.weight));
        }

        let mut plus_edges: Vec<PlusEdge> = edges.iter().map(|e| PlusEdge::Inner(e.a, e.b)).collect();
        let mut plus_weights: Vec<f64> = edges.iter().map(|e| e.weight).collect();
        for (i, &h) in pins.iter().enumerate() {
            if h > 0.0 {
                plus_edges.push(PlusEdge::Pin(i));
                plus_weights.push(h);
            }
        }

        let g = WiredGraph {
            n,
            edges,
            pins,
            neighbors,
            plus_edges,
            plus_weights,
            coords: None,
            pin_tolerance: None,
        };
        let unreachable = g.unreachable_from_rho(|_| true);
        if unreachable > 0 {
            return Err(Error::Disconnected(unreachable));
        }
        Ok(g)
    }

    /// Attaches lattice coordinates to the vertices.
    pub fn with_coords(mut self, coords: Vec<Vec<i64>>) -> Result<Self> {
        if coords.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: coords.len(),
            });
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn with_pin_tolerance(mut self, tol: f64) -> Self {
        self.pin_tolerance = Some(tol);
        self
    }

    /// Number of inner vertices `|Λ|`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Index used for the wiring point in walks and flows.
    pub fn rho(&self) -> VertexId {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn pins(&self) -> &[f64] {
        &self.pins
    }

    pub fn pin(&self, i: VertexId) -> f64 {
        self.pins[i]
    }

    pub fn neighbors(&self, i: VertexId) -> &[(VertexId, f64)] {
        &self.neighbors[i]
    }

    pub fn plus_edges(&self) -> &[PlusEdge] {
        &self.plus_edges
    }

    /// Weights `W_e` aligned with [`plus_edges`](Self::plus_edges).
    pub fn plus_weights(&self) -> &[f64] {
        &self.plus_weights
    }

    pub fn coords(&self) -> Option<&[Vec<i64>]> {
        self.coords.as_deref()
    }

    pub fn vertex_at(&self, point: &[i64]) -> Option<VertexId> {
        self.coords.as_ref()?.iter().position(|c| c.as_slice() == point)
    }

    /// Relative tolerance achieved when the pinnings were summed, if truncated.
    pub fn pin_tolerance(&self) -> Option<f64> {
        self.pin_tolerance
    }

    /// Weight between two vertices, `ρ` included; zero when not adjacent.
    pub fn weight(&self, i: VertexId, j: VertexId) -> f64 {
        let rho = self.rho();
        match (i == rho, j == rho) {
            (true, true) => 0.0,
            (true, false) => self.pins[j],
            (false, true) => self.pins[i],
            (false, false) => self.neighbors[i]
                .iter()
                .find(|&&(k, _)| k == j)
                .map_or(0.0, |&(_, w)| w),
        }
    }

    /// `Σ_k W_ik + h_i`.
    pub fn total_weight(&self, i: VertexId) -> f64 {
        self.neighbors[i].iter().map(|&(_, w)| w).sum::<f64>() + self.pins[i]
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Number of inner vertices that cannot reach `ρ` through edges accepted
    /// by `keep` (indexed like [`plus_edges`](Self::plus_edges)).
    pub(crate) fn unreachable_from_rho(&self, keep: impl Fn(usize) -> bool) -> usize {
        self.reachable_from_rho(keep).iter().filter(|&&r| !r).count()
    }

    pub(crate) fn reachable_from_rho(&self, keep: impl Fn(usize) -> bool) -> Vec<bool> {
        let n = self.n;
        let mut adj = vec![Vec::new(); n + 1];
        for (k, e) in self.plus_edges.iter().enumerate() {
            if !keep(k) {
                continue;
            }
            let a = e.plus();
            let b = e.minus().unwrap_or(n);
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; n + 1];
        let mut queue = VecDeque::from([n]);
        seen[n] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.truncate(n);
        seen
    }

    /// Signed incidence matrix `F` (rows `Λ`, columns `E₊`).
    pub fn incidence(&self) -> IncidenceMatrix {
        let mut f = Matrix::zeros(self.n, self.plus_edges.len());
        for (k, e) in self.plus_edges.iter().enumerate() {
            f[(e.plus(), k)] = 1.0;
            if let Some(b) = e.minus() {
                f[(b, k)] = -1.0;
            }
        }
        IncidenceMatrix(f)
    }

    /// Conductances `𝒲_e = W_e e^{u_{e₊}+u_{e₋}}` on `E₊`.
    pub fn conductances(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_field(u)?;
        Ok(self
            .plus_edges
            .iter()
            .zip(&self.plus_weights)
            .map(|(e, w)| (w.ln() + e.field_sum(u)).exp())
            .collect())
    }

    /// Grounded Laplacian `F diag(c) Fᵗ` for arbitrary conductances on `E₊`.
    pub fn laplacian_with(&self, c: &[f64]) -> Result<LaplacianMatrix> {
        if c.len() != self.plus_edges.len() {
            return Err(Error::DimensionMismatch {
                expected: self.plus_edges.len(),
                got: c.len(),
            });
        }
        let mut d = Matrix::zeros(self.n, self.n);
        for (e, &ce) in self.plus_edges.iter().zip(c) {
            match *e {
                PlusEdge::Inner(a, b) => {
                    d[(a, a)] += ce;
                    d[(b, b)] += ce;
                    d[(a, b)] -= ce;
                    d[(b, a)] -= ce;
                }
                PlusEdge::Pin(a) => d[(a, a)] += ce,
            }
        }
        Ok(LaplacianMatrix(d))
    }

    /// Weighted Laplacian `D(u)` on `G₊`.
    pub fn laplacian(&self, u: &[f64]) -> Result<LaplacianMatrix> {
        self.laplacian_with(&self.conductances(u)?)
    }

    /// The matrix `M = e^{-U} D(u) e^{-U}`: off-diagonal `-W_ij`, diagonal
    /// `Σ_k W_ik e^{u_k-u_i} + h_i e^{-u_i}`. Its entries only involve field
    /// differences, and `ln det D = 2 Σ u_i + ln det M`.
    pub fn conjugated_laplacian(&self, u: &[f64]) -> Result<Matrix> {
        self.check_field(u)?;
        let mut m = Matrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let mut diag = self.pins[i] * (-u[i]).exp();
            for &(k, w) in &self.neighbors[i] {
                m[(i, k)] = -w;
                diag += w * (u[k] - u[i]).exp();
            }
            m[(i, i)] = diag;
        }
        Ok(m)
    }

    /// `ln det D(u)` computed through [`conjugated_laplacian`](Self::conjugated_laplacian).
    pub fn log_det_laplacian(&self, u: &[f64]) -> Result<f64> {
        let m = self.conjugated_laplacian(u)?;
        Ok(2.0 * u.iter().sum::<f64>() + linalg::log_det(&m)?)
    }

    /// `Σ_T Π_{e∈T} W_e e^{u_{e₊}+u_{e₋}}` over spanning trees of `G₊`, by
    /// explicit enumeration. Refused above [`ENUMERATION_LIMIT`] vertices.
    pub fn spanning_tree_sum(&self, u: &[f64]) -> Result<f64> {
        if self.n + 1 > ENUMERATION_LIMIT {
            return Err(Error::LimitExceeded {
                what: "spanning-tree enumeration vertex count",
                value: self.n + 1,
                limit: ENUMERATION_LIMIT,
            });
        }
        let c = self.conductances(u)?;
        let ends: Vec<(usize, usize)> = self
            .plus_edges
            .iter()
            .map(|e| (e.plus(), e.minus().unwrap_or(self.n)))
            .collect();
        let mut total = 0.0;
        enumerate_trees(&ends, &c, 0, &mut UnionFind::new(self.n + 1), 1.0, &mut total);
        Ok(total)
    }

    pub(crate) fn check_field(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: u.len(),
            });
        }
        if let Some(i) = u.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("field value at vertex {i}")));
        }
        Ok(())
    }

    /// Serialises to the line format `vertices n` / `edge i j w` / `pin i h`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "vertices {}", self.n).unwrap();
        for e in &self.edges {
            writeln!(out, "edge {} {} {}", e.a, e.b, e.weight).unwrap();
        }
        for (i, &h) in self.pins.iter().enumerate() {
            if h > 0.0 {
                writeln!(out, "pin {i} {h}").unwrap();
            }
        }
        out
    }
}

impl FromStr for WiredGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        let mut pins: Vec<(usize, f64, usize)> = Vec::new();
        for (lineno, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Parse {
                line: lineno + 1,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let idx = |k: usize| -> Result<usize> {
                fields[k].parse().map_err(|_| bad(&format!("bad vertex id {:?}", fields[k])))
            };
            let num = |k: usize| -> Result<f64> {
                fields[k].parse().map_err(|_| bad(&format!("bad number {:?}", fields[k])))
            };
            match (fields[0], fields.len()) {
                ("vertices", 2) => {
                    if n.is_some() {
                        return Err(bad("duplicate header"));
                    }
                    n = Some(idx(1)?);
                }
                ("edge", 4) => edges.push((idx(1)?, idx(2)?, num(3)?)),
                ("pin", 3) => pins.push((idx(1)?, num(2)?, lineno + 1)),
                _ => return Err(bad(&format!("unrecognised line {line:?}"))),
            }
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            msg: "missing `vertices` header".into(),
        })?;
        let mut h = vec![0.0; n];
        for (i, value, line) in pins {
            if i >= n {
                return Err(Error::Parse {
                    line,
                    msg: format!("pin vertex {i} out of range"),
                });
            }
            h[i] += value;
        }
        WiredGraph::new(n, edges, h)
    }
}

fn enumerate_trees(
    ends: &[(usize, usize)],
    c: &[f64],
    start: usize,
    uf: &mut UnionFind,
    product: f64,
    total: &mut f64,
) {
    if uf.components == 1 {
        *total += product;
        return;
    }
    // Not enough edges left to connect the remaining components.
    if ends.len() - start < uf.components - 1 {
        return;
    }
    for k in start..ends.len() {
        let (a, b) = ends[k];
        if uf.find(a) == uf.find(b) {
            continue;
        }
        let snapshot = uf.clone();
        uf.union(a, b);
        enumerate_trees(ends, c, k + 1, uf, product * c[k], total);
        *uf = snapshot;
    }
}

#[derive(Clone)]
struct UnionFind {
    parent: Vec<usize>,
    components: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            components: n,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
            self.components -= 1;
        }
    }
}

/// Signed incidence matrix of `G₊` with the row of `ρ` removed.
#[derive(Clone, Debug, PartialEq)]
pub struct IncidenceMatrix(pub Matrix);

impl IncidenceMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    /// `F diag(c) Fᵗ`.
    pub fn weighted_gram(&self, c: &[f64]) -> Matrix {
        let mut scaled = self.0.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= c[k];
        }
        &scaled * self.0.transpose()
    }
}

/// Dense symmetric weighted Laplacian on `Λ`, grounded at `ρ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianMatrix(pub Matrix);

impl LaplacianMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn log_det(&self) -> Result<f64> {
        linalg::log_det(&self.0)
    }

    pub fn into_inner(self) -> Matrix {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_vertex() -> WiredGraph {
        WiredGraph::new(2, [(0, 1, 1.0)], vec![2.0, 3.0]).unwrap()
    }

    #[test]
    fn two_vertex_storage() {
        let g = two_vertex();
        assert_eq!(
            g.plus_edges(),
            &[PlusEdge::Inner(0, 1), PlusEdge::Pin(0), PlusEdge::Pin(1)]
        );
        assert_eq!(g.plus_weights(), &[1.0, 2.0, 3.0]);
        assert_eq!(g.weight(0, 2), 2.0);
        assert_eq!(g.weight(1, 0), 1.0);
    }

    #[test]
    fn laplacian_examples() {
        let g = two_vertex();
        let d = g.laplacian(&[0.0, 0.0]).unwrap();
        assert_eq!(d.matrix(), &Matrix::from_row_slice(2, 2, &[3.0, -1.0, -1.0, 4.0]));

        let d = g.laplacian(&[2f64.ln(), 0.0]).unwrap();
        let expected = Matrix::from_row_slice(2, 2, &[6.0, -2.0, -2.0, 5.0]);
        assert!((d.matrix() - expected).abs().max() < 1e-14);

        let single = WiredGraph::new(1, [], vec![1.0]).unwrap();
        assert_eq!(single.laplacian(&[0.0]).unwrap().matrix()[(0, 0)], 1.0);
    }

    #[test]
    fn spanning_tree_examples() {
        let g = two_vertex();
        assert_relative_eq!(g.spanning_tree_sum(&[0.0, 0.0]).unwrap(), 11.0);
        assert_relative_eq!(g.laplacian(&[0.0, 0.0]).unwrap().log_det().unwrap(), 11f64.ln());

        let single = WiredGraph::new(1, [], vec![5.0]).unwrap();
        assert_relative_eq!(single.spanning_tree_sum(&[0.0]).unwrap(), 5.0);

        // Triangle a,b,c plus ρ attached to a: K3 with a pendant edge has 3 spanning trees.
        let tri = WiredGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], vec![1.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(tri.spanning_tree_sum(&[0.0; 3]).unwrap(), 3.0);
        assert_relative_eq!(tri.laplacian(&[0.0; 3]).unwrap().log_det().unwrap(), 3f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn enumeration_limit_enforced() {
        let g = WiredGraph::new(8, (0..7).map(|i| (i, i + 1, 1.0)), vec![1.0; 8]).unwrap();
        assert!(matches!(g.spanning_tree_sum(&[0.0; 8]), Err(Error::LimitExceeded { .. })));
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(matches!(
            WiredGraph::new(2, [(0, 1, 1.0)], vec![0.0, 0.0]),
            Err(Error::Disconnected(2))
        ));
        assert!(matches!(
            WiredGraph::new(2, [], vec![1.0, 0.0]),
            Err(Error::Disconnected(1))
        ));
        assert!(WiredGraph::new(2, [(0, 0, 1.0)], vec![1.0, 1.0]).is_err());
        assert!(WiredGraph::new(2, [(0, 1, 1.0), (1, 0, 2.0)], vec![1.0, 1.0]).is_err());
        assert!(WiredGraph::new(2, [(0, 1, -1.0)], vec![1.0, 1.0]).is_err());
        assert!(WiredGraph::new(1, [], vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn zero_weight_edges_are_dropped() {
        let g = WiredGraph::new(2, [(0, 1, 0.0)], vec![1.0, 1.0]).unwrap();
        assert!(g.edges().is_empty());
        assert_eq!(g.plus_edges().len(), 2);
    }

    #[test]
    fn incidence_columns() {
        let g = two_vertex();
        let f = g.incidence();
        for (k, e) in g.plus_edges().iter().enumerate() {
            let col = f.matrix().column(k);
            let nonzeros = col.iter().filter(|x| **x != 0.0).count();
            let expected = if e.minus().is_some() { 2 } else { 1 };
            assert_eq!(nonzeros, expected);
            if e.minus().is_some() {
                assert_eq!(col.sum(), 0.0);
            }
        }
    }

    #[test]
    fn text_roundtrip() {
        let g = WiredGraph::new(3, [(0, 1, 0.1), (1, 2, 1.0 / 3.0)], vec![2.5, 0.0, 1e-7]).unwrap();
        let text = g.to_text();
        assert!(text.starts_with("vertices 3\n"));
        let back: WiredGraph = text.parse().unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn parse_errors() {
        assert!("edge 0 1 1".parse::<WiredGraph>().is_err());
        assert!("vertices 2\nedge 0 1 x".parse::<WiredGraph>().is_err());
        assert!("vertices 1\npin 3 1".parse::<WiredGraph>().is_err());
        assert!("vertices 1\nfoo".parse::<WiredGraph>().is_err());
    }
}
